//! Direct integration of the full nonlinear neutral system.
//!
//! The neutral term is removed by the substitution
//! `y(t) := x(t) - sum_i w_i g(x(t - s_i))` over the Gauss-Legendre nodes of
//! the neutral interval. Because every node is strictly interior, the state
//! is recovered explicitly from stored history, and the substituted system
//! is retarded:
//!
//! ```text
//! dy/dt = -a x - alpha f( sum_i v_i x(t - r_i) ) - h(x),
//! x(t)  = y(t) + sum_i w_i g(x(t - s_i)).
//! ```
//!
//! Time stepping is classical fourth-order Runge-Kutta on `y` with cubic
//! Hermite lookups of the stored `x` history.

mod history;
mod quadrature;

pub use history::HistoryBuffer;
pub use quadrature::{gauss_legendre, QuadratureRule};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::sup_norm;
use crate::model::SystemSpec;
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error)]
pub enum IntegrateError {
    #[error("history lookup at t = {t} precedes the stored window ({start})")]
    HistoryUnderrun { t: String, start: String },
    #[error("state diverged (sup-norm beyond {bound} at t = {t})")]
    Divergence { t: String, bound: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Initial data: a constant pre-history plus a state perturbation applied at
/// the start instant.
#[derive(Debug, Clone)]
pub struct InitialCondition<T> {
    /// Constant history level for `t <= t0` (one value per component).
    pub base: Vec<T>,
    /// Added to the state at `t0`.
    pub perturbation: Vec<T>,
}

impl<T: Scalar> InitialCondition<T> {
    /// Zero history with an amplitude-`epsilon` kick along `direction`
    /// (normalized here).
    pub fn along_vector(direction: &[T], epsilon: T) -> Self {
        let norm = crate::linalg::norm2(direction);
        let scale = if norm > T::zero() { epsilon / norm } else { T::zero() };
        Self {
            base: vec![T::zero(); direction.len()],
            perturbation: direction.iter().map(|&v| v * scale).collect(),
        }
    }

    /// Zero history with a seeded random perturbation of sup-norm `epsilon`.
    pub fn seeded_random(n: usize, epsilon: T, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let max = raw.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-12);
        Self {
            base: vec![T::zero(); n],
            perturbation: raw
                .iter()
                .map(|&v| T::from_f64_lossy(v / max) * epsilon)
                .collect(),
        }
    }

    pub fn map<F: Fn(&[T]) -> Vec<T>>(&self, f: F) -> Self {
        Self { base: f(&self.base), perturbation: f(&self.perturbation) }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions<T> {
    pub t_end: T,
    pub dt: T,
    pub dt_out: T,
    pub quad_neutral: usize,
    pub quad_retarded: usize,
    pub store_derivatives: bool,
    pub divergence_bound: T,
}

impl<T: Scalar> IntegrateOptions<T> {
    pub fn new(t_end: T) -> Self {
        Self {
            t_end,
            dt: T::from_f64_lossy(5e-3),
            dt_out: T::from_f64_lossy(0.5),
            quad_neutral: 50,
            quad_retarded: 50,
            store_derivatives: true,
            divergence_bound: T::from_f64_lossy(1e6),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryMeta<T> {
    pub alpha: T,
    pub seed: Option<u64>,
    pub quad_neutral: usize,
    pub quad_retarded: usize,
    /// Effective step after clamping to half the smallest quadrature node.
    pub dt: T,
    pub dt_clamped: bool,
    pub dt_out: T,
    /// Leading time span removed by `discard_transient`, if any.
    pub transient_cut: Option<T>,
}

/// Uniformly sampled solution history.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub meta: TrajectoryMeta<T>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn dim(&self) -> usize {
        self.states.first().map(Vec::len).unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_sup_norm(&self) -> T {
        self.states.last().map(|x| sup_norm(x)).unwrap_or(T::zero())
    }

    pub fn max_sup_norm(&self) -> T {
        self.states.iter().map(|x| sup_norm(x)).fold(T::zero(), T::max)
    }

    /// Scalar series of one component across time.
    pub fn component(&self, i: usize) -> Vec<T> {
        self.states.iter().map(|x| x[i]).collect()
    }
}

/// Neutral-term quadrature sum `sum_i w_i g(x(t - s_i))` from stored history.
fn neutral_sum<T: Scalar>(
    t: T,
    history: &HistoryBuffer<T>,
    rule: &QuadratureRule<T>,
    spec: &SystemSpec<T>,
    scratch: &mut [T],
    out: &mut [T],
) -> Result<(), IntegrateError> {
    out.iter_mut().for_each(|v| *v = T::zero());
    for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
        history.value_into(t - s, scratch)?;
        for i in 0..out.len() {
            out[i] = out[i] + w * spec.response_g(scratch[i]);
        }
    }
    Ok(())
}

/// Recovers the physical state from the substituted variable:
/// `x(t) = y(t) + sum_i w_i g(x(t - s_i))`.
pub fn recover_state<T: Scalar>(
    y: &[T],
    t: T,
    history: &HistoryBuffer<T>,
    rule_neutral: &QuadratureRule<T>,
    spec: &SystemSpec<T>,
) -> Result<Vec<T>, IntegrateError> {
    if y.len() != spec.n {
        return Err(IntegrateError::DimensionMismatch { expected: spec.n, got: y.len() });
    }
    let mut scratch = vec![T::zero(); spec.n];
    let mut q = vec![T::zero(); spec.n];
    neutral_sum(t, history, rule_neutral, spec, &mut scratch, &mut q)?;
    Ok(y.iter().zip(&q).map(|(&a, &b)| a + b).collect())
}

/// Right-hand side of the substituted system.
pub fn rhs<T: Scalar>(
    t: T,
    y: &[T],
    history: &HistoryBuffer<T>,
    rule_neutral: &QuadratureRule<T>,
    rule_retarded: &QuadratureRule<T>,
    spec: &SystemSpec<T>,
) -> Result<Vec<T>, IntegrateError> {
    let mut stepper = Stepper::new(spec, rule_neutral, rule_retarded);
    let mut out = vec![T::zero(); spec.n];
    stepper.eval_rhs(t, y, history, &mut out)?;
    Ok(out)
}

/// Scratch-carrying evaluator for the substituted right-hand side.
struct Stepper<'a, T> {
    spec: &'a SystemSpec<T>,
    rule_neutral: &'a QuadratureRule<T>,
    rule_retarded: &'a QuadratureRule<T>,
    lookup: Vec<T>,
    x: Vec<T>,
    integral: Vec<T>,
}

impl<'a, T: Scalar> Stepper<'a, T> {
    fn new(
        spec: &'a SystemSpec<T>,
        rule_neutral: &'a QuadratureRule<T>,
        rule_retarded: &'a QuadratureRule<T>,
    ) -> Self {
        Self {
            spec,
            rule_neutral,
            rule_retarded,
            lookup: vec![T::zero(); spec.n],
            x: vec![T::zero(); spec.n],
            integral: vec![T::zero(); spec.n],
        }
    }

    fn eval_rhs(
        &mut self,
        t: T,
        y: &[T],
        history: &HistoryBuffer<T>,
        out: &mut [T],
    ) -> Result<(), IntegrateError> {
        let n = self.spec.n;
        // x = y + neutral quadrature
        neutral_sum(t, history, self.rule_neutral, self.spec, &mut self.lookup, &mut self.x)?;
        for i in 0..n {
            self.x[i] = self.x[i] + y[i];
        }
        // retarded integral of the raw state
        self.integral.iter_mut().for_each(|v| *v = T::zero());
        for (&s, &w) in self.rule_retarded.nodes.iter().zip(&self.rule_retarded.weights) {
            history.value_into(t - s, &mut self.lookup)?;
            for i in 0..n {
                self.integral[i] = self.integral[i] + w * self.lookup[i];
            }
        }
        let h = self.spec.response_h(&self.x).map_err(|_| IntegrateError::DimensionMismatch {
            expected: n,
            got: self.x.len(),
        })?;
        for i in 0..n {
            out[i] = -self.spec.self_gain * self.x[i]
                - self.spec.alpha * self.spec.response_f(self.integral[i])
                - h[i];
        }
        Ok(())
    }

    /// `dx/dt = dy/dt + sum_i w_i g'(x(t-s_i)) xdot(t-s_i)`.
    fn state_derivative(
        &mut self,
        t: T,
        ydot: &[T],
        history: &HistoryBuffer<T>,
        out: &mut [T],
    ) -> Result<(), IntegrateError> {
        out.copy_from_slice(ydot);
        let n = self.spec.n;
        let mut dbuf = vec![T::zero(); n];
        for (&s, &w) in self.rule_neutral.nodes.iter().zip(&self.rule_neutral.weights) {
            history.value_into(t - s, &mut self.lookup)?;
            history.derivative_into(t - s, &mut dbuf)?;
            for i in 0..n {
                out[i] = out[i] + w * self.spec.g_slope_at(self.lookup[i]) * dbuf[i];
            }
        }
        Ok(())
    }
}

/// Integrates the system from the given initial data up to `t_end`.
///
/// The requested step is clamped to half the smallest quadrature node so
/// every stage lookup lands strictly inside recorded history; the effective
/// step and a clamp flag are recorded in the trajectory metadata.
pub fn integrate<T: Scalar>(
    spec: &SystemSpec<T>,
    initial: &InitialCondition<T>,
    options: &IntegrateOptions<T>,
) -> Result<Trajectory<T>, IntegrateError> {
    integraterun(spec, initial, options, None)
}

/// As `integrate`, recording the seed used for a random perturbation.
pub fn integrate_seeded<T: Scalar>(
    spec: &SystemSpec<T>,
    initial: &InitialCondition<T>,
    options: &IntegrateOptions<T>,
    seed: Option<u64>,
) -> Result<Trajectory<T>, IntegrateError> {
    integraterun(spec, initial, options, seed)
}

fn integraterun<T: Scalar>(
    spec: &SystemSpec<T>,
    initial: &InitialCondition<T>,
    options: &IntegrateOptions<T>,
    seed: Option<u64>,
) -> Result<Trajectory<T>, IntegrateError> {
    let n = spec.n;
    if initial.base.len() != n || initial.perturbation.len() != n {
        return Err(IntegrateError::DimensionMismatch {
            expected: n,
            got: initial.base.len(),
        });
    }
    let rule_neutral = gauss_legendre(options.quad_neutral.max(1), spec.neutral_horizon);
    let rule_retarded = gauss_legendre(options.quad_retarded.max(1), spec.retarded_horizon);
    let s_min = rule_neutral.min_node().min(rule_retarded.min_node());
    let half = T::from_f64_lossy(0.5);
    let dt_cap = s_min * half;
    let dt_clamped = options.dt > dt_cap;
    let dt_requested = if dt_clamped { dt_cap } else { options.dt };
    let steps = (options.t_end / dt_requested).ceil().to_usize().unwrap_or(1).max(1);
    let dt = options.t_end / T::from_usize_lossy(steps);

    let lookback = spec.neutral_horizon.max(spec.retarded_horizon);
    let base = initial.base.clone();
    let mut history = HistoryBuffer::with_history(
        n,
        dt,
        T::zero(),
        lookback,
        move |_| base.clone(),
        options.store_derivatives,
    );

    let x0: Vec<T> =
        initial.base.iter().zip(&initial.perturbation).map(|(&b, &p)| b + p).collect();
    history.replace_latest(x0.clone(), vec![T::zero(); n]);

    let mut stepper = Stepper::new(spec, &rule_neutral, &rule_retarded);

    // y0 = x0 - neutral sum at t = 0 (all lookups are strictly past)
    let mut q = vec![T::zero(); n];
    let mut scratch = vec![T::zero(); n];
    neutral_sum(T::zero(), &history, &rule_neutral, spec, &mut scratch, &mut q)?;
    let mut y: Vec<T> = x0.iter().zip(&q).map(|(&a, &b)| a - b).collect();

    let mut k1 = vec![T::zero(); n];
    stepper.eval_rhs(T::zero(), &y, &history, &mut k1)?;
    let mut xdot0 = vec![T::zero(); n];
    stepper.state_derivative(T::zero(), &k1, &history, &mut xdot0)?;
    history.replace_latest(x0.clone(), xdot0);

    let stride = ((options.dt_out / dt).round().to_usize().unwrap_or(1)).max(1);
    let dt_out = dt * T::from_usize_lossy(stride);
    let mut times = Vec::with_capacity(steps / stride + 2);
    let mut states = Vec::with_capacity(steps / stride + 2);
    times.push(T::zero());
    states.push(x0);

    let mut k2 = vec![T::zero(); n];
    let mut k3 = vec![T::zero(); n];
    let mut k4 = vec![T::zero(); n];
    let mut stage = vec![T::zero(); n];
    let sixth = T::from_f64_lossy(1.0 / 6.0);
    let two = T::from_f64_lossy(2.0);

    for step in 0..steps {
        let t = dt * T::from_usize_lossy(step);
        let t_half = t + dt * half;
        let t_next = dt * T::from_usize_lossy(step + 1);

        for i in 0..n {
            stage[i] = y[i] + dt * half * k1[i];
        }
        stepper.eval_rhs(t_half, &stage, &history, &mut k2)?;
        for i in 0..n {
            stage[i] = y[i] + dt * half * k2[i];
        }
        stepper.eval_rhs(t_half, &stage, &history, &mut k3)?;
        for i in 0..n {
            stage[i] = y[i] + dt * k3[i];
        }
        stepper.eval_rhs(t_next, &stage, &history, &mut k4)?;
        for i in 0..n {
            y[i] = y[i] + dt * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }

        // recover x at the new time, then refresh k1 for the next step
        neutral_sum(t_next, &history, &rule_neutral, spec, &mut scratch, &mut q)?;
        let x_next: Vec<T> = y.iter().zip(&q).map(|(&a, &b)| a + b).collect();
        stepper.eval_rhs(t_next, &y, &history, &mut k1)?;
        let mut xdot = vec![T::zero(); n];
        stepper.state_derivative(t_next, &k1, &history, &mut xdot)?;

        let amplitude = sup_norm(&x_next);
        if !(amplitude <= options.divergence_bound) {
            return Err(IntegrateError::Divergence {
                t: format!("{t_next}"),
                bound: format!("{}", options.divergence_bound),
            });
        }
        history.push(x_next.clone(), xdot);

        if (step + 1) % stride == 0 {
            times.push(t_next);
            states.push(x_next);
        }
    }

    Ok(Trajectory {
        times,
        states,
        meta: TrajectoryMeta {
            alpha: spec.alpha,
            seed,
            quad_neutral: options.quad_neutral,
            quad_retarded: options.quad_retarded,
            dt,
            dt_clamped,
            dt_out,
            transient_cut: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{CouplingConfig, SystemConfig};
    use crate::model::{build_system, NonlinearityKind};

    fn scalar_spec(a: f64, alpha: f64, gamma: f64, kind: NonlinearityKind) -> SystemSpec<f64> {
        SystemSpec {
            n: 1,
            self_gain: a,
            alpha,
            retarded_slope: 0.2,
            neutral_slope: gamma,
            neutral_horizon: 20.0,
            retarded_horizon: 60.0,
            coupling: crate::linalg::Mat::zeros(1, 1),
            saturation_bound: 2.0,
            kind,
            continuous_saturation: false,
        }
    }

    #[test]
    fn recover_state_is_identity_for_linear_gamma_zero() {
        let spec = scalar_spec(0.5, 0.0, 0.0, NonlinearityKind::PureLinear);
        let rule = gauss_legendre(10, spec.neutral_horizon);
        let history =
            HistoryBuffer::with_history(1, 0.01, 0.0, 60.0, |_| vec![0.7], true);
        let x = recover_state(&[1.23], 0.0, &history, &rule, &spec).unwrap();
        assert_eq!(x, vec![1.23]);
    }

    #[test]
    fn recover_state_constant_history_adds_tau_times_g() {
        let spec = scalar_spec(0.5, 0.0, 0.04, NonlinearityKind::PiecewiseLinearSaturation);
        let rule = gauss_legendre(50, spec.neutral_horizon);
        let c = 0.8;
        let history = HistoryBuffer::with_history(1, 0.01, 0.0, 60.0, move |_| vec![c], true);
        let x = recover_state(&[0.0], 0.0, &history, &rule, &spec).unwrap();
        let expected = spec.neutral_horizon * spec.response_g(c);
        assert!((x[0] - expected).abs() < 1e-12, "{} vs {expected}", x[0]);
    }

    #[test]
    fn recover_state_matches_dense_trapezoid_on_sinusoid() {
        let spec = scalar_spec(0.5, 0.0, 0.04, NonlinearityKind::PiecewiseLinearSaturation);
        let rule = gauss_legendre(50, spec.neutral_horizon);
        let f = |t: f64| (0.3 * t).sin() + 0.2 * (0.11 * t).cos();
        let df = |t: f64| 0.3 * (0.3 * t).cos() - 0.022 * (0.11 * t).sin();
        let dt = 0.01;
        let mut history = HistoryBuffer::with_history(1, dt, -70.0, 1.0, |t| vec![f(t)], true);
        let mut t = -70.0;
        history.replace_latest(vec![f(t)], vec![df(t)]);
        while t < 0.0 {
            t += dt;
            history.push(vec![f(t)], vec![df(t)]);
        }
        let x = recover_state(&[0.0], 0.0, &history, &rule, &spec).unwrap();
        // dense trapezoid oracle of int_0^20 g(f(-s)) ds
        let m = 1_000_000;
        let h = spec.neutral_horizon / m as f64;
        let mut acc = 0.0;
        for i in 0..=m {
            let s = i as f64 * h;
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            acc += w * spec.response_g(f(-s));
        }
        acc *= h;
        assert!((x[0] - acc).abs() < 1e-8, "{} vs {acc}", x[0]);
    }

    #[test]
    fn zero_history_is_a_fixed_point() {
        let cfg = SystemConfig {
            n: Some(2),
            a: Some(0.5),
            alpha: Some(0.3),
            b: Some(0.2),
            gamma: Some(0.04),
            tau1: Some(2.0),
            tau2: Some(3.0),
            l_sat: Some(2.0),
            coupling: Some(CouplingConfig::Matrix {
                matrix: vec![vec![0.0, 0.1], vec![0.1, 0.0]],
            }),
            nonlinearity: None,
            continuous_saturation: None,
        };
        let spec = build_system::<f64>(&cfg).unwrap();
        let init = InitialCondition {
            base: vec![0.0, 0.0],
            perturbation: vec![0.0, 0.0],
        };
        let mut opts = IntegrateOptions::new(5.0);
        opts.quad_neutral = 10;
        opts.quad_retarded = 10;
        opts.dt = 0.01;
        let traj = integrate(&spec, &init, &opts).unwrap();
        assert!(traj.states.iter().all(|x| x.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn pure_decay_matches_exponential() {
        // gamma = 0, alpha = 0, C = 0: dx/dt = -a x exactly
        let spec = scalar_spec(0.5, 0.0, 0.0, NonlinearityKind::PureLinear);
        let init = InitialCondition { base: vec![0.0], perturbation: vec![1.0] };
        let mut opts = IntegrateOptions::new(10.0);
        opts.dt = 1e-3;
        opts.dt_out = 0.1;
        opts.quad_neutral = 5;
        opts.quad_retarded = 5;
        let traj = integrate(&spec, &init, &opts).unwrap();
        let last = traj.states.last().unwrap()[0];
        let exact = (-0.5_f64 * 10.0).exp();
        assert!((last - exact).abs() < 1e-6, "{last} vs {exact}");
    }

    #[test]
    fn rhs_is_pure_decay_without_delays() {
        let spec = scalar_spec(0.5, 0.0, 0.0, NonlinearityKind::PureLinear);
        let rule1 = gauss_legendre(5, spec.neutral_horizon);
        let rule2 = gauss_legendre(5, spec.retarded_horizon);
        let history = HistoryBuffer::with_history(1, 0.01, 0.0, 60.0, |_| vec![0.0], true);
        let dydt = rhs(0.0, &[2.0], &history, &rule1, &rule2, &spec).unwrap();
        assert!((dydt[0] + 0.5 * 2.0).abs() < 1e-15);
    }

    #[test]
    fn step_halving_shows_fourth_order() {
        let spec = scalar_spec(0.5, 0.0, 0.0, NonlinearityKind::PureLinear);
        let init = InitialCondition { base: vec![0.0], perturbation: vec![1.0] };
        let exact = (-0.5_f64 * 10.0).exp();
        let mut errors = Vec::new();
        for dt in [0.04, 0.02, 0.01] {
            let mut opts = IntegrateOptions::new(10.0);
            opts.dt = dt;
            opts.dt_out = 10.0;
            opts.quad_neutral = 3;
            opts.quad_retarded = 3;
            let traj = integrate(&spec, &init, &opts).unwrap();
            errors.push((traj.states.last().unwrap()[0] - exact).abs());
        }
        let order1 = (errors[0] / errors[1]).log2();
        let order2 = (errors[1] / errors[2]).log2();
        assert!(order1 >= 3.5, "observed order {order1}");
        assert!(order2 >= 3.5, "observed order {order2}");
    }

    #[test]
    fn divergence_is_flagged() {
        // strong anti-damping: a < 0 blows up from any perturbation
        let mut spec = scalar_spec(-3.0, 0.0, 0.0, NonlinearityKind::PureLinear);
        spec.retarded_slope = 0.2;
        let init = InitialCondition { base: vec![0.0], perturbation: vec![1.0] };
        let mut opts = IntegrateOptions::new(50.0);
        opts.dt = 0.01;
        opts.quad_neutral = 3;
        opts.quad_retarded = 3;
        opts.divergence_bound = 1e3;
        let err = integrate(&spec, &init, &opts).unwrap_err();
        assert!(matches!(err, IntegrateError::Divergence { .. }));
    }

    #[test]
    fn dt_is_clamped_to_half_min_node() {
        let spec = scalar_spec(0.5, 0.0, 0.04, NonlinearityKind::PiecewiseLinearSaturation);
        let init = InitialCondition { base: vec![0.0], perturbation: vec![0.01] };
        let mut opts = IntegrateOptions::new(1.0);
        opts.dt = 0.5; // far above the cap for 50-node quadrature on tau1 = 20
        let traj = integrate(&spec, &init, &opts).unwrap();
        assert!(traj.meta.dt_clamped);
        let rule = gauss_legendre(50, 20.0_f64);
        assert!(traj.meta.dt <= rule.min_node().min(gauss_legendre(50, 60.0).min_node()) / 2.0);
    }

    #[test]
    fn seeded_random_perturbation_is_reproducible() {
        let a = InitialCondition::<f64>::seeded_random(8, 1e-2, 42);
        let b = InitialCondition::<f64>::seeded_random(8, 1e-2, 42);
        let c = InitialCondition::<f64>::seeded_random(8, 1e-2, 43);
        assert_eq!(a.perturbation, b.perturbation);
        assert_ne!(a.perturbation, c.perturbation);
        assert!(crate::linalg::sup_norm(&a.perturbation) <= 1e-2 + 1e-15);
    }
}
