//! The system under study: a network of agents with a neutral distributed
//! delay on the decision history and a retarded distributed delay on the
//! state history,
//!
//! ```text
//! d/dt [ x - int_0^tau1 g(x(t-s)) ds ] = -a x - alpha f( int_0^tau2 x(t-s) ds ) - h(x)
//! ```
//!
//! with odd componentwise responses `g`, `f` and an equivariant coupling
//! `h(x) = L(Cx)`.

use crate::config::{CouplingConfig, SystemConfig};
use crate::linalg::Mat;
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("missing required field `{field}`")]
    MissingField { field: String },
    #[error("invariant violation: `{field}` = {value} must satisfy {constraint}")]
    InvariantViolation { field: String, constraint: String, value: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinearityKind {
    /// `g(x) = L(gamma x)`, `f(y) = L(b y)`, `h(x) = L(Cx)` componentwise,
    /// with the piecewise-linear saturation `L`.
    PiecewiseLinearSaturation,
    /// Identity-composed linear responses.
    PureLinear,
}

/// Full parameterization of the delayed multi-agent system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec<T> {
    /// Number of agents (state dimension).
    pub n: usize,
    /// Self-regulation gain `a`.
    pub self_gain: T,
    /// Bifurcation parameter `alpha`.
    pub alpha: T,
    /// Slope at 0 of the retarded response, `b = f'(0)`.
    pub retarded_slope: T,
    /// Slope at 0 of the neutral response, `gamma = g'(0)`.
    pub neutral_slope: T,
    /// Neutral memory horizon `tau1`.
    pub neutral_horizon: T,
    /// Retarded memory horizon `tau2`.
    pub retarded_horizon: T,
    /// Coupling matrix `C = Dh(0)`.
    pub coupling: Mat<T>,
    /// Saturation bound of the piecewise-linear response.
    pub saturation_bound: T,
    pub kind: NonlinearityKind,
    /// Replace the printed saturation (linear on (-1,1), clamped outside)
    /// with the continuous clamp to +-L_sat.
    pub continuous_saturation: bool,
}

pub const COUPLING_SYMMETRY_TOL: f64 = 1e-12;

impl<T: Scalar> SystemSpec<T> {
    /// Validates the structural invariants that are hard preconditions for
    /// the rest of the pipeline.
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |field: &str, constraint: &str, value: String| {
            Err(ModelError::InvariantViolation {
                field: field.into(),
                constraint: constraint.into(),
                value,
            })
        };
        if self.n == 0 {
            return bad("n", "n >= 1", self.n.to_string());
        }
        if !(self.neutral_horizon > T::zero()) {
            return bad("tau1", "tau1 > 0", format!("{}", self.neutral_horizon));
        }
        if !(self.retarded_horizon > T::zero()) {
            return bad("tau2", "tau2 > 0", format!("{}", self.retarded_horizon));
        }
        if !(self.neutral_slope > T::zero() && self.neutral_slope < T::one()) {
            return bad("gamma", "0 < gamma < 1", format!("{}", self.neutral_slope));
        }
        if self.retarded_slope == T::zero() {
            return bad("b", "b != 0", format!("{}", self.retarded_slope));
        }
        if !(self.saturation_bound > T::zero()) {
            return bad("l_sat", "l_sat > 0", format!("{}", self.saturation_bound));
        }
        if self.coupling.nrows() != self.n || self.coupling.ncols() != self.n {
            return Err(ModelError::DimensionMismatch {
                expected: self.n,
                got: self.coupling.nrows(),
            });
        }
        if !self.coupling.is_symmetric(T::from_f64_lossy(COUPLING_SYMMETRY_TOL)) {
            return bad("C", "symmetric to 1e-12", "asymmetric entries".into());
        }
        Ok(())
    }

    /// The scalar saturation `L`: identity on (-1, 1), clamped to the
    /// saturation bound outside; the continuous variant clamps at the bound
    /// itself.
    pub fn saturate(&self, x: T) -> T {
        let bound = self.saturation_bound;
        if self.continuous_saturation {
            x.min(bound).max(-bound)
        } else if x >= T::one() {
            bound
        } else if x <= -T::one() {
            -bound
        } else {
            x
        }
    }

    /// Neutral response `g` applied to one component.
    pub fn response_g(&self, x: T) -> T {
        match self.kind {
            NonlinearityKind::PiecewiseLinearSaturation => self.saturate(self.neutral_slope * x),
            NonlinearityKind::PureLinear => self.neutral_slope * x,
        }
    }

    /// Retarded response `f` applied to one component of the delay integral.
    pub fn response_f(&self, y: T) -> T {
        match self.kind {
            NonlinearityKind::PiecewiseLinearSaturation => self.saturate(self.retarded_slope * y),
            NonlinearityKind::PureLinear => self.retarded_slope * y,
        }
    }

    /// Coupling response `h(x) = L(Cx)` (or `Cx` for the linear kind).
    pub fn response_h(&self, x: &[T]) -> Result<Vec<T>, ModelError> {
        if x.len() != self.n {
            return Err(ModelError::DimensionMismatch { expected: self.n, got: x.len() });
        }
        let cx = self.coupling.matvec(x);
        Ok(match self.kind {
            NonlinearityKind::PiecewiseLinearSaturation => {
                cx.into_iter().map(|v| self.saturate(v)).collect()
            }
            NonlinearityKind::PureLinear => cx,
        })
    }

    /// Derivative of `g` at the given state, used when reconstructing the
    /// state derivative from stored history.
    pub fn g_slope_at(&self, x: T) -> T {
        match self.kind {
            NonlinearityKind::PureLinear => self.neutral_slope,
            NonlinearityKind::PiecewiseLinearSaturation => {
                let arg = self.neutral_slope * x;
                let inside = if self.continuous_saturation {
                    arg.abs() < self.saturation_bound
                } else {
                    arg.abs() < T::one()
                };
                if inside {
                    self.neutral_slope
                } else {
                    T::zero()
                }
            }
        }
    }
}

/// Componentwise evaluation of the three responses on a state vector.
#[derive(Debug, Clone)]
pub struct Responses<T> {
    pub g: Vec<T>,
    pub f: Vec<T>,
    pub h: Vec<T>,
}

pub fn eval_responses<T: Scalar>(
    spec: &SystemSpec<T>,
    x: &[T],
) -> Result<Responses<T>, ModelError> {
    if x.len() != spec.n {
        return Err(ModelError::DimensionMismatch { expected: spec.n, got: x.len() });
    }
    Ok(Responses {
        g: x.iter().map(|&v| spec.response_g(v)).collect(),
        f: x.iter().map(|&v| spec.response_f(v)).collect(),
        h: spec.response_h(x)?,
    })
}

/// Builds a validated `SystemSpec` from a parsed configuration block.
pub fn build_system<T: Scalar>(config: &SystemConfig) -> Result<SystemSpec<T>, ModelError> {
    fn need<V: Copy>(v: &Option<V>, field: &str) -> Result<V, ModelError> {
        v.ok_or_else(|| ModelError::MissingField { field: format!("system.{field}") })
    }
    let n = need(&config.n, "n")?;
    let kind = match config.nonlinearity.as_deref() {
        None | Some("piecewise_linear_saturation") => NonlinearityKind::PiecewiseLinearSaturation,
        Some("pure_linear") => NonlinearityKind::PureLinear,
        Some(other) => {
            return Err(ModelError::InvariantViolation {
                field: "nonlinearity".into(),
                constraint: "piecewise_linear_saturation | pure_linear".into(),
                value: other.into(),
            })
        }
    };
    let coupling = match &config.coupling {
        None => return Err(ModelError::MissingField { field: "system.coupling".into() }),
        Some(c) => coupling_matrix::<T>(c, n)?,
    };
    let spec = SystemSpec {
        n,
        self_gain: T::from_f64_lossy(need(&config.a, "a")?),
        alpha: T::from_f64_lossy(config.alpha.unwrap_or(0.0)),
        retarded_slope: T::from_f64_lossy(need(&config.b, "b")?),
        neutral_slope: T::from_f64_lossy(need(&config.gamma, "gamma")?),
        neutral_horizon: T::from_f64_lossy(need(&config.tau1, "tau1")?),
        retarded_horizon: T::from_f64_lossy(need(&config.tau2, "tau2")?),
        coupling,
        saturation_bound: T::from_f64_lossy(config.l_sat.unwrap_or(1.0)),
        kind,
        continuous_saturation: config.continuous_saturation.unwrap_or(false),
    };
    spec.validate()?;
    Ok(spec)
}

fn coupling_matrix<T: Scalar>(config: &CouplingConfig, n: usize) -> Result<Mat<T>, ModelError> {
    match config {
        CouplingConfig::Matrix { matrix } => {
            if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
                return Err(ModelError::DimensionMismatch {
                    expected: n,
                    got: matrix.len(),
                });
            }
            let mut m = Mat::zeros(n, n);
            for (i, row) in matrix.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    m[(i, j)] = T::from_f64_lossy(v);
                }
            }
            Ok(m)
        }
        CouplingConfig::Adjacency { edges, face_diagonals, space_diagonals } => {
            let mut m = Mat::zeros(n, n);
            let lists = [Some(edges), face_diagonals.as_ref(), space_diagonals.as_ref()];
            for list in lists.into_iter().flatten() {
                let w = T::from_f64_lossy(list.weight);
                for &(i, j) in &list.pairs {
                    if i == 0 || j == 0 || i > n || j > n {
                        return Err(ModelError::InvariantViolation {
                            field: "coupling.pairs".into(),
                            constraint: format!("vertex indices in 1..={n}"),
                            value: format!("({i}, {j})"),
                        });
                    }
                    m[(i - 1, j - 1)] = w;
                    m[(j - 1, i - 1)] = w;
                }
            }
            Ok(m)
        }
    }
}

/// One named inequality check with its measured value.
#[derive(Debug, Clone)]
pub struct ConditionCheck<T> {
    pub name: String,
    pub passed: bool,
    pub measured: T,
    pub description: String,
}

#[derive(Debug, Clone, Default)]
pub struct ConditionReport<T> {
    pub checks: Vec<ConditionCheck<T>>,
}

impl<T: Scalar> ConditionReport<T> {
    pub fn push(&mut self, name: &str, passed: bool, measured: T, description: &str) {
        self.checks.push(ConditionCheck {
            name: name.into(),
            passed,
            measured,
            description: description.into(),
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&ConditionCheck<T>> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks the structural hypotheses on the responses and the coupling:
/// oddness (sampled), `b != 0`, `0 < gamma < 1`, symmetry of `C`, and the
/// Lipschitz constant of `g`.
pub fn validate_structural<T: Scalar>(spec: &SystemSpec<T>) -> ConditionReport<T> {
    let mut report = ConditionReport::default();

    // oddness of the scalar responses on a sample grid
    let mut odd_defect = T::zero();
    let samples = 201;
    let span = T::from_f64_lossy(3.0) * spec.saturation_bound.max(T::one());
    for k in 0..samples {
        let t = T::from_usize_lossy(k) / T::from_usize_lossy(samples - 1);
        let x = (t + t - T::one()) * span;
        odd_defect = odd_defect
            .max((spec.response_g(-x) + spec.response_g(x)).abs())
            .max((spec.response_f(-x) + spec.response_f(x)).abs())
            .max((spec.saturate(-x) + spec.saturate(x)).abs());
    }
    report.push("C1_odd", odd_defect == T::zero(), odd_defect, "responses odd on sample grid");

    report.push(
        "C2a_b_nonzero",
        spec.retarded_slope != T::zero(),
        spec.retarded_slope,
        "b = f'(0) nonzero",
    );
    report.push(
        "C2b_gamma",
        spec.neutral_slope > T::zero() && spec.neutral_slope < T::one(),
        spec.neutral_slope,
        "0 < gamma < 1",
    );

    let mut symmetry_defect = T::zero();
    for i in 0..spec.coupling.nrows() {
        for j in (i + 1)..spec.coupling.ncols() {
            symmetry_defect =
                symmetry_defect.max((spec.coupling[(i, j)] - spec.coupling[(j, i)]).abs());
        }
    }
    report.push(
        "C2c_C_symmetric",
        symmetry_defect <= T::from_f64_lossy(COUPLING_SYMMETRY_TOL),
        symmetry_defect,
        "coupling matrix symmetric (defect vs 1e-12)",
    );

    // kappa-Lipschitz constant of g: the slope of the linear regime
    let kappa = spec.neutral_slope.abs();
    report.push("C3_lipschitz", kappa < T::one(), kappa, "g is kappa-Lipschitz with kappa < 1");
    report
}

/// Checks the hypotheses of the consensus-stability theorem:
/// `0 < gamma tau1 <= 1`, `b > 0` and every block gain positive.
pub fn validate_stability_hypotheses<T: Scalar>(
    spec: &SystemSpec<T>,
    shifted_gains: &[T],
) -> ConditionReport<T> {
    let mut report = ConditionReport::default();
    let gt = spec.neutral_slope * spec.neutral_horizon;
    report.push("gamma_tau1", gt > T::zero() && gt <= T::one(), gt, "0 < gamma tau1 <= 1");
    report.push("b_positive", spec.retarded_slope > T::zero(), spec.retarded_slope, "b > 0");
    let min_gain = shifted_gains.iter().copied().fold(T::infinity(), T::min);
    report.push("min_aj_positive", min_gain > T::zero(), min_gain, "a_j > 0 for all blocks");
    report
}
