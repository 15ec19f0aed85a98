//! Characteristic analysis of the linearized system on one isotypic block:
//! critical-point location, transversality, crossing numbers, the stability
//! interval of the consensus equilibrium, and the branch-unboundedness
//! criterion.
//!
//! On a block with gain `a_j` the characteristic quasipolynomial is
//!
//! ```text
//! P(alpha, lambda) = lambda^2 + gamma (e^{-lambda tau1} - 1) lambda
//!                    + a_j lambda - alpha b (e^{-lambda tau2} - 1)
//! ```
//!
//! Purely imaginary roots `lambda = i beta` satisfy a pair of real relations:
//! `alpha` is determined by `beta`, and `beta` solves the transcendental
//! fixed-point problem `beta = phi(beta)`.

use num_complex::Complex;

use crate::config::ScanConfig;
use crate::model::{validate_stability_hypotheses, ConditionReport, SystemSpec};
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error)]
pub enum SpectrumError {
    #[error("sin(beta tau2) vanishes at beta = {beta}; the alpha/phi relations are singular there")]
    SingularPoint { beta: String },
    #[error("degenerate crossing: p^2 + q^2 vanishes, the root derivative is undefined")]
    DegenerateCrossing,
    #[error("no critical points found in the scanned beta range")]
    NoCriticalPointsInRange,
}

/// Parameters of the characteristic equation on one isotypic block.
#[derive(Debug, Clone, Copy)]
pub struct BlockParams<T> {
    pub gamma: T,
    pub tau1: T,
    pub tau2: T,
    pub b: T,
    /// Shifted gain `a_j = a + mu_j`.
    pub gain: T,
}

impl<T: Scalar> BlockParams<T> {
    pub fn new(spec: &SystemSpec<T>, gain: T) -> Self {
        Self {
            gamma: spec.neutral_slope,
            tau1: spec.neutral_horizon,
            tau2: spec.retarded_horizon,
            b: spec.retarded_slope,
            gain,
        }
    }
}

/// `P(alpha, lambda)` on the block.
pub fn eval_quasipolynomial<T: Scalar>(
    params: &BlockParams<T>,
    alpha: T,
    lambda: Complex<T>,
) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    let e1 = (-lambda * params.tau1).exp();
    let e2 = (-lambda * params.tau2).exp();
    lambda * lambda
        + (e1 - one) * lambda * params.gamma
        + lambda * params.gain
        - (e2 - one) * (alpha * params.b)
}

/// `d P / d lambda`, used by the root-tracking verifier.
pub fn quasipolynomial_dlambda<T: Scalar>(
    params: &BlockParams<T>,
    alpha: T,
    lambda: Complex<T>,
) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    let e1 = (-lambda * params.tau1).exp();
    let e2 = (-lambda * params.tau2).exp();
    let two = T::from_f64_lossy(2.0);
    lambda * two + (e1 - one) * params.gamma - e1 * lambda * (params.gamma * params.tau1)
        + Complex::new(params.gain, T::zero())
        + e2 * (alpha * params.b * params.tau2)
}

const SINGULAR_SIN_TOL: f64 = 1e-14;

/// Fixed-point function for the limit-frequency relation: roots of
/// `beta = phi(beta)` are the imaginary parts of purely imaginary
/// characteristic roots.
pub fn phi<T: Scalar>(params: &BlockParams<T>, beta: T) -> Result<T, SpectrumError> {
    let s2 = (beta * params.tau2).sin();
    if s2.abs() < T::from_f64_lossy(SINGULAR_SIN_TOL) {
        return Err(SpectrumError::SingularPoint { beta: format!("{beta}") });
    }
    let c2 = (beta * params.tau2).cos();
    let numerator = params.gamma * ((beta * params.tau1).cos() - T::one()) + params.gain;
    Ok(params.gamma * (beta * params.tau1).sin() + numerator * (c2 - T::one()) / s2)
}

/// The critical `alpha` paired with a limit frequency `beta`.
pub fn alpha_of_beta<T: Scalar>(params: &BlockParams<T>, beta: T) -> Result<T, SpectrumError> {
    let s2 = (beta * params.tau2).sin();
    if s2.abs() < T::from_f64_lossy(SINGULAR_SIN_TOL) {
        return Err(SpectrumError::SingularPoint { beta: format!("{beta}") });
    }
    let numerator = params.gamma * ((beta * params.tau1).cos() - T::one()) + params.gain;
    Ok(-beta * numerator / (params.b * s2))
}

/// Intermediate quantities of the crossing-speed computation at a purely
/// imaginary root: the linear system `u' p + v' q = b(cos(beta tau2) - 1)`,
/// `-u' q + v' p = b sin(beta tau2)` solved for `u' = d(Re lambda)/d alpha`.
#[derive(Debug, Clone, Copy)]
pub struct Transversality<T> {
    pub p: T,
    pub q: T,
    pub rho: T,
    pub u_prime: T,
}

const DEGENERATE_PQ_TOL: f64 = 1e-14;

pub fn transversality<T: Scalar>(
    params: &BlockParams<T>,
    alpha: T,
    beta: T,
) -> Result<Transversality<T>, SpectrumError> {
    let (g, t1, t2, b) = (params.gamma, params.tau1, params.tau2, params.b);
    let (s1, c1) = (beta * t1).sin_cos();
    let (s2, c2) = (beta * t2).sin_cos();
    let two = T::from_f64_lossy(2.0);
    let p = g * (c1 - T::one()) + params.gain - g * beta * t1 * s1 + alpha * b * t2 * c2;
    let q = g * s1 + g * beta * t1 * c1 + alpha * b * t2 * s2 - two * beta;
    let rho = p * b * (c2 - T::one()) + q * b * s2;
    let denom = p * p + q * q;
    if denom < T::from_f64_lossy(DEGENERATE_PQ_TOL) {
        return Err(SpectrumError::DegenerateCrossing);
    }
    Ok(Transversality { p, q, rho, u_prime: rho / denom })
}

/// Net count of characteristic roots crossing the imaginary axis as `alpha`
/// passes the critical value: `-sign(u') * m_j` when the crossing speed is
/// nonzero.
pub fn crossing_number<T: Scalar>(
    u_prime: T,
    multiplicity: usize,
) -> Result<i64, SpectrumError> {
    if u_prime == T::zero() {
        return Err(SpectrumError::DegenerateCrossing);
    }
    let m = multiplicity as i64;
    Ok(if u_prime > T::zero() { -m } else { m })
}

/// One located center `(alpha, beta)` with its diagnostics.
#[derive(Debug, Clone)]
pub struct CriticalPoint<T> {
    /// Isotypic component index.
    pub component: usize,
    /// 1-based position along the branch, ordered by `beta`.
    pub ordinal: usize,
    pub alpha: T,
    pub beta: T,
    /// `|P(alpha, i beta)|` after refinement.
    pub residual: T,
    pub trans: Transversality<T>,
    /// `None` when the crossing is degenerate (`u' = 0`).
    pub crossing_number: Option<i64>,
}

impl<T: Scalar> CriticalPoint<T> {
    /// Tolerance the residual is held to: `1e-10 (1 + |alpha| + beta^2)`.
    pub fn residual_bound(alpha: T, beta: T) -> T {
        T::from_f64_lossy(1e-10) * (T::one() + alpha.abs() + beta * beta)
    }
}

/// Scan controls for `find_critical_points`, in the spirit of the config
/// block of the same name.
#[derive(Debug, Clone, Copy)]
pub struct ScanOptions<T> {
    pub beta_min: T,
    pub beta_max: T,
    pub grid_divisions: usize,
    pub exclusion_half_width: T,
    pub refine_tol: T,
}

impl<T: Scalar> ScanOptions<T> {
    pub fn new(beta_max: T) -> Self {
        Self {
            beta_min: T::from_f64_lossy(1e-4),
            beta_max,
            grid_divisions: 200,
            exclusion_half_width: T::from_f64_lossy(1e-9),
            refine_tol: T::from_f64_lossy(1e-12),
        }
    }

    pub fn from_config(config: &ScanConfig) -> Self {
        Self {
            beta_min: T::from_f64_lossy(config.beta_min),
            beta_max: T::from_f64_lossy(config.beta_max),
            grid_divisions: config.grid_divisions.max(1),
            exclusion_half_width: T::from_f64_lossy(config.exclusion_half_width),
            refine_tol: T::from_f64_lossy(config.refine_tol),
        }
    }
}

/// Scans `beta` for sign changes of `beta - phi(beta)`, avoiding the poles at
/// `sin(beta tau2) = 0`, refines each bracket by bisection, and keeps roots
/// with positive critical `alpha`. Results are sorted by `beta`; every point
/// satisfies the residual bound.
pub fn find_critical_points<T: Scalar>(
    params: &BlockParams<T>,
    multiplicity: usize,
    component: usize,
    scan: &ScanOptions<T>,
) -> Vec<CriticalPoint<T>> {
    let mut points = Vec::new();
    if scan.beta_max <= scan.beta_min {
        return points;
    }
    let step = (T::two_pi() / params.tau2) / T::from_usize_lossy(scan.grid_divisions);
    let pole_spacing = T::pi() / params.tau2;

    // interval [lo, hi] is excluded when it meets a window around k pi / tau2
    let excluded = |lo: T, hi: T| {
        let r = scan.exclusion_half_width;
        let k_lo = ((lo - r) / pole_spacing).ceil();
        let k_hi = ((hi + r) / pole_spacing).floor();
        k_hi >= k_lo
    };

    let gap = |beta: T| phi(params, beta).map(|v| beta - v);

    let mut lo = scan.beta_min;
    let mut g_lo = gap(lo);
    let mut k = 1usize;
    loop {
        let hi = (scan.beta_min + step * T::from_usize_lossy(k)).min(scan.beta_max);
        if excluded(lo, hi) {
            lo = hi;
            g_lo = gap(lo);
        } else {
            let g_hi = gap(hi);
            if let (Ok(a), Ok(bv)) = (&g_lo, &g_hi) {
                if *a == T::zero() || a.signum() != bv.signum() {
                    if let Some(point) =
                        refine_root(params, multiplicity, component, lo, hi, *a, scan.refine_tol)
                    {
                        points.push(point);
                    }
                }
            }
            lo = hi;
            g_lo = g_hi;
        }
        if lo >= scan.beta_max {
            break;
        }
        k += 1;
    }

    points.sort_by(|a, b| a.beta.partial_cmp(&b.beta).unwrap_or(std::cmp::Ordering::Equal));
    for (i, p) in points.iter_mut().enumerate() {
        p.ordinal = i + 1;
    }
    points
}

fn refine_root<T: Scalar>(
    params: &BlockParams<T>,
    multiplicity: usize,
    component: usize,
    mut lo: T,
    mut hi: T,
    mut g_lo: T,
    tol: T,
) -> Option<CriticalPoint<T>> {
    let mut best = lo;
    let mut best_gap = g_lo.abs();
    for _ in 0..200 {
        let mid = (lo + hi) / T::from_f64_lossy(2.0);
        if mid <= lo || mid >= hi {
            break; // interval at floating-point resolution
        }
        let g_mid = phi(params, mid).map(|v| mid - v).ok()?;
        if g_mid.abs() < best_gap {
            best = mid;
            best_gap = g_mid.abs();
        }
        if g_mid == T::zero() || g_mid.abs() <= tol && (hi - lo) <= tol {
            break;
        }
        if g_lo.signum() == g_mid.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    if best_gap > tol {
        return None;
    }
    let beta = best;
    let alpha = alpha_of_beta(params, beta).ok()?;
    if alpha <= T::zero() {
        return None;
    }
    let residual =
        eval_quasipolynomial(params, alpha, Complex::new(T::zero(), beta)).norm();
    if residual > CriticalPoint::residual_bound(alpha, beta) {
        return None;
    }
    let trans = transversality(params, alpha, beta).ok()?;
    let crossing = crossing_number(trans.u_prime, multiplicity).ok();
    Some(CriticalPoint {
        component,
        ordinal: 0,
        alpha,
        beta,
        residual,
        trans,
        crossing_number: crossing,
    })
}

/// Both sides of the branch-unboundedness inequality
/// `|gamma (tau1 - tau2)| < |tau2 (gamma - a_j) - 2|`.
#[derive(Debug, Clone, Copy)]
pub struct UnboundedCriterion<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

pub fn unbounded_criterion<T: Scalar>(params: &BlockParams<T>) -> UnboundedCriterion<T> {
    let lhs = (params.gamma * (params.tau1 - params.tau2)).abs();
    let rhs = (params.tau2 * (params.gamma - params.gain) - T::from_f64_lossy(2.0)).abs();
    UnboundedCriterion { lhs, rhs, holds: lhs < rhs }
}

/// Stability conclusion for the consensus equilibrium.
#[derive(Debug, Clone)]
pub struct StabilityVerdict<T> {
    /// Smallest positive critical `alpha` over all scanned components.
    pub alpha0: T,
    /// Component and limit frequency where it occurs.
    pub component: usize,
    pub beta0: T,
    pub hypotheses: ConditionReport<T>,
    /// `(0, alpha0)` when every hypothesis holds; `None` otherwise.
    pub stable_interval: Option<(T, T)>,
    /// Steady-state bifurcation ruled out, both analytically
    /// (`b > 0`, `min a_j > 0`, `gamma tau1 <= 1`) and by the numeric scan of
    /// `r(u) = u + gamma e^{-u tau1} - gamma`.
    pub steady_state_excluded: bool,
    /// Measured scan values: min of `r(u) + min_j a_j` and max of
    /// `alpha0 b (e^{-u tau2} - 1)/u` over the scan grid.
    pub scan_min_lhs: T,
    pub scan_max_rhs: T,
}

/// Aggregates per-component critical points into the overall verdict.
///
/// The numeric scan evaluates `u` on `grid_points` points of `(0, u_max]`.
pub fn stability_interval<T: Scalar>(
    spec: &SystemSpec<T>,
    gains: &[T],
    points: &[CriticalPoint<T>],
    u_max: T,
    grid_points: usize,
) -> Result<StabilityVerdict<T>, SpectrumError> {
    let first = points
        .iter()
        .min_by(|a, b| a.alpha.partial_cmp(&b.alpha).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or(SpectrumError::NoCriticalPointsInRange)?;
    let hypotheses = validate_stability_hypotheses(spec, gains);

    let min_gain = gains.iter().copied().fold(T::infinity(), T::min);
    let gamma = spec.neutral_slope;
    let tau1 = spec.neutral_horizon;
    let tau2 = spec.retarded_horizon;
    let alpha0 = first.alpha;
    let mut scan_min_lhs = T::infinity();
    let mut scan_max_rhs = T::neg_infinity();
    let m = grid_points.max(2);
    for k in 1..=m {
        let u = u_max * T::from_usize_lossy(k) / T::from_usize_lossy(m);
        let r = u + gamma * (-u * tau1).exp() - gamma;
        scan_min_lhs = scan_min_lhs.min(r + min_gain);
        let rhs = alpha0 * spec.retarded_slope * ((-u * tau2).exp() - T::one()) / u;
        scan_max_rhs = scan_max_rhs.max(rhs);
    }
    let scan_ok = scan_min_lhs > T::zero() && scan_max_rhs < T::zero();
    let steady_state_excluded = hypotheses.all_passed() && scan_ok;

    Ok(StabilityVerdict {
        alpha0,
        component: first.component,
        beta0: first.beta,
        stable_interval: if hypotheses.all_passed() && steady_state_excluded {
            Some((T::zero(), alpha0))
        } else {
            None
        },
        hypotheses,
        steady_state_excluded,
        scan_min_lhs,
        scan_max_rhs,
    })
}
