//! Independent cross-checks on the characteristic analysis: complex Newton
//! root tracking and argument-principle root counting. These deliberately
//! avoid the bisection path used by the scanner so the two can be compared.

use num_complex::Complex;

use crate::scalar::Scalar;
use crate::spectrum::{eval_quasipolynomial, quasipolynomial_dlambda, BlockParams};

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("Newton iteration failed to converge from {start} at alpha = {alpha}")]
    NewtonDiverged { start: String, alpha: String },
    #[error("contour passes too close to a root (min |P| = {min_abs})")]
    RootOnContour { min_abs: String },
}

/// Newton's method on `P(alpha, .)` from the given start value.
pub fn newton_root<T: Scalar>(
    params: &BlockParams<T>,
    alpha: T,
    start: Complex<T>,
    tol: T,
    max_iter: usize,
) -> Result<Complex<T>, VerifyError> {
    let mut lambda = start;
    for _ in 0..max_iter {
        let f = eval_quasipolynomial(params, alpha, lambda);
        if f.norm() <= tol {
            return Ok(lambda);
        }
        let df = quasipolynomial_dlambda(params, alpha, lambda);
        if df.norm() == T::zero() {
            break;
        }
        lambda = lambda - f / df;
    }
    let f = eval_quasipolynomial(params, alpha, lambda);
    if f.norm() <= tol {
        Ok(lambda)
    } else {
        Err(VerifyError::NewtonDiverged {
            start: format!("{start}"),
            alpha: format!("{alpha}"),
        })
    }
}

/// Centered finite difference of `Re lambda(alpha)` for the root tracked by
/// Newton continuation from `i beta` at `alpha - delta` and `alpha + delta`.
pub fn u_prime_finite_difference<T: Scalar>(
    params: &BlockParams<T>,
    alpha: T,
    beta: T,
    delta: T,
) -> Result<T, VerifyError> {
    let start = Complex::new(T::zero(), beta);
    let tol = T::from_f64_lossy(1e-13);
    let plus = newton_root(params, alpha + delta, start, tol, 100)?;
    let minus = newton_root(params, alpha - delta, start, tol, 100)?;
    Ok((plus.re - minus.re) / (delta + delta))
}

/// Counts roots of `P(alpha, .)` inside the open axis-aligned box
/// `(re_lo, re_hi) x (im_lo, im_hi)` by the winding number of `P` along the
/// boundary, sampled at `samples_per_edge` points per edge.
pub fn count_roots_in_box<T: Scalar>(
    params: &BlockParams<T>,
    alpha: T,
    re: (T, T),
    im: (T, T),
    samples_per_edge: usize,
) -> Result<i64, VerifyError> {
    let corners = [
        Complex::new(re.0, im.0),
        Complex::new(re.1, im.0),
        Complex::new(re.1, im.1),
        Complex::new(re.0, im.1),
    ];
    let mut total = T::zero();
    let mut prev_arg: Option<T> = None;
    let mut min_abs = T::infinity();
    let n = samples_per_edge.max(8);
    let pi = T::pi();
    let two_pi = T::two_pi();
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        for k in 0..n {
            let t = T::from_usize_lossy(k) / T::from_usize_lossy(n);
            let z = Complex::new(a.re + (b.re - a.re) * t, a.im + (b.im - a.im) * t);
            let v = eval_quasipolynomial(params, alpha, z);
            min_abs = min_abs.min(v.norm());
            let arg = v.im.atan2(v.re);
            if let Some(prev) = prev_arg {
                let mut d = arg - prev;
                while d > pi {
                    d = d - two_pi;
                }
                while d < -pi {
                    d = d + two_pi;
                }
                total = total + d;
            }
            prev_arg = Some(arg);
        }
    }
    // close the contour
    let v = eval_quasipolynomial(params, alpha, corners[0]);
    let arg = v.im.atan2(v.re);
    let mut d = arg - prev_arg.unwrap();
    while d > pi {
        d = d - two_pi;
    }
    while d < -pi {
        d = d + two_pi;
    }
    total = total + d;

    if min_abs < T::from_f64_lossy(1e-12) {
        return Err(VerifyError::RootOnContour { min_abs: format!("{min_abs}") });
    }
    let winding = total / two_pi;
    Ok(winding.round().to_i64().unwrap_or(0))
}
