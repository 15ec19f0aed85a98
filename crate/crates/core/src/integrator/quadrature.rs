//! Gauss-Legendre quadrature mapped onto a delay interval `[0, tau]`.

use crate::scalar::Scalar;

/// Nodes and weights for `int_0^tau`; nodes are strictly interior and
/// increasing, weights sum to `tau`.
#[derive(Debug, Clone)]
pub struct QuadratureRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    pub tau: T,
}

impl<T: Scalar> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Smallest node: the most recent past instant the rule touches.
    pub fn min_node(&self) -> T {
        self.nodes[0]
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |s, (&x, &w)| s + w * f(x))
    }
}

/// Standard Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on
/// the Legendre polynomial from the Chebyshev initial guess, affinely mapped
/// to `[0, tau]`.
pub fn gauss_legendre<T: Scalar>(k: usize, tau: T) -> QuadratureRule<T> {
    assert!(k >= 1, "node count must be at least 1");
    assert!(tau > T::zero(), "interval length must be positive");
    let mut nodes = vec![T::zero(); k];
    let mut weights = vec![T::zero(); k];
    let half = T::from_f64_lossy(0.5);
    let m = (k + 1) / 2;
    for i in 0..m {
        let guess = T::pi() * (T::from_usize_lossy(i) + T::from_f64_lossy(0.75))
            / (T::from_usize_lossy(k) + half);
        let mut x = guess.cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_eval::<T>(k, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= T::epsilon() * x.abs().max(T::one()) {
                break;
            }
        }
        let w = T::from_f64_lossy(2.0) / ((T::one() - x * x) * dp * dp);
        // symmetric pair
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    // map [-1, 1] -> [0, tau]
    let scale = tau * half;
    for i in 0..k {
        nodes[i] = (nodes[i] + T::one()) * scale;
        weights[i] = weights[i] * scale;
    }
    QuadratureRule { nodes, weights, tau }
}

/// Legendre polynomial `P_k` and its derivative at `x`, by the three-term
/// recurrence.
fn legendre_eval<T: Scalar>(k: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if k == 0 {
        return (p0, T::zero());
    }
    for j in 2..=k {
        let jf = T::from_usize_lossy(j);
        let two = T::from_f64_lossy(2.0);
        let p2 = ((two * jf - T::one()) * x * p1 - (jf - T::one()) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = T::from_usize_lossy(k) * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_rule_is_midpoint() {
        let rule = gauss_legendre::<f64>(1, 2.0);
        assert_eq!(rule.nodes, vec![1.0]);
        assert_eq!(rule.weights, vec![2.0]);
    }

    #[test]
    fn two_point_rule_closed_form() {
        let rule = gauss_legendre::<f64>(2, 1.0);
        let lo = (3.0 - 3.0_f64.sqrt()) / 6.0;
        let hi = (3.0 + 3.0_f64.sqrt()) / 6.0;
        assert!((rule.nodes[0] - lo).abs() < 1e-15);
        assert!((rule.nodes[1] - hi).abs() < 1e-15);
        assert!((rule.weights[0] - 0.5).abs() < 1e-15);
        assert!((rule.weights[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_tau() {
        for k in [1, 2, 3, 7, 20, 50] {
            let tau = 13.7;
            let rule = gauss_legendre::<f64>(k, tau);
            let sum: f64 = rule.weights.iter().sum();
            assert!((sum - tau).abs() < 1e-12 * tau, "k = {k}: {sum}");
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(rule.nodes[0] > 0.0 && *rule.nodes.last().unwrap() < tau);
        }
    }

    #[test]
    fn fifty_points_integrate_degree_99_exactly() {
        let tau = 20.0_f64;
        let rule = gauss_legendre::<f64>(50, tau);
        // int_0^20 (s/20)^99 ds = 20/100, scaled to avoid overflow
        let value = rule.integrate(|s| (s / tau).powi(99));
        let exact = tau / 100.0;
        assert!((value - exact).abs() <= 1e-12 * exact.abs(), "{value} vs {exact}");
    }

    #[test]
    fn degree_2k_minus_1_exactness_across_orders() {
        for k in [1usize, 2, 3, 5, 8, 12] {
            let tau = 3.0_f64;
            let rule = gauss_legendre::<f64>(k, tau);
            let d = 2 * k - 1;
            let value = rule.integrate(|s| (s / tau).powi(d as i32));
            let exact = tau / (d as f64 + 1.0);
            assert!(
                (value - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                "k = {k}, degree {d}: {value} vs {exact}"
            );
        }
    }
}
