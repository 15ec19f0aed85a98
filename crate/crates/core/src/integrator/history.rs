//! Uniformly-sampled state history with C1 interpolation.
//!
//! The buffer keeps a sliding window of `(x, dx/dt)` samples long enough to
//! serve every delayed lookup; queries between knots use cubic Hermite
//! interpolation (or 4-point Lagrange on the values when derivative storage
//! is disabled).

use crate::scalar::Scalar;

use super::IntegrateError;

#[derive(Debug, Clone)]
pub struct HistoryBuffer<T> {
    dim: usize,
    dt: T,
    /// Time of the first retained sample.
    start_time: T,
    /// Index (in steps since the very first sample) of the first retained row.
    start_index: usize,
    capacity: usize,
    store_derivatives: bool,
    states: std::collections::VecDeque<Vec<T>>,
    derivs: std::collections::VecDeque<Vec<T>>,
}

impl<T: Scalar> HistoryBuffer<T> {
    /// Creates a buffer primed with samples of `history` at
    /// `t0 - lookback, ..., t0 - dt, t0`. The window keeps
    /// `lookback + margin` worth of samples as time advances.
    pub fn with_history<F: Fn(T) -> Vec<T>>(
        dim: usize,
        dt: T,
        t0: T,
        lookback: T,
        history: F,
        store_derivatives: bool,
    ) -> Self {
        let back_steps = (lookback / dt).ceil().to_usize().unwrap_or(0) + 2;
        let capacity = back_steps + 8;
        let mut states = std::collections::VecDeque::with_capacity(capacity);
        let mut derivs = std::collections::VecDeque::with_capacity(capacity);
        for k in 0..=back_steps {
            let t = t0 - dt * T::from_usize_lossy(back_steps - k);
            let x = history(t);
            assert_eq!(x.len(), dim);
            states.push_back(x);
            derivs.push_back(vec![T::zero(); dim]);
        }
        Self {
            dim,
            dt,
            start_time: t0 - dt * T::from_usize_lossy(back_steps),
            start_index: 0,
            capacity,
            store_derivatives,
            states,
            derivs,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Time of the newest sample.
    pub fn current_time(&self) -> T {
        self.start_time + self.dt * T::from_usize_lossy(self.states.len() - 1)
    }

    pub fn latest(&self) -> &[T] {
        self.states.back().expect("buffer never empty")
    }

    pub fn latest_derivative(&self) -> &[T] {
        self.derivs.back().expect("buffer never empty")
    }

    /// Overwrites the newest sample (used to seed the initial state).
    pub fn replace_latest(&mut self, x: Vec<T>, dx: Vec<T>) {
        *self.states.back_mut().unwrap() = x;
        *self.derivs.back_mut().unwrap() = dx;
    }

    /// Appends the sample at `current_time() + dt`, discarding samples that
    /// have slid out of the window.
    pub fn push(&mut self, x: Vec<T>, dx: Vec<T>) {
        assert_eq!(x.len(), self.dim);
        self.states.push_back(x);
        self.derivs.push_back(dx);
        while self.states.len() > self.capacity {
            self.states.pop_front();
            self.derivs.pop_front();
            self.start_index += 1;
            self.start_time = self.start_time + self.dt;
        }
    }

    fn locate(&self, t: T) -> Result<(usize, T), IntegrateError> {
        let rel = (t - self.start_time) / self.dt;
        if rel < T::zero() {
            return Err(IntegrateError::HistoryUnderrun {
                t: format!("{t}"),
                start: format!("{}", self.start_time),
            });
        }
        let k = rel.floor().to_usize().unwrap_or(0);
        let last = self.states.len() - 1;
        if k >= last {
            // query at or beyond the newest knot (allow roundoff at the edge)
            if rel > T::from_usize_lossy(last) + T::from_f64_lossy(1e-9) {
                return Err(IntegrateError::HistoryUnderrun {
                    t: format!("{t}"),
                    start: format!("ahead of stored history ending {}", self.current_time()),
                });
            }
            return Ok((last, T::zero()));
        }
        let theta = rel - T::from_usize_lossy(k);
        Ok((k, theta))
    }

    /// State at time `t`, interpolated.
    pub fn value_at(&self, t: T) -> Result<Vec<T>, IntegrateError> {
        let (k, theta) = self.locate(t)?;
        if theta == T::zero() {
            return Ok(self.states[k].clone());
        }
        if self.store_derivatives {
            Ok(self.hermite(k, theta, false))
        } else {
            Ok(self.lagrange(k, theta, false))
        }
    }

    /// Time derivative of the interpolated state at `t`.
    pub fn derivative_at(&self, t: T) -> Result<Vec<T>, IntegrateError> {
        let (k, theta) = self.locate(t)?;
        if self.store_derivatives {
            if theta == T::zero() {
                return Ok(self.derivs[k].clone());
            }
            Ok(self.hermite(k, theta, true))
        } else {
            Ok(self.lagrange(k, theta, true))
        }
    }

    fn hermite(&self, k: usize, theta: T, derivative: bool) -> Vec<T> {
        let one = T::one();
        let two = T::from_f64_lossy(2.0);
        let three = T::from_f64_lossy(3.0);
        let x0 = &self.states[k];
        let x1 = &self.states[k + 1];
        let d0 = &self.derivs[k];
        let d1 = &self.derivs[k + 1];
        let t2 = theta * theta;
        let t3 = t2 * theta;
        if derivative {
            let h00 = (T::from_f64_lossy(6.0) * t2 - T::from_f64_lossy(6.0) * theta) / self.dt;
            let h10 = three * t2 - T::from_f64_lossy(4.0) * theta + one;
            let h01 = (T::from_f64_lossy(6.0) * theta - T::from_f64_lossy(6.0) * t2) / self.dt;
            let h11 = three * t2 - two * theta;
            (0..self.dim)
                .map(|i| h00 * x0[i] + h10 * d0[i] + h01 * x1[i] + h11 * d1[i])
                .collect()
        } else {
            let h00 = two * t3 - three * t2 + one;
            let h10 = (t3 - two * t2 + theta) * self.dt;
            let h01 = three * t2 - two * t3;
            let h11 = (t3 - t2) * self.dt;
            (0..self.dim)
                .map(|i| h00 * x0[i] + h10 * d0[i] + h01 * x1[i] + h11 * d1[i])
                .collect()
        }
    }

    /// Cubic Lagrange on the four knots around interval `k` (fallback when
    /// derivatives are not stored).
    fn lagrange(&self, k: usize, theta: T, derivative: bool) -> Vec<T> {
        let last = self.states.len() - 1;
        let base = if k == 0 {
            0
        } else if k + 2 > last {
            last.saturating_sub(3)
        } else {
            k - 1
        };
        // local coordinate of the query in knot units, relative to `base`
        let s = T::from_usize_lossy(k - base) + theta;
        let mut out = vec![T::zero(); self.dim];
        for j in 0..4 {
            let (mut lj, mut dlj) = (T::one(), T::zero());
            let sj = T::from_usize_lossy(j);
            for m in 0..4 {
                if m == j {
                    continue;
                }
                let sm = T::from_usize_lossy(m);
                let denom = sj - sm;
                if derivative {
                    // product rule over the factors
                    let mut term = T::one() / denom;
                    for l in 0..4 {
                        if l == j || l == m {
                            continue;
                        }
                        let sl = T::from_usize_lossy(l);
                        term = term * (s - sl) / (sj - sl);
                    }
                    dlj = dlj + term;
                }
                lj = lj * (s - sm) / denom;
            }
            let row = &self.states[base + j];
            let w = if derivative { dlj / self.dt } else { lj };
            for i in 0..self.dim {
                out[i] = out[i] + w * row[i];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fill_with(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, dt: f64, upto: f64) -> HistoryBuffer<f64> {
        let mut buf =
            HistoryBuffer::with_history(1, dt, 0.0, 2.0, |t| vec![f(t)], true);
        buf.replace_latest(vec![f(0.0)], vec![df(0.0)]);
        let mut t = 0.0;
        while t < upto {
            t += dt;
            buf.push(vec![f(t)], vec![df(t)]);
        }
        buf
    }

    #[test]
    fn hermite_reproduces_cubics_exactly() {
        let f = |t: f64| 1.0 + t - 0.5 * t * t + 0.25 * t * t * t;
        let df = |t: f64| 1.0 - t + 0.75 * t * t;
        let buf = fill_with(f, df, 0.1, 3.0);
        for q in [0.05, 0.133, 1.77, 2.91] {
            let v = buf.value_at(q).unwrap()[0];
            assert!((v - f(q)).abs() < 1e-12, "{v} vs {}", f(q));
            let d = buf.derivative_at(q).unwrap()[0];
            assert!((d - df(q)).abs() < 1e-11);
        }
    }

    #[test]
    fn hermite_is_c1_across_knots() {
        let f = |t: f64| (0.9 * t).sin();
        let df = |t: f64| 0.9 * (0.9 * t).cos();
        let buf = fill_with(f, df, 0.05, 2.0);
        let eps = 1e-9;
        for knot in [0.5, 1.0, 1.5] {
            let left = buf.derivative_at(knot - eps).unwrap()[0];
            let right = buf.derivative_at(knot + eps).unwrap()[0];
            assert!((left - right).abs() < 1e-6);
        }
    }

    #[test]
    fn lagrange_fallback_reproduces_cubics() {
        let f = |t: f64| -0.3 + 0.8 * t + 0.1 * t * t - 0.05 * t * t * t;
        let mut buf = HistoryBuffer::with_history(1, 0.1, 0.0, 1.0, |t| vec![f(t)], false);
        buf.replace_latest(vec![f(0.0)], vec![0.0]);
        let mut t = 0.0;
        while t < 2.0 {
            t += 0.1;
            buf.push(vec![f(t)], vec![0.0]);
        }
        for q in [0.04, 0.55, 1.0, 1.93] {
            let v = buf.value_at(q).unwrap()[0];
            assert!((v - f(q)).abs() < 1e-12, "{v} vs {}", f(q));
        }
    }

    #[test]
    fn underrun_is_reported() {
        let buf = fill_with(|_| 0.0, |_| 0.0, 0.1, 1.0);
        assert!(matches!(
            buf.value_at(-5.0),
            Err(IntegrateError::HistoryUnderrun { .. })
        ));
        assert!(buf.value_at(buf.current_time() + 1.0).is_err());
    }

    #[test]
    fn window_slides_and_drops_old_samples() {
        let mut buf = HistoryBuffer::with_history(1, 0.1, 0.0, 0.5, |_| vec![0.0], true);
        for k in 0..200 {
            buf.push(vec![k as f64], vec![0.0]);
        }
        // early samples are gone
        assert!(buf.value_at(0.0).is_err());
        // recent window still answers
        let t = buf.current_time() - 0.4;
        assert!(buf.value_at(t).is_ok());
    }
}
