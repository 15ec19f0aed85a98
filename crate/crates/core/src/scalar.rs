use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the whole toolkit is generic over: `f32` or `f64`.
///
/// Everything numeric (characteristic roots, quadrature, time stepping,
/// spectra) is written against this trait; concrete aliases at the crate
/// root pin `f64` for production use.
pub trait Scalar:
    Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + Default + Send + Sync + 'static
{
    /// Shorthand for lossy conversion from an `f64` literal.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant must convert into the scalar type")
    }

    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize must convert into the scalar type")
    }

    fn pi() -> Self {
        Self::from_f64_lossy(std::f64::consts::PI)
    }

    fn two_pi() -> Self {
        Self::from_f64_lossy(std::f64::consts::TAU)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
