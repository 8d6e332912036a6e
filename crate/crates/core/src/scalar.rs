use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Scalar field for all matrix entries: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for constants and tolerances.
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 constant")
    }

    /// Conversion to `f64` for reporting and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand complex constructor.
pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::of(re), T::of(im))
}

/// Real number lifted into the complex plane.
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}
