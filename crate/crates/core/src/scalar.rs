use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the numerical core is written against.
///
/// Implemented for `f32` and `f64`. Tolerances quoted throughout the crate
/// assume double precision; single precision is supported for the geometric
/// and algebraic parts but will not meet the tighter quadrature targets.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the crate scalar.
pub type C<T> = Complex<T>;

/// A point of ℂⁿ for n ≤ 2. For n = 1 the second slot is unused and kept at zero.
pub type CPoint<T> = [C<T>; 2];

pub(crate) fn cl<T: Real>(re: f64, im: f64) -> C<T> {
    C::new(T::lit(re), T::lit(im))
}

pub(crate) fn czero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

/// Real coordinates `[x1, y1, x2, y2]` of a complex point.
pub fn to_real<T: Real>(z: &CPoint<T>) -> [T; 4] {
    [z[0].re, z[0].im, z[1].re, z[1].im]
}

pub fn from_real<T: Real>(x: &[T; 4]) -> CPoint<T> {
    [C::new(x[0], x[1]), C::new(x[2], x[3])]
}

/// Euclidean distance in ℂ² ≅ ℝ⁴.
pub fn cdist<T: Real>(a: &CPoint<T>, b: &CPoint<T>) -> T {
    ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt()
}
