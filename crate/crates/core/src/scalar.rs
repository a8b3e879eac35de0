//! Scalar abstraction shared by the series, operator and disk modules.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the numeric core is generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over a [`Scalar`].
pub type Cx<T> = Complex<T>;

pub(crate) fn is_finite<T: Scalar>(c: &Cx<T>) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

pub(crate) fn usize_lit<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("index representable in scalar type")
}
