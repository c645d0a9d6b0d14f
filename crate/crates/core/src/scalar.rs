//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::{DMatrix, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point type the library is generic over (`f32` or `f64`).
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in target float")
    }

    /// Converts an index or count into `Self`.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in target float")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance for checks that should hold to rounding: `max(floor, 100·eps)`.
    #[inline]
    fn rounding_tol(floor: f64) -> Self {
        let eps = Self::default_epsilon() * Self::lit(100.0);
        let floor = Self::lit(floor);
        if eps > floor {
            eps
        } else {
            floor
        }
    }
}

impl Real for f64 {}
impl Real for f32 {}

/// Complex scalar over `T`.
pub type Cx<T> = Complex<T>;

/// Dense complex matrix over `T`.
pub type CMatrix<T> = DMatrix<Complex<T>>;

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> Cx<T> {
    Complex::new(x, T::zero())
}
