//! Scalar abstraction shared by every module.
//!
//! All numerical routines are generic over a real field `T` and operate on
//! dense matrices of `Complex<T>`. Tolerances are written as `f64` literals
//! and converted at the call site with [`lit`].

use nalgebra::{Complex, DMatrix, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type backing the complex matrices: `f32` or `f64`.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync {}

impl Real for f32 {}
impl Real for f64 {}

/// Dense complex matrix over the real field `T`.
pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Converts an `f64` constant into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant representable in the scalar type")
}

/// `max(tol, ulps * eps_T)`: an `f64` rounding tolerance widened to what
/// the scalar type can resolve. Unchanged for `f64` whenever `tol` exceeds
/// `ulps * 2.2e-16`.
#[inline]
pub fn rounding_tol<T: Real>(tol: f64, ulps: f64) -> T {
    lit::<T>(tol).max(machine_epsilon::<T>() * lit(ulps))
}

/// Gap between 1 and the next representable `T`.
pub fn machine_epsilon<T: Real>() -> T {
    let half = lit::<T>(0.5);
    let mut eps = T::one();
    while T::one() + eps * half != T::one() {
        eps *= half;
    }
    eps
}

/// Lossy view of a scalar as `f64`, used for diagnostics and reports.
#[inline]
pub fn as_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}
