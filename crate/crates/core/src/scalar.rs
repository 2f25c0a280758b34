//! Scalar abstraction shared by every numerical module.
//!
//! All linear algebra is written against [`Real`], which is implemented for
//! `f32` and `f64`. Tolerances live on the trait so that a single-precision
//! build gets thresholds it can actually meet.

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar backing the complex matrices.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {
    /// Absolute tolerance for validation residuals.
    fn validation_tol() -> Self;
    /// Ratio `s2 / s1` below which a block counts as rank one.
    fn rank_ratio_tol() -> Self;
    /// Relative singular-value cutoff for nullspace and rank computations.
    fn nullspace_cutoff() -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn validation_tol() -> Self {
        1e-10
    }
    fn rank_ratio_tol() -> Self {
        1e-8
    }
    fn nullspace_cutoff() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn validation_tol() -> Self {
        1e-4
    }
    fn rank_ratio_tol() -> Self {
        1e-3
    }
    fn nullspace_cutoff() -> Self {
        1e-3
    }
}

pub type Cx<T> = Complex<T>;
pub type CMat<T> = DMatrix<Complex<T>>;
pub type CVec<T> = DVector<Complex<T>>;

#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> Cx<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub fn creal<T: Real>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn czero<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Cx<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub fn ci<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::one())
}

/// Modulus of a complex number.
#[inline]
pub fn cabs<T: Real>(z: Cx<T>) -> T {
    z.norm_sqr().sqrt()
}

/// Lossless-enough conversion of an `f64` complex number.
#[inline]
pub fn from_c64<T: Real>(z: Complex<f64>) -> Cx<T> {
    Complex::new(T::lit(z.re), T::lit(z.im))
}

#[inline]
pub fn to_c64<T: Real>(z: Cx<T>) -> Complex<f64> {
    Complex::new(z.re.as_f64(), z.im.as_f64())
}
