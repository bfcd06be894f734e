//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All matrices are complex; the real field underneath is any IEEE float
//! that satisfies [`Real`]. The tolerances used across the crate are stated
//! for `f64`; `f32` instantiations work but only meet looser thresholds.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real field underlying [`ComplexMatrix`](crate::ComplexMatrix).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Default + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal (tolerances, constants).
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// A tolerance given for `f64`, raised to `1e3·ε` for coarser types.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(1e3))
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Default + Debug + Display + Send + Sync + 'static
{
}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub(crate) fn is_finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Total order used for deterministic eigenvalue sorting:
/// descending modulus, then descending real part, then descending imaginary part.
pub fn descending_modulus_order<T: Real>(a: &Complex<T>, b: &Complex<T>) -> std::cmp::Ordering {
    let key = |z: &Complex<T>| (z.norm(), z.re, z.im);
    let (ma, ra, ia) = key(a);
    let (mb, rb, ib) = key(b);
    mb.partial_cmp(&ma)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal))
        .then(ib.partial_cmp(&ia).unwrap_or(std::cmp::Ordering::Equal))
}

/// Principal square root computed from the real/imaginary parts; keeps full
/// relative accuracy where the polar-form `Complex::sqrt` loses a few ulps.
pub(crate) fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let (x, y) = (z.re, z.im);
    if x == T::zero() && y == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    let two = T::one() + T::one();
    let t = ((x.abs() + z.norm()) / two).sqrt();
    if x >= T::zero() {
        Complex::new(t, y / (two * t))
    } else {
        let im = if y < T::zero() { -t } else { t };
        Complex::new(y.abs() / (two * t), im)
    }
}
