//! Complex helpers that behave identically under conjugation.
//!
//! The square root here is written out instead of going through polar form so
//! that `sqrt(conj(z)) == conj(sqrt(z))` holds bit for bit off the branch cut.
//! Raster symmetry tests depend on that.

pub use num_complex::Complex64 as C64;
use num_traits::Float;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Comparisons that should only absorb rounding noise.
pub const ROUNDOFF: f64 = 8.0 * f64::EPSILON;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn abs(z: C64) -> f64 {
    Float::hypot(z.re, z.im)
}

#[inline]
pub fn is_finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Principal square root (branch cut on the negative real axis, `Re ≥ 0`).
pub fn sqrt(z: C64) -> C64 {
    if z.re == 0.0 && z.im == 0.0 {
        return C64::new(0.0, z.im);
    }
    let t = Float::sqrt((abs(z) + Float::abs(z.re)) * 0.5);
    if z.re >= 0.0 {
        C64::new(t, z.im / (2.0 * t))
    } else {
        C64::new(Float::abs(z.im) / (2.0 * t), Float::copysign(t, z.im))
    }
}

/// Principal cube root.
pub fn cbrt(z: C64) -> C64 {
    if z.re == 0.0 && z.im == 0.0 {
        return ZERO;
    }
    let r = libm::cbrt(abs(z));
    let theta = Float::atan2(z.im, z.re) / 3.0;
    C64::new(r * Float::cos(theta), r * Float::sin(theta))
}

#[inline]
pub fn exp(z: C64) -> C64 {
    z.exp()
}

/// Principal logarithm, `Im ∈ (−π, π]`.
#[inline]
pub fn ln(z: C64) -> C64 {
    C64::new(Float::ln(abs(z)), Float::atan2(z.im, z.re))
}

/// `(s, e)` with `s = fl(a + b)` and `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_principal_branch() {
        assert_eq!(sqrt(c(4.0, 0.0)), c(2.0, 0.0));
        assert_eq!(sqrt(c(-1.0, 0.0)), c(0.0, 1.0));
        assert_eq!(sqrt(c(-4.0, -0.0)), c(0.0, -2.0));
        let z = c(-3.25, 1.5e-3);
        let s = sqrt(z);
        assert!(abs(s * s - z) < 1e-15);
        assert!(s.re >= 0.0);
    }

    #[test]
    fn sqrt_commutes_with_conjugation_exactly() {
        for &(re, im) in &[(0.3, 0.7), (-5.1, 2.2), (-1e-3, 9.0), (12.0, -0.25)] {
            let z = c(re, im);
            assert_eq!(sqrt(z.conj()), sqrt(z).conj());
        }
    }

    #[test]
    fn cbrt_cubes_back() {
        for &(re, im) in &[(8.0, 0.0), (-8.0, 0.0), (0.5, -2.0), (-3.0, 4.0)] {
            let z = c(re, im);
            let r = cbrt(z);
            assert!(abs(r * r * r - z) < 1e-14 * (1.0 + abs(z)));
        }
    }

    #[test]
    fn two_sum_is_error_free() {
        let (s, e) = two_sum(1.0e16, 1.2345);
        assert_eq!(s - 1.0e16 + e, 1.2345);
    }
}
