//! Degree-two rational maps as pairs of binary quadratic forms.
//!
//! `f(u : v) = (N(u, v) : D(u, v))` where `N = n0 u² + n1 uv + n2 v²` and
//! likewise for `D`. Working homogeneously keeps poles and ∞ ordinary points.

use crate::complex::{self, C64, ONE, ZERO};
use crate::mobius::MobiusMap;
use crate::sphere::{Chart, SpherePoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadRational {
    /// Coefficients of `u², uv, v²` in the numerator.
    pub num: [C64; 3],
    /// Coefficients of `u², uv, v²` in the denominator.
    pub den: [C64; 3],
}

#[inline]
fn form(c: &[C64; 3], u: C64, v: C64) -> C64 {
    c[0] * u * u + c[1] * u * v + c[2] * v * v
}

#[inline]
fn form_du(c: &[C64; 3], u: C64, v: C64) -> C64 {
    (c[0] * u + c[0] * u) + c[1] * v
}

#[inline]
fn form_dv(c: &[C64; 3], u: C64, v: C64) -> C64 {
    c[1] * u + (c[2] * v + c[2] * v)
}

/// Substitutes `u = p u' + q v'`, `v = r u' + s v'` into a quadratic form.
fn substitute(c: &[C64; 3], p: C64, q: C64, r: C64, s: C64) -> [C64; 3] {
    let two = C64::new(2.0, 0.0);
    [
        c[0] * p * p + c[1] * p * r + c[2] * r * r,
        c[0] * two * p * q + c[1] * (p * s + q * r) + c[2] * two * r * s,
        c[0] * q * q + c[1] * q * s + c[2] * s * s,
    ]
}

/// Roots of `a u² + b uv + c v²` as sphere points, with multiplicity.
pub fn binary_quadratic_roots(a: C64, b: C64, c: C64) -> [SpherePoint; 2] {
    if a == ZERO {
        // v (b u + c v) = 0
        let second = SpherePoint::from_homogeneous(-c, b).unwrap_or(SpherePoint::INFINITY);
        return [SpherePoint::INFINITY, second];
    }
    let disc = complex::sqrt(b * b - a * c * 4.0);
    // pick the sign that avoids cancellation
    let q = if (b.conj() * disc).re >= 0.0 {
        -(b + disc) * 0.5
    } else {
        -(b - disc) * 0.5
    };
    if q == ZERO {
        return [SpherePoint::ZERO, SpherePoint::ZERO];
    }
    let first = SpherePoint::from_homogeneous(q, a).unwrap_or(SpherePoint::INFINITY);
    let second = SpherePoint::from_homogeneous(c, q).unwrap_or(SpherePoint::INFINITY);
    [first, second]
}

impl QuadRational {
    /// Homogeneous image `(N, D)` before normalization.
    #[inline]
    pub fn eval_homogeneous(&self, u: C64, v: C64) -> (C64, C64) {
        (form(&self.num, u, v), form(&self.den, u, v))
    }

    /// Image of `p`; `None` only if the form pair vanishes there (not a
    /// degree-two map) or the arithmetic overflowed.
    #[inline]
    pub fn try_eval(&self, p: SpherePoint) -> Option<SpherePoint> {
        let (n, d) = self.eval_homogeneous(p.u(), p.v());
        SpherePoint::from_homogeneous(n, d)
    }

    /// Derivative of `f` read in the given input and output charts at `p`.
    pub fn chart_derivative(&self, p: SpherePoint, chart_in: Chart, chart_out: Chart) -> C64 {
        let (u, v) = match chart_in {
            Chart::Finite => match p.to_finite() {
                Some(z) => (z, ONE),
                None => return C64::new(f64::NAN, f64::NAN),
            },
            Chart::Infinite => {
                if p.u() == ZERO {
                    return C64::new(f64::NAN, f64::NAN);
                }
                (ONE, p.v() / p.u())
            }
        };
        self.chart_derivative_at(u, v, chart_in, chart_out)
    }

    fn chart_derivative_at(&self, u: C64, v: C64, chart_in: Chart, chart_out: Chart) -> C64 {
        let (n, d) = self.eval_homogeneous(u, v);
        let (n_x, d_x) = match chart_in {
            Chart::Finite => (form_du(&self.num, u, v), form_du(&self.den, u, v)),
            Chart::Infinite => (form_dv(&self.num, u, v), form_dv(&self.den, u, v)),
        };
        let (top, top_x, bottom, bottom_x) = match chart_out {
            Chart::Finite => (n, n_x, d, d_x),
            Chart::Infinite => (d, d_x, n, n_x),
        };
        (top_x * bottom - top * bottom_x) / (bottom * bottom)
    }

    /// Derivative from the chart of `p` to the chart of `f(p)`.
    pub fn derivative_along(&self, p: SpherePoint, image: SpherePoint) -> C64 {
        self.chart_derivative(p, p.chart(), image.chart())
    }

    /// Multiplier at a fixed point, read in the point's own chart.
    pub fn multiplier_at(&self, p: SpherePoint) -> C64 {
        self.chart_derivative(p, p.chart(), p.chart())
    }

    /// `m ∘ f ∘ m⁻¹`.
    pub fn conjugate_by(&self, m: &MobiusMap) -> QuadRational {
        let inv = m.inverse();
        let n = substitute(&self.num, inv.a, inv.b, inv.c, inv.d);
        let d = substitute(&self.den, inv.a, inv.b, inv.c, inv.d);
        let mut num = [ZERO; 3];
        let mut den = [ZERO; 3];
        for k in 0..3 {
            num[k] = m.a * n[k] + m.b * d[k];
            den[k] = m.c * n[k] + m.d * d[k];
        }
        QuadRational { num, den }
    }

    /// The two critical points: zeros of the Wronskian `N_u D − N D_u`
    /// restricted to the sphere, a binary quadratic form.
    pub fn critical_points(&self) -> [SpherePoint; 2] {
        let [a, b, c] = self.num;
        let [d, e, g] = self.den;
        binary_quadratic_roots(a * e - b * d, (a * g - c * d) * 2.0, b * g - c * e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::c;

    fn lambda_form(l1: C64, l2: C64) -> QuadRational {
        QuadRational {
            num: [ONE, l1, ZERO],
            den: [ZERO, l2, ONE],
        }
    }

    #[test]
    fn evaluates_z_squared() {
        let f = lambda_form(ZERO, ZERO);
        let img = f.try_eval(SpherePoint::finite(c(1.0, 1.0))).unwrap();
        assert!(img.chordal_distance(&SpherePoint::finite(c(0.0, 2.0))) < 1e-16);
        assert_eq!(f.try_eval(SpherePoint::INFINITY), Some(SpherePoint::INFINITY));
    }

    #[test]
    fn multipliers_at_zero_and_infinity() {
        let (l1, l2) = (c(0.5, 0.1), c(-0.3, 0.2));
        let f = lambda_form(l1, l2);
        assert_eq!(f.multiplier_at(SpherePoint::ZERO), l1);
        assert_eq!(f.multiplier_at(SpherePoint::INFINITY), l2);
    }

    #[test]
    fn finite_chart_derivative_matches_difference_quotient() {
        let f = lambda_form(c(0.5, 0.1), c(-0.3, 0.2));
        let z = c(0.4, -0.7);
        let h = 1e-6;
        let eval = |z: C64| f.try_eval(SpherePoint::finite(z)).unwrap().to_finite().unwrap();
        let fd = (eval(z + h) - eval(z - h)) / (2.0 * h);
        let d = f.chart_derivative(SpherePoint::finite(z), Chart::Finite, Chart::Finite);
        assert!(complex::abs(fd - d) < 1e-8);
    }

    #[test]
    fn critical_points_of_z_squared() {
        let crit = lambda_form(ZERO, ZERO).critical_points();
        assert!(crit.contains(&SpherePoint::INFINITY));
        assert!(crit.contains(&SpherePoint::ZERO));
    }

    #[test]
    fn quadratic_roots_are_stable() {
        let [r1, r2] = binary_quadratic_roots(ONE, c(-1e8, 0.0), ONE);
        let roots = [r1.to_finite().unwrap(), r2.to_finite().unwrap()];
        assert!(roots.iter().any(|r| (r.re - 1e8).abs() < 1.0));
        assert!(roots.iter().any(|r| (r.re - 1e-8).abs() < 1e-20));
    }
}
