//! Möbius transformations acting on [`SpherePoint`]s.

use crate::complex::{self, C64, ONE, ZERO};
use crate::error::ModuliError;
use crate::sphere::SpherePoint;

/// `z ↦ (a z + b)/(c z + d)` with `ad − bc ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MobiusMap {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl MobiusMap {
    pub const IDENTITY: MobiusMap = MobiusMap {
        a: ONE,
        b: ZERO,
        c: ZERO,
        d: ONE,
    };

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self, ModuliError> {
        let m = MobiusMap { a, b, c, d };
        let det = m.determinant();
        let scale = complex::abs(a) * complex::abs(d) + complex::abs(b) * complex::abs(c);
        if !complex::is_finite(det) || complex::abs(det) <= complex::ROUNDOFF * scale {
            return Err(ModuliError::DegenerateMobius);
        }
        Ok(m)
    }

    pub fn determinant(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, p: SpherePoint) -> SpherePoint {
        let (u, v) = (p.u(), p.v());
        SpherePoint::from_homogeneous(self.a * u + self.b * v, self.c * u + self.d * v)
            .unwrap_or(SpherePoint::INFINITY)
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MobiusMap) -> MobiusMap {
        MobiusMap {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
    }

    /// The map sending `(p1, p2, p3)` to `(0, ∞, 1)`.
    pub fn to_standard_triple(points: [SpherePoint; 3]) -> Result<Self, ModuliError> {
        let [p1, p2, p3] = points;
        let distinct = |x: &SpherePoint, y: &SpherePoint| x.chordal_distance(y) > complex::ROUNDOFF;
        if !(distinct(&p1, &p2) && distinct(&p1, &p3) && distinct(&p2, &p3)) {
            return Err(ModuliError::DegenerateMobius);
        }
        // z ↦ (z − z1)(z3 − z2) / ((z − z2)(z3 − z1)), homogenized.
        let k1 = p3.u() * p2.v() - p3.v() * p2.u();
        let k2 = p3.u() * p1.v() - p3.v() * p1.u();
        MobiusMap::new(p1.v() * k1, -p1.u() * k1, p2.v() * k2, -p2.u() * k2)
    }

    /// The unique map with `src[i] ↦ dst[i]`.
    pub fn from_three_points(src: [SpherePoint; 3], dst: [SpherePoint; 3]) -> Result<Self, ModuliError> {
        let s = Self::to_standard_triple(src)?;
        let t = Self::to_standard_triple(dst)?;
        let m = t.inverse().compose(&s);
        MobiusMap::new(m.a, m.b, m.c, m.d)
    }
}
