//! Points of the Riemann sphere in normalized homogeneous coordinates.

use core::fmt;

use num_traits::Float;

use crate::complex::{self, C64, ONE, ZERO};

/// Which affine chart a normalized point lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// `z = u/v` with `v = 1` and `|z| ≤ 1`.
    Finite,
    /// `w = v/u = 1/z` with `u = 1` and `|w| < 1`.
    Infinite,
}

/// A point `u/v` of the sphere.
///
/// The coordinate of larger modulus is exactly `1`, so the other coordinate
/// is the chart value and equal points have equal fields. Ties go to the
/// finite chart.
#[derive(Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpherePoint {
    u: C64,
    v: C64,
}

impl SpherePoint {
    pub const ZERO: SpherePoint = SpherePoint { u: ZERO, v: ONE };
    pub const INFINITY: SpherePoint = SpherePoint { u: ONE, v: ZERO };

    /// `None` when both coordinates vanish or one is not finite.
    pub fn from_homogeneous(u: C64, v: C64) -> Option<Self> {
        if !complex::is_finite(u) || !complex::is_finite(v) {
            return None;
        }
        let nu = u.norm_sqr();
        let nv = v.norm_sqr();
        if nu == 0.0 && nv == 0.0 {
            return None;
        }
        if nu > nv {
            Some(SpherePoint { u: ONE, v: v / u })
        } else {
            Some(SpherePoint { u: u / v, v: ONE })
        }
    }

    pub fn finite(z: C64) -> Self {
        Self::from_homogeneous(z, ONE).unwrap_or(Self::INFINITY)
    }

    pub fn u(&self) -> C64 {
        self.u
    }

    pub fn v(&self) -> C64 {
        self.v
    }

    pub fn chart(&self) -> Chart {
        if self.v == ONE {
            Chart::Finite
        } else {
            Chart::Infinite
        }
    }

    /// The coordinate in the point's own chart.
    pub fn chart_value(&self) -> C64 {
        match self.chart() {
            Chart::Finite => self.u,
            Chart::Infinite => self.v,
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.v == ZERO
    }

    /// `u/v`, or `None` at infinity.
    pub fn to_finite(&self) -> Option<C64> {
        match self.chart() {
            Chart::Finite => Some(self.u),
            Chart::Infinite if self.v == ZERO => None,
            Chart::Infinite => Some(ONE / self.v),
        }
    }

    pub fn conj(&self) -> Self {
        SpherePoint {
            u: self.u.conj(),
            v: self.v.conj(),
        }
    }

    /// Chordal distance, `|z−w| / (sqrt(1+|z|²) sqrt(1+|w|²))`, in `[0, 1]`.
    pub fn chordal_distance(&self, other: &SpherePoint) -> f64 {
        Float::sqrt(self.chordal_distance_sqr(other))
    }

    #[inline]
    pub(crate) fn chordal_distance_sqr(&self, other: &SpherePoint) -> f64 {
        let cross = self.u * other.v - other.u * self.v;
        let n1 = self.u.norm_sqr() + self.v.norm_sqr();
        let n2 = other.u.norm_sqr() + other.v.norm_sqr();
        cross.norm_sqr() / (n1 * n2)
    }
}

impl From<C64> for SpherePoint {
    fn from(z: C64) -> Self {
        SpherePoint::finite(z)
    }
}

impl fmt::Debug for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_finite() {
            Some(z) => write!(f, "SpherePoint({} {:+}i)", z.re, z.im),
            None => f.write_str("SpherePoint(∞)"),
        }
    }
}
