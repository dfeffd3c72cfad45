//! Fixed points, multipliers and coordinates on the moduli space of
//! quadratic rational maps.
//!
//! A conjugacy class is determined by the multiset of its three fixed-point
//! multipliers. When the fixed points are distinct they satisfy
//!
//! ```text
//! 1/(1−λ1) + 1/(1−λ2) + 1/(1−λ3) = 1
//! ```
//!
//! and clearing denominators turns this into `σ3 = σ1 − 2` for the elementary
//! symmetric functions, which also holds with merged fixed points. The pair
//! `(σ1, σ2)` is therefore a global, order-free coordinate.
//!
//! Multipliers are always obtained by differentiating the map in the chart of
//! the fixed point (`w = 1/z` at ∞), never from closed-form eigenvalue
//! formulas. For `z ↦ λ1 z + B + 1/z` direct differentiation gives the other
//! two multipliers as `2λ1 − 1 − B²/2 ± B sqrt(B²/4 − (λ1 − 1))`; the often
//! quoted first term `1 − B²/2` is only correct at `λ1 = 1`, and the
//! multiplier of that form at ∞ is `1/λ1`, not `λ1`. See
//! [`b_form_other_multipliers`].

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::complex::{self, C64, ONE, ZERO};
use crate::cubic;
use crate::error::ModuliError;
use crate::mobius::MobiusMap;
use crate::rational::QuadRational;
use crate::sphere::SpherePoint;

/// Gate for [`sigma_coordinates`].
pub const CONSISTENCY_TOL: f64 = 1e-6;

/// The three fixed-point multipliers of a class, in no particular order.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigenvalueTriple {
    pub lambda1: C64,
    pub lambda2: C64,
    pub lambda3: C64,
}

impl EigenvalueTriple {
    pub fn new(lambda1: C64, lambda2: C64, lambda3: C64) -> Self {
        EigenvalueTriple {
            lambda1,
            lambda2,
            lambda3,
        }
    }

    /// `(1, 1, λ)`: the class of `f_{1,λ}` in `Per1(1)`.
    pub fn per_one(lambda: C64) -> Self {
        Self::new(ONE, ONE, lambda)
    }

    pub fn to_array(&self) -> [C64; 3] {
        [self.lambda1, self.lambda2, self.lambda3]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|z| complex::is_finite(*z))
    }

    /// `|σ3 − (σ1 − 2)| / max(1, |σ1|)`.
    pub fn sigma_residual(&self) -> f64 {
        let p = ModuliPoint::from_triple_unchecked(self);
        let s3 = self.lambda1 * self.lambda2 * self.lambda3;
        complex::abs(s3 - p.sigma3()) / complex::abs(p.sigma1).max(1.0)
    }

    /// `|Σ 1/(1−λi) − 1| / max(1, Σ |1/(1−λi)|)`; meaningful only when no
    /// multiplier equals 1.
    pub fn fixed_point_relation_residual(&self) -> f64 {
        let terms = self.to_array().map(|l| (ONE - l).inv());
        let sum = terms[0] + terms[1] + terms[2];
        let scale: f64 = terms.iter().map(|t| complex::abs(*t)).sum();
        complex::abs(sum - ONE) / scale.max(1.0)
    }

    /// Distance between multisets: the best of the six orderings, max-norm.
    pub fn multiset_distance(&self, other: &EigenvalueTriple) -> f64 {
        const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let a = self.to_array();
        let b = other.to_array();
        PERMS
            .iter()
            .map(|p| {
                (0..3)
                    .map(|i| complex::abs(a[i] - b[p[i]]))
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Permutation-invariant coordinates `(σ1, σ2)`; `σ3 = σ1 − 2` is implied.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModuliPoint {
    pub sigma1: C64,
    pub sigma2: C64,
}

impl ModuliPoint {
    /// The multipliers are summed in `(Re, Im)` order so that every
    /// permutation of `t` gives bit-identical coordinates.
    pub fn from_triple_unchecked(t: &EigenvalueTriple) -> Self {
        let mut m = t.to_array();
        m.sort_by(cubic::lexicographic);
        let [a, b, c] = m;
        ModuliPoint {
            sigma1: a + b + c,
            sigma2: a * b + a * c + b * c,
        }
    }

    pub fn sigma3(&self) -> C64 {
        self.sigma1 - 2.0
    }
}

/// A concrete representative of a class.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MapForm {
    /// `z ↦ (λ1 z + z²)/(λ2 z + 1)`: fixed points 0 and ∞ with multipliers
    /// `λ1`, `λ2`; requires `λ1 λ2 ≠ 1`.
    LambdaForm { lambda1: C64, lambda2: C64 },
    /// `z ↦ z + B + 1/z`: ∞ is a parabolic fixed point of multiplier 1.
    PerOneForm { b: C64 },
    /// `m ∘ base ∘ m⁻¹`.
    Conjugated { base: Box<MapForm>, mobius: MobiusMap },
}

impl MapForm {
    pub fn lambda(lambda1: C64, lambda2: C64) -> Result<Self, ModuliError> {
        let form = MapForm::LambdaForm { lambda1, lambda2 };
        form.validate()?;
        Ok(form)
    }

    pub fn per_one(b: C64) -> Self {
        MapForm::PerOneForm { b }
    }

    pub fn conjugated(base: MapForm, mobius: MobiusMap) -> Self {
        MapForm::Conjugated {
            base: Box::new(base),
            mobius,
        }
    }

    pub fn validate(&self) -> Result<(), ModuliError> {
        match self {
            MapForm::LambdaForm { lambda1, lambda2 } => {
                if !complex::is_finite(*lambda1) || !complex::is_finite(*lambda2) {
                    return Err(ModuliError::InvalidForm);
                }
                if *lambda1 * *lambda2 == ONE {
                    return Err(ModuliError::InvalidForm);
                }
                Ok(())
            }
            MapForm::PerOneForm { b } => {
                if complex::is_finite(*b) {
                    Ok(())
                } else {
                    Err(ModuliError::InvalidForm)
                }
            }
            MapForm::Conjugated { base, mobius } => {
                MobiusMap::new(mobius.a, mobius.b, mobius.c, mobius.d)?;
                base.validate()
            }
        }
    }

    pub fn rational(&self) -> QuadRational {
        match self {
            MapForm::LambdaForm { lambda1, lambda2 } => QuadRational {
                num: [ONE, *lambda1, ZERO],
                den: [ZERO, *lambda2, ONE],
            },
            MapForm::PerOneForm { b } => QuadRational {
                num: [ONE, *b, ONE],
                den: [ZERO, ONE, ZERO],
            },
            MapForm::Conjugated { base, mobius } => base.rational().conjugate_by(mobius),
        }
    }

    /// Strips nested conjugations: `self = m ∘ base ∘ m⁻¹` with `base` not
    /// conjugated.
    pub fn flatten(&self) -> (&MapForm, MobiusMap) {
        match self {
            MapForm::Conjugated { base, mobius } => {
                let (inner, m) = base.flatten();
                (inner, mobius.compose(&m))
            }
            other => (other, MobiusMap::IDENTITY),
        }
    }
}

/// A fixed point with its multiplier and multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FixedPoint {
    pub point: SpherePoint,
    pub multiplier: C64,
    pub multiplicity: u8,
}

/// Fixed points with multiplicities summing to 3. Multipliers come from
/// chart-local differentiation of the form.
pub fn fixed_points_and_multipliers(form: &MapForm) -> Result<Vec<FixedPoint>, ModuliError> {
    form.validate()?;
    let rat = form.rational();
    let fp = |point: SpherePoint, multiplicity: u8| FixedPoint {
        point,
        multiplier: rat.multiplier_at(point),
        multiplicity,
    };
    let points = match form {
        MapForm::LambdaForm { lambda1, lambda2 } => {
            let (top, bottom) = (ONE - *lambda1, ONE - *lambda2);
            if top == ZERO {
                alloc::vec![fp(SpherePoint::ZERO, 2), fp(SpherePoint::INFINITY, 1)]
            } else if bottom == ZERO {
                alloc::vec![fp(SpherePoint::ZERO, 1), fp(SpherePoint::INFINITY, 2)]
            } else {
                let z3 = SpherePoint::from_homogeneous(top, bottom).ok_or(ModuliError::InvalidForm)?;
                alloc::vec![fp(SpherePoint::ZERO, 1), fp(SpherePoint::INFINITY, 1), fp(z3, 1)]
            }
        }
        MapForm::PerOneForm { b } => {
            if *b == ZERO {
                alloc::vec![fp(SpherePoint::INFINITY, 3)]
            } else {
                alloc::vec![fp(SpherePoint::INFINITY, 2), fp(SpherePoint::finite(-b.inv()), 1)]
            }
        }
        MapForm::Conjugated { base, mobius } => fixed_points_and_multipliers(base)?
            .into_iter()
            .map(|f| fp(mobius.apply(f.point), f.multiplicity))
            .collect(),
    };
    Ok(points)
}

/// The multiplier triple of a form, repeating multipliers by multiplicity.
pub fn eigenvalue_triple(form: &MapForm) -> Result<EigenvalueTriple, ModuliError> {
    let mut out = [ZERO; 3];
    let mut k = 0;
    for f in fixed_points_and_multipliers(form)? {
        for _ in 0..f.multiplicity {
            out[k] = f.multiplier;
            k += 1;
        }
    }
    Ok(EigenvalueTriple::new(out[0], out[1], out[2]))
}

/// The third multiplier of `f_{λ1,λ2}` from the fixed-point relation,
/// `λ3 = (2 − λ1 − λ2)/(1 − λ1 λ2)`.
pub fn lambda3_from_eq1(lambda1: C64, lambda2: C64) -> Result<C64, ModuliError> {
    if lambda1 == ONE || lambda2 == ONE {
        return Err(ModuliError::DegenerateFixedPoints);
    }
    let denom = ONE - lambda1 * lambda2;
    if denom == ZERO {
        return Err(ModuliError::InvalidForm);
    }
    Ok((C64::new(2.0, 0.0) - lambda1 - lambda2) / denom)
}

/// `(σ1, σ2)` of a triple, rejecting triples that violate `σ3 = σ1 − 2`
/// by more than `1e-6 (1 + |σ1|)`.
pub fn sigma_coordinates(triple: &EigenvalueTriple) -> Result<ModuliPoint, ModuliError> {
    let p = ModuliPoint::from_triple_unchecked(triple);
    let s3 = triple.lambda1 * triple.lambda2 * triple.lambda3;
    let residual = complex::abs(s3 - p.sigma3());
    if !(residual <= CONSISTENCY_TOL * (1.0 + complex::abs(p.sigma1))) {
        return Err(ModuliError::InconsistentTriple { residual });
    }
    Ok(p)
}

/// Roots of `λ³ − σ1 λ² + σ2 λ − (σ1 − 2)`, ordered by `(Re, Im)`.
pub fn eigenvalues_from_sigma(point: &ModuliPoint) -> EigenvalueTriple {
    let [a, b, c] = cubic::monic_cubic_roots(-point.sigma1, point.sigma2, -point.sigma3());
    EigenvalueTriple::new(a, b, c)
}

/// `z + B + 1/z` with `λ = 1 − B²`, `B` the principal root. `B` and `−B`
/// are conjugate through `z ↦ −z`.
pub fn per1_form_from_lambda(lambda: C64) -> MapForm {
    MapForm::per_one(complex::sqrt(ONE - lambda))
}

/// Max-norm distance in `(σ1, σ2)`.
pub fn moduli_distance(a: &ModuliPoint, b: &ModuliPoint) -> f64 {
    complex::abs(a.sigma1 - b.sigma1).max(complex::abs(a.sigma2 - b.sigma2))
}

/// A concrete form realizing a consistent triple: a λ-form on two
/// multipliers whose product is not 1, or `z + 1/z` for `(1, 1, 1)`.
pub fn representative(triple: &EigenvalueTriple) -> Result<MapForm, ModuliError> {
    let m = triple.to_array();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if m[i] * m[j] != ONE {
            return MapForm::lambda(m[i], m[j]);
        }
    }
    if m.iter().all(|l| *l == ONE) {
        return Ok(MapForm::per_one(ZERO));
    }
    Err(ModuliError::InvalidForm)
}

/// `z ↦ λ1 z + B + 1/z` as a quadratic rational map.
pub fn b_form_rational(lambda1: C64, b: C64) -> QuadRational {
    QuadRational {
        num: [lambda1, b, ONE],
        den: [ZERO, ONE, ZERO],
    }
}

/// Multipliers of `λ1 z + B + 1/z` at its two finite fixed points (`λ1 ≠ 1`),
/// or at `−1/B` and ∞ (`λ1 = 1`): `2λ1 − 1 − B²/2 ± B sqrt(B²/4 − (λ1 − 1))`.
///
/// With `t = 1/z` a fixed point solves `t² + B t + (λ1 − 1) = 0`, and the
/// multiplier `λ1 − t²` equals `2λ1 − 1 + B t` there.
pub fn b_form_other_multipliers(lambda1: C64, b: C64) -> [C64; 2] {
    let head = lambda1 * 2.0 - 1.0 - b * b * 0.5;
    let root = b * complex::sqrt(b * b * 0.25 - (lambda1 - 1.0));
    [head + root, head - root]
}
