//! Orbits on the Riemann sphere.
//!
//! Evaluation is homogeneous with max-coordinate normalization after every
//! step, so poles and ∞ need no special cases. For the parabolic family
//! `g_B(z) = z + B + 1/z` two escape certificates are available:
//!
//! * [`certified_escape_paper`]: for `|B| > 3`, the region `|z| > 1`,
//!   `Re(z/B) > 0` is forward invariant and `Re(z/B)` grows by more than
//!   `2/3` per step.
//! * [`certified_escape_general`]: for any `B ≠ 0`, the half plane
//!   `Re(z/B) > 2/|B|²` is forward invariant and `Re(z/B)` grows by more
//!   than `1/2` per step. Inside it `|z| ≥ |B| Re(z/B) > 2/|B|`, so
//!   `|1/(Bz)| < 1/2` and `Re(g(z)/B) − Re(z/B) = 1 + Re(1/(Bz)) > 1/2`.
//!
//! Both are floating-point inequality checks with an additive slack of
//! [`CERT_SLACK`]; they are not interval arithmetic.

use crate::complex::{self, C64, ZERO};
use crate::moduli::MapForm;
use crate::rational::QuadRational;
use crate::sphere::{Chart, SpherePoint};

pub const DEFAULT_BUDGET: u64 = 100_000;
pub const DEFAULT_TOL: f64 = 1e-12;
/// Longest cycle looked for by [`orbit_fate`].
pub const MAX_PERIOD: usize = 16;
/// A cycle counts as attracting when its multiplier has modulus below this.
pub const ATTRACTING_GATE: f64 = 1.0 - 1e-6;
pub const CERT_SLACK: f64 = 1e-12;
/// Past this modulus a parabolic orbit with `B ≠ 0` is reported as escaping
/// even if no certificate fired.
pub const ESCAPE_RADIUS: f64 = 1e12;

/// Image of `z` under `form`.
pub fn evaluate(form: &MapForm, z: SpherePoint) -> SpherePoint {
    // both forms vanish together only for degenerate (non-validated) forms
    form.rational().try_eval(z).unwrap_or(SpherePoint::INFINITY)
}

/// Critical points and their images.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CriticalData {
    pub points: [SpherePoint; 2],
    pub values: [SpherePoint; 2],
}

pub fn critical_points(form: &MapForm) -> CriticalData {
    let rat = form.rational();
    let points = match form {
        MapForm::PerOneForm { .. } => [SpherePoint::finite(C64::new(1.0, 0.0)), SpherePoint::finite(C64::new(-1.0, 0.0))],
        _ => rat.critical_points(),
    };
    let values = points.map(|p| rat.try_eval(p).unwrap_or(SpherePoint::INFINITY));
    CriticalData { points, values }
}

/// Why a certificate was refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Refusal {
    /// `|B| > 3` fails.
    ParameterTooSmall,
    /// `|z| > 1` fails.
    PointTooSmall,
    /// The half-plane condition on `Re(z/B)` fails.
    OutsideHalfPlane,
    /// `B = 0` or a non-finite input.
    Degenerate,
    /// A consequence that should follow from the preconditions did not hold
    /// numerically.
    ConsequenceFailed,
}

/// The checked inequalities of the `|B| > 3` argument at one orbit point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PaperEscapeCertificate {
    pub b_modulus: f64,
    pub z_modulus: f64,
    /// `Re(z/B) > 0`.
    pub re_ratio: f64,
    /// `Re(g(z)/B − z/B) = 1 + Re(1/(Bz)) > 2/3`.
    pub increment: f64,
    /// `|g(z)|`, checked `> 2|B|/3 > 1`.
    pub image_modulus: f64,
}

pub fn certified_escape_paper(b: C64, z: C64) -> Result<PaperEscapeCertificate, Refusal> {
    if !complex::is_finite(b) || !complex::is_finite(z) || b == ZERO {
        return Err(Refusal::Degenerate);
    }
    let b_modulus = complex::abs(b);
    if !(b_modulus > 3.0 + CERT_SLACK) {
        return Err(Refusal::ParameterTooSmall);
    }
    let z_modulus = complex::abs(z);
    if !(z_modulus > 1.0 + CERT_SLACK) {
        return Err(Refusal::PointTooSmall);
    }
    let re_ratio = (z / b).re;
    if !(re_ratio > CERT_SLACK) {
        return Err(Refusal::OutsideHalfPlane);
    }
    let increment = 1.0 + (b * z).inv().re;
    let image = z + b + z.inv();
    let image_modulus = complex::abs(image);
    let bound = 2.0 * b_modulus / 3.0;
    if !(increment > 2.0 / 3.0 + CERT_SLACK && image_modulus > bound + CERT_SLACK && bound > 1.0) {
        return Err(Refusal::ConsequenceFailed);
    }
    Ok(PaperEscapeCertificate {
        b_modulus,
        z_modulus,
        re_ratio,
        increment,
        image_modulus,
    })
}

/// The checked inequalities of the half-plane argument at one orbit point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeneralEscapeCertificate {
    /// `Re(z/B)`.
    pub re_ratio: f64,
    /// `2/|B|²`.
    pub threshold: f64,
    /// `1 + Re(1/(Bz))`, checked `> 1/2`.
    pub increment: f64,
}

pub fn certified_escape_general(b: C64, z: C64) -> Result<GeneralEscapeCertificate, Refusal> {
    if b == ZERO || !complex::is_finite(b) || !complex::is_finite(z) {
        return Err(Refusal::Degenerate);
    }
    let threshold = 2.0 / b.norm_sqr();
    let re_ratio = (z / b).re;
    if !(re_ratio > threshold + CERT_SLACK) {
        return Err(Refusal::OutsideHalfPlane);
    }
    let increment = 1.0 + (b * z).inv().re;
    if !(increment > 0.5 + CERT_SLACK) {
        return Err(Refusal::ConsequenceFailed);
    }
    Ok(GeneralEscapeCertificate {
        re_ratio,
        threshold,
        increment,
    })
}

/// How an orbit ended. `steps` counts applications of the map before the
/// decision.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Fate {
    AttractedToPoint { point: SpherePoint, multiplier: C64, steps: u64 },
    AttractedToCycle { period: usize, multiplier: C64, steps: u64 },
    /// Convergence to the parabolic point ∞ of `z + B + 1/z`; `certified`
    /// when the half-plane certificate held at some orbit point.
    EscapesParabolic { certified: bool, steps: u64 },
    /// The orbit reached a non-attracting fixed point exactly.
    HitFixedPointExactly { point: SpherePoint, steps: u64 },
    Undetermined { steps: u64 },
}

impl Fate {
    pub fn steps(&self) -> u64 {
        match *self {
            Fate::AttractedToPoint { steps, .. }
            | Fate::AttractedToCycle { steps, .. }
            | Fate::EscapesParabolic { steps, .. }
            | Fate::HitFixedPointExactly { steps, .. }
            | Fate::Undetermined { steps } => steps,
        }
    }
}

/// Multiplier of the period-`p` cycle through (near) `start`, by the chain
/// rule in the charts of the orbit points.
pub fn cycle_multiplier(rat: &QuadRational, start: SpherePoint, period: usize) -> C64 {
    let mut product = C64::new(1.0, 0.0);
    let mut x = start;
    for i in 0..period {
        let Some(next) = rat.try_eval(x) else {
            return C64::new(f64::NAN, f64::NAN);
        };
        let chart_out = if i + 1 == period { start.chart() } else { next.chart() };
        product *= rat.chart_derivative(x, x.chart(), chart_out);
        x = next;
    }
    product
}

/// Iterates `form` from `start` for at most `budget` steps.
///
/// Conjugated forms are iterated in the coordinates of their base form and
/// reported back through the conjugating map.
pub fn orbit_fate(form: &MapForm, start: SpherePoint, budget: u64, tol: f64) -> Fate {
    let (base, mobius) = form.flatten();
    let rat = base.rational();
    let parabolic_b = match base {
        MapForm::PerOneForm { b } if *b != ZERO => Some(*b),
        _ => None,
    };
    let to_outer = |p: SpherePoint| mobius.apply(p);
    let tol_sqr = tol * tol;

    let mut z = mobius.inverse().apply(start);
    // history[k] = z_{n−k}
    let mut history = [z; MAX_PERIOD];
    let mut filled = 0usize;

    for step in 0..budget {
        if let Some(b) = parabolic_b {
            if let Some(w) = z.to_finite() {
                if certified_escape_general(b, w).is_ok() {
                    return Fate::EscapesParabolic { certified: true, steps: step };
                }
            }
            if z.chart() == Chart::Infinite && complex::abs(z.v()) * ESCAPE_RADIUS < 1.0 && !z.is_infinity() {
                return Fate::EscapesParabolic { certified: false, steps: step };
            }
        }
        let Some(next) = rat.try_eval(z) else {
            return Fate::Undetermined { steps: step };
        };
        if next == z {
            let multiplier = rat.multiplier_at(z);
            if complex::abs(multiplier) < ATTRACTING_GATE {
                return Fate::AttractedToPoint { point: to_outer(z), multiplier, steps: step };
            }
            return Fate::HitFixedPointExactly { point: to_outer(z), steps: step };
        }
        if filled < MAX_PERIOD {
            filled += 1;
        }
        history.copy_within(0..MAX_PERIOD - 1, 1);
        history[0] = z;
        for period in 1..=filled {
            if next.chordal_distance_sqr(&history[period - 1]) < tol_sqr {
                let multiplier = cycle_multiplier(&rat, next, period);
                if complex::abs(multiplier) < ATTRACTING_GATE {
                    let steps = step + 1;
                    return if period == 1 {
                        Fate::AttractedToPoint { point: to_outer(next), multiplier, steps }
                    } else {
                        Fate::AttractedToCycle { period, multiplier, steps }
                    };
                }
            }
        }
        z = next;
    }
    Fate::Undetermined { steps: budget }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{c, ONE};

    fn pt(re: f64, im: f64) -> SpherePoint {
        SpherePoint::finite(c(re, im))
    }

    #[test]
    fn evaluate_examples() {
        let sq = MapForm::lambda(ZERO, ZERO).unwrap();
        assert!(evaluate(&sq, pt(1.0, 1.0)).chordal_distance(&pt(0.0, 2.0)) < 1e-16);
        for b in [ZERO, c(2.0, 0.0), c(-0.3, 1.7)] {
            assert_eq!(evaluate(&MapForm::per_one(b), SpherePoint::ZERO), SpherePoint::INFINITY);
        }
        let f = MapForm::lambda(c(0.5, 0.0), c(1.0 / 3.0, 0.0)).unwrap();
        assert!(evaluate(&f, pt(0.75, 0.0)).chordal_distance(&pt(0.75, 0.0)) < 1e-15);
    }

    #[test]
    fn critical_point_examples() {
        let d = critical_points(&MapForm::per_one(c(4.0, 0.0)));
        assert_eq!(d.points, [pt(1.0, 0.0), pt(-1.0, 0.0)]);
        assert_eq!(d.values, [pt(6.0, 0.0), pt(2.0, 0.0)]);

        let d = critical_points(&MapForm::lambda(ZERO, ZERO).unwrap());
        assert!(d.points.contains(&SpherePoint::ZERO));
        assert!(d.points.contains(&SpherePoint::INFINITY));

        let form = MapForm::lambda(c(0.5, 0.0), c(1.0 / 3.0, 0.0)).unwrap();
        let d = critical_points(&form);
        let r = libm::sqrt(30.0) / 2.0;
        let expected = [pt(-3.0 + r, 0.0), pt(-3.0 - r, 0.0)];
        for e in expected {
            assert!(d.points.iter().any(|p| p.chordal_distance(&e) < 1e-14));
        }
        let rat = form.rational();
        for p in d.points {
            assert!(complex::abs(rat.chart_derivative(p, p.chart(), Chart::Finite)) < 1e-8);
        }
    }

    #[test]
    fn paper_certificate_examples() {
        let cert = certified_escape_paper(c(4.0, 0.0), c(6.0, 0.0)).unwrap();
        assert_eq!(cert.re_ratio, 1.5);
        assert!(cert.increment > 2.0 / 3.0);
        assert!(certified_escape_paper(c(3.1, 0.0), c(1.1, 0.0)).is_ok());
        assert_eq!(certified_escape_paper(c(2.0, 0.0), c(6.0, 0.0)), Err(Refusal::ParameterTooSmall));
        assert_eq!(certified_escape_paper(c(4.0, 0.0), c(0.5, 0.0)), Err(Refusal::PointTooSmall));
        assert_eq!(certified_escape_paper(c(4.0, 0.0), c(-6.0, 0.0)), Err(Refusal::OutsideHalfPlane));
    }

    #[test]
    fn general_certificate_examples() {
        let cert = certified_escape_general(c(4.0, 0.0), c(6.0, 0.0)).unwrap();
        assert_eq!(cert.threshold, 0.125);
        assert!(certified_escape_general(c(0.5, 0.0), c(20.0, 0.0)).is_ok());
        assert_eq!(certified_escape_general(c(0.5, 0.0), ONE), Err(Refusal::OutsideHalfPlane));
        assert_eq!(certified_escape_general(ZERO, ONE), Err(Refusal::Degenerate));
    }

    #[test]
    fn fate_examples() {
        let g4 = MapForm::per_one(c(4.0, 0.0));
        match orbit_fate(&g4, pt(6.0, 0.0), DEFAULT_BUDGET, DEFAULT_TOL) {
            Fate::EscapesParabolic { certified: true, steps } => assert!(steps <= 3),
            other => panic!("{other:?}"),
        }

        let sq = MapForm::lambda(ZERO, ZERO).unwrap();
        match orbit_fate(&sq, pt(0.5, 0.0), DEFAULT_BUDGET, DEFAULT_TOL) {
            Fate::AttractedToPoint { point, multiplier, .. } => {
                assert!(point.chordal_distance(&SpherePoint::ZERO) < 1e-12);
                assert!(complex::abs(multiplier) < 1e-12);
            }
            other => panic!("{other:?}"),
        }

        let g2 = MapForm::per_one(c(2.0, 0.0));
        assert_eq!(
            orbit_fate(&g2, pt(-1.0, 0.0), DEFAULT_BUDGET, DEFAULT_TOL),
            Fate::HitFixedPointExactly { point: SpherePoint::INFINITY, steps: 2 }
        );
    }

    #[test]
    fn map_r_orbit_is_never_a_cycle() {
        let r = MapForm::per_one(ZERO);
        let mut z = c(2.0, 0.0);
        for _ in 0..50 {
            let next = z + z.inv();
            assert!(next.re > z.re);
            z = next;
        }
        for budget in [10, 1_000, 100_000] {
            match orbit_fate(&r, pt(2.0, 0.0), budget, DEFAULT_TOL) {
                Fate::Undetermined { steps } => assert_eq!(steps, budget),
                Fate::EscapesParabolic { .. } => {}
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn conjugated_fate_reports_outer_coordinates() {
        let m = crate::mobius::MobiusMap::new(c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let form = MapForm::conjugated(MapForm::lambda(ZERO, ZERO).unwrap(), m);
        match orbit_fate(&form, pt(2.5, 0.0), DEFAULT_BUDGET, DEFAULT_TOL) {
            Fate::AttractedToPoint { point, .. } => assert!(point.chordal_distance(&pt(2.0, 0.0)) < 1e-10),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_attracting_two_cycle() {
        // f_{1+√5, 0} is conjugate to z² − 1, whose critical orbit falls
        // into the superattracting cycle {0, −1}.
        let form = MapForm::lambda(c(1.0 + libm::sqrt(5.0), 0.0), ZERO).unwrap();
        let crit = critical_points(&form);
        let finite = crit.points.iter().find(|p| !p.is_infinity()).unwrap();
        match orbit_fate(&form, *finite, DEFAULT_BUDGET, DEFAULT_TOL) {
            Fate::AttractedToCycle { period, multiplier, .. } => {
                assert_eq!(period, 2);
                assert!(complex::abs(multiplier) < 1e-6);
            }
            other => panic!("{other:?}"),
        }
        let swap = QuadRational {
            num: [ZERO, ZERO, ONE],
            den: [ONE, ZERO, ZERO],
        };
        assert!(complex::abs(cycle_multiplier(&swap, SpherePoint::ZERO, 2)) < 1e-12);
    }

    #[test]
    fn fate_is_deterministic() {
        let g = MapForm::per_one(c(0.3, 1.1));
        let a = orbit_fate(&g, pt(0.2, -0.4), 5_000, DEFAULT_TOL);
        let b = orbit_fate(&g, pt(0.2, -0.4), 5_000, DEFAULT_TOL);
        assert_eq!(a, b);
    }
}
