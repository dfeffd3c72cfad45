//! Boundary pieces of the central hyperbolic component `H` and Julia-set
//! connectivity on the `Per1(1)` slice.
//!
//! Regions are read off the multiplier triple:
//!
//! | label | triple |
//! |-------|--------|
//! | `H` | two multipliers in the open unit disk |
//! | `B0` | `(λ1, λ2, ·)`, `λ1` in the closed disk, `λ2` on the circle, no multiplier 1 |
//! | `B1` | `(1, 1, λ)`, `|λ| ≤ 1`, `λ ≠ 1` |
//! | `B2` | `(1, 1, λ)`, `Re λ > 1` |
//! | `B2ClosureOnly` | `(1, 1, λ)` with `Re λ = 1`, including `(1, 1, 1)` |
//! | `Per1Of1` | any other class with a multiplier 1 |
//!
//! A triple containing one multiplier 1 contains at least two: with `λ1 = 1`
//! the relation `σ3 = σ1 − 2` reduces to `(λ2 − 1)(λ3 − 1) = 0`.

use core::fmt;
use core::str::FromStr;

use crate::complex::{self, C64, ONE, ROUNDOFF};
use crate::dynamics::{self, Fate, PaperEscapeCertificate};
use crate::error::{ClassifyError, ModuliError};
use crate::moduli::{self, EigenvalueTriple, MapForm};
use crate::sampler::{self, CounterSampler};
use crate::sphere::SpherePoint;

/// Default width of the "too close to call" band.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RegionLabel {
    H,
    B0,
    B1,
    B2,
    B2ClosureOnly,
    Per1Of1,
    Exterior,
}

impl RegionLabel {
    pub fn name(&self) -> &'static str {
        match self {
            RegionLabel::H => "H",
            RegionLabel::B0 => "B0",
            RegionLabel::B1 => "B1",
            RegionLabel::B2 => "B2",
            RegionLabel::B2ClosureOnly => "B2-closure",
            RegionLabel::Per1Of1 => "Per1(1)",
            RegionLabel::Exterior => "exterior",
        }
    }

    pub fn is_boundary_of_h(&self) -> bool {
        matches!(
            self,
            RegionLabel::B0 | RegionLabel::B1 | RegionLabel::B2 | RegionLabel::B2ClosureOnly
        )
    }

    pub fn in_per_one(&self) -> bool {
        matches!(
            self,
            RegionLabel::B1 | RegionLabel::B2 | RegionLabel::B2ClosureOnly | RegionLabel::Per1Of1
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Region {
    pub label: RegionLabel,
    /// The ambiguity band that was applied.
    pub eps: f64,
}

/// A class given by its multipliers or by a λ-form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionInput {
    Triple(EigenvalueTriple),
    Pair(C64, C64),
}

impl RegionInput {
    pub fn triple(&self) -> Result<EigenvalueTriple, ModuliError> {
        match *self {
            RegionInput::Triple(t) => {
                if !t.is_finite() {
                    return Err(ModuliError::InvalidForm);
                }
                moduli::sigma_coordinates(&t)?;
                Ok(t)
            }
            RegionInput::Pair(l1, l2) => moduli::eigenvalue_triple(&MapForm::lambda(l1, l2)?),
        }
    }
}

fn is_one(m: C64) -> bool {
    complex::abs(m - ONE) <= ROUNDOFF
}

fn on_circle(m: C64) -> bool {
    (complex::abs(m) - 1.0).abs() <= ROUNDOFF
}

fn in_open_disk(m: C64) -> bool {
    complex::abs(m) < 1.0 && !on_circle(m)
}

fn in_closed_disk(m: C64) -> bool {
    complex::abs(m) <= 1.0 || on_circle(m)
}

fn count_ones(t: &EigenvalueTriple) -> usize {
    t.to_array().iter().filter(|m| is_one(**m)).count()
}

/// The multiplier left after removing two multipliers equal to 1.
fn per_one_parameter(t: &EigenvalueTriple) -> C64 {
    let m = t.to_array();
    let mut best = m[0];
    for x in m {
        if complex::abs(x - ONE) > complex::abs(best - ONE) {
            best = x;
        }
    }
    best
}

pub fn in_h(t: &EigenvalueTriple) -> bool {
    count_ones(t) == 0 && t.to_array().iter().filter(|m| in_open_disk(**m)).count() >= 2
}

pub fn in_b0(t: &EigenvalueTriple) -> bool {
    if count_ones(t) != 0 {
        return false;
    }
    let m = t.to_array();
    (0..3).any(|i| {
        (0..3).any(|j| {
            i != j && in_closed_disk(m[i]) && on_circle(m[j]) && complex::abs(m[i] * m[j] - ONE) > ROUNDOFF
        })
    })
}

pub fn in_b1(t: &EigenvalueTriple) -> bool {
    if count_ones(t) != 2 {
        return false;
    }
    in_closed_disk(per_one_parameter(t))
}

pub fn in_b2(t: &EigenvalueTriple) -> bool {
    count_ones(t) == 2 && per_one_parameter(t).re - 1.0 > ROUNDOFF
}

pub fn in_b2_closure_only(t: &EigenvalueTriple) -> bool {
    match count_ones(t) {
        3 => true,
        2 => (per_one_parameter(t).re - 1.0).abs() <= ROUNDOFF,
        _ => false,
    }
}

fn label_of(t: &EigenvalueTriple) -> RegionLabel {
    if in_h(t) {
        RegionLabel::H
    } else if in_b0(t) {
        RegionLabel::B0
    } else if in_b1(t) {
        RegionLabel::B1
    } else if in_b2(t) {
        RegionLabel::B2
    } else if in_b2_closure_only(t) {
        RegionLabel::B2ClosureOnly
    } else if count_ones(t) > 0 {
        RegionLabel::Per1Of1
    } else {
        RegionLabel::Exterior
    }
}

/// Region of a class. Membership is decided by exact comparisons (up to
/// rounding noise); if a deciding quantity lies within `eps` of its
/// threshold the label is returned inside
/// [`ClassifyError::AmbiguousNearBoundary`] instead.
pub fn region_membership(input: &RegionInput, eps: f64) -> Result<Region, ClassifyError> {
    let t = input.triple()?;
    let label = label_of(&t);
    let near = |q: f64| q > ROUNDOFF && q <= eps;
    let ambiguous = |quantity| ClassifyError::AmbiguousNearBoundary {
        tentative: label,
        quantity,
        eps,
    };
    let ones = count_ones(&t);
    if ones == 1 {
        return Err(ambiguous("|λ − 1|"));
    }
    for m in t.to_array() {
        if near(complex::abs(m - ONE)) {
            return Err(ambiguous("|λ − 1|"));
        }
        if ones == 0 && near((complex::abs(m) - 1.0).abs()) {
            return Err(ambiguous("|λ|"));
        }
    }
    if ones == 2 {
        let l = per_one_parameter(&t);
        if near((complex::abs(l) - 1.0).abs()) {
            return Err(ambiguous("|λ|"));
        }
        if near((l.re - 1.0).abs()) {
            return Err(ambiguous("Re λ"));
        }
    }
    Ok(Region { label, eps })
}

/// Whether the class lies on the boundary of `H`, i.e. in
/// `B0 ∪ B1 ∪ B2 ∪ closure(B2)`.
pub fn boundary_of_h(input: &RegionInput, eps: f64) -> Result<bool, ClassifyError> {
    region_membership(input, eps).map(|r| r.label.is_boundary_of_h())
}

/// Which rungs of the connectivity ladder may be used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TierPolicy {
    pub t1: bool,
    pub t2: bool,
    pub t3: bool,
    pub t4: bool,
    pub t5: bool,
    pub numeric: bool,
}

impl TierPolicy {
    pub const NONE: TierPolicy = TierPolicy {
        t1: false,
        t2: false,
        t3: false,
        t4: false,
        t5: false,
        numeric: false,
    };

    pub const NUMERIC_ONLY: TierPolicy = TierPolicy {
        t1: false,
        t2: false,
        t3: false,
        t4: false,
        t5: false,
        numeric: true,
    };

    pub const ALL: TierPolicy = TierPolicy {
        t1: true,
        t2: true,
        t3: true,
        t4: true,
        t5: true,
        numeric: true,
    };
}

impl Default for TierPolicy {
    /// Everything except the externally cited bound.
    fn default() -> Self {
        TierPolicy {
            t5: false,
            ..TierPolicy::ALL
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown tier name (expected t1..t5 or numeric)")]
pub struct ParseTierError;

impl FromStr for TierPolicy {
    type Err = ParseTierError;

    /// Comma-separated subset of `t1,t2,t3,t4,t5,numeric`; `none` is empty.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = TierPolicy::NONE;
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name {
                "t1" => p.t1 = true,
                "t2" => p.t2 = true,
                "t3" => p.t3 = true,
                "t4" => p.t4 = true,
                "t5" => p.t5 = true,
                "numeric" => p.numeric = true,
                "none" => {}
                _ => return Err(ParseTierError),
            }
        }
        Ok(p)
    }
}

impl fmt::Display for TierPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = [
            (self.t1, "t1"),
            (self.t2, "t2"),
            (self.t3, "t3"),
            (self.t4, "t4"),
            (self.t5, "t5"),
            (self.numeric, "numeric"),
        ];
        let mut first = true;
        for (on, name) in names {
            if on {
                if !first {
                    f.write_str(",")?;
                }
                f.write_str(name)?;
                first = false;
            }
        }
        if first {
            f.write_str("none")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Connectivity {
    Connected,
    Cantor,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Tier {
    /// A statement proved for the whole region.
    TheoremShortcut,
    /// A bound cited from outside and not reproved here.
    ExternalTheorem,
    /// Both critical orbits carry escape certificates.
    Certified,
    Numeric,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Rule {
    /// `λ = 1`: the class of `z + 1/z`, whose Julia set is connected.
    T1CentralR,
    /// Two distinct non-repelling fixed points force a connected Julia set.
    T2NonRepelling,
    /// `Re λ > 1`: the class is a twist limit and its Julia set is a Cantor set.
    T3TwistLimit,
    /// `|λ − 1| > 9`: both critical values escape by the `|B| > 3` argument.
    T4EscapeBound,
    /// `|λ + 1| > 2`: outside the Buff–Epstein disk.
    T5BuffEpstein,
    /// Maps in `H` have a quasicircle Julia set.
    QuasicircleH,
    /// Critical orbits iterated.
    Numeric,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::T1CentralR => "t1",
            Rule::T2NonRepelling => "t2",
            Rule::T3TwistLimit => "t3",
            Rule::T4EscapeBound => "t4",
            Rule::T5BuffEpstein => "t5",
            Rule::QuasicircleH => "h",
            Rule::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Evidence {
    /// Decided by the rule alone.
    Rule,
    PaperCertificates([PaperEscapeCertificate; 2]),
    /// Fates of the two critical values.
    Orbits([Fate; 2]),
    /// No rung applied.
    Nothing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Verdict {
    pub connectivity: Connectivity,
    pub tier: Tier,
    pub rule: Option<Rule>,
    pub evidence: Evidence,
}

impl Verdict {
    fn shortcut(connectivity: Connectivity, tier: Tier, rule: Rule) -> Self {
        Verdict {
            connectivity,
            tier,
            rule: Some(rule),
            evidence: Evidence::Rule,
        }
    }

    /// Iterations until both critical orbits were decided, when orbits ran.
    pub fn steps(&self) -> Option<u64> {
        match &self.evidence {
            Evidence::Orbits(f) => Some(f[0].steps().max(f[1].steps())),
            _ => None,
        }
    }
}

/// Connectivity of the Julia set of `f_{1,λ}`, the `Per1(1)` class whose
/// other multiplier is `λ`, by the first applicable rung of the ladder.
pub fn connectivity_per1(lambda: C64, policy: &TierPolicy, budget: u64, tol: f64) -> Verdict {
    use Connectivity::*;
    let dist_one = complex::abs(lambda - ONE);
    if policy.t1 && dist_one <= ROUNDOFF {
        return Verdict::shortcut(Connected, Tier::TheoremShortcut, Rule::T1CentralR);
    }
    if policy.t2 && complex::abs(lambda) <= 1.0 && dist_one > ROUNDOFF {
        return Verdict::shortcut(Connected, Tier::TheoremShortcut, Rule::T2NonRepelling);
    }
    if policy.t3 && lambda.re > 1.0 {
        return Verdict::shortcut(Cantor, Tier::TheoremShortcut, Rule::T3TwistLimit);
    }
    let b = complex::sqrt(ONE - lambda);
    if policy.t4 && dist_one > 9.0 {
        let two = C64::new(2.0, 0.0);
        if let (Ok(plus), Ok(minus)) = (
            dynamics::certified_escape_paper(b, b + two),
            dynamics::certified_escape_paper(b, b - two),
        ) {
            return Verdict {
                connectivity: Cantor,
                tier: Tier::Certified,
                rule: Some(Rule::T4EscapeBound),
                evidence: Evidence::PaperCertificates([plus, minus]),
            };
        }
    }
    if policy.t5 && complex::abs(lambda + ONE) > 2.0 {
        return Verdict::shortcut(Cantor, Tier::ExternalTheorem, Rule::T5BuffEpstein);
    }
    if !policy.numeric {
        return Verdict {
            connectivity: Undetermined,
            tier: Tier::None,
            rule: None,
            evidence: Evidence::Nothing,
        };
    }
    numeric_per1(b, budget, tol)
}

fn numeric_per1(b: C64, budget: u64, tol: f64) -> Verdict {
    let form = MapForm::per_one(b);
    let two = C64::new(2.0, 0.0);
    let fates = [b + two, b - two].map(|v| dynamics::orbit_fate(&form, SpherePoint::finite(v), budget, tol));
    let attracted = |f: &Fate| match f {
        Fate::AttractedToPoint { point, .. } => !point.is_infinity(),
        Fate::AttractedToCycle { .. } => true,
        _ => false,
    };
    let (connectivity, tier) = if fates.iter().any(attracted) {
        (Connectivity::Connected, Tier::Numeric)
    } else {
        match fates {
            [Fate::EscapesParabolic { certified: c1, .. }, Fate::EscapesParabolic { certified: c2, .. }] if b != C64::new(0.0, 0.0) => {
                (Connectivity::Cantor, if c1 && c2 { Tier::Certified } else { Tier::Numeric })
            }
            _ => (Connectivity::Undetermined, Tier::None),
        }
    };
    Verdict {
        connectivity,
        tier,
        rule: Some(Rule::Numeric),
        evidence: Evidence::Orbits(fates),
    }
}

/// Connectivity for any class the ladder can speak about: `Per1(1)` classes
/// go through [`connectivity_per1`]; classes with two non-repelling fixed
/// points (including `H`) are connected; anything else is undetermined.
pub fn connectivity_of_class(t: &EigenvalueTriple, policy: &TierPolicy, budget: u64, tol: f64) -> Verdict {
    if count_ones(t) >= 2 {
        return connectivity_per1(per_one_parameter(t), policy, budget, tol);
    }
    if in_h(t) {
        return Verdict::shortcut(Connectivity::Connected, Tier::TheoremShortcut, Rule::QuasicircleH);
    }
    if t.to_array().iter().filter(|m| in_closed_disk(**m)).count() >= 2 {
        return Verdict::shortcut(Connectivity::Connected, Tier::TheoremShortcut, Rule::T2NonRepelling);
    }
    Verdict {
        connectivity: Connectivity::Undetermined,
        tier: Tier::None,
        rule: None,
        evidence: Evidence::Nothing,
    }
}

/// Tally of `Re λ3` over pairs `(λ1, λ2)` from the open bidisk.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RepellingReport {
    pub evaluated: u64,
    pub rejected: u64,
    pub min_re_lambda3: f64,
    pub violations: u64,
    /// Smallest index whose `Re λ3 ≤ 1`, with its pair.
    pub first_violation: Option<(u64, C64, C64)>,
}

impl Default for RepellingReport {
    fn default() -> Self {
        RepellingReport {
            evaluated: 0,
            rejected: 0,
            min_re_lambda3: f64::INFINITY,
            violations: 0,
            first_violation: None,
        }
    }
}

impl RepellingReport {
    /// Adds one pair. Pairs with `λ1 λ2` near 1 are rejected unevaluated.
    pub fn record(&mut self, index: u64, l1: C64, l2: C64) {
        if sampler::near_product_one(l1, l2) {
            self.rejected += 1;
            return;
        }
        let Ok(l3) = moduli::lambda3_from_eq1(l1, l2) else {
            self.rejected += 1;
            return;
        };
        self.evaluated += 1;
        self.min_re_lambda3 = self.min_re_lambda3.min(l3.re);
        if !(l3.re > 1.0) {
            self.violations += 1;
            if self.first_violation.map_or(true, |(i, _, _)| index < i) {
                self.first_violation = Some((index, l1, l2));
            }
        }
    }

    /// Combines tallies of disjoint index sets; the result does not depend
    /// on the merge order.
    pub fn merge(mut self, other: RepellingReport) -> RepellingReport {
        self.evaluated += other.evaluated;
        self.rejected += other.rejected;
        self.min_re_lambda3 = self.min_re_lambda3.min(other.min_re_lambda3);
        self.violations += other.violations;
        self.first_violation = match (self.first_violation, other.first_violation) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.evaluated > 0 && self.min_re_lambda3 > 1.0
    }
}

/// The pair drawn for `index`.
pub fn repelling_sample(sampler: &CounterSampler, index: u64) -> (C64, C64) {
    sampler::bidisk_pair(&mut sampler.stream(index))
}

/// Checks `Re λ3 > 1` for `samples` pairs in the open bidisk.
pub fn verify_repelling(samples: u64, seed: u64) -> RepellingReport {
    let sampler = CounterSampler::new(seed);
    let mut report = RepellingReport::default();
    for i in 0..samples {
        let (l1, l2) = repelling_sample(&sampler, i);
        report.record(i, l1, l2);
    }
    report
}
