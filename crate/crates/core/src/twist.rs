//! Multipliers along a twist sequence in `H` and its limit in `B2`.
//!
//! With `λj = e^{ωj}` (`Re ωj < 0`) the `n`-th class has log-multipliers
//! `1/ω_{j,n} = 1/ωj + (−1)^j n/(2πi)`. The two shifts cancel, so
//! `1/ω_{1,n} + 1/ω_{2,n}` is constant and the classes converge to the
//! `Per1(1)` class with `1/(1 − λ) = 1/ω1 + 1/ω2`.
//!
//! The distance to the limit in `(σ1, σ2)` decays like `1/n²`: the first
//! order terms of `1/(1 − e^ω) = −1/ω + 1/2 − ω/12 + …` cancel between the
//! two fixed points, and the remaining `O(|ω_{j,n}|)` deviation of `λ3`
//! enters `σ` at second order.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::complex::{self, C64, ONE};
use crate::error::TwistError;
use crate::moduli::{self, EigenvalueTriple, ModuliPoint};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwistPlan {
    pub omega1: C64,
    pub omega2: C64,
    pub limit_lambda: C64,
}

impl TwistPlan {
    /// Plan from log-multipliers with negative real parts.
    pub fn from_omegas(omega1: C64, omega2: C64) -> Result<Self, TwistError> {
        if !(omega1.re < 0.0 && omega2.re < 0.0) {
            return Err(TwistError::OutsideUnitDisk);
        }
        Ok(TwistPlan {
            omega1,
            omega2,
            limit_lambda: limit_lambda(omega1, omega2),
        })
    }
}

/// `1 − ω1 ω2/(ω1 + ω2)`.
pub fn limit_lambda(omega1: C64, omega2: C64) -> C64 {
    ONE - omega1 * omega2 / (omega1 + omega2)
}

/// `ωj = log λj + 2πi kj` with the principal logarithm.
pub fn plan_from_multipliers(lambda1: C64, lambda2: C64, k1: i64, k2: i64) -> Result<TwistPlan, TwistError> {
    if lambda1 == complex::ZERO || lambda2 == complex::ZERO {
        return Err(TwistError::ZeroMultiplier);
    }
    if !(complex::abs(lambda1) < 1.0 && complex::abs(lambda2) < 1.0) {
        return Err(TwistError::OutsideUnitDisk);
    }
    let branch = |k: i64| C64::new(0.0, 2.0 * PI * k as f64);
    TwistPlan::from_omegas(complex::ln(lambda1) + branch(k1), complex::ln(lambda2) + branch(k2))
}

/// The branch index `k` with `ω = log e^ω + 2πi k`.
pub fn branch_of(omega: C64) -> i64 {
    let principal = complex::ln(complex::exp(omega));
    libm::round((omega.im - principal.im) / (2.0 * PI)) as i64
}

/// A number kept as an unevaluated sum `hi + lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Compensated {
    pub hi: f64,
    pub lo: f64,
}

impl Compensated {
    fn add(x: f64, y: f64) -> Self {
        let (hi, lo) = complex::two_sum(x, y);
        Compensated { hi, lo }
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwistState {
    pub n: u64,
    pub omega1n: C64,
    pub omega2n: C64,
    pub triple: EigenvalueTriple,
    /// `Re(1/ω_{j,n})`, unchanged by the twist.
    recip_re: [f64; 2],
    /// `Im(1/ω_{j,n})` stored without rounding the shift away.
    recip_im: [Compensated; 2],
    base_sum: C64,
}

impl TwistState {
    pub fn reciprocal(&self, j: usize) -> C64 {
        C64::new(self.recip_re[j], self.recip_im[j].value())
    }

    /// `1/ω_{1,n} + 1/ω_{2,n}`, summed from the compensated parts.
    pub fn reciprocal_sum(&self) -> C64 {
        let [a, b] = self.recip_im;
        let (hi, lo) = complex::two_sum(a.hi, b.hi);
        C64::new(self.recip_re[0] + self.recip_re[1], hi + (lo + (a.lo + b.lo)))
    }

    /// `|(1/ω_{1,n} + 1/ω_{2,n}) − (1/ω1 + 1/ω2)|`.
    pub fn sum_residual(&self) -> f64 {
        complex::abs(self.reciprocal_sum() - self.base_sum)
    }
}

/// The `n`-th class of the sequence.
pub fn twist_state(plan: &TwistPlan, n: u64) -> Result<TwistState, TwistError> {
    let r1 = ONE / plan.omega1;
    let r2 = ONE / plan.omega2;
    let shift = n as f64 / (2.0 * PI);
    let recip_im = [Compensated::add(r1.im, shift), Compensated::add(r2.im, -shift)];
    let recip_re = [r1.re, r2.re];
    let omega1n = ONE / C64::new(recip_re[0], recip_im[0].hi);
    let omega2n = ONE / C64::new(recip_re[1], recip_im[1].hi);
    let l1 = complex::exp(omega1n);
    let l2 = complex::exp(omega2n);
    let l3 = moduli::lambda3_from_eq1(l1, l2)?;
    Ok(TwistState {
        n,
        omega1n,
        omega2n,
        triple: EigenvalueTriple::new(l1, l2, l3),
        recip_re,
        recip_im,
        base_sum: r1 + r2,
    })
}

/// σ-distance from the `n`-th class to the limit class `(1, 1, λ)`.
pub fn twist_limit_error(plan: &TwistPlan, n: u64) -> Result<f64, TwistError> {
    let state = twist_state(plan, n)?;
    Ok(limit_distance(plan, &state))
}

pub fn limit_distance(plan: &TwistPlan, state: &TwistState) -> f64 {
    let here = ModuliPoint::from_triple_unchecked(&state.triple);
    let limit = ModuliPoint::from_triple_unchecked(&EigenvalueTriple::per_one(plan.limit_lambda));
    moduli::moduli_distance(&here, &limit)
}

/// A twist sequence converging to `(1, 1, λ)`, using `ω1 = ω2 = 2(1 − λ)`.
pub fn inverse_twist(lambda: C64) -> Result<TwistPlan, TwistError> {
    if !(lambda.re > 1.0) {
        return Err(TwistError::NotInB2 { re: lambda.re });
    }
    let omega = (ONE - lambda) * 2.0;
    TwistPlan::from_omegas(omega, omega)
}

/// `{1, 2, 4, …}` up to `n_max`, with `n_max` itself appended.
pub fn geometric_grid(n_max: u64) -> Vec<u64> {
    let mut grid = Vec::new();
    let mut n = 1u64;
    while n < n_max {
        grid.push(n);
        n = n.saturating_mul(2);
    }
    if n_max >= 1 {
        grid.push(n_max);
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{region_membership, RegionInput, RegionLabel};
    use crate::complex::c;

    fn minus_two() -> TwistPlan {
        TwistPlan::from_omegas(c(-2.0, 0.0), c(-2.0, 0.0)).unwrap()
    }

    #[test]
    fn plan_examples() {
        let e = libm::exp(-2.0);
        let p = plan_from_multipliers(c(e, 0.0), c(e, 0.0), 0, 0).unwrap();
        assert!(complex::abs(p.omega1 - c(-2.0, 0.0)) < 1e-15);
        assert!(complex::abs(p.limit_lambda - c(2.0, 0.0)) < 1e-15);
        let w = c(-0.7, 1.3);
        let p = plan_from_multipliers(complex::exp(w), complex::exp(w), 0, 0).unwrap();
        assert!(complex::abs(p.limit_lambda - (ONE - w / 2.0)) < 1e-14);
        assert_eq!(plan_from_multipliers(c(0.0, 0.0), c(0.5, 0.0), 0, 0), Err(TwistError::ZeroMultiplier));
        assert_eq!(plan_from_multipliers(c(1.5, 0.0), c(0.5, 0.0), 0, 0), Err(TwistError::OutsideUnitDisk));
    }

    #[test]
    fn state_at_zero() {
        let s = twist_state(&minus_two(), 0).unwrap();
        let e = libm::exp(-2.0);
        // 1/(1 − λ3) = 1 − 2/(1 − e⁻²)
        let oracle = 1.0 - 1.0 / (1.0 - 2.0 / (1.0 - e));
        assert!((s.triple.lambda3.re - oracle).abs() < 1e-14);
        assert!((s.triple.lambda3.re - 2.0 / (1.0 + libm::exp(-2.0))).abs() < 1e-14);
        assert!((s.triple.lambda3.re - 1.7615942).abs() < 1e-7);
        assert!(s.triple.fixed_point_relation_residual() < 1e-14);
    }

    #[test]
    fn sums_are_conserved() {
        let p = minus_two();
        for n in [0, 1, 7, 1000, 123_456, 1_000_000] {
            let s = twist_state(&p, n).unwrap();
            assert!(complex::abs(s.reciprocal_sum() - c(-1.0, 0.0)) < 1e-15, "n = {n}");
            assert!(s.sum_residual() < 1e-15);
        }
    }

    #[test]
    fn log_multipliers_shrink_like_two_pi_over_n() {
        let s = twist_state(&minus_two(), 10_000).unwrap();
        let expected = 2.0 * PI / 10_000.0;
        for w in [s.omega1n, s.omega2n] {
            assert!((complex::abs(w) / expected - 1.0).abs() < 0.1);
        }
    }

    #[test]
    fn error_decreases_quadratically() {
        let p = minus_two();
        let errs: Vec<f64> = [10, 100, 1000, 10_000].iter().map(|n| twist_limit_error(&p, *n).unwrap()).collect();
        for w in errs.windows(2) {
            assert!(w[1] < w[0]);
        }
        for n in [1000, 2000, 4000] {
            let ratio = twist_limit_error(&p, 2 * n).unwrap() / twist_limit_error(&p, n).unwrap();
            assert!((ratio - 0.25).abs() < 0.01, "ratio {ratio}");
        }
    }

    #[test]
    fn states_stay_in_h_and_repel_at_the_third_point() {
        let p = plan_from_multipliers(c(0.3, 0.4), c(-0.2, 0.7), 0, 1).unwrap();
        for n in geometric_grid(1_000_000) {
            let s = twist_state(&p, n).unwrap();
            let r = region_membership(&RegionInput::Triple(s.triple), 0.0).unwrap();
            assert_eq!(r.label, RegionLabel::H);
            assert!(s.triple.lambda3.re > 1.0);
        }
    }

    #[test]
    fn inverse_examples() {
        let p = inverse_twist(c(2.0, 0.0)).unwrap();
        assert_eq!((p.omega1, p.omega2), (c(-2.0, 0.0), c(-2.0, 0.0)));
        let p = inverse_twist(c(2.0, 2.0)).unwrap();
        assert_eq!(p.omega1, c(-2.0, -4.0));
        assert!(complex::abs(p.limit_lambda - c(2.0, 2.0)) < 1e-15);
        assert_eq!(inverse_twist(c(1.0, 1.0)), Err(TwistError::NotInB2 { re: 1.0 }));
    }

    #[test]
    fn inverse_round_trip_with_branches() {
        for lambda in [c(2.0, 2.0), c(1.01, -7.0), c(9.0, 0.5)] {
            let p = inverse_twist(lambda).unwrap();
            let (k1, k2) = (branch_of(p.omega1), branch_of(p.omega2));
            let q = plan_from_multipliers(complex::exp(p.omega1), complex::exp(p.omega2), k1, k2).unwrap();
            assert!(complex::abs(q.limit_lambda - lambda) < 1e-12, "{lambda}");
        }
    }

    #[test]
    fn grid() {
        assert_eq!(geometric_grid(10), [1, 2, 4, 8, 10]);
        assert_eq!(geometric_grid(8), [1, 2, 4, 8]);
        assert!(geometric_grid(0).is_empty());
    }
}
