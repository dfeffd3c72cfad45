//! Verification batteries behind `quadmod verify`.
//!
//! Every sample is drawn from its own counter-based stream, and batches are
//! collected in index order, so reports do not depend on the thread count.

use std::str::FromStr;

use quadmod_core::classify::{self, Connectivity, RegionInput, RegionLabel, RepellingReport, Tier, TierPolicy};
use quadmod_core::complex::{self, C64, ONE, ZERO};
use quadmod_core::dynamics::{self, DEFAULT_TOL};
use quadmod_core::sampler::{self, CounterSampler};
use quadmod_core::twist::{self, TwistPlan};
use rand::Rng;
use rayon::prelude::*;
use serde_json::Value;

use crate::error::CliError;
use crate::json::{cpx, num, object};
use crate::threads;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Repelling,
    Twist,
    Bound,
    B2,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Repelling => "repelling",
            Suite::Twist => "twist",
            Suite::Bound => "bound",
            Suite::B2 => "b2",
        }
    }

    pub fn default_samples(&self) -> u64 {
        match self {
            Suite::Repelling => 100_000,
            Suite::Twist => 100,
            Suite::Bound => 10_000,
            Suite::B2 => 1_000,
        }
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "repelling" => Ok(Suite::Repelling),
            "twist" => Ok(Suite::Twist),
            "bound" => Ok(Suite::Bound),
            "b2" => Ok(Suite::B2),
            other => Err(CliError::Usage(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub samples: u64,
    pub seed: u64,
    pub budget: u64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub passed: bool,
    pub report: Value,
}

pub fn run(suite: Suite, opts: &SuiteOptions) -> Result<SuiteOutcome, CliError> {
    if opts.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let (passed, body) = match suite {
        Suite::Repelling => repelling(opts)?,
        Suite::Twist => twist_suite(opts)?,
        Suite::Bound => bound(opts)?,
        Suite::B2 => b2(opts)?,
    };
    let report = object([
        ("schema", Value::from(crate::json::SCHEMA_VERSION)),
        ("suite", Value::from(suite.name())),
        ("seed", Value::from(opts.seed)),
        ("samples", Value::from(opts.samples)),
        ("passed", Value::from(passed)),
        ("result", body),
    ]);
    Ok(SuiteOutcome { passed, report })
}

const BATCH: u64 = 4096;

/// Maps `f` over `0..n` on the pool, in index order.
fn par_indexed<T: Send>(n: u64, threads: usize, f: impl Fn(u64) -> T + Sync) -> Vec<T> {
    threads::with_pool(threads, || (0..n).into_par_iter().map(&f).collect())
}

/// Tallies `Re λ3` over the open bidisk.
pub fn repelling_report(samples: u64, seed: u64, threads: usize) -> RepellingReport {
    let sampler = CounterSampler::new(seed);
    let batches = samples.div_ceil(BATCH);
    par_indexed(batches, threads, |b| {
        let mut r = RepellingReport::default();
        for i in b * BATCH..((b + 1) * BATCH).min(samples) {
            let (l1, l2) = classify::repelling_sample(&sampler, i);
            r.record(i, l1, l2);
        }
        r
    })
    .into_iter()
    .fold(RepellingReport::default(), RepellingReport::merge)
}

fn repelling(opts: &SuiteOptions) -> Result<(bool, Value), CliError> {
    let r = repelling_report(opts.samples, opts.seed, opts.threads);
    let counterexample = match r.first_violation {
        Some((i, l1, l2)) => object([
            ("index", Value::from(i)),
            ("lambda1", cpx(l1, "lambda1")?),
            ("lambda2", cpx(l2, "lambda2")?),
        ]),
        None => Value::Null,
    };
    let min = if r.evaluated > 0 { num(r.min_re_lambda3, "min Re lambda3")? } else { Value::Null };
    Ok((
        r.passed(),
        object([
            ("evaluated", Value::from(r.evaluated)),
            ("rejected", Value::from(r.rejected)),
            ("min_re_lambda3", min),
            ("violations", Value::from(r.violations)),
            ("counterexample", counterexample),
        ]),
    ))
}

/// Random plan `index`: multipliers with `0.05 ≤ |λj| ≤ 0.95` and branch
/// indices in `{−1, 0, 1}`.
pub fn random_plan(sampler: &CounterSampler, index: u64) -> TwistPlan {
    let mut rng = sampler.stream(index);
    let l1 = sampler::annulus(&mut rng, ZERO, 0.05, 0.95);
    let l2 = sampler::annulus(&mut rng, ZERO, 0.05, 0.95);
    let k1 = rng.gen_range(-1..=1);
    let k2 = rng.gen_range(-1..=1);
    twist::plan_from_multipliers(l1, l2, k1, k2).expect("annulus samples are valid multipliers")
}

pub const TWIST_N_MAX: u64 = 1_000_000;
pub const TWIST_LIMIT_N: u64 = 10_000;
pub const RATE_NS: [u64; 3] = [1_000, 2_000, 4_000];
pub const RATE_RANGE: (f64, f64) = (0.4, 0.6);
pub const SUM_TOL: f64 = 1e-12;
pub const ROUND_TRIP_TOL: f64 = 1e-12;

/// Results of the twist battery for one plan.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanCheck {
    pub plan: TwistPlan,
    pub max_sum_residual: f64,
    /// First tabulated `n` whose class left `H` or had `Re λ3 ≤ 1`.
    pub left_h_at: Option<u64>,
    pub error_at_limit_n: f64,
    pub rate_ratios: [f64; 3],
    /// Same ratios for the distance of `(λ1, λ2, λ3)` to `(1, 1, λ)` in `C³`.
    pub triple_ratios: [f64; 3],
    pub round_trip: f64,
}

impl PlanCheck {
    pub fn sums_ok(&self) -> bool {
        self.max_sum_residual < SUM_TOL
    }

    pub fn limit_ok(&self) -> bool {
        self.error_at_limit_n < 1e-2 * (1.0 + complex::abs(self.plan.limit_lambda))
    }

    pub fn rate_ok(&self) -> bool {
        self.rate_ratios.iter().all(|r| (RATE_RANGE.0..=RATE_RANGE.1).contains(r))
    }

    pub fn round_trip_ok(&self) -> bool {
        self.round_trip < ROUND_TRIP_TOL
    }

    pub fn passed(&self) -> bool {
        self.sums_ok() && self.left_h_at.is_none() && self.limit_ok() && self.rate_ok() && self.round_trip_ok()
    }
}

fn triple_distance(plan: &TwistPlan, n: u64) -> Result<f64, CliError> {
    let s = twist::twist_state(plan, n).map_err(CliError::usage_from)?;
    let t = s.triple;
    Ok(complex::abs(t.lambda1 - ONE)
        .max(complex::abs(t.lambda2 - ONE))
        .max(complex::abs(t.lambda3 - plan.limit_lambda)))
}

pub fn check_plan(plan: &TwistPlan) -> Result<PlanCheck, CliError> {
    let err = |n| twist::twist_limit_error(plan, n).map_err(CliError::usage_from);
    let mut max_sum_residual: f64 = 0.0;
    let mut left_h_at = None;
    let ns = std::iter::once(0).chain(twist::geometric_grid(TWIST_N_MAX));
    for n in ns {
        let s = twist::twist_state(plan, n).map_err(CliError::usage_from)?;
        max_sum_residual = max_sum_residual.max(s.sum_residual());
        let in_h = matches!(
            classify::region_membership(&RegionInput::Triple(s.triple), 0.0),
            Ok(r) if r.label == RegionLabel::H
        );
        if left_h_at.is_none() && !(in_h && s.triple.lambda3.re > 1.0) {
            left_h_at = Some(n);
        }
    }
    let mut rate_ratios = [0.0; 3];
    let mut triple_ratios = [0.0; 3];
    for (k, n) in RATE_NS.into_iter().enumerate() {
        rate_ratios[k] = err(2 * n)? / err(n)?;
        triple_ratios[k] = triple_distance(plan, 2 * n)? / triple_distance(plan, n)?;
    }
    let inv = twist::inverse_twist(plan.limit_lambda).map_err(CliError::usage_from)?;
    let again = twist::plan_from_multipliers(
        complex::exp(inv.omega1),
        complex::exp(inv.omega2),
        twist::branch_of(inv.omega1),
        twist::branch_of(inv.omega2),
    )
    .map_err(CliError::usage_from)?;
    Ok(PlanCheck {
        plan: *plan,
        max_sum_residual,
        left_h_at,
        error_at_limit_n: err(TWIST_LIMIT_N)?,
        rate_ratios,
        triple_ratios,
        round_trip: complex::abs(again.limit_lambda - plan.limit_lambda),
    })
}

pub fn twist_checks(opts: &SuiteOptions) -> Result<Vec<PlanCheck>, CliError> {
    let sampler = CounterSampler::new(opts.seed);
    par_indexed(opts.samples, opts.threads, |i| check_plan(&random_plan(&sampler, i)))
        .into_iter()
        .collect()
}

fn min_max(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

fn plan_json(index: usize, c: &PlanCheck) -> Result<Value, CliError> {
    Ok(object([
        ("index", Value::from(index as u64)),
        ("omega1", cpx(c.plan.omega1, "omega1")?),
        ("omega2", cpx(c.plan.omega2, "omega2")?),
        ("limit_lambda", cpx(c.plan.limit_lambda, "limit")?),
        ("max_sum_residual", num(c.max_sum_residual, "residual")?),
        ("left_h_at", c.left_h_at.map_or(Value::Null, Value::from)),
        ("error_at_limit_n", num(c.error_at_limit_n, "error")?),
        (
            "rate_ratios",
            Value::Array(c.rate_ratios.iter().map(|r| num(*r, "ratio")).collect::<Result<_, _>>()?),
        ),
        ("round_trip", num(c.round_trip, "round trip")?),
    ]))
}

fn twist_suite(opts: &SuiteOptions) -> Result<(bool, Value), CliError> {
    let checks = twist_checks(opts)?;
    let count = |pred: &dyn Fn(&PlanCheck) -> bool| checks.iter().filter(|c| !pred(c)).count() as u64;
    let (rate_lo, rate_hi) = min_max(checks.iter().flat_map(|c| c.rate_ratios));
    let (tri_lo, tri_hi) = min_max(checks.iter().flat_map(|c| c.triple_ratios));
    let (_, max_res) = min_max(checks.iter().map(|c| c.max_sum_residual));
    let passed = checks.iter().all(PlanCheck::passed);
    let failures = object([
        ("sum_conservation", Value::from(count(&PlanCheck::sums_ok))),
        ("containment", Value::from(count(&|c: &PlanCheck| c.left_h_at.is_none()))),
        ("limit", Value::from(count(&PlanCheck::limit_ok))),
        ("rate", Value::from(count(&PlanCheck::rate_ok))),
        ("round_trip", Value::from(count(&PlanCheck::round_trip_ok))),
    ]);
    let counterexample = match checks.iter().position(|c| !c.passed()) {
        Some(i) => plan_json(i, &checks[i])?,
        None => Value::Null,
    };
    Ok((
        passed,
        object([
            ("plans", Value::from(checks.len() as u64)),
            ("failures", failures),
            ("max_sum_residual", num(max_res, "residual")?),
            ("sigma_rate_ratio_range", Value::Array(vec![num(rate_lo, "ratio")?, num(rate_hi, "ratio")?])),
            ("triple_rate_ratio_range", Value::Array(vec![num(tri_lo, "ratio")?, num(tri_hi, "ratio")?])),
            ("counterexample", counterexample),
        ]),
    ))
}

/// `|λ − 1| > 9`, drawn by area from `9 ≤ |λ − 1| ≤ 100`.
pub fn bound_lambda(sampler: &CounterSampler, index: u64) -> C64 {
    let mut rng = sampler.stream(index);
    loop {
        let l = sampler::annulus(&mut rng, ONE, 9.0, 100.0);
        if complex::abs(l - ONE) > 9.0 {
            return l;
        }
    }
}

/// `3 < |B| ≤ 10`, drawn from a stream disjoint from [`bound_lambda`].
pub fn bound_b(sampler: &CounterSampler, index: u64) -> C64 {
    let mut rng = sampler.stream(index | 1 << 63);
    loop {
        let b = sampler::annulus(&mut rng, ZERO, 3.0, 10.0);
        if complex::abs(b) > 3.0 {
            return b;
        }
    }
}

fn bound(opts: &SuiteOptions) -> Result<(bool, Value), CliError> {
    let sampler = CounterSampler::new(opts.seed);
    // the escape bound alone, so that no earlier rung answers first
    let policy = TierPolicy {
        t4: true,
        ..TierPolicy::NONE
    };
    let lambda_bad = par_indexed(opts.samples, opts.threads, |i| {
        let l = bound_lambda(&sampler, i);
        let v = classify::connectivity_per1(l, &policy, opts.budget, DEFAULT_TOL);
        let ok = v.connectivity == Connectivity::Cantor && v.tier == Tier::Certified;
        (!ok).then_some((i, l))
    });
    let b_bad = par_indexed(opts.samples, opts.threads, |i| {
        let b = bound_b(&sampler, i);
        let two = C64::new(2.0, 0.0);
        let ok = dynamics::certified_escape_paper(b, b + two).is_ok() && dynamics::certified_escape_paper(b, b - two).is_ok();
        (!ok).then_some((i, b))
    });
    let first_l = lambda_bad.iter().flatten().next().copied();
    let first_b = b_bad.iter().flatten().next().copied();
    let failures_l = lambda_bad.iter().flatten().count() as u64;
    let failures_b = b_bad.iter().flatten().count() as u64;
    let ex = |x: Option<(u64, C64)>, key: &str| -> Result<Value, CliError> {
        match x {
            Some((i, z)) => Ok(object([("index", Value::from(i)), (key, cpx(z, key)?)])),
            None => Ok(Value::Null),
        }
    };
    Ok((
        failures_l == 0 && failures_b == 0,
        object([
            ("lambda_not_certified", Value::from(failures_l)),
            ("b_not_certified", Value::from(failures_b)),
            ("lambda_counterexample", ex(first_l, "lambda")?),
            ("b_counterexample", ex(first_b, "b")?),
        ]),
    ))
}

/// `Re λ ∈ [1.5, 10)`, `Im λ ∈ [−10, 10)`.
pub fn b2_lambda(sampler: &CounterSampler, index: u64) -> C64 {
    sampler::rectangle(&mut sampler.stream(index), (1.5, 10.0), (-10.0, 10.0))
}

/// `Re λ ∈ (1, 1.5)`, `Im λ ∈ [−10, 10)`.
pub fn b2_near_lambda(sampler: &CounterSampler, index: u64) -> C64 {
    let mut rng = sampler.stream(index | 1 << 63);
    loop {
        let l = sampler::rectangle(&mut rng, (1.0, 1.5), (-10.0, 10.0));
        if l.re > 1.0 {
            return l;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub connected: u64,
    pub cantor: u64,
    pub undetermined: u64,
}

impl Tally {
    fn add(&mut self, c: Connectivity) {
        match c {
            Connectivity::Connected => self.connected += 1,
            Connectivity::Cantor => self.cantor += 1,
            Connectivity::Undetermined => self.undetermined += 1,
        }
    }

    pub fn to_json(&self) -> Value {
        object([
            ("connected", Value::from(self.connected)),
            ("cantor", Value::from(self.cantor)),
            ("undetermined", Value::from(self.undetermined)),
        ])
    }
}

/// Numeric-only verdicts for `samples` draws of `draw`, with the first
/// non-Cantor sample.
pub fn numeric_tally(
    samples: u64,
    opts: &SuiteOptions,
    draw: impl Fn(u64) -> C64 + Sync,
) -> (Tally, Option<(u64, C64, Connectivity)>) {
    let verdicts = par_indexed(samples, opts.threads, |i| {
        let l = draw(i);
        (l, classify::connectivity_per1(l, &TierPolicy::NUMERIC_ONLY, opts.budget, DEFAULT_TOL).connectivity)
    });
    let mut tally = Tally::default();
    let mut first = None;
    for (i, (l, c)) in verdicts.into_iter().enumerate() {
        tally.add(c);
        if first.is_none() && c != Connectivity::Cantor {
            first = Some((i as u64, l, c));
        }
    }
    (tally, first)
}

fn b2(opts: &SuiteOptions) -> Result<(bool, Value), CliError> {
    let sampler = CounterSampler::new(opts.seed);
    let (main, first) = numeric_tally(opts.samples, opts, |i| b2_lambda(&sampler, i));
    let (near, _) = numeric_tally(opts.samples, opts, |i| b2_near_lambda(&sampler, i));
    let counterexample = match first {
        Some((i, l, c)) => object([
            ("index", Value::from(i)),
            ("lambda", cpx(l, "lambda")?),
            ("verdict", Value::from(connectivity_name(c))),
        ]),
        None => Value::Null,
    };
    let rate = near.undetermined as f64 / opts.samples as f64;
    Ok((
        main.cantor == opts.samples,
        object([
            ("budget", Value::from(opts.budget)),
            ("re_1_5_to_10", main.to_json()),
            ("re_1_to_1_5", near.to_json()),
            ("near_boundary_undetermined_rate", num(rate, "rate")?),
            ("counterexample", counterexample),
        ]),
    ))
}

pub fn connectivity_name(c: Connectivity) -> &'static str {
    match c {
        Connectivity::Connected => "connected",
        Connectivity::Cantor => "cantor",
        Connectivity::Undetermined => "undetermined",
    }
}
