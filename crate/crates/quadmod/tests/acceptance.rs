//! Acceptance battery. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Set `QUADMOD_BLESS=1` to (re)write the golden image fixture.

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use quadmod::render;
use quadmod::suites::{self, Suite, SuiteOptions, RATE_NS, RATE_RANGE};
use quadmod_core::classify::{self, Connectivity, Rule, TierPolicy};
use quadmod_core::complex::{self, C64, ONE};
use quadmod_core::dynamics::DEFAULT_TOL;
use quadmod_core::mobius::MobiusMap;
use quadmod_core::moduli::{self, EigenvalueTriple, MapForm};
use quadmod_core::raster::{self, PixelClass, RasterJob};
use quadmod_core::sampler::{self, CounterSampler};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

/// Fixed-point relation on the bidisk and `σ3 = σ1 − 2` on multipliers
/// obtained by differentiation.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let s = CounterSampler::new(1);
    let mut worst_eq1: f64 = 0.0;
    for i in 0..100_000 {
        let (l1, l2) = classify::repelling_sample(&s, i);
        let l3 = moduli::lambda3_from_eq1(l1, l2).expect("bidisk pair");
        worst_eq1 = worst_eq1.max(EigenvalueTriple::new(l1, l2, l3).fixed_point_relation_residual());
    }
    let mut worst_sigma: f64 = 0.0;
    let mut computed = 0;
    for i in 0..10_000u64 {
        let mut rng = s.stream(1 << 62 | i);
        let l1 = sampler::rectangle(&mut rng, (-3.0, 3.0), (-3.0, 3.0));
        let l2 = sampler::rectangle(&mut rng, (-3.0, 3.0), (-3.0, 3.0));
        if complex::abs(l1 * l2 - ONE) < 1e-3 {
            continue;
        }
        let mut form = MapForm::lambda(l1, l2).expect("product is not 1");
        if i % 2 == 1 {
            let coeff = |rng: &mut rand_chacha::ChaCha8Rng| sampler::unit_disk(rng) * 2.0;
            let m = MobiusMap::new(ONE + coeff(&mut rng), coeff(&mut rng), coeff(&mut rng), ONE + coeff(&mut rng));
            match m {
                Ok(m) if complex::abs(m.determinant()) > 0.1 => form = MapForm::conjugated(form, m),
                _ => continue,
            }
        }
        let t = moduli::eigenvalue_triple(&form).expect("valid form");
        worst_sigma = worst_sigma.max(t.sigma_residual());
        computed += 1;
    }
    let elapsed = start.elapsed();
    outcome(
        worst_eq1 < 1e-12 && worst_sigma < 1e-9 && computed >= 9_000 && within(elapsed, 5.0),
        format!(
            "fixed-point relation residual max {worst_eq1:.2e} (< 1e-12) over 1e5 pairs; sigma3 = sigma1 - 2 residual max {worst_sigma:.2e} (< 1e-9) over {computed} differentiated forms; {:.2}s (< 5s)",
            elapsed.as_secs_f64()
        ),
    )
}

/// `Re λ3 > 1` on the bidisk for seeds 1..=10.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut min = f64::INFINITY;
    let mut violations = 0;
    let mut evaluated = 0;
    for seed in 1..=10 {
        let r = suites::repelling_report(100_000, seed, 1);
        min = min.min(r.min_re_lambda3);
        violations += r.violations;
        evaluated += r.evaluated;
    }
    let elapsed = start.elapsed();
    outcome(
        violations == 0 && min > 1.0 && evaluated == 1_000_000 && within(elapsed, 10.0),
        format!(
            "{evaluated} pairs over seeds 1..10: {violations} violations, min Re lambda3 = {min:.17}; {:.2}s (< 10s)",
            elapsed.as_secs_f64()
        ),
    )
}

/// Multipliers of `z + B + 1/z` by differentiation are `{1, 1, 1 − B²}`.
fn criterion_3() -> Outcome {
    let s = CounterSampler::new(3);
    let mut worst: f64 = 0.0;
    for i in 0..1_000 {
        let b = sampler::rectangle(&mut s.stream(i), (-5.0, 5.0), (-5.0, 5.0));
        let t = moduli::eigenvalue_triple(&MapForm::per_one(b)).expect("valid form");
        worst = worst.max(t.multiset_distance(&EigenvalueTriple::per_one(ONE - b * b)));
    }
    outcome(worst < 1e-10, format!("max multiset distance {worst:.2e} (< 1e-10) over 1e3 random B"))
}

/// Twist sequences: conservation, containment, limit, rate, round trip.
fn criterion_4() -> Outcome {
    let start = Instant::now();
    let opts = SuiteOptions {
        samples: 100,
        seed: 4,
        budget: 0,
        threads: 1,
    };
    let checks = suites::twist_checks(&opts).expect("random plans are valid");
    let elapsed = start.elapsed();
    let fails = |f: fn(&suites::PlanCheck) -> bool| checks.iter().filter(|c| !f(c)).count();
    let max_res = checks.iter().map(|c| c.max_sum_residual).fold(0.0, f64::max);
    let ratios = || checks.iter().flat_map(|c| c.rate_ratios);
    let (lo, hi) = (ratios().fold(f64::INFINITY, f64::min), ratios().fold(0.0, f64::max));
    let tri = || checks.iter().flat_map(|c| c.triple_ratios);
    let (tlo, thi) = (tri().fold(f64::INFINITY, f64::min), tri().fold(0.0, f64::max));
    let pass = checks.iter().all(suites::PlanCheck::passed) && within(elapsed, 30.0);
    outcome(
        pass,
        format!(
            "100 plans: sum residual max {max_res:.2e} (< 1e-12, {} fail); left H {}; limit at n=1e4 within 1e-2(1+|lambda|) {} fail; round trip {} fail; \
             sigma-distance ratio error(2n)/error(n) for n in {RATE_NS:?} spans [{lo:.4}, {hi:.4}], required [{}, {}] ({} plans fail); \
             for reference the C^3 distance ratio spans [{tlo:.4}, {thi:.4}]; {:.2}s (< 30s)",
            fails(suites::PlanCheck::sums_ok),
            checks.iter().filter(|c| c.left_h_at.is_some()).count(),
            fails(suites::PlanCheck::limit_ok),
            fails(suites::PlanCheck::round_trip_ok),
            RATE_RANGE.0,
            RATE_RANGE.1,
            fails(suites::PlanCheck::rate_ok),
            elapsed.as_secs_f64()
        ),
    )
}

/// `|λ − 1| > 9` is certified Cantor; `3 < |B| ≤ 10` passes the escape
/// certificate at both critical values.
fn criterion_5() -> Outcome {
    let start = Instant::now();
    let opts = SuiteOptions {
        samples: 10_000,
        seed: 5,
        budget: 1_000,
        threads: 1,
    };
    let out = suites::run(Suite::Bound, &opts).expect("suite runs");
    let elapsed = start.elapsed();
    let r = &out.report["result"];
    outcome(
        out.passed && within(elapsed, 10.0),
        format!(
            "1e4 lambda: {} not certified; 1e4 B: {} not certified; {:.2}s (< 10s)",
            r["lambda_not_certified"],
            r["b_not_certified"],
            elapsed.as_secs_f64()
        ),
    )
}

/// Numeric-only verdicts on `Re λ ∈ [1.5, 10]` are all Cantor.
fn criterion_6() -> Outcome {
    let start = Instant::now();
    let opts = SuiteOptions {
        samples: 1_000,
        seed: 6,
        budget: 100_000,
        threads: 1,
    };
    let out = suites::run(Suite::B2, &opts).expect("suite runs");
    let elapsed = start.elapsed();
    let r = &out.report["result"];
    let main = &r["re_1_5_to_10"];
    let near = &r["re_1_to_1_5"];
    let pass = main["cantor"] == 1000 && main["connected"] == 0 && main["undetermined"] == 0 && within(elapsed, 120.0);
    outcome(
        pass,
        format!(
            "Re in [1.5,10]: {} cantor, {} connected, {} undetermined; Re in (1,1.5) (reported only): {} cantor, {} undetermined; {:.2}s (< 120s)",
            main["cantor"],
            main["connected"],
            main["undetermined"],
            near["cantor"],
            near["undetermined"],
            elapsed.as_secs_f64()
        ),
    )
}

/// The closed unit disk minus 1 is connected through T2; `λ = 1` through T1.
fn criterion_7() -> Outcome {
    let s = CounterSampler::new(7);
    let policy = TierPolicy::default();
    let mut ok = 0;
    for i in 0..1_000 {
        let mut rng = s.stream(i);
        // one sample in ten on the unit circle
        let l = if i % 10 == 0 {
            loop {
                let z = C64::from_polar(1.0, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
                if complex::abs(z - ONE) > 1e-6 {
                    break z;
                }
            }
        } else {
            sampler::unit_disk(&mut rng)
        };
        let v = classify::connectivity_per1(l, &policy, 1_000, DEFAULT_TOL);
        if v.connectivity == Connectivity::Connected && v.rule == Some(Rule::T2NonRepelling) {
            ok += 1;
        }
    }
    let r = classify::connectivity_per1(ONE, &policy, 1_000, DEFAULT_TOL);
    let r_ok = r.connectivity == Connectivity::Connected && r.rule == Some(Rule::T1CentralR);
    outcome(
        ok == 1_000 && r_ok,
        format!("{ok}/1000 disk samples connected via t2; lambda = 1 connected via t1: {r_ok}"),
    )
}

/// The default 400×400 parameter plane.
fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut job = RasterJob::default_parameter(400, 10_000);
    let reference = render::render_job(&job, None, 1).expect("parameter job");
    let ppm = raster::encode_ppm(&reference);
    let mut identical = true;
    for threads in [2, 8] {
        identical &= raster::encode_ppm(&render::render_job(&job, None, threads).unwrap()) == ppm;
    }
    for tile in [16, 256] {
        job.tile = tile;
        identical &= raster::encode_ppm(&render::render_job(&job, None, 1).unwrap()) == ppm;
    }
    let w = &job.window;
    let mut outside = 0;
    for j in 0..w.rows {
        for i in 0..w.cols {
            if reference.pixel(i, j) == raster::BLACK && complex::abs(w.pixel_center(i, j) - ONE) > 9.0 {
                outside += 1;
            }
        }
    }
    let c = &reference.counts;
    let elapsed = start.elapsed();
    let pass = c.get(PixelClass::Connected) > 0
        && c.get(PixelClass::Cantor) > 0
        && outside == 0
        && reference.is_mirror_symmetric()
        && identical
        && within(elapsed, 120.0);
    outcome(
        pass,
        format!(
            "connected {}, cantor {}, undetermined {}; connected outside |lambda-1|<=9: {outside}; mirror symmetric: {}; \
             identical across threads 1,2,8 and tiles 16,64,256: {identical}; {:.2}s (< 120s)",
            c.get(PixelClass::Connected),
            c.get(PixelClass::Cantor),
            c.get(PixelClass::Undetermined),
            reference.is_mirror_symmetric(),
            elapsed.as_secs_f64()
        ),
    )
}

/// No numeric Connected verdict outside `|λ + 1| ≤ 2`.
fn criterion_9() -> Outcome {
    let s = CounterSampler::new(9);
    let mut tally = [0u32; 3];
    for i in 0..1_000 {
        let mut rng = s.stream(i);
        let l = loop {
            let l = ONE + sampler::unit_disk(&mut rng) * 9.0;
            if complex::abs(l + ONE) > 2.0 {
                break l;
            }
        };
        let v = classify::connectivity_per1(l, &TierPolicy::NUMERIC_ONLY, 10_000, DEFAULT_TOL);
        tally[v.connectivity as usize] += 1;
    }
    let [connected, cantor, undetermined] = tally;
    outcome(
        connected == 0,
        format!("1e3 samples: {connected} connected, {cantor} cantor, {undetermined} undetermined (reported)"),
    )
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden_8x8.ppm")
}

/// The 8×8 default parameter window at budget 1000 matches the fixture.
fn criterion_10() -> Outcome {
    let job = RasterJob::default_parameter(8, 1_000);
    let sequential = raster::encode_ppm(&raster::raster_parameter_plane(&job).unwrap());
    if std::env::var_os("QUADMOD_BLESS").is_some() {
        std::fs::write(golden_path(), &sequential).expect("writing fixture");
    }
    let Ok(golden) = std::fs::read(golden_path()) else {
        return outcome(false, "fixture missing".into());
    };
    let parallel_same = [1, 2, 8]
        .iter()
        .all(|t| raster::encode_ppm(&render::render_job(&job, None, *t).unwrap()) == golden);
    outcome(
        sequential == golden && parallel_same,
        format!(
            "sequential matches fixture: {}; parallel (1,2,8 threads) matches: {parallel_same}",
            sequential == golden
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("fixed-point relation and sigma identity", criterion_1),
        ("third multiplier repels on the bidisk", criterion_2),
        ("Per1(1) multipliers by differentiation", criterion_3),
        ("twist sequences", criterion_4),
        ("escape bound |lambda-1| > 9", criterion_5),
        ("B2 classes are Cantor (numeric only)", criterion_6),
        ("closed unit disk is connected", criterion_7),
        ("parameter plane raster", criterion_8),
        ("no connected verdict outside |lambda+1| <= 2", criterion_9),
        ("golden 8x8 image", criterion_10),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        writeln!(out, "{tag} criterion {:>2} ({name}): {}", k + 1, o.detail).unwrap();
        out.flush().unwrap();
        if !o.pass {
            failed.push(k + 1);
        }
    }
    if !failed.is_empty() {
        writeln!(out, "acceptance: failed criteria {failed:?}").unwrap();
        std::process::exit(1);
    }
    writeln!(out, "acceptance: all criteria pass").unwrap();
}
