//! Flag parsing and the four subcommands.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quadmod_core::classify::{
    self, Connectivity, Evidence, RegionInput, Rule, Tier, TierPolicy, Verdict, DEFAULT_EPS,
};
use quadmod_core::dynamics::{Fate, PaperEscapeCertificate, DEFAULT_BUDGET, DEFAULT_TOL};
use quadmod_core::moduli::MapForm;
use quadmod_core::raster::{self, ColorScheme, PixelClass, RasterJob, RasterMode, Window};
use quadmod_core::twist;
use quadmod_core::{ClassifyError, EigenvalueTriple, C64};
use serde_json::Value;

use crate::error::CliError;
use crate::json::{self, cpx, num, object};
use crate::suites::{self, Suite, SuiteOptions};
use crate::{render, threads, twist_table};

/// Parses `"re,im"`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected re,im but got {s:?}"))?;
    let part = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok(C64::new(part(re)?, part(im)?))
}

/// `"cx,cy,width,height"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub center: C64,
    pub width: f64,
    pub height: f64,
}

impl FromStr for WindowSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        let [cx, cy, w, h] = parts[..] else {
            return Err(format!("expected cx,cy,width,height but got {s:?}"));
        };
        let f = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        Ok(WindowSpec {
            center: C64::new(f(cx)?, f(cy)?),
            width: f(w)?,
            height: f(h)?,
        })
    }
}

/// `"N"` (square) or `"COLSxROWS"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    pub cols: u32,
    pub rows: u32,
}

impl FromStr for Resolution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
        match s.split_once('x') {
            Some((c, r)) => Ok(Resolution { cols: n(c)?, rows: n(r)? }),
            None => {
                let k = n(s)?;
                Ok(Resolution { cols: k, rows: k })
            }
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "quadmod", version, about = "Moduli, connectivity and twist limits of quadratic rational maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Region and Julia-set connectivity of a class (JSON on stdout).
    Classify(ClassifyArgs),
    /// Tabulate a twist sequence and its limit (CSV).
    Twist(TwistArgs),
    /// Render the parameter plane or a dynamical plane (PPM plus sidecar JSON).
    Raster(RasterArgs),
    /// Run a verification suite (JSON on stdout; exit 3 on failure).
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// The Per1(1) class with other multiplier LAMBDA ("re,im").
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with_all = ["l1", "l2"], required_unless_present = "l1")]
    pub lambda: Option<C64>,
    /// First multiplier of (λ1 z + z²)/(λ2 z + 1).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, requires = "l2")]
    pub l1: Option<C64>,
    /// Second multiplier of (λ1 z + z²)/(λ2 z + 1).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, requires = "l1")]
    pub l2: Option<C64>,
    /// Rungs of the connectivity ladder: any of t1,t2,t3,t4,t5,numeric.
    #[arg(long, default_value = "t1,t2,t3,t4,numeric")]
    pub tiers: TierPolicy,
    /// Iteration budget per critical orbit.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Ambiguity band for region boundaries.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct TwistArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, requires = "l2", conflicts_with = "target_lambda")]
    pub l1: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, requires = "l1")]
    pub l2: Option<C64>,
    /// Logarithm branches for --l1 and --l2.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub k1: i64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub k2: i64,
    /// Build the sequence converging to (1, 1, λ), Re λ > 1.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, required_unless_present = "l1")]
    pub target_lambda: Option<C64>,
    #[arg(long, default_value_t = 10_000)]
    pub n_max: u64,
    /// Tabulate n = 1, 2, 4, … instead of every n.
    #[arg(long)]
    pub geometric: bool,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Parameter,
    Dynamical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Shaded,
    Flat,
}

#[derive(Debug, Clone, Args)]
pub struct RasterArgs {
    #[arg(long, value_enum, default_value = "parameter")]
    pub mode: ModeArg,
    /// "cx,cy,width,height"; defaults to [−9,11]×[−10,10] (parameter) or
    /// [−2,2]×[−2,2] (dynamical).
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<WindowSpec>,
    /// "N" or "COLSxROWS".
    #[arg(long, default_value = "400")]
    pub res: Resolution,
    #[arg(long, default_value_t = 10_000)]
    pub budget: u64,
    #[arg(long, default_value = "t1,t2,t3,t4,numeric")]
    pub tiers: TierPolicy,
    /// Tile side in pixels.
    #[arg(long, default_value_t = 64)]
    pub tile: u32,
    #[arg(long, value_enum, default_value = "shaded")]
    pub scheme: SchemeArg,
    /// Worker threads (else QUADMOD_THREADS, else all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// λ1 of the map (λ1 z + z²)/(λ2 z + 1) for the dynamical plane.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, requires = "l2")]
    pub l1: Option<C64>,
    /// λ2 of the same map.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, requires = "l1")]
    pub l2: Option<C64>,
    /// Dynamical plane of z + B + 1/z.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with = "l1")]
    pub b: Option<C64>,
    /// Conjugate the λ-form so its fixed points sit at −r, −1/r, 1.
    #[arg(long, requires = "l1")]
    pub symmetric: Option<f64>,
    /// Record wall time in the sidecar (makes it run-dependent).
    #[arg(long)]
    pub timing: bool,
    /// PPM output; the sidecar is written next to it with extension .json.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub suite: String,
    /// Sample (or plan) count; each suite has its own default.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Iteration budget for numeric verdicts.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Runs a parsed command, writing its primary output to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Classify(a) => cmd_classify(&a, stdout),
        Command::Twist(a) => cmd_twist(&a, stdout),
        Command::Raster(a) => cmd_raster(&a, stdout),
        Command::Verify(a) => cmd_verify(&a, stdout),
    }
}

fn write_out(stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    stdout.write_all(text.as_bytes()).map_err(|e| CliError::io("writing stdout", e))
}

fn connectivity_name(c: Connectivity) -> &'static str {
    suites::connectivity_name(c)
}

fn tier_name(t: Tier) -> &'static str {
    match t {
        Tier::TheoremShortcut => "theorem_shortcut",
        Tier::ExternalTheorem => "external_theorem",
        Tier::Certified => "certified",
        Tier::Numeric => "numeric",
        Tier::None => "none",
    }
}

fn certificate_json(c: &PaperEscapeCertificate) -> Result<Value, CliError> {
    Ok(object([
        ("b_modulus", num(c.b_modulus, "certificate")?),
        ("z_modulus", num(c.z_modulus, "certificate")?),
        ("re_ratio", num(c.re_ratio, "certificate")?),
        ("increment", num(c.increment, "certificate")?),
        ("image_modulus", num(c.image_modulus, "certificate")?),
    ]))
}

fn fate_json(f: &Fate) -> Result<Value, CliError> {
    Ok(match *f {
        Fate::AttractedToPoint { point, multiplier, steps } => object([
            ("fate", Value::from("attracted_to_point")),
            ("point", point.to_finite().map_or(Ok(Value::from("inf")), |z| cpx(z, "point"))?),
            ("multiplier", cpx(multiplier, "multiplier")?),
            ("steps", Value::from(steps)),
        ]),
        Fate::AttractedToCycle { period, multiplier, steps } => object([
            ("fate", Value::from("attracted_to_cycle")),
            ("period", Value::from(period as u64)),
            ("multiplier", cpx(multiplier, "multiplier")?),
            ("steps", Value::from(steps)),
        ]),
        Fate::EscapesParabolic { certified, steps } => object([
            ("fate", Value::from("escapes_parabolic")),
            ("certified", Value::from(certified)),
            ("steps", Value::from(steps)),
        ]),
        Fate::HitFixedPointExactly { point, steps } => object([
            ("fate", Value::from("hit_fixed_point_exactly")),
            ("point", point.to_finite().map_or(Ok(Value::from("inf")), |z| cpx(z, "point"))?),
            ("steps", Value::from(steps)),
        ]),
        Fate::Undetermined { steps } => object([("fate", Value::from("undetermined")), ("steps", Value::from(steps))]),
    })
}

fn verdict_json(v: &Verdict) -> Result<(Value, Value), CliError> {
    let (certificates, orbits) = match &v.evidence {
        Evidence::PaperCertificates(c) => (
            Value::Array(c.iter().map(certificate_json).collect::<Result<_, _>>()?),
            Value::Null,
        ),
        Evidence::Orbits(f) => (Value::Array(vec![]), Value::Array(f.iter().map(fate_json).collect::<Result<_, _>>()?)),
        Evidence::Rule | Evidence::Nothing => (Value::Array(vec![]), Value::Null),
    };
    Ok((certificates, orbits))
}

fn triple_json(t: &EigenvalueTriple) -> Result<Value, CliError> {
    Ok(Value::Array(
        t.to_array().iter().map(|m| cpx(*m, "multiplier")).collect::<Result<_, _>>()?,
    ))
}

pub fn cmd_classify(a: &ClassifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (input_json, region_input) = match (a.lambda, a.l1, a.l2) {
        (Some(l), None, None) => (
            object([("lambda", cpx(l, "lambda")?)]),
            RegionInput::Triple(EigenvalueTriple::per_one(l)),
        ),
        (None, Some(l1), Some(l2)) => (
            object([("l1", cpx(l1, "l1")?), ("l2", cpx(l2, "l2")?)]),
            RegionInput::Pair(l1, l2),
        ),
        _ => return Err(CliError::Usage("give either --lambda or both --l1 and --l2".into())),
    };
    let finite = match region_input {
        RegionInput::Triple(t) => t.is_finite(),
        RegionInput::Pair(l1, l2) => quadmod_core::complex::is_finite(l1) && quadmod_core::complex::is_finite(l2),
    };
    if !finite {
        return Err(CliError::Numeric("input is not finite".into()));
    }
    let triple = region_input.triple().map_err(|e| match e {
        quadmod_core::ModuliError::InconsistentTriple { .. } => CliError::Numeric(format!("{e}")),
        other => CliError::usage_from(other),
    })?;
    if !triple.is_finite() {
        return Err(CliError::Numeric("multipliers are not finite".into()));
    }
    let (region, region_note) = match classify::region_membership(&region_input, a.eps) {
        Ok(r) => (r.label, Value::Null),
        Err(ClassifyError::AmbiguousNearBoundary { tentative, quantity, eps }) => (
            tentative,
            Value::from(format!("ambiguous: {quantity} within {eps:e} of its threshold")),
        ),
        Err(ClassifyError::Moduli(e)) => return Err(CliError::usage_from(e)),
    };
    let verdict = classify::connectivity_of_class(&triple, &a.tiers, a.budget, DEFAULT_TOL);
    let note = match verdict.rule {
        Some(Rule::T1CentralR) => Value::from("[R]"),
        _ => Value::Null,
    };
    let (certificates, orbits) = verdict_json(&verdict)?;
    let report = object([
        ("schema", Value::from(json::SCHEMA_VERSION)),
        ("input", input_json),
        ("multipliers", triple_json(&triple)?),
        ("region", Value::from(region.name())),
        ("region_note", region_note),
        ("boundary_of_h", Value::from(region.is_boundary_of_h())),
        ("verdict", Value::from(connectivity_name(verdict.connectivity))),
        ("tier", Value::from(tier_name(verdict.tier))),
        ("rule", verdict.rule.map_or(Value::Null, |r| Value::from(r.name()))),
        ("note", note),
        ("steps", verdict.steps().map_or(Value::Null, Value::from)),
        ("certificates", certificates),
        ("orbits", orbits),
        ("tiers", Value::from(a.tiers.to_string())),
        ("budget", Value::from(a.budget)),
    ]);
    write_out(stdout, &json::to_canonical_string(&report))
}

pub fn cmd_twist(a: &TwistArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let plan = match (a.target_lambda, a.l1, a.l2) {
        (Some(l), None, None) => twist::inverse_twist(l),
        (None, Some(l1), Some(l2)) => twist::plan_from_multipliers(l1, l2, a.k1, a.k2),
        _ => return Err(CliError::Usage("give either --target-lambda or both --l1 and --l2".into())),
    }
    .map_err(CliError::usage_from)?;
    let ns = twist_table::grid(a.n_max, a.geometric);
    let rows = twist_table::rows(&plan, &ns).map_err(CliError::usage_from)?;
    match &a.output {
        Some(path) => {
            let mut buf = Vec::new();
            twist_table::write_csv(&mut buf, &rows)?;
            fs::write(path, buf).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
        }
        None => twist_table::write_csv(stdout, &rows),
    }
}

/// The form whose dynamical plane is drawn.
pub fn dynamical_form(a: &RasterArgs) -> Result<MapForm, CliError> {
    match (a.l1, a.l2, a.b) {
        (Some(l1), Some(l2), None) => {
            let f = MapForm::lambda(l1, l2).map_err(CliError::usage_from)?;
            match a.symmetric {
                Some(r) => raster::mobius_conjugate_symmetric(&f, r).map_err(CliError::usage_from),
                None => Ok(f),
            }
        }
        (None, None, Some(b)) => Ok(MapForm::per_one(b)),
        _ => Err(CliError::Usage("dynamical mode needs --l1 and --l2, or --b".into())),
    }
}

pub fn job_from_args(a: &RasterArgs) -> Result<RasterJob, CliError> {
    let mode = match a.mode {
        ModeArg::Parameter => RasterMode::Parameter,
        ModeArg::Dynamical => RasterMode::Dynamical,
    };
    let spec = a.window.unwrap_or(match mode {
        RasterMode::Parameter => WindowSpec {
            center: C64::new(1.0, 0.0),
            width: 20.0,
            height: 20.0,
        },
        RasterMode::Dynamical => WindowSpec {
            center: C64::new(0.0, 0.0),
            width: 4.0,
            height: 4.0,
        },
    });
    let window = Window::new(spec.center, spec.width, spec.height, a.res.cols, a.res.rows).map_err(CliError::usage_from)?;
    if a.tile == 0 {
        return Err(CliError::Usage("--tile must be positive".into()));
    }
    Ok(RasterJob {
        mode,
        window,
        policy: a.tiers,
        budget: a.budget,
        tile: a.tile,
        scheme: match a.scheme {
            SchemeArg::Shaded => ColorScheme::Shaded,
            SchemeArg::Flat => ColorScheme::Flat,
        },
    })
}

/// Flags that reproduce `job` exactly.
pub fn job_to_args(job: &RasterJob) -> Vec<String> {
    let w = &job.window;
    vec![
        "--mode".into(),
        match job.mode {
            RasterMode::Parameter => "parameter",
            RasterMode::Dynamical => "dynamical",
        }
        .into(),
        format!("--window={},{},{},{}", w.center.re, w.center.im, w.width, w.height),
        format!("--res={}x{}", w.cols, w.rows),
        format!("--budget={}", job.budget),
        format!("--tiers={}", job.policy),
        format!("--tile={}", job.tile),
        format!(
            "--scheme={}",
            match job.scheme {
                ColorScheme::Shaded => "shaded",
                ColorScheme::Flat => "flat",
            }
        ),
    ]
}

fn job_json(job: &RasterJob, form: Option<&MapForm>) -> Result<Value, CliError> {
    let w = &job.window;
    let form_json = match form {
        None => Value::Null,
        Some(f) => form_json(f)?,
    };
    Ok(object([
        (
            "mode",
            Value::from(match job.mode {
                RasterMode::Parameter => "parameter",
                RasterMode::Dynamical => "dynamical",
            }),
        ),
        (
            "window",
            object([
                ("center", cpx(w.center, "center")?),
                ("width", num(w.width, "width")?),
                ("height", num(w.height, "height")?),
                ("cols", Value::from(w.cols)),
                ("rows", Value::from(w.rows)),
            ]),
        ),
        ("tiers", Value::from(job.policy.to_string())),
        ("budget", Value::from(job.budget)),
        ("tile", Value::from(job.tile)),
        (
            "scheme",
            Value::from(match job.scheme {
                ColorScheme::Shaded => "shaded",
                ColorScheme::Flat => "flat",
            }),
        ),
        ("map", form_json),
    ]))
}

fn form_json(f: &MapForm) -> Result<Value, CliError> {
    Ok(match f {
        MapForm::LambdaForm { lambda1, lambda2 } => object([
            ("form", Value::from("lambda")),
            ("lambda1", cpx(*lambda1, "lambda1")?),
            ("lambda2", cpx(*lambda2, "lambda2")?),
        ]),
        MapForm::PerOneForm { b } => object([("form", Value::from("per_one")), ("b", cpx(*b, "b")?)]),
        MapForm::Conjugated { base, mobius } => object([
            ("form", Value::from("conjugated")),
            ("base", form_json(base)?),
            (
                "mobius",
                Value::Array(vec![
                    cpx(mobius.a, "mobius")?,
                    cpx(mobius.b, "mobius")?,
                    cpx(mobius.c, "mobius")?,
                    cpx(mobius.d, "mobius")?,
                ]),
            ),
        ]),
    })
}

pub fn sidecar_path(ppm: &Path) -> PathBuf {
    ppm.with_extension("json")
}

pub fn cmd_raster(a: &RasterArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let job = job_from_args(a)?;
    let form = match job.mode {
        RasterMode::Parameter => {
            if a.l1.is_some() || a.b.is_some() {
                return Err(CliError::Usage("--l1/--l2/--b apply to --mode dynamical only".into()));
            }
            None
        }
        RasterMode::Dynamical => Some(dynamical_form(a)?),
    };
    let threads = threads::resolve_threads(a.threads)?;
    let start = Instant::now();
    let image = render::render_job(&job, form.as_ref(), threads).map_err(CliError::usage_from)?;
    let elapsed = start.elapsed().as_secs_f64();

    let ppm = raster::encode_ppm(&image);
    fs::write(&a.output, &ppm).map_err(|e| CliError::io(format!("writing {}", a.output.display()), e))?;

    let mut counts = serde_json::Map::new();
    for class in PixelClass::ALL {
        counts.insert(class.name().to_owned(), Value::from(image.counts.get(class)));
    }
    let mut sidecar = object([
        ("schema", Value::from(json::SCHEMA_VERSION)),
        ("job", job_json(&job, form.as_ref())?),
        ("counts", Value::Object(counts)),
        ("ppm_bytes", Value::from(ppm.len() as u64)),
    ]);
    if a.timing {
        sidecar["wall_time_s"] = num(elapsed, "wall time")?;
    }
    let text = json::to_canonical_string(&sidecar);
    let side = sidecar_path(&a.output);
    fs::write(&side, &text).map_err(|e| CliError::io(format!("writing {}", side.display()), e))?;
    write_out(stdout, &text)
}

pub fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let suite: Suite = a.suite.parse()?;
    let opts = SuiteOptions {
        samples: a.samples.unwrap_or(suite.default_samples()),
        seed: a.seed,
        budget: a.budget,
        threads: threads::resolve_threads(a.threads)?,
    };
    let outcome = suites::run(suite, &opts)?;
    let text = json::to_canonical_string(&outcome.report);
    write_out(stdout, &text)?;
    if outcome.passed {
        Ok(())
    } else {
        Err(CliError::SuiteFailed(text))
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the exit code; errors go to `stderr`.
pub fn main_with(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            if !matches!(e, CliError::SuiteFailed(_)) {
                let _ = writeln!(stderr, "error: {e}");
            } else {
                let _ = writeln!(stderr, "error: suite failed");
            }
            e.exit_code()
        }
    }
}
