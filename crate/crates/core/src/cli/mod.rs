//! Command-line front end: `run(argv)` returns the process exit code.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 numeric
//! failure.

mod demo;
pub mod io;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::cover::{boundary_degree, build_apex_paths, check_conditions, ApexInstance, CoverMap};
use crate::error::{Error, Result};
use crate::models::{model, ConvexPolytope, ModelKind, Region, SemialgebraicSet};
use crate::polycore::{MapExpr, Mapping};
use crate::squeeze;
use crate::unbounded;
use crate::verify::{self, CoverageOptions, VerificationReport};
use io::Format;

pub const THREADS_ENV: &str = "NASH_SQUEEZE_THREADS";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "nash-squeeze", version, about = "Explicit polynomial and Nash surjections onto compact models")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Model or map kind.
    #[arg(long, global = true)]
    pub kind: Option<String>,
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Pass threshold (containment residual or coverage gap).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Refinement steps per coverage target.
    #[arg(long, global = true)]
    pub refine: Option<usize>,
    /// Output file, or directory for demos.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the models, or describe one with `--kind` and `--dim`.
    Models,
    /// Construct a named map and emit it as JSON.
    Build {
        #[arg(long)]
        ell: Option<u32>,
        #[arg(long)]
        n1: Option<f64>,
        #[arg(long)]
        n2: Option<f64>,
        #[arg(long)]
        r2: Option<u32>,
    },
    /// Apply a serialized map to the points of a CSV file.
    Eval {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        points: PathBuf,
    },
    /// Run a check on serialized inputs.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
    /// Canned end-to-end runs.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
    },
    /// Merge JSON reports into markdown.
    Report { inputs: Vec<PathBuf> },
}

#[derive(Subcommand, Debug)]
enum Check {
    /// Images of domain samples lie in the target.
    Contain {
        #[arg(long)]
        map: PathBuf,
        /// Model name or JSON file.
        #[arg(long)]
        domain: String,
        #[arg(long)]
        target: String,
    },
    /// The image of the domain comes within the tolerance of every target
    /// sample.
    Cover {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        domain: String,
        #[arg(long)]
        target: String,
    },
    /// Boundary winding number of a planar cover map (default: the unit
    /// triangle instance).
    Degree {
        #[arg(long)]
        cover: Option<PathBuf>,
    },
    /// Sign conditions of the apex paths of a cover map.
    Signs {
        #[arg(long)]
        cover: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    SimplexCover,
    Circle,
    Halfplane,
    PrismBall,
    Fan,
    TangentCover,
}

/// What a command produced: text for stdout or `--out`, and a verdict.
struct Output {
    text: String,
    passed: bool,
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let outcome = validate(&cli.common).and_then(|threads| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.unwrap_or(0))
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
        pool.install(|| dispatch(&cli.command, &cli.common))
    });
    match outcome {
        Ok(out) => {
            if !out.text.is_empty() {
                print!("{}", out.text);
            }
            if out.passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numeric() {
        EXIT_NUMERIC
    } else {
        EXIT_USAGE
    }
}

/// Checks the shared options; returns the requested thread count.
fn validate(c: &Common) -> Result<Option<usize>> {
    for (name, v) in [("tol", c.tol), ("eps", c.eps)] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("--{name} must be positive, got {v}")));
            }
        }
    }
    if c.dim == Some(0) {
        return Err(Error::InvalidInput("--dim must be at least 1".into()));
    }
    if c.samples == Some(0) {
        return Err(Error::InvalidInput("--samples must be positive".into()));
    }
    let threads = match c.threads {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(s) => Some(
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("{THREADS_ENV}={s:?} is not a count")))?,
            ),
            Err(_) => None,
        },
    };
    if threads == Some(0) {
        return Err(Error::InvalidInput("thread count must be positive".into()));
    }
    Ok(threads)
}

fn dispatch(command: &Command, c: &Common) -> Result<Output> {
    match command {
        Command::Models => models(c),
        Command::Build { ell, n1, n2, r2 } => build(c, *ell, *n1, *n2, *r2),
        Command::Eval { map, points } => eval(c, map, points),
        Command::Verify { check } => verify_cmd(c, check),
        Command::Demo { name } => demo::run_demo(*name, c),
        Command::Report { inputs } => report(c, inputs),
    }
}

/// Sends `text` to `--out` when given, otherwise to stdout.
fn deliver(c: &Common, text: String, passed: bool) -> Result<Output> {
    match &c.out {
        Some(path) => {
            io::write(path, &text)?;
            Ok(Output { text: String::new(), passed })
        }
        None => Ok(Output { text, passed }),
    }
}

fn deliver_report(c: &Common, r: &VerificationReport) -> Result<Output> {
    deliver(c, io::render_report(r, c.format.unwrap_or(Format::Json)), r.passed)
}

fn models(c: &Common) -> Result<Output> {
    let text = match &c.kind {
        None => {
            let d = c.dim.unwrap_or(2);
            let mut s = String::from("kind,intrinsic_dim,ambient_dim\n");
            for k in ModelKind::ALL {
                s.push_str(&format!("{},{d},{}\n", k.name(), k.ambient_dim(d)));
            }
            s
        }
        Some(kind) => {
            let k: ModelKind = kind.parse()?;
            let d = c.dim.unwrap_or(2);
            let m = model(k, d)?;
            let v = json!({ "kind": k.name(), "dim": d, "ambient_dim": k.ambient_dim(d), "model": m });
            serde_json::to_string_pretty(&v)? + "\n"
        }
    };
    deliver(c, text, true)
}

/// Every map `build` knows, by name.
pub const BUILD_KINDS: [&str; 18] = [
    "simplex-ball",
    "cube-ball",
    "prism-ball",
    "cylinder-ball",
    "radial",
    "stereo",
    "ball-double-cover",
    "circle",
    "complex-square",
    "f-ell",
    "p1",
    "p2",
    "p3",
    "inversion",
    "norm-flatten",
    "halfplane-chain",
    "tangent-cover",
    "apex-cover",
];

/// The named map; `apex-cover` is not an expression and is handled apart.
pub fn build_map(kind: &str, d: usize, ell: u32, n1: f64, n2: f64, r2: Option<u32>, eps: f64) -> Result<MapExpr> {
    Ok(match kind {
        "simplex-ball" => squeeze::simplex_to_ball(d)?.map,
        "cube-ball" => squeeze::cube_to_ball(d)?.map,
        "prism-ball" => squeeze::prism_to_ball(d)?.map,
        "cylinder-ball" => squeeze::cylinder_to_ball(d)?.map,
        "radial" => squeeze::radial_poly(r2.unwrap_or(2 * (d * d) as u32))?.map(d)?,
        "stereo" => squeeze::stereographic_inverse(d)?,
        "ball-double-cover" => squeeze::ball_double_cover(d)?,
        "circle" => squeeze::circle_cover()?,
        "complex-square" => squeeze::complex_square()?,
        "f-ell" => unbounded::f_ell(ell, d)?,
        "p1" => unbounded::p1(d, n1, n2)?,
        "p2" => unbounded::p2(d)?,
        "p3" => unbounded::p3(d)?,
        "inversion" => unbounded::inversion(d)?,
        "norm-flatten" => unbounded::norm_flatten(d)?,
        "halfplane-chain" => unbounded::HalfspaceChain::straight(d, ell, n1, n2)?.polynomial_part()?,
        "tangent-cover" => {
            let m = d + 1;
            let frame: Vec<Vec<f64>> = (0..d)
                .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect();
            unbounded::tangent_cover(m, d, &vec![0.0; m], &frame, eps)?
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "unknown map kind {kind:?}; known: {}",
                BUILD_KINDS.join(", ")
            )))
        }
    })
}

fn build(c: &Common, ell: Option<u32>, n1: Option<f64>, n2: Option<f64>, r2: Option<u32>) -> Result<Output> {
    let kind = c
        .kind
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("build needs --kind".into()))?;
    let d = c.dim.unwrap_or(2);
    let value = if kind == "apex-cover" {
        let inst = ApexInstance::unit_triangle();
        let paths = build_apex_paths(&inst)?;
        serde_json::to_value(CoverMap::new(inst, paths)?)?
    } else {
        build_map(kind, d, ell.unwrap_or(2), n1.unwrap_or(1.0), n2.unwrap_or(1.0), r2, c.eps.unwrap_or(1.0))?.to_json()
    };
    deliver(c, serde_json::to_string(&value)? + "\n", true)
}

/// A serialized map: an expression, or a cover map evaluated on
/// `(lambda_1..lambda_{n-1}, t)`.
#[allow(clippy::large_enum_variant)]
pub enum LoadedMap {
    Expr(MapExpr),
    Cover(CoverMap),
}

impl LoadedMap {
    pub fn load(path: &Path) -> Result<Self> {
        let v = io::read_json(path)?;
        if v.get("instance").is_some() {
            Ok(LoadedMap::Cover(serde_json::from_value(v)?))
        } else {
            Ok(LoadedMap::Expr(MapExpr::from_json(&v)?))
        }
    }

    pub fn as_mapping(&self) -> &dyn Mapping {
        match self {
            LoadedMap::Expr(m) => m,
            LoadedMap::Cover(m) => m,
        }
    }
}

fn eval(c: &Common, map: &Path, points: &Path) -> Result<Output> {
    let f = LoadedMap::load(map)?;
    let f = f.as_mapping();
    let pts = io::parse_csv(&std::fs::read_to_string(points)?)?;
    let images = pts
        .iter()
        .map(|p| {
            if p.len() != f.domain_dim() {
                return Err(Error::dim("eval point", f.domain_dim(), p.len()));
            }
            f.apply(p)
        })
        .collect::<Result<Vec<_>>>()?;
    let text = match c.format.unwrap_or(Format::Csv) {
        Format::Json => serde_json::to_string(&images)? + "\n",
        _ => io::to_csv(&images),
    };
    deliver(c, text, true)
}

/// A model name (sized by `--dim`) or a JSON polytope or set.
pub fn load_region(spec: &str, dim: usize) -> Result<Box<dyn Region>> {
    if let Ok(kind) = spec.parse::<ModelKind>() {
        return Ok(Box::new(model(kind, dim)?));
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(Error::InvalidInput(format!("{spec:?} is neither a model name nor a file")));
    }
    let v = io::read_json(path)?;
    if v.get("vertices").is_some() {
        Ok(Box::new(serde_json::from_value::<ConvexPolytope>(v)?))
    } else {
        Ok(Box::new(SemialgebraicSet::from_json(&v)?))
    }
}

fn load_cover(path: Option<&PathBuf>) -> Result<CoverMap> {
    match path {
        Some(p) => Ok(serde_json::from_value(io::read_json(p)?)?),
        None => {
            let inst = ApexInstance::unit_triangle();
            let paths = build_apex_paths(&inst)?;
            CoverMap::new(inst, paths)
        }
    }
}

fn coverage_options(c: &Common, gap: f64) -> CoverageOptions {
    let mut o = CoverageOptions { gap_tol: c.tol.unwrap_or(gap), ..CoverageOptions::default() };
    if let Some(r) = c.refine {
        o.refine_steps = r;
    }
    o
}

fn verify_cmd(c: &Common, check: &Check) -> Result<Output> {
    let report = match check {
        Check::Contain { map, domain, target } | Check::Cover { map, domain, target } => {
            let f = LoadedMap::load(map)?;
            let f = f.as_mapping();
            let dom = load_region(domain, c.dim.unwrap_or(f.domain_dim()))?;
            let tgt = load_region(target, c.dim.unwrap_or(f.codomain_dim()))?;
            if matches!(check, Check::Contain { .. }) {
                verify::check_containment(f, dom.as_ref(), tgt.as_ref(), c.samples.unwrap_or(10_000), c.seed, c.tol.unwrap_or(1e-9))?
            } else {
                verify::check_coverage(f, dom.as_ref(), tgt.as_ref(), c.samples.unwrap_or(1000), c.seed, &coverage_options(c, 1e-3))?
            }
        }
        Check::Degree { cover } => {
            let f = load_cover(cover.as_ref())?;
            let start = std::time::Instant::now();
            let w = boundary_degree(&f, None)?;
            let mut r = VerificationReport::new("boundary_degree", 4 * crate::cover::map::EDGE_SAMPLES, c.seed);
            r.winding = Some(w);
            r.passed = w == 1;
            r.worst_violation = (w - 1).abs() as f64;
            r.timed(start)
        }
        Check::Signs { cover } => {
            let f = load_cover(cover.as_ref())?;
            check_conditions(&f.instance, &f.paths.paths, f.paths.delta, c.samples.unwrap_or(crate::cover::paths::SIGN_SAMPLES))?
        }
    };
    deliver_report(c, &report)
}

fn report(c: &Common, inputs: &[PathBuf]) -> Result<Output> {
    if inputs.is_empty() {
        return Err(Error::InvalidInput("report needs at least one JSON report".into()));
    }
    let parts = inputs
        .iter()
        .map(|p| Ok(serde_json::from_value::<VerificationReport>(io::read_json(p)?)?))
        .collect::<Result<Vec<_>>>()?;
    let merged = VerificationReport::merge("merged", &parts);
    let mut text = String::from("# Verification summary\n\n");
    for p in &parts {
        text.push_str(&format!("- {}\n", p.summary()));
    }
    text.push('\n');
    text.push_str(&merged.to_markdown());
    for p in &parts {
        text.push('\n');
        text.push_str(&p.to_markdown());
    }
    deliver(c, text, merged.passed)
}
