//! Canned end-to-end runs: each yields a report and two point clouds.

use super::io::{self, Format};
use super::{coverage_options, Common, DemoName, Output};
use crate::cover::{build_apex_paths, check_conditions, fan_cover_complex, ApexInstance, CoverMap, FanOptions, SweepOptions};
use crate::error::Result;
use crate::linalg::norm;
use crate::models::{corner_complex, hypercube, prism, Region, SampleMode, SemialgebraicSet};
use crate::polycore::Mapping;
use crate::squeeze::{circle_cover, prism_to_ball};
use crate::unbounded::{certify_tangent_cover, tangent_cover, HalfspaceChain};
use crate::verify::{check_containment, check_coverage, check_coverage_points, circle_targets, VerificationReport};

/// Points of the circle demo's parameter interval.
pub const CIRCLE_SAMPLES: usize = 3600;
/// Largest tolerated `| |c(t)| - 1 |`.
pub const CIRCLE_NORM_TOL: f64 = 1e-12;

struct Run {
    report: VerificationReport,
    domain: Vec<Vec<f64>>,
    image: Vec<Vec<f64>>,
}

fn cloud(map: &dyn Mapping, domain: Vec<Vec<f64>>) -> Result<Run> {
    let image = domain.iter().map(|x| map.apply(x)).collect::<Result<Vec<_>>>()?;
    Ok(Run { report: VerificationReport::new("", 0, 0), domain, image })
}

pub(super) fn run_demo(name: DemoName, c: &Common) -> Result<Output> {
    let run = match name {
        DemoName::Circle => circle(c)?,
        DemoName::SimplexCover => simplex_cover(c)?,
        DemoName::Halfplane => halfplane(c)?,
        DemoName::PrismBall => prism_ball(c)?,
        DemoName::Fan => fan(c)?,
        DemoName::TangentCover => tangent(c)?,
    };
    let mut run = run;
    run.report.seed = c.seed;
    let format = c.format.unwrap_or(Format::Json);
    let text = io::render_report(&run.report, format);
    match &c.out {
        Some(dir) => {
            io::write(&dir.join(format!("report.{}", format.extension())), &text)?;
            io::write(&dir.join("domain.csv"), &io::to_csv(&run.domain))?;
            io::write(&dir.join("image.csv"), &io::to_csv(&run.image))?;
            Ok(Output { text: run.report.summary() + "\n", passed: run.report.passed })
        }
        None => Ok(Output { text, passed: run.report.passed }),
    }
}

fn circle(c: &Common) -> Result<Run> {
    let map = circle_cover()?;
    let n = c.samples.unwrap_or(CIRCLE_SAMPLES).max(2);
    let ts: Vec<Vec<f64>> = (0..n).map(|k| vec![-1.0 + 2.0 * k as f64 / (n - 1) as f64]).collect();
    let mut run = cloud(&map, ts)?;
    let worst = run.image.iter().map(|p| (norm(p) - 1.0).abs()).fold(0.0, f64::max);
    let mut on_circle = VerificationReport::new("unit_norm", n, c.seed).tolerance("norm", CIRCLE_NORM_TOL);
    on_circle.worst_violation = worst;
    on_circle.passed = worst < CIRCLE_NORM_TOL;
    let cov = check_coverage_points(&map, &hypercube(1), &circle_targets(360, 1.0), c.seed, &coverage_options(c, 1e-3))?;
    run.report = VerificationReport::merge("demo_circle", &[on_circle, cov]);
    Ok(run)
}

fn simplex_cover(c: &Common) -> Result<Run> {
    let inst = ApexInstance::unit_triangle();
    let paths = build_apex_paths(&inst)?;
    let signs = check_conditions(&inst, &paths.paths, paths.delta, crate::cover::paths::SIGN_SAMPLES)?;
    let cover = CoverMap::new(inst, paths)?;
    let checks = cover.verify(&SweepOptions { seed: c.seed, ..SweepOptions::default() }, c.samples.unwrap_or(1000), &coverage_options(c, 1e-3))?;
    let domain = cover.domain(0.0, 1.0)?.sample(2000, c.seed, SampleMode::Interior)?;
    let mut run = cloud(&cover, domain)?;
    run.report = VerificationReport::merge("demo_simplex_cover", &[signs, checks]);
    run.report.detail("delta", cover.paths.delta);
    Ok(run)
}

/// `P_3 o P_2 o P_1` on a window of `{1 + |x'|^2 <= x_1}` against the
/// `[-5, 5]^2` grid.
fn halfplane(c: &Common) -> Result<Run> {
    let chain = HalfspaceChain::straight(2, 3, 1.0, 1.0)?;
    let map = chain.polynomial_part()?;
    let window = chain.paraboloid(12.0)?;
    let targets: Vec<Vec<f64>> = (0..=20)
        .flat_map(|i| (0..=20).map(move |j| vec![-5.0 + 0.5 * i as f64, -5.0 + 0.5 * j as f64]))
        .collect();
    let cov = check_coverage_points(&map, &window, &targets, c.seed, &coverage_options(c, 1e-2))?;
    let mut run = cloud(&map, window.sample(2000, c.seed, SampleMode::Interior)?)?;
    run.report = VerificationReport::merge("demo_halfplane", &[cov]);
    Ok(run)
}

fn prism_ball(c: &Common) -> Result<Run> {
    let d = c.dim.unwrap_or(2);
    let f = prism_to_ball(d)?;
    let p = prism(d);
    let ball = SemialgebraicSet::ball(&vec![0.0; d], 1.0);
    let contain = check_containment(&f.map, &p, &ball, c.samples.unwrap_or(10_000), c.seed, c.tol.unwrap_or(1e-9))?;
    let cov = check_coverage(&f.map, &p, &ball, 2000, c.seed, &coverage_options(c, 1e-3))?;
    let mut run = cloud(&f.map, p.sample(2000, c.seed, SampleMode::Interior)?)?;
    run.report = VerificationReport::merge("demo_prism_ball", &[contain, cov]);
    Ok(run)
}

fn fan(c: &Common) -> Result<Run> {
    let complex = corner_complex(2, 0)?;
    let opts = FanOptions { seed: c.seed, coverage: coverage_options(c, 1e-3), ..FanOptions::default() };
    let f = fan_cover_complex(&complex, &opts)?;
    let mut run = cloud(&f.map, f.map.domain()?.sample(2000, c.seed, SampleMode::Interior)?)?;
    run.report = VerificationReport::merge("demo_fan", &[f.report]);
    run.report.detail("degree", f.fit.degree as f64);
    run.report.detail("fit_deviation", f.fit.max_deviation);
    Ok(run)
}

/// A tilted disc in `R^3` mapped onto the closed unit disc.
fn tangent(c: &Common) -> Result<Run> {
    let (a, b) = (0.5f64.sqrt(), (1.0f64 / 3.0).sqrt());
    let frame = vec![vec![a, a, 0.0], vec![b, -b, b]];
    let point = [0.2, -0.1, 0.5];
    let eps = c.eps.unwrap_or(0.3);
    let map = tangent_cover(3, 2, &point, &frame, eps)?;
    let cov = certify_tangent_cover(&map, &point, &frame, eps, c.samples.unwrap_or(1000), c.seed, &coverage_options(c, 1e-3))?;
    let disc = SemialgebraicSet::ball(&[0.0, 0.0], 1.0).sample(2000, c.seed, SampleMode::Interior)?;
    let lifted = disc
        .iter()
        .map(|u| (0..3).map(|i| point[i] + eps * (u[0] * frame[0][i] + u[1] * frame[1][i])).collect())
        .collect();
    let mut run = cloud(&map, lifted)?;
    run.report = VerificationReport::merge("demo_tangent_cover", &[cov]);
    Ok(run)
}
