use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nash_squeeze::cover::{build_apex_paths, check_conditions, ApexInstance, CoverMap};
use nash_squeeze::models::{corner_complex, ConvexPolytope, Region, SampleMode, SemialgebraicSet};
use nash_squeeze::pathfit::{approx_fit, hermite_fit, ChebSeries, Curve, FitOptions, FlatTerm, JetSpec, LocalPoly, PiecewisePath};
use nash_squeeze::polycore::{compose, jet_along, MapExpr, Polynomial};
use nash_squeeze::squeeze::{cube_to_ball, cylinder_to_ball, prism_to_ball, radial_poly, simplex_to_ball, BallMap};
use nash_squeeze::unbounded::{f_ell, tangent_cover, tangent_projection};
use nash_squeeze::verify::{check_containment, CoverageOptions};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| rel(*x, *y)).fold(0.0, f64::max)
}

fn poly2() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((0u32..=3, 0u32..=3, -1.0f64..1.0), 1..6).prop_map(|terms| {
        Polynomial::new(2, terms.into_iter().map(|(a, b, c)| (vec![a, b.min(3 - a)], c))).unwrap()
    })
}

fn map2() -> impl Strategy<Value = MapExpr> {
    (poly2(), poly2()).prop_map(|(p, q)| MapExpr::polynomial(vec![p, q]).unwrap())
}

fn path1() -> impl Strategy<Value = MapExpr> {
    prop::collection::vec(-1.0f64..1.0, 8).prop_map(|c| {
        MapExpr::polynomial(vec![Polynomial::univariate(&c[..4]), Polynomial::univariate(&c[4..])]).unwrap()
    })
}

fn point2() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.2f64..1.2, 2)
}

/// Central differences of order `k` with one Richardson step.
fn derivative(f: &dyn Fn(f64) -> Vec<f64>, t: f64, k: usize) -> Vec<f64> {
    let stencil = |h: f64| -> Vec<f64> {
        let (pts, w, p): (Vec<f64>, Vec<f64>, i32) = match k {
            1 => (vec![-1.0, 1.0], vec![-0.5, 0.5], 1),
            2 => (vec![-1.0, 0.0, 1.0], vec![1.0, -2.0, 1.0], 2),
            _ => (vec![-2.0, -1.0, 1.0, 2.0], vec![-0.5, 1.0, -1.0, 0.5], 3),
        };
        let mut acc = [0.0; 2];
        for (s, c) in pts.iter().zip(&w) {
            for (a, v) in acc.iter_mut().zip(f(t + s * h)) {
                *a += c * v;
            }
        }
        acc.iter().map(|a| a / h.powi(p)).collect()
    };
    let (coarse, fine) = (stencil(0.02), stencil(0.01));
    coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn composition_matches_nested_evaluation(f in map2(), g in map2(), x in point2()) {
        let direct = f.eval(&g.eval(&x).unwrap()).unwrap();
        let composed = compose(&f, &g).unwrap().eval(&x).unwrap();
        prop_assert!(max_rel(&direct, &composed) < 1e-12);
    }

    #[test]
    fn expansion_matches_the_tree(f in map2(), g in map2(), x in point2(), e in 1u32..4) {
        let tree = MapExpr::sum(vec![
            MapExpr::product(vec![MapExpr::power(f.clone(), e), g.clone()]).unwrap(),
            MapExpr::scalar_multiple(-0.5, compose(&g, &f).unwrap()).unwrap(),
        ])
        .unwrap();
        let expanded: Vec<f64> = tree.expand().unwrap().iter().map(|p| p.eval(&x)).collect();
        prop_assert!(max_rel(&tree.eval(&x).unwrap(), &expanded) < 1e-10);
    }

    #[test]
    fn jets_match_finite_differences(f in map2(), path in path1(), t0 in -0.5f64..0.5) {
        let jet = jet_along(&f, &path, t0, 3).unwrap();
        let along = |t: f64| f.eval(&path.eval(&[t]).unwrap()).unwrap();
        for k in 1..=3 {
            let fd = derivative(&along, t0, k);
            prop_assert!(max_rel(&jet.derivatives[k], &fd) < 1e-5, "order {}: {:?} vs {:?}", k, jet.derivatives[k], fd);
        }
    }

    #[test]
    fn evaluation_is_bit_deterministic(f in map2(), g in map2(), x in point2()) {
        let h = compose(&f, &g).unwrap();
        let a: Vec<u64> = h.eval(&x).unwrap().iter().map(|v| v.to_bits()).collect();
        let b: Vec<u64> = h.clone().eval(&x).unwrap().iter().map(|v| v.to_bits()).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn polytope_descriptions_agree(seed in 0u64..1000, d in 2usize..=3, n in 5usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let Ok(k) = ConvexPolytope::from_vertices(pts) else { return Ok(()) };
        for v in k.vertices() {
            prop_assert!(k.min_facet_value(v) > -1e-10);
        }
        // barycentric samples drawn here, not by the library
        for _ in 0..1000 {
            let w: Vec<f64> = (0..k.vertices().len()).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
            let s: f64 = w.iter().sum();
            let mut x = vec![0.0; d];
            for (wi, v) in w.iter().zip(k.vertices()) {
                for (xj, vj) in x.iter_mut().zip(v) {
                    *xj += wi / s * vj;
                }
            }
            prop_assert!(k.min_facet_value(&x) > -1e-10);
        }
    }
}

fn ball_maps() -> &'static Vec<BallMap> {
    static MAPS: OnceLock<Vec<BallMap>> = OnceLock::new();
    MAPS.get_or_init(|| {
        let mut v = Vec::new();
        for d in 2..=3 {
            v.push(simplex_to_ball(d).unwrap());
            v.push(cube_to_ball(d).unwrap());
            v.push(prism_to_ball(d).unwrap());
            v.push(cylinder_to_ball(d).unwrap());
        }
        v
    })
}

fn unit_cover() -> &'static CoverMap {
    static COVER: OnceLock<CoverMap> = OnceLock::new();
    COVER.get_or_init(|| {
        let inst = ApexInstance::unit_triangle();
        let paths = build_apex_paths(&inst).unwrap();
        CoverMap::new(inst, paths).unwrap()
    })
}

fn direction(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, d)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-4)
        .prop_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter().map(|x| x / n).collect()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn squeeze_fixes_the_unit_sphere(i in 0usize..8, u in direction(3)) {
        let bm = &ball_maps()[i];
        let cert = bm.certificate.as_ref().unwrap();
        let u = &u[..cert.d];
        let n = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(n > 1e-2);
        let u: Vec<f64> = u.iter().map(|x| x / n).collect();
        let x: Vec<f64> = cert.center.iter().zip(&u).map(|(c, v)| c + cert.inradius * v).collect();
        let a = cert.apply(&x);
        prop_assert!(max_rel(&a, &u) < 1e-12);
        let y = bm.map.eval(&x).unwrap();
        let err = y.iter().zip(&u).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10, "{}", err);
    }

    #[test]
    fn squeeze_is_radial(r2 in 2u32..20, u in direction(3), s in 0.0f64..1.0) {
        let h = radial_poly(r2).unwrap();
        let g = h.map(3).unwrap();
        let x: Vec<f64> = u.iter().map(|v| v * s * (r2 as f64).sqrt()).collect();
        let y = g.eval(&x).unwrap();
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        prop_assert!(xy >= -1e-15);
        let x2: f64 = x.iter().map(|v| v * v).sum();
        if x2 > 0.0 {
            let c = xy / x2;
            for (a, b) in x.iter().zip(&y) {
                prop_assert!((b - c * a).abs() < 1e-12 * (1.0 + b.abs()));
            }
        }
    }

    #[test]
    fn cover_jets_are_linear_in_lambda(l in 0.0f64..1.0, t0 in 0.02f64..0.98) {
        let cover = unit_cover();
        let lambda = [l, 1.0 - l];
        let jet = cover.jet(&lambda, t0, 3).unwrap();
        let parts: Vec<_> = cover.paths.paths.iter().map(|p| p.jet(t0, 3).unwrap()).collect();
        for k in 0..=3 {
            let expect: Vec<f64> = (0..2)
                .map(|j| lambda.iter().zip(&parts).map(|(li, p)| li * p.derivatives[k][j]).sum())
                .collect();
            prop_assert!(max_rel(&jet.derivatives[k], &expect) < 1e-12);
        }
    }

    #[test]
    fn f_ell_is_an_involution(ell in 1u32..6, d in 2usize..=4, x1 in 0.1f64..10.0, rest in prop::collection::vec(-5.0f64..5.0, 3)) {
        let f = f_ell(ell, d).unwrap();
        let mut x = vec![x1];
        x.extend(&rest[..d - 1]);
        let back = f.eval(&f.eval(&x).unwrap()).unwrap();
        let err = x.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10, "{}", err);
    }

    #[test]
    fn f_ell_keeps_verticals(ell in 1u32..6, x1 in 0.1f64..10.0, y in -5.0f64..5.0, z in -5.0f64..5.0) {
        let f = f_ell(ell, 2).unwrap();
        let a = f.eval(&[x1, y]).unwrap();
        let b = f.eval(&[x1, z]).unwrap();
        prop_assert_eq!(a[0].to_bits(), b[0].to_bits());
        prop_assert!((a[0] - 1.0 / x1).abs() < 1e-15 * (1.0 + a[0]));
    }

    #[test]
    fn tangent_cover_factors_through_the_projection(
        seed in 0u64..1000,
        x in prop::collection::vec(-2.0f64..2.0, 3),
        eps in 0.1f64..2.0,
    ) {
        // orthonormal 2-frame in R^3 by Gram-Schmidt
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(na > 0.1);
        let e1: Vec<f64> = a.iter().map(|v| v / na).collect();
        let p: f64 = b.iter().zip(&e1).map(|(x, y)| x * y).sum();
        let c: Vec<f64> = b.iter().zip(&e1).map(|(x, y)| x - p * y).collect();
        let nc = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(nc > 0.1);
        let e2: Vec<f64> = c.iter().map(|v| v / nc).collect();
        let frame = vec![e1, e2];
        let point = vec![0.2, -0.1, 0.5];
        let g = tangent_cover(3, 2, &point, &frame, eps).unwrap();
        let proj = tangent_projection(&point, &frame).unwrap();
        let px = proj.eval(&x).unwrap();
        let (gx, gpx) = (g.eval(&x).unwrap(), g.eval(&px).unwrap());
        prop_assert!(max_rel(&gx, &gpx) < 1e-12);
    }
}

#[test]
fn corner_complexes_are_triangulated() {
    for d in 2..=3 {
        for k in 0..=d {
            let c = corner_complex(d, k).unwrap();
            let cells = c.top_simplices();
            for s in &cells {
                for x in s.sample(500, 1, SampleMode::Barycentric).unwrap() {
                    assert!(c.polyhedron.min_facet_value(&x) > -1e-10);
                }
            }
            let pts = c.polyhedron.sample(10_000, 2, SampleMode::Interior).unwrap();
            for x in pts.iter().chain(c.polyhedron.vertices()) {
                let best = cells.iter().map(|s| s.min_facet_value(x)).fold(f64::NEG_INFINITY, f64::max);
                assert!(best > -1e-10, "d={d} k={k} x={x:?}");
            }
        }
    }
}

fn correction_invariance(coeffs: &[f64], m: usize) {
    let base = Curve::Piecewise(
        PiecewisePath::new(
            vec![0.0, 1.0],
            vec![LocalPoly::new(0.0, vec![vec![0.2, 0.5], vec![0.3, 0.0], vec![0.0, -0.4], vec![0.1, 0.2]]).unwrap()],
        )
        .unwrap(),
    );
    let spec = JetSpec::from_curve(&base, &[0.25, 0.75], m).unwrap();
    let h = Curve::Chebyshev(hermite_fit(&spec).unwrap());
    let factor = ChebSeries { a: 0.0, b: 1.0, coeffs: coeffs.chunks(2).map(<[f64]>::to_vec).collect() };
    let flat = Curve::Flat(FlatTerm { anchors: vec![0.25, 0.75], power: m as u32 + 1, scale: 1.0, factor });
    let beta = Curve::Sum { parts: vec![h, flat] };
    assert!(spec.residual(&beta).unwrap() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn corrections_keep_anchor_jets(coeffs in prop::collection::vec(-10.0f64..10.0, 2..16), m in 0usize..4) {
        let mut c = coeffs;
        if c.len() % 2 == 1 {
            c.push(0.0);
        }
        correction_invariance(&c, m);
    }
}

fn tent() -> Curve {
    Curve::Piecewise(
        PiecewisePath::new(
            vec![0.0, 0.5, 1.0],
            vec![
                LocalPoly::segment(0.0, &[0.1, 0.5], 0.5, &[0.5, 0.9]),
                LocalPoly::segment(0.5, &[0.5, 0.9], 1.0, &[0.9, 0.5]),
            ],
        )
        .unwrap(),
    )
}

#[test]
fn feasibility_is_monotone_in_eps() {
    let c = tent();
    let spec = JetSpec::from_curve(&c, &[0.2, 0.8], 2).unwrap();
    let open = |x: &[f64]| x.iter().map(|v| v.min(1.0 - v)).fold(f64::INFINITY, f64::min);
    for eps in [2e-2, 4e-2, 1e-1] {
        let tight = approx_fit(&c, &spec, eps, Some(&open), &FitOptions::default()).unwrap();
        let loose = approx_fit(&c, &spec, 2.0 * eps, Some(&open), &FitOptions::default()).unwrap();
        assert!(loose.degree <= tight.degree, "eps {eps}: {} > {}", loose.degree, tight.degree);
    }
}

#[test]
fn coverage_gap_does_not_grow_with_effort() {
    use nash_squeeze::squeeze::ball_double_cover;
    use nash_squeeze::verify::{coverage_gaps, ImageNet};
    let g = ball_double_cover(2).unwrap();
    let domain = SemialgebraicSet::ball(&[0.0, 0.0], 1.0);
    let target = SemialgebraicSet::ball(&[0.0, 0.0], 1.0);
    let targets = target.sample(200, 9, SampleMode::Interior).unwrap();
    let mut prev: Option<Vec<f64>> = None;
    for (n, steps) in [(512, 0), (1024, 20), (4096, 100)] {
        let opts = CoverageOptions { net_size: n, refine_steps: steps, ..CoverageOptions::default() };
        let net = ImageNet::build(&g, &domain, n, 4).unwrap();
        let gaps = coverage_gaps(&g, &domain, &net, &targets, &opts);
        if let Some(p) = &prev {
            for (a, b) in gaps.iter().zip(p) {
                assert!(*a <= b + 1e-12, "{a} > {b}");
            }
        }
        prev = Some(gaps);
    }
}

#[test]
fn containment_violation_is_stable_under_reseeding() {
    let double = MapExpr::affine(vec![vec![2.0, 0.0], vec![0.0, 2.0]], vec![0.0, 0.0]).unwrap();
    let ball = SemialgebraicSet::ball(&[0.0, 0.0], 1.0);
    let worst: Vec<f64> = (1..=5)
        .map(|s| check_containment(&double, &ball, &ball, 10_000, s, 1e-9).unwrap().worst_violation)
        .collect();
    let mean = worst.iter().sum::<f64>() / worst.len() as f64;
    for w in &worst {
        assert!((w - mean).abs() < 0.1 * mean, "{worst:?}");
    }
}

#[test]
fn sign_conditions_pass_on_corner_cells() {
    let c = corner_complex(2, 1).unwrap();
    for i in 0..c.cells.len() {
        let inst = ApexInstance::from_corner_cell(&c, i).unwrap();
        let paths = build_apex_paths(&inst).unwrap();
        let r = check_conditions(&inst, &paths.paths, paths.delta, 1000).unwrap();
        assert!(r.passed, "{}", r.summary());
    }
}
