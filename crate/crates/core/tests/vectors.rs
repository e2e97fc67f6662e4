//! Worked values that the unit tests do not already pin, through the public
//! API only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nash_squeeze::models::{ConvexPolytope, Region, SampleMode};
use nash_squeeze::polycore::{compose, jet_along, MapExpr, Polynomial};
use nash_squeeze::squeeze::{complex_square, radial_poly, stereographic_inverse};
use nash_squeeze::unbounded::{p1, p2, separate_sets, HalfspaceChain, SeparationOptions};
use nash_squeeze::verify::{check_coverage_points, CoverageOptions};

fn square(x0: f64, y0: f64) -> ConvexPolytope {
    ConvexPolytope::from_vertices(vec![vec![x0, y0], vec![x0 + 1.0, y0], vec![x0 + 1.0, y0 + 1.0], vec![x0, y0 + 1.0]])
        .unwrap()
}

#[test]
fn expanded_planar_squeeze_has_degree_33() {
    let comps = radial_poly(8).unwrap().map(2).unwrap().expand().unwrap();
    assert_eq!(comps.len(), 2);
    for c in comps {
        assert_eq!(c.degree(), 33);
    }
}

#[test]
fn squaring_after_inverse_stereographic_at_zero() {
    let c = compose(&complex_square().unwrap(), &stereographic_inverse(1).unwrap()).unwrap();
    let y = c.eval(&[0.0]).unwrap();
    assert!((y[0] + 1.0).abs() < 1e-15 && y[1].abs() < 1e-15, "{y:?}");
}

#[test]
fn p2_after_p1_at_the_vertex() {
    let m = compose(&p2(2).unwrap(), &p1(2, 1.0, 1.0).unwrap()).unwrap();
    assert_eq!(m.eval(&[1.0, 0.0]).unwrap(), vec![0.0, 0.0]);
}

#[test]
fn jet_of_a_product_along_a_parabola() {
    let xy = MapExpr::polynomial(vec![Polynomial::new(2, [(vec![1, 1], 1.0)]).unwrap()]).unwrap();
    let path = MapExpr::polynomial(vec![Polynomial::univariate(&[0.0, 1.0]), Polynomial::univariate(&[0.0, 0.0, 1.0])])
        .unwrap();
    let j = jet_along(&xy, &path, 1.0, 1).unwrap();
    assert!((j.derivatives[0][0] - 1.0).abs() < 1e-15);
    // d/dt t^3 = 3t^2
    assert!((j.derivatives[1][0] - 3.0).abs() < 1e-14);
}

#[test]
fn f_ell_image_of_the_paraboloid_obeys_the_bound() {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    for (ell, n1, n2) in [(1, 1.0, 1.0), (2, 1.0, 3.0), (3, 0.5, 2.0)] {
        let chain = HalfspaceChain::straight(3, ell, n1, n2).unwrap();
        let f = chain.f_ell().unwrap();
        let set = chain.paraboloid(50.0).unwrap();
        for x in set.sample(5000, r.random(), SampleMode::Interior).unwrap() {
            let y = f.eval(&x).unwrap();
            // the bound, with its upper cap 1 - N_1 y_1 from x_1 >= N_1
            let r2 = y[1] * y[1] + y[2] * y[2];
            let bound = y[0].powi(2 * ell as i32 - 1) * (1.0 - n1 * y[0]) / n2;
            assert!(r2 <= bound * (1.0 + 1e-12) + 1e-15, "{x:?} -> {y:?}");
            assert!(chain.image_bound_margin(&y) >= 0.0);
        }
    }
}

#[test]
fn p2_after_p1_covers_a_half_plane_window() {
    let chain = HalfspaceChain::straight(2, 1, 1.0, 1.0).unwrap();
    let m = compose(&chain.p2().unwrap(), &chain.p1().unwrap()).unwrap();
    let domain = chain.paraboloid(20.0).unwrap();
    let targets: Vec<Vec<f64>> =
        (0..=10).flat_map(|i| (0..=10).map(move |j| vec![0.4 * i as f64, -2.0 + 0.4 * j as f64])).collect();
    let opts = CoverageOptions { gap_tol: 1e-3, ..CoverageOptions::default() };
    let rep = check_coverage_points(&m, &domain, &targets, 9, &opts).unwrap();
    assert!(rep.passed, "gap {:?}", rep.coverage_gap);
    // nothing lands left of the wall
    for x in domain.sample(2000, 10, SampleMode::Interior).unwrap() {
        assert!(m.eval(&x).unwrap()[0] >= 0.0);
    }
}

#[test]
fn swapped_sets_give_a_valid_separation() {
    let (a, b) = (square(0.0, 0.0), square(2.0, 0.0));
    let opts = SeparationOptions::default();
    let s = separate_sets(&b, &a, 4000, 3, &opts).unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5000 {
        let (u, v) = (r.random::<f64>(), r.random::<f64>());
        assert!(s.poly.eval(&[2.0 + u, v]) < 0.0);
        assert!(s.poly.eval(&[u, v]) > 0.0);
    }
}

#[test]
fn point_against_the_outside_of_the_unit_ball() {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let outer: Vec<Vec<f64>> = (0..3000)
        .map(|_| {
            let a = r.random::<f64>() * std::f64::consts::TAU;
            let rad = 1.0 + 4.0 * r.random::<f64>();
            vec![rad * a.cos(), rad * a.sin()]
        })
        .collect();
    let s = nash_squeeze::unbounded::separation_poly(&[vec![0.0, 0.0]], &outer, &SeparationOptions::default()).unwrap();
    assert!(s.poly.eval(&[0.0, 0.0]) < 0.0);
    assert!(outer.iter().all(|x| s.poly.eval(x) > 0.0));
    // far points too, where the norm power dominates
    for k in 0..360 {
        let a = (k as f64).to_radians();
        assert!(s.poly.eval(&[50.0 * a.cos(), 50.0 * a.sin()]) > 0.0);
    }
}
