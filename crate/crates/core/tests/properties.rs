use approx::assert_relative_eq;
use proptest::prelude::*;
use psikit_core::annulus_series::{critical_radii, gegenbauer, psi_series, second_derivative_terms, SeriesParams};
use psikit_core::functional::{eval_phi, grad_phi, psi};
use psikit_core::geometry::Halfspace;
use psikit_core::sphere_quadrature::build_rule;
use psikit_core::{Domain, FunctionalSpec, SphericalRule, UnitDirection};

fn unit(v: Vec<f64>) -> Option<UnitDirection> {
    UnitDirection::new(v).ok()
}

/// Convex shapes in the plane, all containing the origin with boundary distance at least 0.2.
fn planar_shape() -> impl Strategy<Value = Domain> {
    prop_oneof![
        (0.3..3.0f64).prop_map(|r| Domain::ball([0.0, 0.0], r).unwrap()),
        (0.3..3.0f64, 0.3..3.0f64).prop_map(|(a, b)| Domain::ellipsoid([0.0, 0.0], [a, b]).unwrap()),
        prop::collection::vec((0.0..std::f64::consts::TAU, 0.2..2.0f64), 3..9).prop_filter_map("bounded", |faces| {
            let mut hs: Vec<Halfspace> =
                faces.iter().map(|(t, d)| Halfspace { normal: vec![t.cos(), t.sin()], offset: *d }).collect();
            // a fixed triangle keeps every polytope bounded
            for k in 0..3 {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                hs.push(Halfspace { normal: vec![t.cos(), t.sin()], offset: 3.0 });
            }
            Domain::polytope(hs).ok()
        }),
        (0.0..std::f64::consts::TAU, 0.0..2.0f64, 0.3..1.0f64).prop_map(|(t, len, r)| {
            let (c, s) = (t.cos() * len / 2.0, t.sin() * len / 2.0);
            Domain::stadium([-c, -s], [c, s], r).unwrap()
        }),
    ]
}

/// A point `t` of the way from the origin to the boundary along `angle`.
fn point_in(dom: &Domain, angle: f64, t: f64) -> Vec<f64> {
    let w = UnitDirection::new(vec![angle.cos(), angle.sin()]).unwrap();
    let rho = dom.rho(&[0.0, 0.0], &w).unwrap();
    vec![t * rho * angle.cos(), t * rho * angle.sin()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rho_is_concave(dom in planar_shape(), a1 in 0.0..6.3f64, t1 in 0.0..0.95f64, a2 in 0.0..6.3f64,
                      t2 in 0.0..0.95f64, lam in 0.0..1.0f64, w in 0.0..6.3f64) {
        let x1 = point_in(&dom, a1, t1);
        let x2 = point_in(&dom, a2, t2);
        let mid: Vec<f64> = x1.iter().zip(&x2).map(|(p, q)| lam * p + (1.0 - lam) * q).collect();
        let dir = unit(vec![w.cos(), w.sin()]).unwrap();
        let lhs = dom.rho(&mid, &dir).unwrap();
        let rhs = lam * dom.rho(&x1, &dir).unwrap() + (1.0 - lam) * dom.rho(&x2, &dir).unwrap();
        prop_assert!(lhs >= rhs - 1e-10, "{lhs} < {rhs}");
    }

    #[test]
    fn exit_point_is_on_the_boundary(dom in planar_shape(), a in 0.0..6.3f64, t in 0.0..0.95f64, w in 0.0..6.3f64) {
        let x = point_in(&dom, a, t);
        let dir = unit(vec![w.cos(), w.sin()]).unwrap();
        let exit = dom.ray_exit(&x, &dir).unwrap();
        let inside = [x[0] + 0.999 * exit.rho * w.cos(), x[1] + 0.999 * exit.rho * w.sin()];
        let outside = [x[0] + 1.001 * exit.rho * w.cos(), x[1] + 1.001 * exit.rho * w.sin()];
        prop_assert!(dom.contains(&inside));
        prop_assert!(!dom.contains(&outside));
        prop_assert!(exit.normal[0] * w.cos() + exit.normal[1] * w.sin() > 0.0);
        let gaps = dom.complement_intervals(&x, &dir).unwrap();
        prop_assert_eq!(gaps.intervals(), &[(exit.rho, f64::INFINITY)][..]);
    }

    #[test]
    fn psi_is_translation_invariant(dom in planar_shape(), a in 0.0..6.3f64, t in 0.0..0.9f64,
                                    sx in -5.0..5.0f64, sy in -5.0..5.0f64) {
        let rule = SphericalRule::circle(256);
        let x = point_in(&dom, a, t);
        let moved = dom.translated(&[sx, sy]).unwrap();
        let v = psi(&dom, &x, &rule).unwrap();
        let w = psi(&moved, &[x[0] + sx, x[1] + sy], &rule).unwrap();
        prop_assert!((v - w).abs() <= 1e-9 * v, "{v} vs {w}");
    }

    #[test]
    fn psi_scales_like_a_negative_power(r in 0.1..5.0f64, a in 0.3..3.0f64, b in 0.3..3.0f64, s in 0.2..5.0f64,
                                        px in -0.5..0.5f64, py in -0.5..0.5f64) {
        let rule = SphericalRule::circle(256);
        let dom = Domain::ellipsoid([0.0, 0.0], [a * r, b * r]).unwrap();
        let big = Domain::ellipsoid([0.0, 0.0], [s * a * r, s * b * r]).unwrap();
        let x = [px * a * r, py * b * r];
        let v = psi(&dom, &x, &rule).unwrap();
        let w = psi(&big, &[s * x[0], s * x[1]], &rule).unwrap();
        prop_assert!((w * s * s - v).abs() <= 1e-10 * v);
    }

    #[test]
    fn gradient_points_down_the_value(dom in planar_shape(), a in 0.0..6.3f64, t in 0.05..0.9f64) {
        let rule = SphericalRule::circle(512);
        let spec = FunctionalSpec::psi();
        let x = point_in(&dom, a, t);
        let g = grad_phi(&dom, &x, &spec, &rule).unwrap();
        let gn = (g[0] * g[0] + g[1] * g[1]).sqrt();
        prop_assume!(gn > 1e-8);
        let step = 1e-4 * dom.boundary_distance(&x) / gn;
        let y = [x[0] - step * g[0], x[1] - step * g[1]];
        prop_assert!(eval_phi(&dom, &y, &spec, &rule).unwrap() < eval_phi(&dom, &x, &spec, &rule).unwrap());
    }

    #[test]
    fn rings_scale_their_roots(a in 0.2..2.0f64, w1 in 0.2..2.0f64, gap in 0.2..2.0f64, w2 in 0.2..2.0f64,
                               s in 0.25..4.0f64, n in 2usize..=3) {
        let rings = vec![(a, a + w1), (a + w1 + gap, a + w1 + gap + w2)];
        let p = SeriesParams::new(n, rings.clone()).unwrap();
        let roots = critical_radii(&p).unwrap();
        prop_assert_eq!(roots.len(), 2);
        for (r, (lo, hi)) in roots.iter().zip(&rings) {
            prop_assert!(r > lo && r < hi);
        }
        let scaled = critical_radii(&p.scaled(s).unwrap()).unwrap();
        for (r, q) in roots.iter().zip(&scaled) {
            prop_assert!((q - s * r).abs() <= 1e-9 * s * r);
        }
    }

    #[test]
    fn series_terms_are_nonnegative(a in 0.2..2.0f64, w in 0.2..2.0f64, t in 0.01..0.99f64, n in 2usize..=4) {
        let p = SeriesParams::new(n, vec![(a, a + w)]).unwrap();
        let r = a + t * w;
        let terms = second_derivative_terms(&p, r, 40).unwrap();
        prop_assert!(terms[0] > 0.0);
        prop_assert!(terms.iter().all(|&x| x >= 0.0));
        prop_assert!(psi_series(&p, r).unwrap().d2 > 0.0);
    }

    #[test]
    fn gegenbauer_parity(k in 0usize..40, lambda in 0.5..4.0f64, t in -1.0..1.0f64) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let (p, q) = (gegenbauer(k, lambda, t), sign * gegenbauer(k, lambda, -t));
        prop_assert!((p - q).abs() <= 1e-12 * p.abs().max(1.0));
    }

    #[test]
    fn rules_integrate_constants(n in 2usize..=3, degree in 1usize..40) {
        let rule = build_rule(n, degree).unwrap();
        let area = if n == 2 { 2.0 * std::f64::consts::PI } else { 4.0 * std::f64::consts::PI };
        prop_assert!((rule.integrate(|_| 1.0).unwrap() - area).abs() <= 1e-12 * area);
    }
}

#[test]
fn custom_rule_round_trip() {
    let rule = SphericalRule::circle(64);
    let nodes: Vec<f64> = rule.nodes().flatten().copied().collect();
    let custom = SphericalRule::from_parts(2, nodes, rule.weights().to_vec()).unwrap();
    let g = |w: &[f64]| (1.0 + 0.5 * w[0]).powi(-2);
    assert_relative_eq!(custom.integrate(g).unwrap(), rule.integrate(g).unwrap(), max_relative = 1e-15);
    assert_eq!(custom.refined(), custom);
    assert!(SphericalRule::from_parts(2, vec![1.0, 1.0], vec![1.0]).is_err());
    assert!(SphericalRule::from_parts(2, vec![1.0, 0.0], vec![-1.0]).is_err());
    assert!(SphericalRule::from_parts(2, vec![1.0, 0.0, 0.0], vec![1.0]).is_err());
}
