use std::f64::consts::{PI, TAU};

use curveflow::axisym::{build_profile, stable_axi_timestep, step_axi, AxiShape};
use curveflow::curves::{curvature_profile, is_embedded, metrics, resample_uniform, PlaneCurve};
use curveflow::fit::fit_ellipse;
use curveflow::flow::{run, FlowConfig, Snapshot, SpeedLaw, Trajectory};
use curveflow::oracle::{shrinker_radius, Shrinker, ShrinkerKind};
use curveflow::rescale::{parabolic_rescale, FrameGeometry};
use curveflow::shapes;
use curveflow::Vec2;
use proptest::prelude::*;

/// Star-shaped curve `r(θ) = 1 + Σ a_k cos(kθ + φ_k)` with `Σ|a_k| < 0.3`,
/// which keeps it embedded and counterclockwise.
fn star(n: usize, modes: &[(f64, f64)]) -> PlaneCurve {
    shapes::parametric(n, |th| {
        let r = 1.0
            + modes
                .iter()
                .enumerate()
                .map(|(k, (a, phase))| a * ((k + 2) as f64 * th + phase).cos())
                .sum::<f64>();
        Vec2::new(r * th.cos(), r * th.sin())
    })
    .unwrap()
}

fn modes() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-0.1..0.1f64, 0.0..TAU), 1..4)
}

#[test]
fn shoelace_converges_quadratically() {
    for r in [0.5, 1.0, 3.0] {
        let exact = PI * r * r;
        let errs: Vec<f64> = [64, 256, 1024]
            .iter()
            .map(|&n| (shapes::circle(r, n).unwrap().signed_area() - exact).abs() / exact)
            .collect();
        for (n, e) in [64.0, 256.0, 1024.0].iter().zip(&errs) {
            // Inscribed n-gon: relative deficit 1 - sin(2π/n)/(2π/n) ≈ (2π/n)²/6.
            assert!(*e < 1.01 * (TAU / n).powi(2) / 6.0, "n = {n}: {e}");
        }
        assert!((errs[0] / errs[1] - 16.0).abs() < 0.1);
        assert!((errs[1] / errs[2] - 16.0).abs() < 0.1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn isoperimetric_ratio_at_least_one(m in modes(), n in 16usize..400) {
        let c = star(n, &m);
        prop_assert!(metrics(&c).isoperimetric_ratio >= 1.0 - 1e-9);
    }

    #[test]
    fn isoperimetric_ratio_of_ellipses(a in 0.2..5.0f64, b in 0.2..5.0f64, n in 16usize..400) {
        prop_assert!(metrics(&shapes::ellipse(a, b, n).unwrap()).isoperimetric_ratio >= 1.0 - 1e-9);
    }

    #[test]
    fn resample_is_idempotent(r in 0.1..10.0f64, n in 16usize..1024, cx in -5.0..5.0f64, side in 0.1..10.0f64, quarter in 4usize..256) {
        let uniform = [
            shapes::circle_at(Vec2::new(cx, -cx), r, n).unwrap(),
            shapes::square(side, 4 * quarter).unwrap(),
        ];
        for c in uniform {
            let again = resample_uniform(&c, c.len()).unwrap();
            for (p, q) in c.vertices().iter().zip(again.vertices()) {
                prop_assert!((p - q).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn circle_curvature_is_constant(r in 0.01..100.0f64, n in 256usize..2048, cx in -10.0..10.0f64, cy in -10.0..10.0f64) {
        let c = shapes::circle_at(Vec2::new(cx, cy), r, n).unwrap();
        for (k, _) in curvature_profile(&c) {
            prop_assert!((k * r - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn embedded_curves_turn_once(m in modes(), n in 256usize..1024) {
        let c = star(n, &m);
        prop_assert!(is_embedded(&c));
        prop_assert!((metrics(&c).total_turning - TAU).abs() < 1e-3);
    }

    #[test]
    fn dilation_composes(m in modes(), l in 0.1..10.0f64, mu in 0.1..10.0f64, cx in -2.0..2.0f64, cy in -2.0..2.0f64) {
        let c = star(128, &m);
        let center = Vec2::new(cx, cy);
        // The first dilation carries `center` to the origin.
        let two = c.dilate_about(center, l).unwrap().dilate_about(Vec2::zeros(), mu).unwrap();
        let one = c.dilate_about(center, l * mu).unwrap();
        let size = c.diameter() * l * mu + (center.norm() + 1.0) * l * mu;
        for (p, q) in two.vertices().iter().zip(one.vertices()) {
            prop_assert!((p - q).norm() <= 1e-12 * size.max(1.0));
        }
    }

    #[test]
    fn rescaling_preserves_shape_invariants(a in 1.0..3.0f64, l in 0.2..20.0f64, cx in -1.0..1.0f64) {
        let curve = shapes::ellipse(a, 1.0, 256).unwrap();
        let traj = Trajectory {
            law: SpeedLaw::CURVE_SHORTENING,
            snapshots: vec![Snapshot { time: 0.0, metrics: metrics(&curve), curve: curve.clone() }],
            events: Vec::new(),
            steps: 0,
        };
        let reference = 0.5 / (l * l);
        let out = parabolic_rescale(&traj, Vec2::new(cx, 0.3), reference, &[l]).unwrap();
        prop_assert_eq!(out.frames.len(), 1);
        let FrameGeometry::Curve(frame) = &out.frames[0].geometry else { unreachable!() };
        let (m0, m1) = (metrics(&curve), metrics(frame));
        prop_assert!((m0.isoperimetric_ratio - m1.isoperimetric_ratio).abs() < 1e-9);
        let (e0, e1) = (fit_ellipse(&curve).unwrap(), fit_ellipse(frame).unwrap());
        prop_assert!((e0.eccentricity - e1.eccentricity).abs() < 1e-9);
    }

    #[test]
    fn shrinker_squared_radius_is_affine(r0 in 0.1..10.0f64, s in 0.0..1.0f64, u in 0.0..1.0f64) {
        for kind in [ShrinkerKind::Circle, ShrinkerKind::Sphere, ShrinkerKind::Cylinder] {
            let sh = Shrinker::new(kind, r0).unwrap();
            let rate = kind.squared_radius_rate();
            let (t1, t2) = (s * sh.lifetime(), u * sh.lifetime());
            let r1 = shrinker_radius(sh, t1).unwrap();
            let r2 = shrinker_radius(sh, t2).unwrap();
            prop_assert!((r1 * r1 - r2 * r2 - rate * (t2 - t1)).abs() < 1e-12 * r0 * r0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn curve_shortening_decreases_length_and_area(m in modes()) {
        let traj = run(&star(200, &m), SpeedLaw::CURVE_SHORTENING, &FlowConfig {
            target_vertex_spacing: 0.03,
            stop_area_fraction: 0.3,
            ..FlowConfig::default()
        }).unwrap();
        prop_assert!(traj.snapshots.len() > 10);
        let mut convex_seen = false;
        for w in traj.snapshots.windows(2) {
            prop_assert!(w[1].metrics.length < w[0].metrics.length);
            prop_assert!(w[1].metrics.enclosed_area < w[0].metrics.enclosed_area);
            prop_assert!(is_embedded(&w[1].curve));
            if convex_seen {
                prop_assert!(w[1].metrics.convex);
            }
            convex_seen |= w[1].metrics.convex;
        }
    }

    #[test]
    fn axisymmetric_step_preserves_reflection(lobe in 0.8..1.5f64, tube in 0.15..0.4f64, len in 0.5..2.0f64) {
        let p = build_profile(AxiShape::Dumbbell { lobe_radius: lobe, tube_radius: tube, tube_length: len }, 401).unwrap();
        let next = step_axi(&p, 0.5 * stable_axi_timestep(&p)).unwrap();
        let s = next.samples();
        let n = s.len();
        for i in 0..n {
            let (a, b) = (s[i], s[n - 1 - i]);
            prop_assert!((a.x + b.x).abs() < 1e-9 && (a.y - b.y).abs() < 1e-9);
        }
    }
}
