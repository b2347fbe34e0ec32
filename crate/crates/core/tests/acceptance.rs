//! End-to-end acceptance suite. Prints one line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use curveflow::axisym::{build_profile, neck_report, run_axi, AxiShape, AxiTrajectory};
use curveflow::curves::{is_embedded, min_distance, PlaneCurve};
use curveflow::fit::{fit_circle_points, fit_ellipse};
use curveflow::flow::{
    analyze_area_law, co_evolve, convexification_time, rescaled_length_series, run, EventKind, FlowConfig, SpeedLaw,
    Trajectory,
};
use curveflow::oracle::{evolve_grim_reaper, self_check};
use curveflow::rescale::{curvature_normalized_frames, neck_probes, roundness_series, Dial, LimitClass};
use curveflow::shapes::{self, SpiralSpec};
use curveflow::Vec2;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn mean_radius(c: &PlaneCurve) -> f64 {
    let ctr = c.centroid();
    c.vertices().iter().map(|v| (v - ctr).norm()).sum::<f64>() / c.len() as f64
}

fn all_embedded(traj: &Trajectory) -> bool {
    traj.snapshots.iter().all(|s| is_embedded(&s.curve)) && traj.first_event(EventKind::EmbeddednessLoss).is_none()
}

fn two_to_one_ellipse() -> Trajectory {
    run(
        &shapes::ellipse(2.0, 1.0, 512).unwrap(),
        SpeedLaw::CURVE_SHORTENING,
        &FlowConfig {
            target_vertex_spacing: 0.015,
            min_vertices: 256,
            ..FlowConfig::default()
        },
    )
    .unwrap()
}

fn circle_law() -> Outcome {
    let traj = run(
        &shapes::circle(1.0, 512).unwrap(),
        SpeedLaw::CURVE_SHORTENING,
        &FlowConfig {
            min_vertices: 512,
            ..FlowConfig::default()
        },
    )
    .unwrap();
    let worst = traj
        .snapshots
        .iter()
        .filter(|s| s.time <= 0.45)
        .map(|s| {
            let exact = (1.0 - 2.0 * s.time).sqrt();
            (mean_radius(&s.curve) - exact).abs() / exact
        })
        .fold(0.0, f64::max);
    let reached = traj.last().time > 0.45;
    let law = analyze_area_law(&traj).unwrap();
    let ext = law.extrapolated_extinction;
    outcome(
        reached && worst < 1e-3 && (ext - 0.5).abs() <= 0.005 && all_embedded(&traj),
        format!("max radius rel. error {worst:.2e} to t=0.45, extinction {ext:.5}"),
    )
}

fn area_law(traj: &Trajectory) -> Outcome {
    let law = analyze_area_law(traj).unwrap();
    let slope_err = (law.slope / -TAU - 1.0).abs();
    let ext = law.extrapolated_extinction;
    outcome(
        slope_err < 5e-3
            && (law.extinction_estimate - 1.0).abs() < 0.02
            && (ext - 1.0).abs() < 0.02
            && all_embedded(traj),
        format!(
            "slope {:.5} (rel. err {slope_err:.2e}), A(0)/2π {:.5}, extrapolated extinction {ext:.5}",
            law.slope, law.extinction_estimate
        ),
    )
}

fn roundness(traj: &Trajectory) -> Outcome {
    let series = roundness_series(traj).unwrap();
    let lifetime = analyze_area_law(traj).unwrap().extrapolated_extinction;
    let tail: Vec<_> = series.iter().filter(|p| p.time >= 0.5 * lifetime).collect();
    let monotone = tail.windows(2).all(|w| w[1].circle_residual < w[0].circle_residual);
    let last = series.last().unwrap();
    outcome(
        tail.len() > 10 && monotone && last.circle_residual < 0.02 && (last.isoperimetric_ratio - 1.0).abs() < 0.01,
        format!(
            "{} frames in final half, monotone {monotone}, final residual {:.2e}, iso ratio {:.5}",
            tail.len(),
            last.circle_residual,
            last.isoperimetric_ratio
        ),
    )
}

fn spiral() -> Outcome {
    let curve = shapes::spiral(SpiralSpec::FIGURE, 0.01).unwrap();
    let traj = run(
        &curve,
        SpeedLaw::CURVE_SHORTENING,
        &FlowConfig {
            target_vertex_spacing: 0.01,
            min_vertices: 256,
            stop_area_fraction: 0.002,
            ..FlowConfig::default()
        },
    )
    .unwrap();
    let law = analyze_area_law(&traj).unwrap();
    let lifetime = law.extrapolated_extinction;
    let convex_at = convexification_time(&traj);
    let event = traj.first_event(EventKind::Convexification).map(|e| e.time);
    let ok = all_embedded(&traj)
        && event.is_some_and(|t| t < lifetime)
        && convex_at.is_some_and(|t| t < lifetime)
        && lifetime < 2.0
        && (lifetime / law.extinction_estimate - 1.0).abs() < 0.02;
    outcome(
        ok,
        format!(
            "embedded throughout, convex at t={:.4}, lifetime {lifetime:.4} vs A(0)/2π {:.4}",
            convex_at.unwrap_or(f64::NAN),
            law.extinction_estimate
        ),
    )
}

fn affine() -> Outcome {
    let traj = run(
        &shapes::ellipse(2.0, 1.0, 512).unwrap(),
        SpeedLaw::affine(),
        &FlowConfig {
            target_vertex_spacing: 0.015,
            min_vertices: 256,
            stop_area_fraction: 0.5,
            ..FlowConfig::default()
        },
    )
    .unwrap();
    let e0 = fit_ellipse(&traj.initial().curve).unwrap().eccentricity;
    let mut drift: f64 = 0.0;
    let mut residual: f64 = 0.0;
    for s in &traj.snapshots {
        let f = fit_ellipse(&s.curve).unwrap();
        drift = drift.max((f.eccentricity / e0 - 1.0).abs());
        residual = residual.max(f.residual);
    }
    let halved = traj.last().metrics.enclosed_area <= 0.5 * traj.initial().metrics.enclosed_area * 1.001;
    outcome(
        halved && drift < 0.01 && residual < 1e-3,
        format!("eccentricity drift {drift:.2e}, worst fit residual {residual:.2e}"),
    )
}

fn root_five() -> Outcome {
    let traj = run(
        &shapes::ellipse(3.0, 1.0, 512).unwrap(),
        SpeedLaw::root(5.0).unwrap(),
        &FlowConfig {
            target_vertex_spacing: 0.015,
            min_vertices: 256,
            stop_area_fraction: 0.3,
            ..FlowConfig::default()
        },
    )
    .unwrap();
    let series = rescaled_length_series(&traj);
    let increasing = series.windows(2).all(|w| w[1].1 > w[0].1);
    outcome(
        series.len() > 10 && increasing,
        format!(
            "{} frames, normalized length {:.5} -> {:.5}",
            series.len(),
            series[0].1,
            series.last().unwrap().1
        ),
    )
}

fn sphere() -> Outcome {
    let traj = run_axi(
        &build_profile(AxiShape::Sphere { radius: 1.0 }, 400).unwrap(),
        &FlowConfig {
            target_vertex_spacing: PI / 399.0,
            min_vertices: 64,
            ..FlowConfig::default()
        },
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    for s in traj.snapshots.iter().filter(|s| s.time <= 0.22) {
        let pts = s.profile.samples();
        let c = Vec2::new(0.5 * (pts[0].x + pts[pts.len() - 1].x), 0.0);
        let r = pts.iter().map(|p| (p - c).norm()).sum::<f64>() / pts.len() as f64;
        let exact = (1.0 - 4.0 * s.time).sqrt();
        worst = worst.max((r - exact).abs() / exact);
    }
    let reached = traj.last().time > 0.22;
    outcome(
        reached && worst < 1e-3,
        format!("max radius rel. error {worst:.2e} to t=0.22"),
    )
}

const TUBE_LENGTH: f64 = 1.2;

fn dumbbell_run() -> AxiTrajectory {
    let spacing = 0.0025;
    let shape = AxiShape::Dumbbell {
        lobe_radius: 1.0,
        tube_radius: 0.15,
        tube_length: TUBE_LENGTH,
    };
    let coarse = build_profile(shape, 800).unwrap();
    let n = (coarse.meridian_length() / spacing).ceil() as usize;
    run_axi(
        &build_profile(shape, n).unwrap(),
        &FlowConfig {
            target_vertex_spacing: spacing,
            min_vertices: 64,
            ..FlowConfig::default()
        },
    )
    .unwrap()
}

fn neck_pinch(traj: &AxiTrajectory) -> Outcome {
    let Some(event) = traj.first_event(EventKind::NeckPinch) else {
        return outcome(false, "no neck-pinch event");
    };
    let x = event.location.unwrap()[0];
    let report = neck_report(traj).unwrap();
    let (lo, hi) = report.ratio_range();
    let initially = traj.initial().metrics.mean_convex;
    let preserved = traj.snapshots.iter().all(|s| s.metrics.mean_convex);
    let lobes = traj.last().metrics.extent > 1.0;
    outcome(
        x.abs() <= TUBE_LENGTH / 2.0 && (0.95..=1.05).contains(&lo) && (0.95..=1.05).contains(&hi)
            && initially && preserved && lobes,
        format!(
            "pinch at x={x:.3}, t={:.5}, fitted T={:.5}, ratio in [{lo:.4}, {hi:.4}] over {} frames, mean convex throughout {preserved}",
            event.time,
            report.pinch_time,
            report.self_similar_ratios.len()
        ),
    )
}

fn torus() -> Outcome {
    let spacing = 0.001;
    let traj = run_axi(
        &build_profile(
            AxiShape::Torus {
                ring_radius: 1.0,
                tube_radius: 0.1,
            },
            628,
        )
        .unwrap(),
        &FlowConfig {
            target_vertex_spacing: spacing,
            min_vertices: 64,
            ..FlowConfig::default()
        },
    )
    .unwrap();
    let Some(event) = traj.first_event(EventKind::TorusCollapse) else {
        return outcome(false, "no torus-collapse event");
    };
    let last = traj.last().profile.clone();
    let pts = last.samples();
    let fit = fit_circle_points(pts).unwrap();
    let worst = pts
        .iter()
        .map(|p| ((p - fit.center).norm() - fit.radius).abs())
        .fold(0.0, f64::max);
    let mean_spacing = last.meridian_length() / pts.len() as f64;
    outcome(
        worst < 3.0 * mean_spacing,
        format!(
            "collapse at t={:.5} onto core radius {:.4}, max deviation {worst:.2e} vs 3h = {:.2e}",
            event.time,
            fit.center.y,
            3.0 * mean_spacing
        ),
    )
}

fn disjoint() -> Outcome {
    let outer = shapes::circle(2.0, 800).unwrap();
    let inner = shapes::ellipse(1.5, 0.75, 400).unwrap();
    let trajs = co_evolve(
        &[inner, outer],
        SpeedLaw::CURVE_SHORTENING,
        &FlowConfig {
            target_vertex_spacing: 0.015,
            min_vertices: 128,
            ..FlowConfig::default()
        },
    )
    .unwrap();
    let (a, b) = (&trajs[0], &trajs[1]);
    let same_times =
        a.snapshots.len() == b.snapshots.len() && a.snapshots.iter().zip(&b.snapshots).all(|(x, y)| x.time == y.time);
    let gap = a
        .snapshots
        .iter()
        .zip(&b.snapshots)
        .map(|(x, y)| min_distance(&x.curve, &y.curve))
        .fold(f64::INFINITY, f64::min);
    outcome(
        same_times && gap > 0.0 && all_embedded(a) && all_embedded(b),
        format!("{} common times, smallest gap {gap:.4}", a.snapshots.len()),
    )
}

fn grim_reaper() -> Outcome {
    let run = evolve_grim_reaper(241, 1.2, 0.3, 0.5, 200).unwrap();
    outcome(
        run.max_interior_deviation < 5e-3,
        format!(
            "max interior deviation {:.2e} after t={}",
            run.max_interior_deviation, run.time
        ),
    )
}

fn blowup_dial(traj: &AxiTrajectory) -> Outcome {
    let probes = neck_probes(traj, 5);
    let mut details = Vec::new();
    let mut ok = true;
    for (dial, accepted) in [
        (Dial::Fast, &[LimitClass::PlaneLike][..]),
        (
            Dial::Natural,
            &[LimitClass::ConvexNoncompact, LimitClass::CylinderLike][..],
        ),
        (Dial::Slow, &[LimitClass::CylinderLike][..]),
    ] {
        let report = curvature_normalized_frames(traj, &probes, dial).unwrap();
        ok &= accepted.contains(&report.limit_classification);
        if dial == Dial::Natural {
            ok &= report.late_frames_convex;
        }
        details.push(format!("{dial:?} -> {:?}", report.limit_classification));
    }
    outcome(ok, details.join(", "))
}

fn oracles() -> Outcome {
    let checks = self_check();
    let worst = checks.iter().map(|c| c.abs_error).fold(0.0, f64::max);
    outcome(
        worst < 1e-6,
        format!("{} oracles, worst mismatch {worst:.2e}", checks.len()),
    )
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |id: usize, name: &str, budget: Duration, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed <= budget;
        if !pass {
            failures += 1;
        }
        println!(
            "[{}] {id:>2} {name}: {} ({:.1}s, budget {}s)",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    };
    let secs = Duration::from_secs;

    report(13, "oracle self-check", secs(5), &mut oracles);
    report(1, "circle law", secs(10), &mut circle_law);
    let mut ellipse = None;
    report(2, "area law", secs(30), &mut || {
        let t = two_to_one_ellipse();
        let o = area_law(&t);
        ellipse = Some(t);
        o
    });
    report(3, "roundness", secs(30), &mut || roundness(ellipse.as_ref().unwrap()));
    report(4, "spiral", secs(120), &mut spiral);
    report(5, "affine ellipse", secs(60), &mut affine);
    report(6, "fifth-root degeneracy", secs(60), &mut root_five);
    report(7, "sphere", secs(30), &mut sphere);
    let mut dumbbell = None;
    report(8, "neck pinch", secs(120), &mut || {
        let t = dumbbell_run();
        let o = neck_pinch(&t);
        dumbbell = Some(t);
        o
    });
    report(9, "torus collapse", secs(60), &mut torus);
    report(10, "disjointness and embeddedness", secs(60), &mut disjoint);
    report(11, "grim reaper", secs(30), &mut grim_reaper);
    report(12, "blow-up dial", secs(120), &mut || {
        blowup_dial(dumbbell.as_ref().unwrap())
    });

    if failures == 0 {
        println!("all acceptance criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("{failures} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
