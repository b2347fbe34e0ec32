//! Executes scenarios and scores them against their tolerances.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use curveflow::axisym::{build_profile, neck_report, run_axi, AxiTrajectory};
use curveflow::curves::{is_embedded, min_distance, PlaneCurve};
use curveflow::fit::{fit_circle_points, fit_ellipse};
use curveflow::flow::{
    analyze_area_law, co_evolve, convexification_time, rescaled_length_series, run, EventKind, FlowConfig, SpeedLaw,
    Trajectory,
};
use curveflow::io::{
    format_curve, format_profile, load_trajectory, snapshot_name, write_axi_trajectory, write_trajectory,
    StoredTrajectory,
};
use curveflow::oracle::{evolve_grim_reaper, power_circle_radius, self_check, shrinker_radius, Shrinker, ShrinkerKind};
use curveflow::rescale::{
    curvature_normalized_frames, neck_probes, parabolic_rescale, roundness_series, Dial, FrameGeometry,
};
use curveflow::Vec2;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{AxiFlowJob, CurveFlowJob, CurveShape, Job, Kind, OracleJob, ProfileShape, RescaleJob, Scenario};
use crate::svg::{write_curve_svg, write_profile_svg};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Flow(#[from] curveflow::Error),
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: curveflow::Error },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// One measured quantity compared against its requirement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub requirement: String,
    pub pass: bool,
}

impl Check {
    pub fn below(name: &str, measured: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            requirement: format!("< {limit}"),
            pass: measured < limit,
        }
    }

    pub fn between(name: &str, measured: f64, lo: f64, hi: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            requirement: format!("in [{lo}, {hi}]"),
            pass: (lo..=hi).contains(&measured),
        }
    }

    pub fn holds(name: &str, flag: bool) -> Self {
        Check {
            name: name.into(),
            measured: if flag { 1.0 } else { 0.0 },
            requirement: "true".into(),
            pass: flag,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisOutcome {
    pub analysis: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub artifact: PathBuf,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub kind: Kind,
    pub passed: bool,
    pub analyses: Vec<AnalysisOutcome>,
    pub wall_time_s: f64,
    pub artifacts: Vec<PathBuf>,
    /// Cause of a run that stopped before its analyses completed.
    pub error: Option<String>,
}

pub const REPORT_FILE: &str = "report.json";

struct Outputs<'a> {
    dir: &'a Path,
    artifacts: Vec<PathBuf>,
    analyses: Vec<AnalysisOutcome>,
}

impl<'a> Outputs<'a> {
    fn new(dir: &'a Path) -> Self {
        Outputs {
            dir,
            artifacts: Vec::new(),
            analyses: Vec::new(),
        }
    }

    fn file(&mut self, name: &str, contents: &str) -> Result<(), RunError> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.artifacts.push(path);
        Ok(())
    }

    fn curve_svg(&mut self, name: &str, curve: &PlaneCurve) -> Result<(), RunError> {
        let path = self.dir.join(name);
        write_curve_svg(curve, &path)?;
        self.artifacts.push(path);
        Ok(())
    }

    /// Writes `analysis_<name>.json` holding the checks and `details`.
    fn analysis(&mut self, name: &str, checks: Vec<Check>, details: Value) -> Result<(), RunError> {
        let artifact = self.dir.join(format!("analysis_{name}.json"));
        let body = json!({ "analysis": name, "checks": checks, "details": details });
        fs::write(&artifact, serde_json::to_string_pretty(&body)?)?;
        self.artifacts.push(artifact.clone());
        self.analyses.push(AnalysisOutcome {
            analysis: name.into(),
            passed: checks.iter().all(|c| c.pass),
            checks,
            artifact,
        });
        Ok(())
    }
}

/// Runs one scenario into `out_root/<output>`. Failures of the underlying
/// computation are reported, not propagated.
pub fn run_scenario(scenario: &Scenario, out_root: &Path) -> RunReport {
    let start = Instant::now();
    let dir = out_root.join(scenario.output());
    let mut out = Outputs::new(&dir);
    let result = fs::create_dir_all(&dir)
        .map_err(RunError::from)
        .and_then(|()| match &scenario.job {
            Job::CurveFlow(j) => curve_flow(j, &mut out),
            Job::AxiFlow(j) => axi_flow(j, &mut out),
            Job::RescaleAnalysis(j) => rescale_job(j, &mut out),
            Job::OracleCheck(j) => oracle_job(j, &mut out),
        });
    let error = result.err().map(|e| e.to_string());
    let report_path = dir.join(REPORT_FILE);
    out.artifacts.push(report_path.clone());
    let mut report = RunReport {
        scenario: scenario.name.clone(),
        kind: scenario.kind(),
        passed: error.is_none() && out.analyses.iter().all(|a| a.passed),
        analyses: out.analyses,
        wall_time_s: start.elapsed().as_secs_f64(),
        artifacts: out.artifacts,
        error,
    };
    if let Err(e) = serde_json::to_string_pretty(&report)
        .map_err(RunError::from)
        .and_then(|s| fs::write(&report_path, s).map_err(RunError::from))
    {
        report.passed = false;
        report
            .error
            .get_or_insert_with(|| format!("cannot write {}: {e}", report_path.display()));
    }
    report
}

fn mean_radius(c: &PlaneCurve) -> f64 {
    let ctr = c.centroid();
    c.vertices().iter().map(|v| (v - ctr).norm()).sum::<f64>() / c.len() as f64
}

fn curve_flow(j: &CurveFlowJob, out: &mut Outputs) -> Result<(), RunError> {
    let curves = j
        .curves
        .iter()
        .map(|s| match s {
            CurveShape::File { path } => s.build().map_err(|source| RunError::Input {
                path: path.clone(),
                source,
            }),
            _ => s.build().map_err(RunError::from),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let law = SpeedLaw::new(j.law.p)?;
    let cfg = FlowConfig::from(j.flow);
    let trajs = if curves.len() == 1 {
        vec![run(&curves[0], law, &cfg)?]
    } else {
        co_evolve(&curves, law, &cfg)?
    };

    if trajs.len() == 1 {
        out.artifacts.extend(write_trajectory(&trajs[0], out.dir)?);
        out.curve_svg("initial.svg", &trajs[0].initial().curve)?;
        out.curve_svg("final.svg", &trajs[0].last().curve)?;
    } else {
        for (i, t) in trajs.iter().enumerate() {
            let sub = format!("curve_{i}");
            out.artifacts.extend(write_trajectory(t, &out.dir.join(&sub))?);
            out.curve_svg(&format!("{sub}/initial.svg"), &t.initial().curve)?;
            out.curve_svg(&format!("{sub}/final.svg"), &t.last().curve)?;
        }
    }
    let events: Vec<_> = trajs.iter().map(|t| &t.events).collect();
    out.file("events.json", &serde_json::to_string_pretty(&events)?)?;

    let traj = &trajs[0];
    let a = &j.analyses;
    if let Some(r) = a.radius_law {
        let r0 = mean_radius(&traj.initial().curve);
        let mut series = Vec::new();
        let mut worst: f64 = 0.0;
        for s in traj.snapshots.iter().filter(|s| s.time <= r.until) {
            let exact = power_circle_radius(r0, j.law.p, s.time)?;
            let measured = mean_radius(&s.curve);
            worst = worst.max((measured - exact).abs() / exact);
            series.push([s.time, measured, exact]);
        }
        out.analysis(
            "radius-law",
            vec![
                Check::holds("reached_until", traj.last().time >= r.until),
                Check::below("max_relative_error", worst, r.tolerance),
            ],
            json!({ "initial_radius": r0, "series_t_measured_exact": series }),
        )?;
    }
    if let Some(r) = a.area_law {
        let law = analyze_area_law(traj)?;
        let mut checks = Vec::new();
        if let Some(tol) = r.slope_tolerance {
            checks.push(Check::below(
                "slope_relative_error",
                (law.slope / -TAU - 1.0).abs(),
                tol,
            ));
        }
        checks.push(Check::below(
            "extinction_relative_error",
            (law.extrapolated_extinction / law.extinction_estimate - 1.0).abs(),
            r.extinction_tolerance,
        ));
        out.analysis("area-law", checks, serde_json::to_value(law)?)?;
    }
    if let Some(r) = a.roundness {
        let series = roundness_series(traj)?;
        let lifetime = analyze_area_law(traj)?.extrapolated_extinction;
        let tail: Vec<_> = series.iter().filter(|p| p.time >= 0.5 * lifetime).collect();
        let monotone = tail.len() >= 2 && tail.windows(2).all(|w| w[1].circle_residual < w[0].circle_residual);
        let last = series.last().expect("a trajectory has snapshots");
        out.analysis(
            "roundness",
            vec![
                Check::holds("residual_decreasing_over_final_half", monotone),
                Check::below("final_residual", last.circle_residual, r.final_residual),
                Check::below(
                    "final_iso_ratio_excess",
                    (last.isoperimetric_ratio - 1.0).abs(),
                    r.iso_tolerance,
                ),
            ],
            json!({ "lifetime": lifetime, "series": series }),
        )?;
    }
    if let Some(r) = a.convexification {
        let lifetime = analyze_area_law(traj)?.extrapolated_extinction;
        let event = traj.first_event(EventKind::Convexification).map(|e| e.time);
        let snapshot = convexification_time(traj);
        out.analysis(
            "convexification",
            vec![
                Check::holds("event_before_extinction", event.is_some_and(|t| t < lifetime)),
                Check::holds(
                    "snapshot_convex_before_extinction",
                    snapshot.is_some_and(|t| t < lifetime),
                ),
                Check::below("lifetime", lifetime, r.max_lifetime),
            ],
            json!({ "event_time": event, "first_convex_snapshot": snapshot, "lifetime": lifetime }),
        )?;
    }
    if let Some(r) = a.eccentricity {
        let fits = traj
            .snapshots
            .iter()
            .map(|s| fit_ellipse(&s.curve).map(|f| (s.time, f)))
            .collect::<curveflow::Result<Vec<_>>>()?;
        let e0 = fits[0].1.eccentricity;
        let drift = fits
            .iter()
            .map(|(_, f)| (f.eccentricity / e0 - 1.0).abs())
            .fold(0.0, f64::max);
        let residual = fits.iter().map(|(_, f)| f.residual).fold(0.0, f64::max);
        let series: Vec<_> = fits.iter().map(|(t, f)| json!({ "t": t, "fit": f })).collect();
        out.analysis(
            "eccentricity",
            vec![
                Check::below("eccentricity_drift", drift, r.drift_tolerance),
                Check::below("max_fit_residual", residual, r.residual_tolerance),
            ],
            json!({ "series": series }),
        )?;
    }
    if a.length_growth.is_some() {
        let series = rescaled_length_series(traj);
        let increasing = series.len() >= 2 && series.windows(2).all(|w| w[1].1 > w[0].1);
        out.analysis(
            "length-growth",
            vec![Check::holds("normalized_length_strictly_increasing", increasing)],
            json!({ "series_t_length": series }),
        )?;
    }
    if a.embedded.is_some() {
        let mut checks = Vec::new();
        for (i, t) in trajs.iter().enumerate() {
            let ok = t.snapshots.iter().all(|s| is_embedded(&s.curve))
                && t.first_event(EventKind::EmbeddednessLoss).is_none();
            checks.push(Check::holds(&format!("curve_{i}_embedded_at_every_snapshot"), ok));
        }
        let counts: Vec<_> = trajs.iter().map(|t| t.snapshots.len()).collect();
        out.analysis("embedded", checks, json!({ "snapshots_checked": counts }))?;
    }
    if a.disjointness.is_some() {
        let (gap, common) = smallest_gap(&trajs);
        out.analysis(
            "disjointness",
            vec![
                Check::holds("common_times", common > 0),
                Check::holds("positive_min_distance", gap > 0.0),
            ],
            json!({ "common_times": common, "min_distance": gap }),
        )?;
    }
    Ok(())
}

/// Smallest distance between any two curves over the snapshot times they
/// share, and the number of shared times.
fn smallest_gap(trajs: &[Trajectory]) -> (f64, usize) {
    let mut gap = f64::INFINITY;
    let mut common = usize::MAX;
    for (i, a) in trajs.iter().enumerate() {
        for b in &trajs[i + 1..] {
            let mut shared = 0;
            for (x, y) in a.snapshots.iter().zip(&b.snapshots).filter(|(x, y)| x.time == y.time) {
                shared += 1;
                gap = gap.min(min_distance(&x.curve, &y.curve));
            }
            common = common.min(shared);
        }
    }
    (gap, if common == usize::MAX { 0 } else { common })
}

fn axi_flow(j: &AxiFlowJob, out: &mut Outputs) -> Result<(), RunError> {
    let profile = build_profile(j.profile.into(), j.samples)?;
    let traj = run_axi(&profile, &FlowConfig::from(j.flow))?;
    out.artifacts.extend(write_axi_trajectory(&traj, out.dir)?);
    for (name, p) in [
        ("initial.svg", &traj.initial().profile),
        ("final.svg", &traj.last().profile),
    ] {
        let path = out.dir.join(name);
        write_profile_svg(p, &path)?;
        out.artifacts.push(path);
    }
    out.file("events.json", &serde_json::to_string_pretty(&traj.events)?)?;

    let a = &j.analyses;
    if let Some(r) = a.radius_law {
        let (kind, measure): (ShrinkerKind, fn(&[Vec2]) -> f64) = match j.profile {
            ProfileShape::Sphere { .. } => (ShrinkerKind::Sphere, |pts| {
                let c = Vec2::new(0.5 * (pts[0].x + pts[pts.len() - 1].x), 0.0);
                pts.iter().map(|p| (p - c).norm()).sum::<f64>() / pts.len() as f64
            }),
            _ => (ShrinkerKind::Cylinder, |pts| {
                pts.iter().map(|p| p.y).sum::<f64>() / pts.len() as f64
            }),
        };
        let shrinker = Shrinker::new(kind, measure(traj.initial().profile.samples()))?;
        let mut series = Vec::new();
        let mut worst: f64 = 0.0;
        for s in traj.snapshots.iter().filter(|s| s.time <= r.until) {
            let exact = shrinker_radius(shrinker, s.time)?;
            let measured = measure(s.profile.samples());
            worst = worst.max((measured - exact).abs() / exact);
            series.push([s.time, measured, exact]);
        }
        out.analysis(
            "radius-law",
            vec![
                Check::holds("reached_until", traj.last().time >= r.until),
                Check::below("max_relative_error", worst, r.tolerance),
            ],
            json!({ "series_t_measured_exact": series }),
        )?;
    }
    if let Some(r) = a.neck {
        neck_analysis(&traj, j.profile, r.ratio_min, r.ratio_max, out)?;
    }
    if let Some(r) = &a.blowup {
        let probes = neck_probes(&traj, r.probes);
        let mut checks = Vec::new();
        let mut reports = Vec::new();
        for (dial, accepted) in [
            (Dial::Fast, &r.fast),
            (Dial::Natural, &r.natural),
            (Dial::Slow, &r.slow),
        ] {
            let report = curvature_normalized_frames(&traj, &probes, dial)?;
            let name = format!(
                "{}_class_accepted",
                serde_json::to_value(dial)?.as_str().unwrap_or("dial")
            );
            checks.push(Check::holds(&name, accepted.contains(&report.limit_classification)));
            reports.push(serde_json::to_value(report.to_json_value())?);
        }
        out.analysis("blowup", checks, json!({ "probes": probes, "reports": reports }))?;
    }
    if let Some(r) = a.collapse {
        let last = &traj.last().profile;
        let pts = last.samples();
        let fit = fit_circle_points(pts)?;
        let worst = pts
            .iter()
            .map(|p| ((p - fit.center).norm() - fit.radius).abs())
            .fold(0.0, f64::max);
        let spacing = last.meridian_length() / pts.len() as f64;
        let event = traj.first_event(EventKind::TorusCollapse);
        out.analysis(
            "collapse",
            vec![
                Check::holds("torus_collapse_event", event.is_some()),
                Check::below("max_circle_deviation", worst, r.spacing_multiple * spacing),
            ],
            json!({ "event": event, "circle": fit, "mean_spacing": spacing }),
        )?;
    }
    Ok(())
}

fn neck_analysis(
    traj: &AxiTrajectory,
    shape: ProfileShape,
    ratio_min: f64,
    ratio_max: f64,
    out: &mut Outputs,
) -> Result<(), RunError> {
    let event = traj.first_event(EventKind::NeckPinch);
    let mut checks = vec![Check::holds("neck_pinch_event", event.is_some())];
    if let (Some(e), ProfileShape::Dumbbell { tube_length, .. }) = (event, shape) {
        let x = e.location.map_or(f64::NAN, |l| l[0]);
        checks.push(Check::between(
            "pinch_location",
            x,
            -tube_length / 2.0,
            tube_length / 2.0,
        ));
    }
    let report = neck_report(traj)?;
    let (lo, hi) = report.ratio_range();
    checks.push(Check::between("min_self_similar_ratio", lo, ratio_min, ratio_max));
    checks.push(Check::between("max_self_similar_ratio", hi, ratio_min, ratio_max));
    if traj.initial().metrics.mean_convex {
        checks.push(Check::holds(
            "mean_convex_throughout",
            traj.snapshots.iter().all(|s| s.metrics.mean_convex),
        ));
    }
    out.analysis("neck", checks, json!({ "event": event, "report": report }))
}

/// Writes the frames of a parabolic rescaling of a stored trajectory into
/// `dir` and returns the files written, ending with `rescale.json`.
pub fn rescale_directory(
    source: &Path,
    center: Vec2,
    reference_time: f64,
    scales: &[f64],
    dir: &Path,
) -> Result<Vec<PathBuf>, RunError> {
    let stored = load_trajectory(source)?;
    let rescaled = match &stored {
        StoredTrajectory::Curves(t) => parabolic_rescale(t, center, reference_time, scales)?,
        StoredTrajectory::Surfaces(t) => parabolic_rescale(t, center, reference_time, scales)?,
    };
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let mut frames = Vec::new();
    for (i, f) in rescaled.frames.iter().enumerate() {
        let (name, text) = match &f.geometry {
            FrameGeometry::Curve(c) => (snapshot_name(i, "xy"), format_curve(c)),
            FrameGeometry::Profile { profile, .. } => (snapshot_name(i, "prof"), format_profile(profile)),
        };
        let path = dir.join(name.replacen("snap", "frame", 1));
        fs::write(&path, text)?;
        frames.push(json!({
            "file": path.file_name().and_then(|n| n.to_str()),
            "snapshot_index": f.snapshot_index,
            "source_time": f.source_time,
            "scale": f.scale,
            "rescaled_time": f.rescaled_time,
        }));
        files.push(path);
    }
    let summary = json!({
        "center": [center.x, center.y],
        "reference_time": reference_time,
        "frames": frames,
        "skipped": rescaled.skipped,
    });
    let path = dir.join("rescale.json");
    fs::write(&path, serde_json::to_string_pretty(&summary)?)?;
    files.push(path);
    Ok(files)
}

fn rescale_job(j: &RescaleJob, out: &mut Outputs) -> Result<(), RunError> {
    let center = Vec2::new(j.center[0], j.center[1]);
    let files = rescale_directory(&j.source, center, j.reference_time, &j.scales, out.dir)?;
    let frames = files.len() - 1;
    out.artifacts.extend(files);
    out.analysis(
        "rescale",
        vec![Check::holds("frames_written", frames > 0)],
        json!({ "frames": frames, "requested": j.scales.len() }),
    )
}

fn oracle_job(j: &OracleJob, out: &mut Outputs) -> Result<(), RunError> {
    if let Some(r) = j.analyses.closed_forms {
        let checks = self_check();
        let worst = checks.iter().map(|c| c.abs_error).fold(0.0, f64::max);
        out.analysis(
            "closed-forms",
            vec![Check::below("worst_abs_error", worst, r.tolerance)],
            json!({ "checks": checks }),
        )?;
    }
    if let Some(r) = j.analyses.grim_reaper {
        let check = evolve_grim_reaper(r.samples, r.half_width, r.duration, r.cfl_factor, r.resample_every)?;
        out.analysis(
            "grim-reaper",
            vec![Check::below(
                "max_interior_deviation",
                check.max_interior_deviation,
                r.tolerance,
            )],
            serde_json::to_value(check)?,
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn check_constructors() {
        assert!(Check::below("a", 0.5, 1.0).pass);
        assert!(!Check::below("a", f64::NAN, 1.0).pass);
        assert!(!Check::below("a", 1.0, 1.0).pass);
        assert!(Check::between("b", 1.0, 0.95, 1.05).pass);
        assert!(!Check::between("b", 1.06, 0.95, 1.05).pass);
        assert_eq!(Check::holds("c", false).measured, 0.0);
    }

    #[test]
    fn oracle_scenario_writes_one_artifact_per_analysis() {
        let text = "[o]\nkind = \"oracle-check\"\noutput = \"o\"\n\
            analyses = { closed-forms = { tolerance = 1e-6 }, grim-reaper = { samples = 121, half_width = 1.2, duration = 0.05, cfl_factor = 0.5, resample_every = 200, tolerance = 5e-3 } }\n";
        let scenarios = parse_config(text).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let report = run_scenario(&scenarios[0], dir.path());
        assert!(report.passed, "{report:?}");
        let names: Vec<_> = report.analyses.iter().map(|a| a.analysis.as_str()).collect();
        assert_eq!(names, ["closed-forms", "grim-reaper"]);
        for a in &report.analyses {
            assert!(a.artifact.exists());
        }
        assert!(dir.path().join("o").join(REPORT_FILE).exists());
    }

    #[test]
    fn failures_are_captured_with_cause() {
        let text = "[f]\nkind = \"curve-flow\"\noutput = \"f\"\ncurves = [{ file = { path = \"/nonexistent/curve.xy\" } }]\n\
            law = { p = 1.0 }\n\
            flow = { cfl_factor = 0.5, resample_every = 200, target_vertex_spacing = 0.02, min_vertices = 64, stop_area_fraction = 0.02, max_curvature_stop = 1e4, max_steps = 1000, snapshot_ratio = 0.98 }\n\
            analyses = {}\n";
        let scenarios = parse_config(text).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let report = run_scenario(&scenarios[0], dir.path());
        assert!(!report.passed);
        assert!(report.error.unwrap().contains("/nonexistent"));
    }
}
