//! Blow-up analysis: parabolic rescaling about spacetime points and
//! classification of the rescaled frames against the model limits (planes,
//! round spheres or circles, round cylinders, convex non-compact shapes).

use serde::{Deserialize, Serialize};

use crate::axisym::{mean_curvature_profile, AxiProfile, AxiTrajectory, Topology};
use crate::curves::{curvature_profile, metrics, PlaneCurve};
use crate::fit::{fit_circle_points, least_squares_line};
use crate::flow::Trajectory;
use crate::{Error, Result, Vec2};

pub use crate::fit::{fit_circle, CircleFit};

/// A snapshot at scale `λ` is taken from time `T - PARABOLIC_OFFSET / λ²`,
/// where a shrinking circle or cylinder has rescaled radius 1.
pub const PARABOLIC_OFFSET: f64 = 0.5;
/// Largest accepted distance from the ideal snapshot time, as a fraction of
/// `PARABOLIC_OFFSET / λ²`.
pub const TIME_WINDOW: f64 = 0.1;

pub const PLANE_TOL: f64 = 0.01;
pub const ROUND_TOL: f64 = 0.02;
pub const ROUND_MAX_RADIUS: f64 = 2.0;
pub const CYLINDER_TOL: f64 = 0.02;
pub const CONVEX_TOL: f64 = 1e-3;
/// Half-length of the axial window used for the cylinder test.
pub const CYLINDER_HALF_WINDOW: f64 = 0.5;
/// Radius of the ball around the probe used for the local tests.
pub const WINDOW_RADIUS: f64 = 1.0;

#[derive(Clone, Copy, Debug)]
pub enum Source<'a> {
    Curves(&'a Trajectory),
    Surfaces(&'a AxiTrajectory),
}

impl<'a> From<&'a Trajectory> for Source<'a> {
    fn from(t: &'a Trajectory) -> Self {
        Source::Curves(t)
    }
}

impl<'a> From<&'a AxiTrajectory> for Source<'a> {
    fn from(t: &'a AxiTrajectory) -> Self {
        Source::Surfaces(t)
    }
}

impl Source<'_> {
    fn times(&self) -> Vec<f64> {
        match self {
            Source::Curves(t) => t.snapshots.iter().map(|s| s.time).collect(),
            Source::Surfaces(t) => t.snapshots.iter().map(|s| s.time).collect(),
        }
    }

    fn len(&self) -> usize {
        match self {
            Source::Curves(t) => t.snapshots.len(),
            Source::Surfaces(t) => t.snapshots.len(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum FrameGeometry {
    Curve(PlaneCurve),
    /// Profile dilated about an axis point; `probe` is the rescaled probe.
    Profile {
        profile: AxiProfile,
        probe: Vec2,
    },
}

#[derive(Clone, Debug)]
pub struct RescaleFrame {
    pub snapshot_index: usize,
    pub source_time: f64,
    pub center: Vec2,
    pub reference_time: f64,
    pub scale: f64,
    /// `λ² (t - T)`.
    pub rescaled_time: f64,
    pub geometry: FrameGeometry,
    /// Probe position minus the snapshot point actually used as the centre.
    pub probe_offset: Vec2,
}

#[derive(Clone, Debug, Serialize)]
pub struct SkippedFrame {
    pub scale: f64,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct Rescaled {
    pub frames: Vec<RescaleFrame>,
    pub skipped: Vec<SkippedFrame>,
}

fn dilate(source: Source, index: usize, center: Vec2, scale: f64) -> Result<FrameGeometry> {
    Ok(match source {
        Source::Curves(t) => FrameGeometry::Curve(t.snapshots[index].curve.dilate_about(center, scale)?),
        Source::Surfaces(t) => FrameGeometry::Profile {
            profile: t.snapshots[index].profile.dilate_about(center.x, scale)?,
            probe: Vec2::new(0.0, center.y * scale),
        },
    })
}

/// For each scale `λ`, dilates the snapshot nearest `T - c/λ²` about
/// `center` by `λ`. Profiles are dilated about the axis point below
/// `center`. Scales whose ideal time has no snapshot within the window are
/// reported in `skipped`.
pub fn parabolic_rescale<'a>(
    source: impl Into<Source<'a>>,
    center: Vec2,
    reference_time: f64,
    scales: &[f64],
) -> Result<Rescaled> {
    let source = source.into();
    if scales.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("scales must be strictly increasing"));
    }
    if let Some(bad) = scales.iter().find(|&&l| !(l > 0.0)) {
        return Err(Error::invalid(format!("scales must be positive, got {bad}")));
    }
    let times = source.times();
    let mut out = Rescaled::default();
    for &scale in scales {
        let offset = PARABOLIC_OFFSET / (scale * scale);
        let target = reference_time - offset;
        let (index, t) = times
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
            .ok_or_else(|| Error::invalid("trajectory has no snapshots"))?;
        if (t - target).abs() > TIME_WINDOW * offset {
            out.skipped.push(SkippedFrame {
                scale,
                reason: format!(
                    "nearest snapshot t = {t} is farther than {} from the target time {target}",
                    TIME_WINDOW * offset
                ),
            });
            continue;
        }
        out.frames.push(RescaleFrame {
            snapshot_index: index,
            source_time: t,
            center,
            reference_time,
            scale,
            rescaled_time: scale * scale * (t - reference_time),
            geometry: dilate(source, index, center, scale)?,
            probe_offset: Vec2::zeros(),
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RoundnessPoint {
    pub time: f64,
    pub circle_residual: f64,
    pub isoperimetric_ratio: f64,
}

/// Circle-fit residual and isoperimetric ratio of every snapshot after
/// dilating it about its centroid to the initial enclosed area.
pub fn roundness_series(traj: &Trajectory) -> Result<Vec<RoundnessPoint>> {
    let a0 = traj.initial().metrics.enclosed_area;
    traj.snapshots
        .iter()
        .map(|s| {
            let scale = (a0 / s.metrics.enclosed_area).sqrt();
            let c = s.curve.dilate_about(s.curve.centroid(), scale)?;
            Ok(RoundnessPoint {
                time: s.time,
                circle_residual: fit_circle(&c)?.residual,
                isoperimetric_ratio: metrics(&c).isoperimetric_ratio,
            })
        })
        .collect()
}

/// How strongly the dilation grows with the local curvature `h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dial {
    /// `λ = h²`.
    Fast,
    /// `λ = h`.
    Natural,
    /// `λ = √h`.
    Slow,
}

impl Dial {
    pub fn scale(self, h: f64) -> f64 {
        let h = h.abs();
        match self {
            Dial::Fast => h * h,
            Dial::Natural => h,
            Dial::Slow => h.sqrt(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitClass {
    PlaneLike,
    RoundLike,
    CylinderLike,
    ConvexNoncompact,
    Unclassified,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Probe {
    pub snapshot: usize,
    pub point: Vec2,
}

/// Measurements of one rescaled frame against each model shape. Absent
/// entries could not be evaluated (too few points, failed fit, or the test
/// does not apply to the geometry).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameAssessment {
    pub plane_deviation: Option<f64>,
    pub circle_residual: Option<f64>,
    pub circle_radius: Option<f64>,
    pub cylinder_variation: Option<f64>,
    /// Smallest principal curvature in the window around the probe.
    pub min_curvature: f64,
    pub class: LimitClass,
}

impl FrameAssessment {
    pub fn convex(&self) -> bool {
        self.min_curvature >= -CONVEX_TOL
    }

    /// Residual of the template that decided the class.
    pub fn residual(&self) -> f64 {
        match self.class {
            LimitClass::PlaneLike => self.plane_deviation.unwrap_or(f64::NAN),
            LimitClass::RoundLike => self.circle_residual.unwrap_or(f64::NAN),
            LimitClass::CylinderLike => self.cylinder_variation.unwrap_or(f64::NAN),
            LimitClass::ConvexNoncompact | LimitClass::Unclassified => -self.min_curvature,
        }
    }
}

fn classify(plane: Option<f64>, circle: Option<(f64, f64)>, cylinder: Option<f64>, kmin: f64) -> LimitClass {
    if plane.is_some_and(|d| d < PLANE_TOL) {
        LimitClass::PlaneLike
    } else if circle.is_some_and(|(res, r)| res < ROUND_TOL && r <= ROUND_MAX_RADIUS) {
        LimitClass::RoundLike
    } else if cylinder.is_some_and(|v| v < CYLINDER_TOL) {
        LimitClass::CylinderLike
    } else if kmin >= -CONVEX_TOL {
        LimitClass::ConvexNoncompact
    } else {
        LimitClass::Unclassified
    }
}

/// Points along the polyline spaced at most `step` apart.
fn densify(points: &[Vec2], closed: bool, step: f64) -> Vec<Vec2> {
    let n = points.len();
    let segs = if closed { n } else { n - 1 };
    let mut out = Vec::new();
    for i in 0..segs {
        let (a, b) = (points[i], points[(i + 1) % n]);
        let pieces = (((b - a).norm() / step).ceil() as usize).clamp(1, 4096);
        for j in 0..pieces {
            out.push(a + (b - a) * (j as f64 / pieces as f64));
        }
    }
    if !closed {
        out.push(points[n - 1]);
    }
    out
}

/// Assesses a rescaled plane curve in the unit window around `probe`.
pub fn assess_curve(curve: &PlaneCurve, probe: Vec2) -> FrameAssessment {
    let window: Vec<Vec2> = densify(curve.vertices(), true, 0.02)
        .into_iter()
        .filter(|p| (p - probe).norm() <= WINDOW_RADIUS)
        .collect();
    let plane = (window.len() >= 3)
        .then(|| least_squares_line(&window).ok().map(|l| l.max_deviation))
        .flatten();
    let circle = fit_circle(curve).ok().map(|f| (f.residual, f.radius));
    let kmin = curve
        .vertices()
        .iter()
        .zip(curvature_profile(curve))
        .filter(|(p, _)| (*p - probe).norm() <= WINDOW_RADIUS)
        .map(|(_, (k, _))| k)
        .fold(f64::INFINITY, f64::min);
    let kmin = if kmin.is_finite() { kmin } else { 0.0 };
    FrameAssessment {
        plane_deviation: plane,
        circle_residual: circle.map(|c| c.0),
        circle_radius: circle.map(|c| c.1),
        cylinder_variation: None,
        min_curvature: kmin,
        class: classify(plane, circle, None, kmin),
    }
}

/// Assesses a rescaled surface of revolution in the unit ball around the
/// surface point `probe = (x, r)` (taken at angle zero).
pub fn assess_profile(profile: &AxiProfile, probe: Vec2) -> Result<FrameAssessment> {
    let samples = profile.samples();
    let nearest = (0..samples.len())
        .min_by(|&a, &b| (samples[a] - probe).norm().total_cmp(&(samples[b] - probe).norm()))
        .unwrap();
    let curvature = mean_curvature_profile(profile)?;
    let normal = curvature[nearest].1;
    let q = samples[nearest];

    // Surface points (x, r cos φ, r sin φ) within the unit ball of (q.x, q.r, 0)
    // satisfy cos φ ≥ (Δx² + r² + q_r² - 1) / (2 r q_r). The deviation from the
    // tangent plane is affine in cos φ, so the extremes sit at the ends of
    // that range.
    let closed = profile.topology() == Topology::Periodic;
    let dense = densify(samples, closed, 0.02);
    let mut plane_dev: f64 = 0.0;
    let mut in_window = 0;
    for p in &dense {
        let dx = p.x - q.x;
        let lower = if p.y > 0.0 && q.y > 0.0 {
            (dx * dx + p.y * p.y + q.y * q.y - WINDOW_RADIUS * WINDOW_RADIUS) / (2.0 * p.y * q.y)
        } else {
            // on the axis every angle is the same point
            if dx * dx + (p.y - q.y).powi(2) <= 1.0 {
                -1.0
            } else {
                2.0
            }
        };
        if lower > 1.0 {
            continue;
        }
        in_window += 1;
        for cos_phi in [1.0, lower.max(-1.0)] {
            let d = dx * normal.x + (p.y * cos_phi - q.y) * normal.y;
            plane_dev = plane_dev.max(d.abs());
        }
    }
    let plane = (in_window >= 3).then_some(plane_dev);

    let circle = match profile.topology() {
        Topology::TwoPoles => {
            let n = samples.len();
            let mut lp = samples.to_vec();
            lp.extend(samples[1..n - 1].iter().rev().map(|p| Vec2::new(p.x, -p.y)));
            fit_circle_points(&lp).ok().map(|f| (f.residual, f.radius))
        }
        _ => None,
    };

    // Connected run of samples within the axial window around the probe.
    let mut lo = nearest;
    while lo > 0 && (samples[lo - 1].x - q.x).abs() <= CYLINDER_HALF_WINDOW {
        lo -= 1;
    }
    let mut hi = nearest;
    while hi + 1 < samples.len() && (samples[hi + 1].x - q.x).abs() <= CYLINDER_HALF_WINDOW {
        hi += 1;
    }
    let run = densify(&samples[lo..=hi], false, 0.02);
    let cylinder = (hi > lo).then(|| {
        let (rlo, rhi) = run
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), p| (a.min(p.y), b.max(p.y)));
        let mean = run.iter().map(|p| p.y).sum::<f64>() / run.len() as f64;
        (rhi - rlo) / mean
    });

    // Principal curvatures: meridian curvature and ν_r / r, both inward-positive.
    let mut kmin = f64::INFINITY;
    for (i, p) in samples.iter().enumerate() {
        if (p - q).norm() > WINDOW_RADIUS {
            continue;
        }
        let (h, n) = curvature[i];
        if p.y > 0.0 {
            let rotational = -n.y / p.y;
            kmin = kmin.min(rotational).min(h - rotational);
        } else {
            kmin = kmin.min(h / 2.0);
        }
    }
    let kmin = if kmin.is_finite() { kmin } else { 0.0 };
    Ok(FrameAssessment {
        plane_deviation: plane,
        circle_residual: circle.map(|c| c.0),
        circle_radius: circle.map(|c| c.1),
        cylinder_variation: cylinder,
        min_curvature: kmin,
        class: classify(plane, circle, cylinder, kmin),
    })
}

#[derive(Clone, Debug)]
pub struct BlowupReport {
    pub dial: Dial,
    pub frames: Vec<RescaleFrame>,
    pub assessments: Vec<FrameAssessment>,
    pub fit_residuals: Vec<f64>,
    /// Assigned only when the final three frames agree.
    pub limit_classification: LimitClass,
    /// Every one of the final three frames is convex in its window.
    pub late_frames_convex: bool,
}

#[derive(Serialize)]
struct ReportFrameJson {
    snapshot_index: usize,
    time: f64,
    scale: f64,
    probe_offset: [f64; 2],
    assessment: FrameAssessment,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    dial: Dial,
    classification: LimitClass,
    late_frames_convex: bool,
    fit_residuals: &'a [f64],
    frames: Vec<ReportFrameJson>,
}

impl BlowupReport {
    /// JSON tree referencing frames by snapshot index.
    pub fn to_json_value(&self) -> impl Serialize + '_ {
        ReportJson {
            dial: self.dial,
            classification: self.limit_classification,
            late_frames_convex: self.late_frames_convex,
            fit_residuals: &self.fit_residuals,
            frames: self
                .frames
                .iter()
                .zip(&self.assessments)
                .map(|(f, a)| ReportFrameJson {
                    snapshot_index: f.snapshot_index,
                    time: f.source_time,
                    scale: f.scale,
                    probe_offset: [f.probe_offset.x, f.probe_offset.y],
                    assessment: *a,
                })
                .collect(),
        }
    }
}

/// Dilates each probed snapshot about the probe by `dial(h)`, where `h` is
/// the curvature (plane curves) or mean curvature (surfaces) at the snapshot
/// point nearest the probe, and classifies the sequence.
pub fn curvature_normalized_frames<'a>(
    source: impl Into<Source<'a>>,
    probes: &[Probe],
    dial: Dial,
) -> Result<BlowupReport> {
    let source = source.into();
    let mut frames = Vec::new();
    let mut assessments = Vec::new();
    for probe in probes {
        if probe.snapshot >= source.len() {
            return Err(Error::invalid(format!(
                "probe snapshot {} out of range",
                probe.snapshot
            )));
        }
        let (frame, assessment) = match source {
            Source::Curves(t) => {
                let snap = &t.snapshots[probe.snapshot];
                let v = snap.curve.vertices();
                let i = nearest(v, probe.point);
                let h = curvature_profile(&snap.curve)[i].0;
                let scale = positive_scale(dial, h)?;
                let curve = snap.curve.dilate_about(v[i], scale)?;
                let a = assess_curve(&curve, Vec2::zeros());
                (
                    RescaleFrame {
                        snapshot_index: probe.snapshot,
                        source_time: snap.time,
                        center: v[i],
                        reference_time: snap.time,
                        scale,
                        rescaled_time: 0.0,
                        geometry: FrameGeometry::Curve(curve),
                        probe_offset: probe.point - v[i],
                    },
                    a,
                )
            }
            Source::Surfaces(t) => {
                let snap = &t.snapshots[probe.snapshot];
                let s = snap.profile.samples();
                let i = nearest(s, probe.point);
                let h = mean_curvature_profile(&snap.profile)?[i].0;
                let scale = positive_scale(dial, h)?;
                let profile = snap.profile.dilate_about(s[i].x, scale)?;
                let rescaled_probe = Vec2::new(0.0, s[i].y * scale);
                let a = assess_profile(&profile, rescaled_probe)?;
                (
                    RescaleFrame {
                        snapshot_index: probe.snapshot,
                        source_time: snap.time,
                        center: Vec2::new(s[i].x, 0.0),
                        reference_time: snap.time,
                        scale,
                        rescaled_time: 0.0,
                        geometry: FrameGeometry::Profile {
                            profile,
                            probe: rescaled_probe,
                        },
                        probe_offset: probe.point - s[i],
                    },
                    a,
                )
            }
        };
        frames.push(frame);
        assessments.push(assessment);
    }
    let tail = &assessments[assessments.len().saturating_sub(3)..];
    let limit_classification = if tail.len() == 3 && tail.iter().all(|a| a.class == tail[0].class) {
        tail[0].class
    } else {
        LimitClass::Unclassified
    };
    Ok(BlowupReport {
        dial,
        fit_residuals: assessments.iter().map(FrameAssessment::residual).collect(),
        late_frames_convex: tail.len() == 3 && tail.iter().all(FrameAssessment::convex),
        frames,
        assessments,
        limit_classification,
    })
}

fn positive_scale(dial: Dial, h: f64) -> Result<f64> {
    let s = dial.scale(h);
    if s > 0.0 && s.is_finite() {
        Ok(s)
    } else {
        Err(Error::Degenerate(format!("curvature {h} gives no usable dilation")))
    }
}

fn nearest(points: &[Vec2], target: Vec2) -> usize {
    (0..points.len())
        .min_by(|&a, &b| (points[a] - target).norm().total_cmp(&(points[b] - target).norm()))
        .unwrap()
}

/// Surface points at the neck of the last `count` snapshots: the natural
/// probes approaching a neck pinch.
pub fn neck_probes(traj: &AxiTrajectory, count: usize) -> Vec<Probe> {
    let n = traj.snapshots.len();
    (n.saturating_sub(count)..n)
        .map(|i| {
            let m = &traj.snapshots[i].metrics;
            Probe {
                snapshot: i,
                point: Vec2::new(m.min_radius_location, m.min_radius),
            }
        })
        .collect()
}
