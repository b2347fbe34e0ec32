//! Evolution of closed plane curves with normal speed `F(k) = sign(k)|k|^p`.
//!
//! `p = 1` is the curve-shortening flow, `p = 1/3` the affine normal flow.
//! Stepping is explicit Euler under a diffusive CFL bound; vertex quality is
//! maintained by periodic smooth resampling at uniform arclength rather than
//! by tangential velocity terms.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::curves::{
    self, curvature_profile, is_embedded, metrics, resample_smooth, CurveMetrics, PlaneCurve, MIN_VERTICES,
};
use crate::fit::least_squares_line;
use crate::{Error, Result, Vec2};

/// Curvatures below this magnitude move with speed exactly zero.
pub const ZERO_CURVATURE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedLaw {
    exponent: f64,
}

impl SpeedLaw {
    pub const CURVE_SHORTENING: SpeedLaw = SpeedLaw { exponent: 1.0 };

    pub fn new(exponent: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent <= 8.0) {
            return Err(Error::invalid(format!(
                "speed exponent must lie in (0, 8], got {exponent}"
            )));
        }
        Ok(SpeedLaw { exponent })
    }

    /// Speed equal to the cube root of the curvature.
    pub fn affine() -> Self {
        SpeedLaw { exponent: 1.0 / 3.0 }
    }

    /// Speed equal to the `r`th root of the curvature.
    pub fn root(r: f64) -> Result<Self> {
        SpeedLaw::new(1.0 / r)
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn is_curve_shortening(&self) -> bool {
        self.exponent == 1.0
    }

    pub fn speed(&self, k: f64) -> f64 {
        if k.abs() < ZERO_CURVATURE {
            0.0
        } else if self.is_curve_shortening() {
            k
        } else {
            k.signum() * k.abs().powf(self.exponent)
        }
    }

    /// Effective diffusion coefficient `dF/dk` used in the stability bound.
    /// For `p ≤ 1` this is `|k|^{p-1}`, for `p > 1` it is `p|k|^{p-1}`.
    fn diffusion(&self, k: f64) -> f64 {
        if self.is_curve_shortening() {
            return 1.0;
        }
        let k = k.abs();
        if k < ZERO_CURVATURE {
            return 0.0;
        }
        self.exponent.max(1.0) * k.powf(self.exponent - 1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    /// Fraction of the stability bound used for each step, in `(0, 1]`.
    pub cfl_factor: f64,
    /// Redistribute vertices every this many steps.
    pub resample_every: usize,
    /// Spacing aimed for when redistributing. The vertex count never grows
    /// during a run; it shrinks with the front down to `min_vertices`.
    pub target_vertex_spacing: f64,
    pub min_vertices: usize,
    /// Halt once the enclosed area falls below this fraction of the initial area.
    pub stop_area_fraction: f64,
    /// Halt once the maximum curvature exceeds this multiple of its initial value.
    pub max_curvature_stop: f64,
    pub max_steps: usize,
    /// A snapshot is recorded each time the tracked size falls by this factor,
    /// so frames are geometric in the remaining area.
    pub snapshot_ratio: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            cfl_factor: 0.5,
            resample_every: 200,
            target_vertex_spacing: 0.02,
            min_vertices: 64,
            stop_area_fraction: 0.02,
            max_curvature_stop: 1e4,
            max_steps: 20_000_000,
            snapshot_ratio: 0.98,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: &str| Err(Error::invalid(format!("{field} {why}")));
        if !(self.cfl_factor > 0.0 && self.cfl_factor <= 1.0) {
            return bad("cfl_factor", "must lie in (0, 1]");
        }
        if self.resample_every == 0 {
            return bad("resample_every", "must be positive");
        }
        if !(self.target_vertex_spacing > 0.0) {
            return bad("target_vertex_spacing", "must be positive");
        }
        if self.min_vertices < MIN_VERTICES {
            return bad("min_vertices", "must be at least 8");
        }
        if !(self.stop_area_fraction > 0.0 && self.stop_area_fraction < 1.0) {
            return bad("stop_area_fraction", "must lie in (0, 1)");
        }
        if !(self.max_curvature_stop > 0.0) {
            return bad("max_curvature_stop", "must be positive");
        }
        if self.max_steps == 0 {
            return bad("max_steps", "must be positive");
        }
        if !(self.snapshot_ratio > 0.0 && self.snapshot_ratio < 1.0) {
            return bad("snapshot_ratio", "must lie in (0, 1)");
        }
        Ok(())
    }

    pub(crate) fn resample_count(&self, length: f64, current: usize) -> usize {
        let floor = self.min_vertices.max(MIN_VERTICES);
        let want = (length / self.target_vertex_spacing).ceil() as usize;
        want.clamp(floor, current.max(floor))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    ExtinctionApproach,
    CurvatureBlowup,
    EmbeddednessLoss,
    Convexification,
    NeckPinch,
    TorusCollapse,
    PoleExtinction,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub time: f64,
    pub location: Option<[f64; 2]>,
}

impl Event {
    pub(crate) fn at(kind: EventKind, time: f64, location: Option<Vec2>) -> Self {
        Event {
            kind,
            time,
            location: location.map(|p| [p.x, p.y]),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub time: f64,
    pub curve: PlaneCurve,
    pub metrics: CurveMetrics,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub law: SpeedLaw,
    pub snapshots: Vec<Snapshot>,
    pub events: Vec<Event>,
    pub steps: usize,
}

impl Trajectory {
    pub fn first_event(&self, kind: EventKind) -> Option<&Event> {
        self.events.iter().find(|e| e.kind == kind)
    }

    pub fn initial(&self) -> &Snapshot {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().unwrap()
    }
}

/// Per-vertex velocity `F(k)` times the inward normal.
pub fn normal_velocity(curve: &PlaneCurve, law: SpeedLaw) -> Vec<Vec2> {
    curvature_profile(curve)
        .into_iter()
        .map(|(k, n)| n * law.speed(k))
        .collect()
}

fn stable_dt_from(curve: &PlaneCurve, profile: &[(f64, Vec2)], law: SpeedLaw) -> f64 {
    let h = curve.min_edge();
    let d = profile.iter().map(|(k, _)| law.diffusion(*k)).fold(0.0, f64::max);
    let d = if d > 0.0 { d } else { 1.0 };
    h * h / (2.0 * d)
}

/// Largest explicit step the stepper accepts: `h_min² / (2 D)`.
pub fn stable_timestep(curve: &PlaneCurve, law: SpeedLaw) -> f64 {
    stable_dt_from(curve, &curvature_profile(curve), law)
}

/// One explicit Euler step.
pub fn step(curve: &PlaneCurve, law: SpeedLaw, dt: f64) -> Result<PlaneCurve> {
    let profile = curvature_profile(curve);
    step_with(curve, &profile, law, dt)
}

fn step_with(curve: &PlaneCurve, profile: &[(f64, Vec2)], law: SpeedLaw, dt: f64) -> Result<PlaneCurve> {
    if !(dt >= 0.0) {
        return Err(Error::invalid(format!("timestep must be non-negative, got {dt}")));
    }
    let limit = stable_dt_from(curve, profile, law);
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::TimestepTooLarge { dt, limit });
    }
    let moved = curve
        .vertices()
        .iter()
        .zip(profile)
        .map(|(p, (k, n))| p + n * (law.speed(*k) * dt))
        .collect();
    PlaneCurve::new(moved)
}

struct Front {
    curve: PlaneCurve,
    initial_area: f64,
    initial_kmax: f64,
    trajectory: Trajectory,
    convexified: bool,
}

impl Front {
    fn record(&mut self, time: f64) -> bool {
        let m = metrics(&self.curve);
        if m.convex && !self.convexified {
            self.convexified = true;
            self.trajectory
                .events
                .push(Event::at(EventKind::Convexification, time, None));
        }
        let embedded = is_embedded(&self.curve);
        if !embedded {
            self.trajectory.events.push(Event::at(
                EventKind::EmbeddednessLoss,
                time,
                Some(self.curve.centroid()),
            ));
        }
        let snaps = &mut self.trajectory.snapshots;
        if snaps.last().is_none_or(|s| s.time < time) {
            snaps.push(Snapshot {
                time,
                curve: self.curve.clone(),
                metrics: m,
            });
        }
        embedded
    }
}

/// Evolves a single curve until it nearly vanishes, its curvature blows up,
/// or it stops being embedded.
pub fn run(curve: &PlaneCurve, law: SpeedLaw, config: &FlowConfig) -> Result<Trajectory> {
    Ok(co_evolve(std::slice::from_ref(curve), law, config)?.remove(0))
}

/// Evolves several curves with a shared timestep so their snapshots are
/// taken at identical times. Snapshots are triggered by the area of the first
/// curve; the run halts as soon as any curve meets a stopping condition.
pub fn co_evolve(curves: &[PlaneCurve], law: SpeedLaw, config: &FlowConfig) -> Result<Vec<Trajectory>> {
    config.validate()?;
    if curves.is_empty() {
        return Err(Error::invalid("nothing to evolve"));
    }
    let mut fronts: Vec<Front> = curves
        .iter()
        .map(|c| {
            let m = metrics(c);
            let kmax = m.max_curvature.abs().max(m.min_curvature.abs());
            Front {
                curve: c.clone(),
                initial_area: m.enclosed_area,
                initial_kmax: kmax,
                trajectory: Trajectory {
                    law,
                    snapshots: Vec::new(),
                    events: Vec::new(),
                    steps: 0,
                },
                convexified: false,
            }
        })
        .collect();
    if let Some(f) = fronts.iter().find(|f| !(f.initial_area > 0.0)) {
        return Err(Error::invalid(format!(
            "curve encloses non-positive area {}",
            f.initial_area
        )));
    }

    let mut time = 0.0;
    let mut halted = false;
    for f in &mut fronts {
        halted |= !f.record(time);
    }
    let mut last_snapshot_area = fronts[0].initial_area;
    let mut steps = 0;

    while !halted && steps < config.max_steps {
        let profiles: Vec<Vec<(f64, Vec2)>> = fronts.iter().map(|f| curvature_profile(&f.curve)).collect();

        for (f, prof) in fronts.iter_mut().zip(&profiles) {
            let (imax, kmax) = prof
                .iter()
                .enumerate()
                .map(|(i, (k, _))| (i, k.abs()))
                .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
            if kmax > config.max_curvature_stop * f.initial_kmax {
                let loc = f.curve.vertices()[imax];
                f.trajectory
                    .events
                    .push(Event::at(EventKind::CurvatureBlowup, time, Some(loc)));
                halted = true;
            }
        }
        if halted {
            break;
        }

        let dt = config.cfl_factor
            * fronts
                .iter()
                .zip(&profiles)
                .map(|(f, p)| stable_dt_from(&f.curve, p, law))
                .fold(f64::INFINITY, f64::min);

        for (f, prof) in fronts.iter_mut().zip(&profiles) {
            match step_with(&f.curve, prof, law, dt) {
                Ok(c) => f.curve = c,
                Err(Error::Extinct) => {
                    let loc = f.curve.centroid();
                    f.trajectory
                        .events
                        .push(Event::at(EventKind::ExtinctionApproach, time + dt, Some(loc)));
                    halted = true;
                }
                Err(e) => return Err(e),
            }
        }
        if halted {
            break;
        }
        time += dt;
        steps += 1;

        let mut check_embedding = false;
        if steps % config.resample_every == 0 {
            for f in &mut fronts {
                let n = config.resample_count(f.curve.length(), f.curve.len());
                f.curve = resample_smooth(&f.curve, n)?;
            }
            check_embedding = true;
        }

        let area = fronts[0].curve.signed_area();
        let stopping: Vec<bool> = fronts
            .iter()
            .map(|f| f.curve.signed_area() < config.stop_area_fraction * f.initial_area)
            .collect();
        if area <= config.snapshot_ratio * last_snapshot_area || stopping.iter().any(|&s| s) {
            last_snapshot_area = area;
            for f in &mut fronts {
                halted |= !f.record(time);
            }
        } else if check_embedding {
            for f in &mut fronts {
                if !is_embedded(&f.curve) {
                    f.record(time);
                    halted = true;
                }
            }
        }
        for (f, stop) in fronts.iter_mut().zip(stopping) {
            if stop {
                let loc = f.curve.centroid();
                f.trajectory
                    .events
                    .push(Event::at(EventKind::ExtinctionApproach, time, Some(loc)));
                halted = true;
            }
        }
    }
    for f in &mut fronts {
        f.record(time);
        f.trajectory.steps = steps;
    }
    Ok(fronts.into_iter().map(|f| f.trajectory).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaLaw {
    /// Least-squares slope of enclosed area against time.
    pub slope: f64,
    pub intercept: f64,
    /// `A(0) / 2π`, the lifespan of an embedded curve.
    pub extinction_estimate: f64,
    /// Time at which the fitted line reaches zero area.
    pub extrapolated_extinction: f64,
}

pub fn analyze_area_law(traj: &Trajectory) -> Result<AreaLaw> {
    if traj.snapshots.len() < 10 {
        return Err(Error::invalid(format!(
            "area law fit needs at least 10 snapshots, got {}",
            traj.snapshots.len()
        )));
    }
    let pts: Vec<(f64, f64)> = traj
        .snapshots
        .iter()
        .map(|s| (s.time, s.metrics.enclosed_area))
        .collect();
    let (slope, intercept) = linear_fit(&pts);
    Ok(AreaLaw {
        slope,
        intercept,
        extinction_estimate: traj.initial().metrics.enclosed_area / TAU,
        extrapolated_extinction: -intercept / slope,
    })
}

/// Ordinary least-squares `y = slope * x + intercept`.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Time of the first snapshot at which every curvature is non-negative up
/// to the convexity tolerance.
pub fn convexification_time(traj: &Trajectory) -> Option<f64> {
    traj.snapshots.iter().find(|s| s.metrics.convex).map(|s| s.time)
}

/// Length after dilating each snapshot to the initial enclosed area:
/// `L(t) * sqrt(A(0) / A(t))`.
pub fn rescaled_length_series(traj: &Trajectory) -> Vec<(f64, f64)> {
    let a0 = traj.initial().metrics.enclosed_area;
    traj.snapshots
        .iter()
        .map(|s| (s.time, s.metrics.length * (a0 / s.metrics.enclosed_area).sqrt()))
        .collect()
}

/// Length of a circle enclosing area `a`: `2 sqrt(π a)`.
pub fn circle_length_for_area(a: f64) -> f64 {
    2.0 * (PI * a).sqrt()
}

/// Largest deviation of the vertices within distance `window` of `center`
/// from their least-squares line.
pub fn local_straightness(curve: &PlaneCurve, center: Vec2, window: f64) -> Option<f64> {
    let pts: Vec<Vec2> = curve
        .vertices()
        .iter()
        .copied()
        .filter(|p| (p - center).norm() <= window)
        .collect();
    least_squares_line(&pts).ok().map(|l| l.max_deviation)
}

/// Instantaneous rate of change of the enclosed area under the discrete flow:
/// each vertex sweeps half of its two adjacent edges.
pub fn area_rate(curve: &PlaneCurve, law: SpeedLaw) -> f64 {
    let v = curve.vertices();
    let n = v.len();
    curves::curvature_profile(curve)
        .iter()
        .enumerate()
        .map(|(i, (k, _))| -law.speed(*k) * 0.5 * (v[(i + 1) % n] - v[(i + n - 1) % n]).norm())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{power_circle_radius, shrinker_radius, Shrinker, ShrinkerKind};
    use crate::shapes;
    use approx::assert_relative_eq;

    fn mean_radius(c: &PlaneCurve) -> f64 {
        let ctr = c.centroid();
        c.vertices().iter().map(|v| (v - ctr).norm()).sum::<f64>() / c.len() as f64
    }

    #[test]
    fn speed_law_bounds() {
        assert!(SpeedLaw::new(0.0).is_err());
        assert!(SpeedLaw::new(-1.0).is_err());
        assert!(SpeedLaw::new(8.5).is_err());
        assert!(SpeedLaw::new(8.0).is_ok());
        assert_eq!(SpeedLaw::affine().speed(1e-13), 0.0);
        assert_relative_eq!(SpeedLaw::affine().speed(-8.0), -2.0, epsilon = 1e-12);
    }

    #[test]
    fn unit_circle_velocity_is_inward_unit() {
        let c = shapes::circle(1.0, 256).unwrap();
        for (p, v) in c.vertices().iter().zip(normal_velocity(&c, SpeedLaw::CURVE_SHORTENING)) {
            assert_relative_eq!(v.norm(), 1.0, epsilon = 1e-9);
            assert_relative_eq!(v.dot(p), -1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn affine_velocity_on_radius_four() {
        let c = shapes::circle(4.0, 256).unwrap();
        let expected = 0.25f64.powf(1.0 / 3.0);
        for v in normal_velocity(&c, SpeedLaw::affine()) {
            assert_relative_eq!(v.norm(), expected, max_relative = 1e-9);
        }
        assert!((expected - 0.63).abs() < 0.001);
    }

    #[test]
    fn straight_vertex_does_not_move() {
        let sq = shapes::square(1.0, 64).unwrap();
        for p in [1.0, 1.0 / 3.0, 2.0] {
            let v = normal_velocity(&sq, SpeedLaw::new(p).unwrap());
            assert!(v[2].norm() < 1e-12);
        }
    }

    #[test]
    fn single_step_follows_circle_law() {
        let c = shapes::circle(1.0, 256).unwrap();
        let next = step(&c, SpeedLaw::CURVE_SHORTENING, 1e-4).unwrap();
        let expected = (1.0f64 - 2e-4).sqrt();
        assert!((mean_radius(&next) - expected).abs() / expected < 1e-6);
    }

    #[test]
    fn zero_step_is_identity() {
        let c = shapes::circle(1.0, 256).unwrap();
        assert_eq!(step(&c, SpeedLaw::CURVE_SHORTENING, 0.0).unwrap(), c);
    }

    #[test]
    fn oversized_step_is_refused() {
        let c = shapes::circle(1.0, 512).unwrap();
        let limit = stable_timestep(&c, SpeedLaw::CURVE_SHORTENING);
        assert!(matches!(
            step(&c, SpeedLaw::CURVE_SHORTENING, 2.0 * limit),
            Err(Error::TimestepTooLarge { .. })
        ));
    }

    #[test]
    fn affine_circle_radius_at_t_0_3() {
        let law = SpeedLaw::affine();
        let mut c = shapes::circle(1.0, 256).unwrap();
        let mut t = 0.0;
        let end = 0.3;
        while t < end {
            let dt = (0.5 * stable_timestep(&c, law)).min(end - t);
            c = step(&c, law, dt).unwrap();
            t += dt;
        }
        let expected = power_circle_radius(1.0, 1.0 / 3.0, 0.3).unwrap();
        assert_relative_eq!(expected, 0.681_731, epsilon = 1e-6);
        assert!((mean_radius(&c) - expected).abs() / expected < 1e-3);
    }

    #[test]
    fn circle_run_tracks_radius_law_and_area_slope() {
        let c = shapes::circle(1.0, 256).unwrap();
        let cfg = FlowConfig {
            min_vertices: 256,
            ..FlowConfig::default()
        };
        let traj = run(&c, SpeedLaw::CURVE_SHORTENING, &cfg).unwrap();
        let shrinker = Shrinker::new(ShrinkerKind::Circle, 1.0).unwrap();
        for s in traj.snapshots.iter().filter(|s| s.time < 0.45) {
            let exact = shrinker_radius(shrinker, s.time).unwrap();
            assert!((mean_radius(&s.curve) - exact).abs() / exact < 1e-3);
        }
        assert!(traj.first_event(EventKind::ExtinctionApproach).is_some());
        let law = analyze_area_law(&traj).unwrap();
        assert!((law.slope / -TAU - 1.0).abs() < 5e-3);
        assert!((traj.last().time - 0.49).abs() < 5e-3);
        for s in &traj.snapshots {
            assert!((s.metrics.enclosed_area - (PI - TAU * s.time)).abs() < 5e-3 * PI);
        }
    }

    #[test]
    fn snapshots_strictly_ordered_and_monotone() {
        let traj = run(
            &shapes::ellipse(2.0, 1.0, 200).unwrap(),
            SpeedLaw::CURVE_SHORTENING,
            &FlowConfig {
                target_vertex_spacing: 0.03,
                ..FlowConfig::default()
            },
        )
        .unwrap();
        for w in traj.snapshots.windows(2) {
            assert!(w[1].time > w[0].time);
            assert!(w[1].metrics.enclosed_area < w[0].metrics.enclosed_area);
            assert!(w[1].metrics.length < w[0].metrics.length);
        }
    }

    #[test]
    fn convexification_of_a_peanut() {
        let p = shapes::peanut(0.5, 400).unwrap();
        let traj = run(&p, SpeedLaw::CURVE_SHORTENING, &FlowConfig::default()).unwrap();
        let t = convexification_time(&traj).expect("peanut should convexify");
        let law = analyze_area_law(&traj).unwrap();
        assert!(t > 0.0 && t < law.extinction_estimate);
        assert!(traj.first_event(EventKind::EmbeddednessLoss).is_none());
    }

    #[test]
    fn convex_input_is_convex_at_time_zero() {
        let traj = run(
            &shapes::ellipse(2.0, 1.0, 128).unwrap(),
            SpeedLaw::CURVE_SHORTENING,
            &FlowConfig {
                max_steps: 10,
                ..FlowConfig::default()
            },
        )
        .unwrap();
        assert_eq!(convexification_time(&traj), Some(0.0));
    }

    #[test]
    fn area_law_needs_ten_snapshots() {
        let traj = run(
            &shapes::circle(1.0, 64).unwrap(),
            SpeedLaw::CURVE_SHORTENING,
            &FlowConfig {
                max_steps: 5,
                ..FlowConfig::default()
            },
        )
        .unwrap();
        assert!(matches!(analyze_area_law(&traj), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn circle_rescaled_length_is_constant() {
        for p in [1.0, 1.0 / 3.0, 0.2] {
            let traj = run(
                &shapes::circle(1.0, 128).unwrap(),
                SpeedLaw::new(p).unwrap(),
                &FlowConfig {
                    min_vertices: 128,
                    stop_area_fraction: 0.3,
                    ..FlowConfig::default()
                },
            )
            .unwrap();
            let l0 = circle_length_for_area(PI);
            for (_, l) in rescaled_length_series(&traj) {
                assert!((l / l0 - 1.0).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn discrete_area_rate_is_close_to_minus_two_pi() {
        let e = shapes::ellipse(2.0, 1.0, 512).unwrap();
        let rate = area_rate(&e, SpeedLaw::CURVE_SHORTENING);
        assert!((rate / -TAU - 1.0).abs() < 1e-3, "{rate}");
    }

    #[test]
    fn config_validation() {
        let bad = FlowConfig {
            stop_area_fraction: 1.0,
            ..FlowConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = FlowConfig {
            cfl_factor: 1.5,
            ..FlowConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(FlowConfig::default().validate().is_ok());
    }
}
