//! Mean curvature flow of surfaces of revolution, evolved through their
//! meridian profile in the `(x, r)` half-plane.
//!
//! At a meridian sample with discrete curvature vector `K` (circumscribed
//! circle through the sample and its neighbours) and chord normal `ν`, the
//! mean curvature vector of the surface is `K - (ν_r / r) ν`. The second
//! term is the curvature of the parallel circle projected on the normal and
//! does not depend on the sign chosen for `ν`. Poles are handled by a ghost
//! sample reflected across the axis, where both principal curvatures agree
//! and the mean curvature vector is `2K`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::curves::{menger, PlaneCurve};
use crate::flow::{Event, EventKind, FlowConfig};
use crate::spline::PeriodicSpline;
use crate::{Error, Result, Vec2};

/// Fewest samples a profile may have.
pub const MIN_SAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Topology {
    /// A sphere-like surface: the first and last samples sit on the axis.
    TwoPoles,
    /// A torus: the profile is a closed loop off the axis.
    Periodic,
    /// An infinite tube repeating with the given axial period; the sample
    /// after the last is the first shifted by `period` along the axis.
    Tube { period: f64 },
}

impl Topology {
    pub fn name(&self) -> &'static str {
        match self {
            Topology::TwoPoles => "twopoles",
            Topology::Periodic => "periodic",
            Topology::Tube { .. } => "tube",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiProfile {
    samples: Vec<Vec2>,
    topology: Topology,
}

impl AxiProfile {
    pub fn new(samples: Vec<Vec2>, topology: Topology) -> Result<Self> {
        let n = samples.len();
        if n < MIN_SAMPLES {
            return Err(Error::invalid(format!(
                "profile needs at least {MIN_SAMPLES} samples, got {n}"
            )));
        }
        if samples.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::invalid("profile samples must be finite"));
        }
        match topology {
            Topology::TwoPoles => {
                if samples[0].y != 0.0 || samples[n - 1].y != 0.0 {
                    return Err(Error::invalid("two-pole profile must start and end on the axis"));
                }
                if samples[1..n - 1].iter().any(|p| !(p.y > 0.0)) {
                    return Err(Error::invalid(
                        "two-pole profile must stay off the axis between its poles",
                    ));
                }
            }
            Topology::Periodic => {
                if samples.iter().any(|p| !(p.y > 0.0)) {
                    return Err(Error::invalid("periodic profile must stay off the axis"));
                }
            }
            Topology::Tube { period } => {
                if !(period > 0.0) {
                    return Err(Error::invalid("tube period must be positive"));
                }
                if samples.iter().any(|p| !(p.y > 0.0)) {
                    return Err(Error::invalid("tube profile must stay off the axis"));
                }
                if samples.windows(2).any(|w| !(w[1].x > w[0].x)) || !(samples[n - 1].x < samples[0].x + period) {
                    return Err(Error::invalid("tube samples must increase in x within one period"));
                }
            }
        }
        let p = AxiProfile { samples, topology };
        if p.segments().any(|(a, b)| (b - a).norm() == 0.0) {
            return Err(Error::invalid("consecutive profile samples coincide"));
        }
        if !p.is_simple() {
            return Err(Error::invalid("profile crosses itself"));
        }
        Ok(p)
    }

    pub fn samples(&self) -> &[Vec2] {
        &self.samples
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn is_pole(&self, i: usize) -> bool {
        self.topology == Topology::TwoPoles && (i == 0 || i + 1 == self.len())
    }

    /// Closed plane loop used for simplicity checks and orientation: the
    /// profile mirrored across the axis for two-pole profiles, the profile
    /// itself for periodic ones.
    fn closed_loop(&self) -> Option<Vec<Vec2>> {
        match self.topology {
            Topology::TwoPoles => {
                let n = self.len();
                let mut v = self.samples.clone();
                v.extend(self.samples[1..n - 1].iter().rev().map(|p| Vec2::new(p.x, -p.y)));
                Some(v)
            }
            Topology::Periodic => Some(self.samples.clone()),
            Topology::Tube { .. } => None,
        }
    }

    fn is_simple(&self) -> bool {
        match self.closed_loop() {
            Some(v) => PlaneCurve::new(v).is_ok_and(|c| crate::curves::is_embedded(&c)),
            None => true,
        }
    }

    /// `+1` when the inward normal is the left normal of the direction of
    /// travel along the samples, `-1` otherwise.
    fn inward_sign(&self) -> f64 {
        match self.topology {
            Topology::Tube { .. } => -1.0,
            Topology::TwoPoles => {
                // loop along the profile and back along the axis
                let n = self.len();
                let a: f64 = (0..n - 1)
                    .map(|i| crate::cross(&self.samples[i], &self.samples[i + 1]))
                    .sum::<f64>()
                    + crate::cross(&self.samples[n - 1], &self.samples[0]);
                a.signum()
            }
            Topology::Periodic => {
                let n = self.len();
                (0..n)
                    .map(|i| crate::cross(&self.samples[i], &self.samples[(i + 1) % n]))
                    .sum::<f64>()
                    .signum()
            }
        }
    }

    /// Neighbours of sample `i`, with ghost reflections at poles and axial
    /// shifts across the tube period.
    fn neighbours(&self, i: usize) -> (Vec2, Vec2) {
        let n = self.len();
        let s = &self.samples;
        let mirror = |p: Vec2| Vec2::new(p.x, -p.y);
        match self.topology {
            Topology::TwoPoles => {
                if i == 0 {
                    (mirror(s[1]), s[1])
                } else if i == n - 1 {
                    (s[n - 2], mirror(s[n - 2]))
                } else {
                    (s[i - 1], s[i + 1])
                }
            }
            Topology::Periodic => (s[(i + n - 1) % n], s[(i + 1) % n]),
            Topology::Tube { period } => {
                let shift = Vec2::new(period, 0.0);
                let prev = if i == 0 { s[n - 1] - shift } else { s[i - 1] };
                let next = if i == n - 1 { s[0] + shift } else { s[i + 1] };
                (prev, next)
            }
        }
    }

    /// Consecutive sample pairs, including the closing segment of periodic
    /// and tube profiles.
    pub fn segments(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.len();
        let closing = match self.topology {
            Topology::TwoPoles => None,
            Topology::Periodic => Some((self.samples[n - 1], self.samples[0])),
            Topology::Tube { period } => Some((self.samples[n - 1], self.samples[0] + Vec2::new(period, 0.0))),
        };
        self.samples.windows(2).map(|w| (w[0], w[1])).chain(closing)
    }

    pub fn meridian_length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn min_spacing(&self) -> f64 {
        self.segments()
            .map(|(a, b)| (b - a).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Dilation about the axis point `(center_x, 0)`: `(x, r) → scale·(x - center_x, r)`.
    pub fn dilate_about(&self, center_x: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::invalid(format!("dilation factor must be positive, got {scale}")));
        }
        let topology = match self.topology {
            Topology::Tube { period } => Topology::Tube { period: period * scale },
            t => t,
        };
        Ok(AxiProfile {
            samples: self
                .samples
                .iter()
                .map(|p| Vec2::new((p.x - center_x) * scale, p.y * scale))
                .collect(),
            topology,
        })
    }

    /// Mirror image across the axis, for drawing full cross-sections.
    pub fn mirrored(&self) -> Vec<Vec2> {
        self.samples.iter().map(|p| Vec2::new(p.x, -p.y)).collect()
    }
}

/// Mean curvature vector at `p` given its meridian neighbours. `p` must be
/// off the axis.
pub(crate) fn mean_curvature_vector(prev: &Vec2, p: &Vec2, next: &Vec2) -> Vec2 {
    let (k, normal) = menger(prev, p, next);
    normal * k - normal * (normal.y / p.y)
}

fn curvature_vectors(profile: &AxiProfile) -> Vec<(Vec2, Vec2)> {
    let sign = profile.inward_sign();
    (0..profile.len())
        .map(|i| {
            let (prev, next) = profile.neighbours(i);
            let p = &profile.samples[i];
            let (k, normal) = menger(&prev, p, &next);
            let velocity = if profile.is_pole(i) {
                normal * (2.0 * k)
            } else {
                mean_curvature_vector(&prev, p, &next)
            };
            (velocity, normal * sign)
        })
        .collect()
}

/// Scalar mean curvature `h` and inward meridian normal at every sample,
/// positive where the mean curvature vector points inward. Pole samples use
/// the reflected-ghost value `2k`.
pub fn mean_curvature_profile(profile: &AxiProfile) -> Result<Vec<(f64, Vec2)>> {
    if let Some(i) = (0..profile.len()).find(|&i| !profile.is_pole(i) && !(profile.samples[i].y > 0.0)) {
        return Err(Error::Degenerate(format!("sample {i} lies on the axis")));
    }
    Ok(curvature_vectors(profile)
        .into_iter()
        .map(|(v, n)| (v.dot(&n), n))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AxiMetrics {
    pub surface_area: f64,
    pub enclosed_volume: f64,
    /// Radius of the thinnest waist. For a two-pole profile without an
    /// interior local minimum of the radius this is the largest radius.
    pub min_radius: f64,
    pub min_radius_location: f64,
    pub min_mean_curvature: f64,
    pub max_mean_curvature: f64,
    pub mean_convex: bool,
    /// Largest distance from a sample to the mean of all samples.
    pub extent: f64,
}

/// `h ≥ -MEAN_CONVEX_TOL · max|h|` counts as mean convex.
pub const MEAN_CONVEX_TOL: f64 = 1e-3;

pub fn surface_area(profile: &AxiProfile) -> f64 {
    profile.segments().map(|(a, b)| PI * (a.y + b.y) * (b - a).norm()).sum()
}

pub fn enclosed_volume(profile: &AxiProfile) -> f64 {
    profile
        .segments()
        .map(|(a, b)| PI / 3.0 * (a.y * a.y + a.y * b.y + b.y * b.y) * (b.x - a.x))
        .sum::<f64>()
        .abs()
}

/// Thinnest interior local minimum of the radius as `(x, r)`. Near-ties
/// resolve to the sample closest to the axial middle of the profile.
fn waist(profile: &AxiProfile) -> Option<Vec2> {
    let s = &profile.samples;
    let n = s.len();
    let candidates: Vec<Vec2> = match profile.topology {
        Topology::TwoPoles => (1..n - 1)
            .filter(|&i| s[i].y <= s[i - 1].y && s[i].y <= s[i + 1].y)
            .map(|i| s[i])
            .collect(),
        _ => s.clone(),
    };
    let rmin = candidates.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    if !rmin.is_finite() {
        return None;
    }
    let (lo, hi) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.x), hi.max(p.x))
    });
    let mid = 0.5 * (lo + hi);
    candidates
        .into_iter()
        .filter(|p| p.y <= rmin * (1.0 + 1e-9))
        .min_by(|a, b| (a.x - mid).abs().total_cmp(&(b.x - mid).abs()))
}

fn narrowest(profile: &AxiProfile) -> Vec2 {
    waist(profile).unwrap_or_else(|| *profile.samples.iter().max_by(|a, b| a.y.total_cmp(&b.y)).unwrap())
}

fn extent(profile: &AxiProfile) -> f64 {
    let c = profile.samples.iter().sum::<Vec2>() / profile.len() as f64;
    profile.samples.iter().map(|p| (p - c).norm()).fold(0.0, f64::max)
}

pub fn axi_metrics(profile: &AxiProfile) -> Result<AxiMetrics> {
    let h: Vec<f64> = mean_curvature_profile(profile)?.into_iter().map(|(h, _)| h).collect();
    let hmin = h.iter().copied().fold(f64::INFINITY, f64::min);
    let hmax = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = hmin.abs().max(hmax.abs());
    let neck = narrowest(profile);
    Ok(AxiMetrics {
        surface_area: surface_area(profile),
        enclosed_volume: enclosed_volume(profile),
        min_radius: neck.y,
        min_radius_location: neck.x,
        min_mean_curvature: hmin,
        max_mean_curvature: hmax,
        mean_convex: hmin >= -MEAN_CONVEX_TOL * scale,
        extent: extent(profile),
    })
}

/// Largest step accepted by [`step_axi`]: `min(h², h·r_min, r_min²) / 4` with
/// `h` the smallest sample spacing and `r_min` the smallest off-axis radius.
/// The last term keeps a sample from crossing the axis once `r_min < h`.
pub fn stable_axi_timestep(profile: &AxiProfile) -> f64 {
    let h = profile.min_spacing();
    let rmin = (0..profile.len())
        .filter(|&i| !profile.is_pole(i))
        .map(|i| profile.samples[i].y)
        .fold(f64::INFINITY, f64::min);
    (h * h).min(h * rmin).min(rmin * rmin) / 4.0
}

pub fn step_axi(profile: &AxiProfile, dt: f64) -> Result<AxiProfile> {
    let limit = stable_axi_timestep(profile);
    if !(dt >= 0.0) {
        return Err(Error::invalid(format!("timestep must be non-negative, got {dt}")));
    }
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::TimestepTooLarge { dt, limit });
    }
    advance(profile, &curvature_vectors(profile), dt)
}

fn advance(profile: &AxiProfile, field: &[(Vec2, Vec2)], dt: f64) -> Result<AxiProfile> {
    let mut samples: Vec<Vec2> = profile
        .samples
        .iter()
        .zip(field)
        .map(|(p, (v, _))| p + v * dt)
        .collect();
    if profile.topology == Topology::TwoPoles {
        let n = samples.len();
        samples[0].y = 0.0;
        samples[n - 1].y = 0.0;
    }
    if let Some(i) = (0..samples.len()).find(|&i| !profile.is_pole(i) && !(samples[i].y > 0.0)) {
        return Err(Error::NumericalBreakdown {
            time: f64::NAN,
            reason: format!("sample {i} reached the axis"),
        });
    }
    Ok(AxiProfile {
        samples,
        topology: profile.topology,
    })
}

/// Redistributes the samples at equal meridian arclength. Two-pole profiles
/// are splined through their mirror image so the poles stay on the axis and
/// the meridian stays perpendicular to it.
pub fn resample_profile(profile: &AxiProfile, count: usize) -> Result<AxiProfile> {
    if count < MIN_SAMPLES {
        return Err(Error::invalid(format!(
            "need at least {MIN_SAMPLES} samples, got {count}"
        )));
    }
    let samples = match profile.topology {
        Topology::TwoPoles => {
            let lp = profile.closed_loop().unwrap();
            let mut pts = PeriodicSpline::through(&lp).equal_arclength(2 * count - 2);
            pts.truncate(count);
            pts[0] = profile.samples[0];
            pts[count - 1].y = 0.0;
            for p in &mut pts[1..count - 1] {
                p.y = p.y.abs();
            }
            pts
        }
        Topology::Periodic => PeriodicSpline::through(&profile.samples).equal_arclength(count),
        Topology::Tube { .. } => {
            let segs: Vec<(Vec2, Vec2)> = profile.segments().collect();
            let total: f64 = segs.iter().map(|(a, b)| (b - a).norm()).sum();
            let mut out = Vec::with_capacity(count);
            let (mut seg, mut start) = (0, 0.0);
            for k in 0..count {
                let s = total * k as f64 / count as f64;
                while seg + 1 < segs.len() && start + (segs[seg].1 - segs[seg].0).norm() <= s {
                    start += (segs[seg].1 - segs[seg].0).norm();
                    seg += 1;
                }
                let (a, b) = segs[seg];
                out.push(a + (b - a) * ((s - start) / (b - a).norm()));
            }
            out
        }
    };
    AxiProfile::new(samples, profile.topology)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AxiShape {
    Sphere {
        radius: f64,
    },
    /// Two spheres of radius `lobe_radius` joined by a straight tube of
    /// radius `tube_radius` and length `tube_length`, with concave fillets.
    Dumbbell {
        lobe_radius: f64,
        tube_radius: f64,
        tube_length: f64,
    },
    Torus {
        ring_radius: f64,
        tube_radius: f64,
    },
    /// Round cylinder repeating with axial period `period`.
    Cylinder {
        radius: f64,
        period: f64,
    },
}

/// Fillet radius as a multiple of the lobe radius. Above 1 the junction
/// between fillet and lobe is mean convex.
pub const FILLET_RATIO: f64 = 1.5;

pub fn build_profile(shape: AxiShape, n: usize) -> Result<AxiProfile> {
    if n < MIN_SAMPLES {
        return Err(Error::invalid(format!("need at least {MIN_SAMPLES} samples, got {n}")));
    }
    let positive = |v: f64, what: &str| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid(format!("{what} must be positive, got {v}")))
        }
    };
    match shape {
        AxiShape::Sphere { radius } => {
            positive(radius, "sphere radius")?;
            let samples = (0..n)
                .map(|i| {
                    let th = PI * (1.0 - i as f64 / (n - 1) as f64);
                    if i == 0 {
                        Vec2::new(-radius, 0.0)
                    } else if i == n - 1 {
                        Vec2::new(radius, 0.0)
                    } else {
                        Vec2::new(radius * th.cos(), radius * th.sin())
                    }
                })
                .collect();
            AxiProfile::new(samples, Topology::TwoPoles)
        }
        AxiShape::Torus {
            ring_radius,
            tube_radius,
        } => {
            positive(ring_radius, "ring radius")?;
            positive(tube_radius, "tube radius")?;
            if tube_radius >= ring_radius {
                return Err(Error::invalid("torus tube radius must be below its ring radius"));
            }
            let samples = (0..n)
                .map(|i| {
                    let th = TAU * i as f64 / n as f64;
                    Vec2::new(tube_radius * th.cos(), ring_radius + tube_radius * th.sin())
                })
                .collect();
            AxiProfile::new(samples, Topology::Periodic)
        }
        AxiShape::Cylinder { radius, period } => {
            positive(radius, "cylinder radius")?;
            positive(period, "cylinder period")?;
            let samples = (0..n)
                .map(|i| Vec2::new(period * i as f64 / n as f64, radius))
                .collect();
            AxiProfile::new(samples, Topology::Tube { period })
        }
        AxiShape::Dumbbell {
            lobe_radius,
            tube_radius,
            tube_length,
        } => {
            positive(lobe_radius, "lobe radius")?;
            positive(tube_radius, "tube radius")?;
            positive(tube_length, "tube length")?;
            if tube_radius >= lobe_radius {
                return Err(Error::invalid("dumbbell tube radius must be below its lobe radius"));
            }
            dumbbell(lobe_radius, tube_radius, tube_length, n)
        }
    }
}

fn dumbbell(lobe: f64, tube: f64, tube_length: f64, n: usize) -> Result<AxiProfile> {
    let rho = FILLET_RATIO * lobe;
    let tube_end = tube_length / 2.0;
    let fillet_center = Vec2::new(tube_end, tube + rho);
    let lobe_x = tube_end + ((lobe + rho).powi(2) - (tube + rho).powi(2)).sqrt();
    let lobe_center = Vec2::new(lobe_x, 0.0);
    let (sin_j, cos_j) = ((lobe_x - tube_end) / (lobe + rho), (tube + rho) / (lobe + rho));
    let fillet_angle = sin_j.atan2(cos_j);
    let lobe_angle = FRAC_PI_2 + fillet_angle;

    let lengths = [tube_end, rho * fillet_angle, lobe * lobe_angle];
    let half_length: f64 = lengths.iter().sum();
    let point = |s: f64| -> Vec2 {
        if s <= lengths[0] {
            return Vec2::new(s, tube);
        }
        let s = s - lengths[0];
        if s <= lengths[1] {
            let a = s / rho;
            return fillet_center + Vec2::new(a.sin(), -a.cos()) * rho;
        }
        let b = lobe_angle - (s - lengths[1]) / lobe;
        lobe_center + Vec2::new(b.cos(), b.sin()) * lobe
    };
    let half = n.div_ceil(2).max(4);
    let right: Vec<Vec2> = (0..=half)
        .map(|i| {
            if i == half {
                Vec2::new(lobe_x + lobe, 0.0)
            } else {
                point(half_length * i as f64 / half as f64)
            }
        })
        .collect();
    let mut samples: Vec<Vec2> = right[1..].iter().rev().map(|p| Vec2::new(-p.x, p.y)).collect();
    samples.extend(right);
    AxiProfile::new(samples, Topology::TwoPoles)
}

#[derive(Clone, Debug)]
pub struct AxiSnapshot {
    pub time: f64,
    pub profile: AxiProfile,
    pub metrics: AxiMetrics,
}

#[derive(Clone, Debug)]
pub struct AxiTrajectory {
    pub snapshots: Vec<AxiSnapshot>,
    pub events: Vec<Event>,
    pub steps: usize,
    /// Radius (or, for tori, extent) below which a collapse event fires.
    pub collapse_threshold: f64,
}

impl AxiTrajectory {
    pub fn first_event(&self, kind: EventKind) -> Option<&Event> {
        self.events.iter().find(|e| e.kind == kind)
    }

    pub fn initial(&self) -> &AxiSnapshot {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &AxiSnapshot {
        self.snapshots.last().unwrap()
    }
}

/// Evolves a profile by mean curvature flow until a neck pinches, a torus
/// collapses onto its core circle, a sphere-like surface shrinks below the
/// area stop, or the step budget runs out.
pub fn run_axi(profile: &AxiProfile, config: &FlowConfig) -> Result<AxiTrajectory> {
    config.validate()?;
    let m0 = axi_metrics(profile)?;
    let threshold = match profile.topology {
        Topology::Periodic => (1e-3 * m0.extent).max(5.0 * config.target_vertex_spacing),
        _ => (1e-3 * m0.min_radius).max(5.0 * config.target_vertex_spacing),
    };
    let initial_hmax = m0.min_mean_curvature.abs().max(m0.max_mean_curvature.abs());
    let mut traj = AxiTrajectory {
        snapshots: vec![AxiSnapshot {
            time: 0.0,
            profile: profile.clone(),
            metrics: m0,
        }],
        events: Vec::new(),
        steps: 0,
        collapse_threshold: threshold,
    };
    let mut current = profile.clone();
    let mut time = 0.0;
    let (mut last_area, mut last_radius, mut last_extent) = (m0.surface_area, m0.min_radius, m0.extent);

    while traj.steps < config.max_steps {
        let field = curvature_vectors(&current);
        let hmax = field.iter().map(|(v, _)| v.norm()).fold(0.0, f64::max);
        if hmax > config.max_curvature_stop * initial_hmax {
            let i = field
                .iter()
                .enumerate()
                .max_by(|a, b| a.1 .0.norm().total_cmp(&b.1 .0.norm()))
                .unwrap()
                .0;
            traj.events
                .push(Event::at(EventKind::CurvatureBlowup, time, Some(current.samples[i])));
            break;
        }
        let dt = config.cfl_factor * stable_axi_timestep(&current);
        current = advance(&current, &field, dt).map_err(|e| match e {
            Error::NumericalBreakdown { reason, .. } => Error::NumericalBreakdown { time, reason },
            e => e,
        })?;
        time += dt;
        traj.steps += 1;
        if traj.steps.is_multiple_of(config.resample_every) {
            let target = (current.meridian_length() / config.target_vertex_spacing).ceil() as usize;
            let floor = config.min_vertices.max(MIN_SAMPLES);
            let count = (target + 1).clamp(floor, current.len().max(floor));
            current = resample_profile(&current, count)?;
        }

        let area = surface_area(&current);
        let neck = waist(&current);
        let radius = neck.map_or_else(|| narrowest(&current).y, |p| p.y);
        let size = extent(&current);
        let mut event = None;
        match current.topology {
            Topology::TwoPoles | Topology::Tube { .. } => {
                if let Some(p) = neck.filter(|p| p.y < threshold) {
                    event = Some(Event::at(EventKind::NeckPinch, time, Some(p)));
                } else if current.topology == Topology::TwoPoles && area < config.stop_area_fraction * m0.surface_area {
                    let c = current.samples.iter().sum::<Vec2>() / current.len() as f64;
                    event = Some(Event::at(EventKind::PoleExtinction, time, Some(Vec2::new(c.x, 0.0))));
                }
            }
            Topology::Periodic => {
                if size < threshold {
                    let c = current.samples.iter().sum::<Vec2>() / current.len() as f64;
                    event = Some(Event::at(EventKind::TorusCollapse, time, Some(c)));
                }
            }
        }
        let due = area <= config.snapshot_ratio * last_area
            || radius <= config.snapshot_ratio * last_radius
            || size <= config.snapshot_ratio * last_extent;
        if due || event.is_some() {
            traj.snapshots.push(AxiSnapshot {
                time,
                profile: current.clone(),
                metrics: axi_metrics(&current)?,
            });
            (last_area, last_radius, last_extent) = (area, radius, size);
        }
        if let Some(e) = event {
            traj.events.push(e);
            break;
        }
    }
    if traj.last().time < time {
        traj.snapshots.push(AxiSnapshot {
            time,
            metrics: axi_metrics(&current)?,
            profile: current,
        });
    }
    Ok(traj)
}

#[derive(Clone, Debug, Serialize)]
pub struct NeckReport {
    /// Pinch time from the least-squares fit of `r_min² = 2 (T - t)`.
    pub pinch_time: f64,
    pub series: Vec<(f64, f64)>,
    /// `r_min / sqrt(2 (T - t))` over the fitted decade.
    pub self_similar_ratios: Vec<(f64, f64)>,
}

impl NeckReport {
    pub fn ratio_range(&self) -> (f64, f64) {
        self.self_similar_ratios
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, r)| {
                (lo.min(r), hi.max(r))
            })
    }
}

/// Fits the shrinking-cylinder law to the last decade of neck radius decay.
pub fn neck_report(traj: &AxiTrajectory) -> Result<NeckReport> {
    if traj.first_event(EventKind::NeckPinch).is_none() {
        return Err(Error::invalid("trajectory has no neck-pinch event"));
    }
    let series: Vec<(f64, f64)> = traj.snapshots.iter().map(|s| (s.time, s.metrics.min_radius)).collect();
    let last = series.last().unwrap().1;
    let decade: Vec<(f64, f64)> = series.iter().copied().filter(|&(_, r)| r <= 10.0 * last).collect();
    if decade.len() < 3 {
        return Err(Error::invalid("too few snapshots in the final decade of neck decay"));
    }
    let pinch_time = decade.iter().map(|(t, r)| t + r * r / 2.0).sum::<f64>() / decade.len() as f64;
    let self_similar_ratios = decade
        .iter()
        .map(|&(t, r)| (t, r / (2.0 * (pinch_time - t)).sqrt()))
        .collect();
    Ok(NeckReport {
        pinch_time,
        series,
        self_similar_ratios,
    })
}
