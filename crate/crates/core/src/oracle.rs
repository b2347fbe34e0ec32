//! Reference solutions: self-similar shrinkers, power-law circles and the
//! two translating solitons, each cross-checked against direct integration
//! of its defining ODE.

use std::f64::consts::FRAC_PI_2;

use ode_solvers::{Dopri5, Rk4, System, Vector1, Vector2 as OdeVec2};
use serde::Serialize;

use crate::curves::menger;
use crate::flow::SpeedLaw;
use crate::{Error, Result, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShrinkerKind {
    Circle,
    Sphere,
    Cylinder,
}

impl ShrinkerKind {
    /// Rate at which the squared radius decreases: `n - 1` for the round
    /// `n - 1` sphere factor of the shrinker.
    pub fn squared_radius_rate(self) -> f64 {
        match self {
            ShrinkerKind::Circle | ShrinkerKind::Cylinder => 2.0,
            ShrinkerKind::Sphere => 4.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Shrinker {
    pub kind: ShrinkerKind,
    pub initial_radius: f64,
}

impl Shrinker {
    pub fn new(kind: ShrinkerKind, initial_radius: f64) -> Result<Self> {
        if !(initial_radius > 0.0 && initial_radius.is_finite()) {
            return Err(Error::invalid(format!(
                "shrinker radius must be positive, got {initial_radius}"
            )));
        }
        Ok(Shrinker { kind, initial_radius })
    }

    pub fn lifetime(&self) -> f64 {
        self.initial_radius.powi(2) / self.kind.squared_radius_rate()
    }
}

pub fn shrinker_radius(s: Shrinker, t: f64) -> Result<f64> {
    check_time(t, s.lifetime())?;
    Ok((s.initial_radius.powi(2) - s.kind.squared_radius_rate() * t).sqrt())
}

/// Radius of a circle moving inward with speed `r^{-p}`:
/// `(r0^{1+p} - (1+p) t)^{1/(1+p)}`.
pub fn power_circle_radius(r0: f64, p: f64, t: f64) -> Result<f64> {
    if !(r0 > 0.0) {
        return Err(Error::invalid(format!("radius must be positive, got {r0}")));
    }
    SpeedLaw::new(p)?;
    let q = 1.0 + p;
    check_time(t, r0.powf(q) / q)?;
    Ok((r0.powf(q) - q * t).powf(1.0 / q))
}

fn check_time(t: f64, lifetime: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("time must be non-negative, got {t}")));
    }
    if t >= lifetime {
        return Err(Error::PastExtinction { t, lifetime });
    }
    Ok(())
}

/// `n` samples of `y = -ln cos x` on `|x| ≤ half_width`, equally spaced in
/// arclength. Under the curve-shortening flow this graph translates upward
/// with unit speed.
pub fn grim_reaper(n: usize, half_width: f64) -> Result<Vec<Vec2>> {
    if n < 16 {
        return Err(Error::invalid(format!("need at least 16 samples, got {n}")));
    }
    if !(half_width > 0.0 && half_width < FRAC_PI_2) {
        return Err(Error::invalid(format!(
            "half width must lie in (0, π/2), got {half_width}"
        )));
    }
    // arclength from the vertex is s = asinh(tan x), so x = atan(sinh s)
    let s_max = half_width.tan().asinh();
    Ok((0..n)
        .map(|i| {
            let s = -s_max + 2.0 * s_max * i as f64 / (n - 1) as f64;
            grim_reaper_point(s.sinh().atan())
        })
        .collect())
}

fn grim_reaper_point(x: f64) -> Vec2 {
    Vec2::new(x, -x.cos().ln())
}

/// Curvature of `y = -ln cos x`.
pub fn grim_reaper_curvature(x: f64) -> f64 {
    x.cos()
}

#[derive(Clone, Debug, Serialize)]
pub struct TranslationCheck {
    pub time: f64,
    pub steps: usize,
    /// Largest vertical distance from an interior vertex to the translated graph.
    pub max_interior_deviation: f64,
    #[serde(skip)]
    pub final_polyline: Vec<Vec2>,
}

/// Evolves the truncated grim reaper by the curve-shortening flow for time
/// `t_end`. Interior vertices move with their curvature vector; the two end
/// vertices are carried upward with unit speed. Vertices are redistributed
/// at equal arclength every `resample_every` steps, ends held fixed.
pub fn evolve_grim_reaper(
    n: usize,
    half_width: f64,
    t_end: f64,
    cfl: f64,
    resample_every: usize,
) -> Result<TranslationCheck> {
    if !(cfl > 0.0 && cfl <= 1.0) || resample_every == 0 || !(t_end >= 0.0) {
        return Err(Error::invalid("bad grim reaper evolution parameters"));
    }
    let mut pts = grim_reaper(n, half_width)?;
    let mut t = 0.0;
    let mut steps = 0;
    while t < t_end {
        let h = pts
            .windows(2)
            .map(|w| (w[1] - w[0]).norm())
            .fold(f64::INFINITY, f64::min);
        let dt = (cfl * h * h / 2.0).min(t_end - t);
        let velocity: Vec<Vec2> = (1..n - 1)
            .map(|i| {
                let (k, normal) = menger(&pts[i - 1], &pts[i], &pts[i + 1]);
                normal * k
            })
            .collect();
        for (p, v) in pts[1..n - 1].iter_mut().zip(velocity) {
            *p += v * dt;
        }
        pts[0].y += dt;
        pts[n - 1].y += dt;
        t += dt;
        steps += 1;
        if steps % resample_every == 0 {
            pts = resample_open(&pts, n);
        }
    }
    let max_interior_deviation = pts[1..n - 1]
        .iter()
        .map(|p| {
            if p.x.abs() >= FRAC_PI_2 {
                f64::INFINITY
            } else {
                (p.y - t - grim_reaper_point(p.x).y).abs()
            }
        })
        .fold(0.0, f64::max);
    Ok(TranslationCheck {
        time: t,
        steps,
        max_interior_deviation,
        final_polyline: pts,
    })
}

/// Equal-arclength redistribution of an open polyline, ends fixed.
fn resample_open(pts: &[Vec2], n: usize) -> Vec<Vec2> {
    let mut cum = vec![0.0];
    for w in pts.windows(2) {
        cum.push(cum.last().unwrap() + (w[1] - w[0]).norm());
    }
    let total = *cum.last().unwrap();
    let mut seg = 0;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                return pts[pts.len() - 1];
            }
            let s = total * i as f64 / (n - 1) as f64;
            while seg + 2 < pts.len() && cum[seg + 1] <= s {
                seg += 1;
            }
            let u = (s - cum[seg]) / (cum[seg + 1] - cum[seg]);
            pts[seg] + (pts[seg + 1] - pts[seg]) * u
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BowlSample {
    pub radius: f64,
    pub height: f64,
    pub slope: f64,
}

impl BowlSample {
    /// `u''` from the translator equation `u''/(1+u'²) + u'/ρ = 1`.
    pub fn second_derivative(&self) -> f64 {
        if self.radius == 0.0 {
            return 0.5;
        }
        (1.0 + self.slope * self.slope) * (1.0 - self.slope / self.radius)
    }
}

/// Below this radius the profile is taken from its series at the axis.
const BOWL_SERIES_RADIUS: f64 = 1e-3;

fn bowl_series(rho: f64) -> BowlSample {
    BowlSample {
        radius: rho,
        height: rho * rho / 4.0 + rho.powi(4) / 128.0,
        slope: rho / 2.0 + rho.powi(3) / 32.0,
    }
}

struct BowlSlope;

impl System<f64, OdeVec2<f64>> for BowlSlope {
    fn system(&self, rho: f64, y: &OdeVec2<f64>, dy: &mut OdeVec2<f64>) {
        let w = y[1];
        dy[0] = w;
        dy[1] = (1.0 + w * w) * (1.0 - w / rho);
    }
}

/// Profile `u(ρ)` of the rotationally symmetric translating surface (the
/// bowl), sampled at `n` equally spaced radii on `[0, rho_max]`.
pub fn bowl_soliton(rho_max: f64, n: usize) -> Result<Vec<BowlSample>> {
    if rho_max == 0.0 {
        return Ok(vec![bowl_series(0.0)]);
    }
    if !(rho_max > 0.0 && rho_max.is_finite()) {
        return Err(Error::invalid(format!(
            "bowl radius must be non-negative, got {rho_max}"
        )));
    }
    if n < 32 {
        return Err(Error::invalid(format!("need at least 32 samples, got {n}")));
    }
    let grid: Vec<f64> = (0..n).map(|i| rho_max * i as f64 / (n - 1) as f64).collect();
    let mut out = Vec::with_capacity(n);
    let start = BOWL_SERIES_RADIUS.min(grid[1]);
    let mut state = bowl_series(start);
    let mut y = OdeVec2::new(state.height, state.slope);
    for &rho in &grid {
        if rho <= start {
            out.push(bowl_series(rho));
            continue;
        }
        let mut solver = Dopri5::new(BowlSlope, state.radius, rho, rho - state.radius, y, 1e-12, 1e-14);
        solver.integrate().map_err(|e| Error::NumericalBreakdown {
            time: rho,
            reason: e.to_string(),
        })?;
        y = *solver.results().get().1.last().unwrap();
        state = BowlSample {
            radius: rho,
            height: y[0],
            slope: y[1],
        };
        out.push(state);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub closed_form: f64,
    pub integrated: f64,
    pub abs_error: f64,
}

/// Integrates `dr/dt = -c r^{-p}` with fixed-step RK4.
fn integrate_radius(r0: f64, coefficient: f64, p: f64, t: f64, step: f64) -> f64 {
    struct Radius {
        coefficient: f64,
        p: f64,
    }
    impl System<f64, Vector1<f64>> for Radius {
        fn system(&self, _t: f64, y: &Vector1<f64>, dy: &mut Vector1<f64>) {
            dy[0] = -self.coefficient * y[0].powf(-self.p);
        }
    }
    if t == 0.0 {
        return r0;
    }
    let steps = (t / step).ceil();
    let mut solver = Rk4::new(Radius { coefficient, p }, 0.0, Vector1::new(r0), t, t / steps);
    solver.integrate().expect("fixed-step RK4 does not fail");
    // rounding in the step count may add one step past `t`
    let (xs, ys) = solver.results().get();
    let i = (0..xs.len())
        .min_by(|&a, &b| (xs[a] - t).abs().total_cmp(&(xs[b] - t).abs()))
        .unwrap();
    ys[i][0]
}

/// Checks every closed-form radius law against RK4 with step `1e-5`, the
/// grim reaper curvature against finite differences, and the bowl against
/// its axis series.
pub fn self_check() -> Vec<OracleCheck> {
    const STEP: f64 = 1e-5;
    let mut checks = Vec::new();
    let mut push = |name: String, closed_form: f64, integrated: f64| {
        checks.push(OracleCheck {
            name,
            closed_form,
            integrated,
            abs_error: (closed_form - integrated).abs(),
        });
    };
    for (kind, label) in [
        (ShrinkerKind::Circle, "circle"),
        (ShrinkerKind::Sphere, "sphere"),
        (ShrinkerKind::Cylinder, "cylinder"),
    ] {
        for (r0, frac) in [(1.0, 0.75), (0.2, 0.5), (2.0, 0.9)] {
            let s = Shrinker::new(kind, r0).unwrap();
            let t = frac * s.lifetime();
            // normal speed = (number of round directions) / r
            let c = kind.squared_radius_rate() / 2.0;
            push(
                format!("{label} r0={r0} t={t}"),
                shrinker_radius(s, t).unwrap(),
                integrate_radius(r0, c, 1.0, t, STEP),
            );
        }
    }
    for p in [1.0, 1.0 / 3.0, 0.2, 2.0] {
        for t in [0.1, 0.3] {
            push(
                format!("power circle p={p:.4} t={t}"),
                power_circle_radius(1.0, p, t).unwrap(),
                integrate_radius(1.0, 1.0, p, t, STEP),
            );
        }
    }
    for x in [0.0, 0.5, 1.0, 1.2] {
        let h = 1e-4;
        let y = |x: f64| grim_reaper_point(x).y;
        let d1 = (y(x + h) - y(x - h)) / (2.0 * h);
        let d2 = (y(x + h) - 2.0 * y(x) + y(x - h)) / (h * h);
        push(
            format!("grim reaper curvature x={x}"),
            grim_reaper_curvature(x),
            d2 / (1.0 + d1 * d1).powf(1.5),
        );
    }
    let bowl = bowl_soliton(0.05, 33).unwrap();
    let last = bowl.last().unwrap();
    push("bowl height rho=0.05".into(), bowl_series(0.05).height, last.height);
    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn circle(r0: f64) -> Shrinker {
        Shrinker::new(ShrinkerKind::Circle, r0).unwrap()
    }

    #[test]
    fn circle_and_sphere_halfway_radii() {
        assert_relative_eq!(shrinker_radius(circle(1.0), 0.375).unwrap(), 0.5, epsilon = 1e-15);
        let sphere = Shrinker::new(ShrinkerKind::Sphere, 1.0).unwrap();
        assert_relative_eq!(shrinker_radius(sphere, 0.1875).unwrap(), 0.5, epsilon = 1e-15);
        for kind in [ShrinkerKind::Circle, ShrinkerKind::Sphere, ShrinkerKind::Cylinder] {
            let s = Shrinker::new(kind, 1.7).unwrap();
            assert_eq!(shrinker_radius(s, 0.0).unwrap(), 1.7);
        }
    }

    #[test]
    fn past_lifetime_is_extinct() {
        assert!(matches!(
            shrinker_radius(circle(1.0), 0.5),
            Err(Error::PastExtinction { .. })
        ));
        assert!(matches!(
            power_circle_radius(1.0, 1.0 / 3.0, 0.75),
            Err(Error::PastExtinction { .. })
        ));
        assert!(Shrinker::new(ShrinkerKind::Sphere, 0.0).is_err());
    }

    #[test]
    fn power_law_values() {
        assert_relative_eq!(power_circle_radius(1.0, 1.0, 0.375).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(power_circle_radius(1.0, 0.2, 0.0).unwrap(), 1.0);
        let r = power_circle_radius(1.0, 1.0 / 3.0, 0.3).unwrap();
        assert_relative_eq!(r, 0.6f64.powf(0.75), epsilon = 1e-15);
        assert_relative_eq!(r, integrate_radius(1.0, 1.0, 1.0 / 3.0, 0.3, 1e-5), epsilon = 1e-9);
    }

    #[test]
    fn grim_reaper_samples() {
        assert!(grim_reaper(15, 1.0).is_err());
        assert!(grim_reaper(64, FRAC_PI_2).is_err());
        let g = grim_reaper(65, 1.2).unwrap();
        assert_relative_eq!(g[32].x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(g[0].x, -1.2, epsilon = 1e-12);
        assert_relative_eq!(g[64].x, 1.2, epsilon = 1e-12);
        let d: Vec<f64> = g.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        let (lo, hi) = d.iter().fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(hi / lo < 1.001);
        let (k, _) = menger(&g[31], &g[32], &g[33]);
        assert_relative_eq!(k, 1.0, epsilon = 1e-3);
        assert_relative_eq!(grim_reaper_curvature(1.0), 0.5403, epsilon = 1e-4);
    }

    #[test]
    fn grim_reaper_translates() {
        let run = evolve_grim_reaper(201, 1.2, 0.3, 0.5, 200).unwrap();
        assert_relative_eq!(run.time, 0.3, epsilon = 1e-12);
        assert!(run.max_interior_deviation < 5e-3, "{}", run.max_interior_deviation);
    }

    #[test]
    fn bowl_profile() {
        let b = bowl_soliton(3.0, 301).unwrap();
        for s in b.iter().filter(|s| s.radius > 0.0 && s.radius <= 0.2) {
            let lead = s.radius * s.radius / 4.0;
            assert!((s.height - lead).abs() / lead < 0.01);
        }
        assert!(b.iter().all(|s| s.second_derivative() > 0.0));
        for w in b.windows(2) {
            assert!(w[1].slope > w[0].slope);
        }
        let single = bowl_soliton(0.0, 64).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].height, 0.0);
        assert!(bowl_soliton(1.0, 31).is_err());
    }

    #[test]
    fn bowl_is_asymptotically_paraboloidal() {
        // far from the axis u' ≈ ρ - 1/ρ
        let b = bowl_soliton(20.0, 401).unwrap();
        let s = b.last().unwrap();
        assert!((s.slope - (s.radius - 1.0 / s.radius)).abs() < 0.05, "{}", s.slope);
    }

    #[test]
    fn every_oracle_agrees_with_its_ode() {
        for c in self_check() {
            assert!(c.abs_error < 1e-6, "{}: {} vs {}", c.name, c.closed_form, c.integrated);
        }
    }
}
