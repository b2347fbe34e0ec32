//! Initial curves for the experiments.

use std::f64::consts::{PI, TAU};

use crate::curves::{resample_uniform, PlaneCurve};
use crate::{Error, Result, Vec2};

/// Samples a closed parametric curve `f` on `[0, 2π)` at `n` points of equal
/// arclength. Points lie exactly on the curve.
pub fn parametric(n: usize, f: impl Fn(f64) -> Vec2) -> Result<PlaneCurve> {
    let dense = 64 * n.max(8);
    let params: Vec<f64> = (0..=dense).map(|i| TAU * i as f64 / dense as f64).collect();
    let mut cumulative = vec![0.0];
    for w in params.windows(2) {
        let d = (f(w[1]) - f(w[0])).norm();
        cumulative.push(cumulative.last().unwrap() + d);
    }
    let total = *cumulative.last().unwrap();
    let mut seg = 0;
    let pts = (0..n)
        .map(|k| {
            let s = total * k as f64 / n as f64;
            while seg + 1 < dense && cumulative[seg + 1] <= s {
                seg += 1;
            }
            let u = (s - cumulative[seg]) / (cumulative[seg + 1] - cumulative[seg]);
            f(params[seg] + u * (params[seg + 1] - params[seg]))
        })
        .collect();
    PlaneCurve::new(pts)
}

/// Regular `n`-gon inscribed in the circle of radius `r` about the origin.
pub fn circle(r: f64, n: usize) -> Result<PlaneCurve> {
    circle_at(Vec2::zeros(), r, n)
}

pub fn circle_at(center: Vec2, r: f64, n: usize) -> Result<PlaneCurve> {
    if !(r > 0.0) {
        return Err(Error::invalid(format!("circle radius must be positive, got {r}")));
    }
    PlaneCurve::new(
        (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                center + Vec2::new(t.cos(), t.sin()) * r
            })
            .collect(),
    )
}

/// Axis-aligned ellipse with semi-axes `a` (along x) and `b`, sampled at
/// equal arclength.
pub fn ellipse(a: f64, b: f64, n: usize) -> Result<PlaneCurve> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::invalid("ellipse semi-axes must be positive"));
    }
    parametric(n, |t| Vec2::new(a * t.cos(), b * t.sin()))
}

/// Square of side `side` centred at the origin, `n` points equally spaced
/// along the perimeter starting at the lower-left corner. Corners are
/// vertices when `n` is a multiple of 4.
pub fn square(side: f64, n: usize) -> Result<PlaneCurve> {
    if !(side > 0.0) {
        return Err(Error::invalid("square side must be positive"));
    }
    let h = side / 2.0;
    let corners = [Vec2::new(-h, -h), Vec2::new(h, -h), Vec2::new(h, h), Vec2::new(-h, h)];
    let pts = (0..n)
        .map(|k| {
            let s = 4.0 * k as f64 / n as f64;
            let edge = (s.floor() as usize).min(3);
            let u = s - edge as f64;
            corners[edge] + (corners[(edge + 1) % 4] - corners[edge]) * u
        })
        .collect();
    PlaneCurve::new(pts)
}

/// Lemniscate of Gerono, a self-crossing figure eight.
pub fn figure_eight(n: usize) -> Result<PlaneCurve> {
    PlaneCurve::new(
        (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                Vec2::new(t.cos(), t.sin() * t.cos())
            })
            .collect(),
    )
}

/// Polar curve `r = 1 + waist * cos 2θ`: two bumps joined by a waist,
/// non-convex once `waist > 0.2`.
pub fn peanut(waist: f64, n: usize) -> Result<PlaneCurve> {
    if !(0.0..1.0).contains(&waist) {
        return Err(Error::invalid("peanut waist parameter must lie in [0, 1)"));
    }
    parametric(n, |t| Vec2::new(t.cos(), t.sin()) * (1.0 + waist * (2.0 * t).cos()))
}

/// A closed embedded curve in the annulus `inner_radius < r < outer_radius`
/// that spirals inward `winding` turns and back out again.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpiralSpec {
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub winding: f64,
}

impl SpiralSpec {
    /// One and a half turns between radii 1 and 2.
    pub const FIGURE: SpiralSpec = SpiralSpec {
        inner_radius: 1.0,
        outer_radius: 2.0,
        winding: 1.5,
    };
}

/// Builds the spiral as a band: the outgoing arm `r = R - aθ` for
/// `θ ∈ [0, 2π·winding]`, the returning arm half a pitch inside it, joined by
/// semicircular caps. The pitch is chosen so the innermost point touches the
/// inner radius. Vertices are spaced `spacing` apart along the polygon.
pub fn spiral(spec: SpiralSpec, spacing: f64) -> Result<PlaneCurve> {
    let SpiralSpec {
        inner_radius,
        outer_radius,
        winding,
    } = spec;
    if !(inner_radius > 0.0 && outer_radius > inner_radius && winding > 0.0 && spacing > 0.0) {
        return Err(Error::invalid(
            "spiral needs 0 < inner < outer radius, positive winding and spacing",
        ));
    }
    let sweep = TAU * winding;
    let a = (outer_radius - inner_radius) / (sweep + PI);
    let width = PI * a;
    let polar = |theta: f64, r: f64| Vec2::new(theta.cos(), theta.sin()) * r;
    let e_r = |theta: f64| Vec2::new(theta.cos(), theta.sin());
    let e_t = |theta: f64| Vec2::new(-theta.sin(), theta.cos());

    let step = 0.1 * spacing / outer_radius;
    let arm_steps = (sweep / step).ceil() as usize;
    let cap_steps = ((PI * width / 2.0) / (0.1 * spacing)).ceil().max(8.0) as usize;
    let mut dense = Vec::new();
    for i in 0..arm_steps {
        let th = sweep * i as f64 / arm_steps as f64;
        dense.push(polar(th, outer_radius - a * th));
    }
    let mid = polar(sweep, outer_radius - a * sweep - width / 2.0);
    for i in 0..cap_steps {
        let phi = PI * i as f64 / cap_steps as f64;
        dense.push(mid + (e_r(sweep) * phi.cos() + e_t(sweep) * phi.sin()) * (width / 2.0));
    }
    for i in 0..arm_steps {
        let th = sweep * (1.0 - i as f64 / arm_steps as f64);
        dense.push(polar(th, outer_radius - a * th - width));
    }
    let mid = polar(0.0, outer_radius - width / 2.0);
    for i in 0..cap_steps {
        let phi = PI * i as f64 / cap_steps as f64;
        dense.push(mid - (e_r(0.0) * phi.cos() + e_t(0.0) * phi.sin()) * (width / 2.0));
    }
    let dense = PlaneCurve::new(dense)?;
    let count = (dense.length() / spacing).ceil() as usize;
    resample_uniform(&dense, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{is_embedded, metrics};

    #[test]
    fn spiral_stays_inside_annulus_and_is_embedded() {
        let s = spiral(SpiralSpec::FIGURE, 0.01).unwrap();
        assert!(is_embedded(&s));
        for v in s.vertices() {
            let r = v.norm();
            assert!(r > 1.0 - 1e-9 && r < 2.0 + 1e-9, "r = {r}");
        }
        let m = metrics(&s);
        assert!((m.total_turning - TAU).abs() < 1e-6);
        // band of width 0.25 along 1.5 turns
        assert!(m.enclosed_area > 3.0 && m.enclosed_area < 4.0, "{}", m.enclosed_area);
    }

    #[test]
    fn peanut_is_not_convex() {
        assert!(!metrics(&peanut(0.5, 256).unwrap()).convex);
        assert!(metrics(&peanut(0.1, 256).unwrap()).convex);
    }

    #[test]
    fn ellipse_points_are_on_the_ellipse_and_evenly_spaced() {
        let e = ellipse(2.0, 1.0, 200).unwrap();
        for v in e.vertices() {
            assert!(((v.x / 2.0).powi(2) + v.y.powi(2) - 1.0).abs() < 1e-12);
        }
        let d: Vec<f64> = e.edges().map(|e| e.norm()).collect();
        let (lo, hi) = d.iter().fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(hi / lo < 1.001);
    }
}
