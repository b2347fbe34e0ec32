//! Closed polygonal plane curves: measurement, curvature, resampling and
//! embeddedness.
//!
//! Curvature is estimated with the circumscribed-circle (Menger) formula
//! through each vertex and its two neighbours. It is signed positive where
//! the curve bends toward the enclosed region, so for a counterclockwise
//! embedded curve the total turning is `+2π` and the curvature vector of a
//! convex curve always points inward.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::spline::PeriodicSpline;
use crate::{cross, perp_left, Error, Result, Vec2};

/// Fewest vertices a [`PlaneCurve`] may have.
pub const MIN_VERTICES: usize = 8;
/// Curves whose bounding-box diameter falls below this are extinct.
pub const EXTINCTION_DIAMETER: f64 = 1e-9;
/// Consecutive vertices closer than this fraction of the diameter coincide.
pub const COINCIDENCE_TOL: f64 = 1e-12;
/// A curve is convex when every curvature is at least `-CONVEXITY_TOL * 2π / L`.
pub const CONVEXITY_TOL: f64 = 1e-6;

/// A closed, counterclockwise polygon. The first vertex is not repeated.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneCurve {
    vertices: Vec<Vec2>,
}

impl PlaneCurve {
    /// Validates `vertices` and orients them counterclockwise (a clockwise
    /// input is reversed). A figure-eight with zero signed area is kept as given.
    pub fn new(mut vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.len() < MIN_VERTICES {
            return Err(Error::invalid(format!(
                "a closed curve needs at least {MIN_VERTICES} vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::invalid("non-finite vertex coordinate"));
        }
        let diameter = bbox_diameter(&vertices);
        if diameter < EXTINCTION_DIAMETER {
            return Err(Error::Extinct);
        }
        let n = vertices.len();
        let min_sep = COINCIDENCE_TOL * diameter;
        if let Some(i) = (0..n).find(|&i| (vertices[(i + 1) % n] - vertices[i]).norm() <= min_sep) {
            return Err(Error::invalid(format!("vertices {i} and {} coincide", (i + 1) % n)));
        }
        if shoelace(&vertices) < 0.0 {
            vertices.reverse();
        }
        Ok(PlaneCurve { vertices })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vec2> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Always true after construction, except for curves of zero signed area.
    pub fn is_counterclockwise(&self) -> bool {
        self.signed_area() >= 0.0
    }

    pub fn signed_area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn length(&self) -> f64 {
        self.edges().map(|e| e.norm()).sum()
    }

    pub fn diameter(&self) -> f64 {
        bbox_diameter(&self.vertices)
    }

    pub fn bbox(&self) -> (Vec2, Vec2) {
        bbox(&self.vertices)
    }

    /// Area centroid; falls back to the vertex mean for zero-area curves.
    pub fn centroid(&self) -> Vec2 {
        let n = self.len();
        let mut acc = Vec2::zeros();
        let mut area2 = 0.0;
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let c = cross(&a, &b);
            area2 += c;
            acc += (a + b) * c;
        }
        if area2.abs() <= f64::EPSILON * self.diameter().powi(2) {
            return self.vertices.iter().sum::<Vec2>() / n as f64;
        }
        acc / (3.0 * area2)
    }

    pub fn min_edge(&self) -> f64 {
        self.edges().map(|e| e.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Edge vectors `v[i+1] - v[i]`, wrapping around.
    pub fn edges(&self) -> impl Iterator<Item = Vec2> + '_ {
        let n = self.len();
        (0..n).map(move |i| self.vertices[(i + 1) % n] - self.vertices[i])
    }

    /// Applies `x -> scale * (x - center)`.
    pub fn dilate_about(&self, center: Vec2, scale: f64) -> Result<Self> {
        PlaneCurve::new(self.vertices.iter().map(|v| (v - center) * scale).collect())
    }
}

fn shoelace(v: &[Vec2]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| cross(&v[i], &v[(i + 1) % n])).sum::<f64>()
}

pub(crate) fn bbox(v: &[Vec2]) -> (Vec2, Vec2) {
    let mut lo = Vec2::repeat(f64::INFINITY);
    let mut hi = Vec2::repeat(f64::NEG_INFINITY);
    for p in v {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

fn bbox_diameter(v: &[Vec2]) -> f64 {
    let (lo, hi) = bbox(v);
    (hi - lo).norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveMetrics {
    pub length: f64,
    pub enclosed_area: f64,
    /// `L² / (4πA)`; infinite when the enclosed area is not positive.
    pub isoperimetric_ratio: f64,
    pub min_curvature: f64,
    pub max_curvature: f64,
    pub total_turning: f64,
    pub convex: bool,
}

pub fn metrics(curve: &PlaneCurve) -> CurveMetrics {
    let length = curve.length();
    let area = curve.signed_area();
    let ks = curvatures(curve);
    let (kmin, kmax) = ks.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &k| {
        (lo.min(k), hi.max(k))
    });
    let n = curve.len();
    let v = curve.vertices();
    let total_turning = (0..n)
        .map(|i| {
            let a = v[i] - v[(i + n - 1) % n];
            let b = v[(i + 1) % n] - v[i];
            cross(&a, &b).atan2(a.dot(&b))
        })
        .sum();
    let isoperimetric_ratio = if area > 0.0 {
        length * length / (4.0 * PI * area)
    } else {
        f64::INFINITY
    };
    CurveMetrics {
        length,
        enclosed_area: area,
        isoperimetric_ratio,
        min_curvature: kmin,
        max_curvature: kmax,
        total_turning,
        convex: kmin >= -convexity_tolerance(length),
    }
}

pub(crate) fn convexity_tolerance(length: f64) -> f64 {
    CONVEXITY_TOL * TAU / length
}

/// Signed Menger curvature through `prev`, `p`, `next`, with the unit left
/// normal of the chord `next - prev`.
#[inline]
pub(crate) fn menger(prev: &Vec2, p: &Vec2, next: &Vec2) -> (f64, Vec2) {
    let a = p - prev;
    let b = next - p;
    let c = next - prev;
    let cn = c.norm();
    if cn == 0.0 {
        // Hairpin: the two neighbours coincide.
        let an = a.norm();
        return (2.0 / an, -a / an);
    }
    let k = 2.0 * cross(&a, &b) / (a.norm() * b.norm() * cn);
    (k, perp_left(&c) / cn)
}

pub(crate) fn curvatures(curve: &PlaneCurve) -> Vec<f64> {
    let v = curve.vertices();
    let n = v.len();
    (0..n)
        .map(|i| menger(&v[(i + n - 1) % n], &v[i], &v[(i + 1) % n]).0)
        .collect()
}

/// Per-vertex signed curvature and inward unit normal. The curvature vector
/// is `k * normal`.
pub fn curvature_profile(curve: &PlaneCurve) -> Vec<(f64, Vec2)> {
    let v = curve.vertices();
    let n = v.len();
    (0..n)
        .map(|i| menger(&v[(i + n - 1) % n], &v[i], &v[(i + 1) % n]))
        .collect()
}

/// `n` vertices at equal arclength along the polygon itself, starting at the
/// first vertex.
pub fn resample_uniform(curve: &PlaneCurve, n: usize) -> Result<PlaneCurve> {
    if n < MIN_VERTICES {
        return Err(Error::invalid(format!(
            "resampling needs at least {MIN_VERTICES} vertices, got {n}"
        )));
    }
    let v = curve.vertices();
    let m = v.len();
    let mut cumulative = Vec::with_capacity(m + 1);
    cumulative.push(0.0);
    for e in curve.edges() {
        cumulative.push(cumulative.last().unwrap() + e.norm());
    }
    let total = cumulative[m];
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for k in 0..n {
        let s = total * k as f64 / n as f64;
        while seg + 1 < m && cumulative[seg + 1] <= s {
            seg += 1;
        }
        let len = cumulative[seg + 1] - cumulative[seg];
        let u = (s - cumulative[seg]) / len;
        out.push(v[seg] + (v[(seg + 1) % m] - v[seg]) * u);
    }
    PlaneCurve::new(out)
}

/// `n` vertices at equal arclength along the periodic cubic spline through
/// the vertices. Unlike [`resample_uniform`] this does not cut corners, so
/// repeated redistribution during a flow leaves the enclosed area unbiased to
/// fourth order in the spacing.
pub fn resample_smooth(curve: &PlaneCurve, n: usize) -> Result<PlaneCurve> {
    if n < MIN_VERTICES {
        return Err(Error::invalid(format!(
            "resampling needs at least {MIN_VERTICES} vertices, got {n}"
        )));
    }
    PlaneCurve::new(PeriodicSpline::through(curve.vertices()).equal_arclength(n))
}

#[derive(Clone, Copy)]
struct Segment {
    a: Vec2,
    b: Vec2,
}

impl Segment {
    fn x_range(&self) -> (f64, f64) {
        (self.a.x.min(self.b.x), self.a.x.max(self.b.x))
    }
}

fn orient(a: &Vec2, b: &Vec2, c: &Vec2, eps: f64) -> i8 {
    let o = cross(&(b - a), &(c - a));
    if o > eps {
        1
    } else if o < -eps {
        -1
    } else {
        0
    }
}

fn on_segment(a: &Vec2, b: &Vec2, p: &Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_intersect(s: &Segment, t: &Segment, eps: f64) -> bool {
    let o1 = orient(&s.a, &s.b, &t.a, eps);
    let o2 = orient(&s.a, &s.b, &t.b, eps);
    let o3 = orient(&t.a, &t.b, &s.a, eps);
    let o4 = orient(&t.a, &t.b, &s.b, eps);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_segment(&s.a, &s.b, &t.a))
        || (o2 == 0 && on_segment(&s.a, &s.b, &t.b))
        || (o3 == 0 && on_segment(&t.a, &t.b, &s.a))
        || (o4 == 0 && on_segment(&t.a, &t.b, &s.b))
}

/// True iff no two non-adjacent edges intersect. Shared endpoints of adjacent
/// edges do not count; near-collinear configurations are resolved with a
/// `1e-12` guard on the orientation determinant.
pub fn is_embedded(curve: &PlaneCurve) -> bool {
    let v = curve.vertices();
    let n = v.len();
    let eps = COINCIDENCE_TOL * curve.diameter().powi(2);
    let segs: Vec<Segment> = (0..n)
        .map(|i| Segment {
            a: v[i],
            b: v[(i + 1) % n],
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| segs[i].x_range().0.total_cmp(&segs[j].x_range().0));

    // Sweep over x: only segments whose x-ranges overlap are tested.
    for (pos, &i) in order.iter().enumerate() {
        let (_, xmax) = segs[i].x_range();
        let (ylo, yhi) = (segs[i].a.y.min(segs[i].b.y), segs[i].a.y.max(segs[i].b.y));
        for &j in &order[pos + 1..] {
            if segs[j].x_range().0 > xmax {
                break;
            }
            let adjacent = (i + 1) % n == j || (j + 1) % n == i;
            if adjacent {
                continue;
            }
            let (tlo, thi) = (segs[j].a.y.min(segs[j].b.y), segs[j].a.y.max(segs[j].b.y));
            if thi < ylo || tlo > yhi {
                continue;
            }
            if segments_intersect(&segs[i], &segs[j], eps) {
                return false;
            }
        }
    }
    true
}

pub(crate) fn point_segment_distance(p: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn segment_distance(s: &Segment, t: &Segment) -> f64 {
    if segments_intersect(s, t, 0.0) {
        return 0.0;
    }
    point_segment_distance(&s.a, &t.a, &t.b)
        .min(point_segment_distance(&s.b, &t.a, &t.b))
        .min(point_segment_distance(&t.a, &s.a, &s.b))
        .min(point_segment_distance(&t.b, &s.a, &s.b))
}

/// Minimum Euclidean distance between two polygons, segment to segment.
pub fn min_distance(a: &PlaneCurve, b: &PlaneCurve) -> f64 {
    let seg = |c: &PlaneCurve| -> Vec<Segment> {
        let v = c.vertices();
        let n = v.len();
        (0..n)
            .map(|i| Segment {
                a: v[i],
                b: v[(i + 1) % n],
            })
            .collect()
    };
    let (sa, sb) = (seg(a), seg(b));
    let mut best = f64::INFINITY;
    for s in &sa {
        for t in &sb {
            best = best.min(segment_distance(s, t));
            if best == 0.0 {
                return 0.0;
            }
        }
    }
    best
}
