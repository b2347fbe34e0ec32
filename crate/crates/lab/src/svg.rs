//! Standalone SVG drawings of a single curve or profile.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use curveflow::axisym::{AxiProfile, Topology};
use curveflow::curves::PlaneCurve;
use curveflow::Vec2;

/// Side of the square view box relative to the larger bounding-box extent.
const FRAME: f64 = 1.05;
const STROKE_FRACTION: f64 = 0.004;

/// `[min_x, min_y, width, height]` in drawing coordinates, where the y axis
/// points down, so `min_y` is the negated top of the geometry.
pub fn view_box(points: &[Vec2]) -> [f64; 4] {
    let (mut lo, mut hi) = (Vec2::repeat(f64::INFINITY), Vec2::repeat(f64::NEG_INFINITY));
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let center = (lo + hi) / 2.0;
    let side = FRAME * (hi - lo).max().max(f64::MIN_POSITIVE);
    [center.x - side / 2.0, -center.y - side / 2.0, side, side]
}

fn document(points: &[Vec2], closed: bool) -> String {
    let vb = view_box(points);
    let mut coords = String::new();
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            coords.push(' ');
        }
        let _ = write!(coords, "{:.6},{:.6}", p.x, -p.y);
    }
    let element = if closed { "polygon" } else { "polyline" };
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"600\" height=\"600\">\n\
         <{element} fill=\"none\" stroke=\"black\" stroke-width=\"{}\" stroke-linejoin=\"round\" points=\"{coords}\"/>\n\
         </svg>\n",
        vb[0],
        vb[1],
        vb[2],
        vb[3],
        STROKE_FRACTION * vb[2],
    )
}

pub fn curve_svg(curve: &PlaneCurve) -> String {
    document(curve.vertices(), true)
}

/// Closed-surface profiles are drawn with their mirror image as the full
/// meridian cross-section; a torus shows the upper tube section and a tube
/// its generating line.
pub fn profile_svg(profile: &AxiProfile) -> String {
    match profile.topology() {
        Topology::TwoPoles => {
            let mut loop_: Vec<Vec2> = profile.samples().to_vec();
            let mirror = profile.mirrored();
            loop_.extend(mirror[1..mirror.len() - 1].iter().rev());
            document(&loop_, true)
        }
        Topology::Periodic => document(profile.samples(), true),
        Topology::Tube { .. } => document(profile.samples(), false),
    }
}

pub fn write_curve_svg(curve: &PlaneCurve, path: &Path) -> std::io::Result<()> {
    fs::write(path, curve_svg(curve))
}

pub fn write_profile_svg(profile: &AxiProfile, path: &Path) -> std::io::Result<()> {
    fs::write(path, profile_svg(profile))
}
