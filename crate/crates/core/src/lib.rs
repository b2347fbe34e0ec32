//! Numerical laboratory for curvature-driven geometric evolution.
//!
//! Closed polygonal plane curves evolve under the curve-shortening flow and
//! power-of-curvature flows ([`flow`]); surfaces of revolution evolve under
//! mean curvature flow through their meridian profile ([`axisym`]). The
//! [`rescale`] module performs parabolic blow-up analysis on the resulting
//! trajectories, and [`oracle`] holds the closed-form and ODE reference
//! solutions everything else is checked against.

pub mod axisym;
pub mod curves;
pub mod error;
pub mod fit;
pub mod flow;
pub mod io;
pub mod oracle;
pub mod rescale;
pub mod shapes;
mod spline;

pub use error::{Error, Result};

/// Points and vectors in the plane. For profiles the components are `(x, r)`.
pub type Vec2 = nalgebra::Vector2<f64>;

#[inline]
pub(crate) fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

#[inline]
pub(crate) fn perp_left(v: &Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}
