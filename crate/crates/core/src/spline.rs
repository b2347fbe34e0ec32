//! Periodic cubic spline through a closed polygon, parameterized by chord
//! length. Used for smooth redistribution of vertices along evolving fronts.

use crate::Vec2;

// 5-point Gauss-Legendre on [-1, 1].
const GAUSS_X: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GAUSS_W: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
    0.236_926_885_056_189_08,
];

pub(crate) struct PeriodicSpline {
    knots: Vec<f64>,
    points: Vec<Vec2>,
    second: Vec<Vec2>,
}

impl PeriodicSpline {
    /// Interpolates `points` as a closed loop. Consecutive points must be distinct.
    pub fn through(points: &[Vec2]) -> Self {
        let n = points.len();
        let mut knots = Vec::with_capacity(n + 1);
        knots.push(0.0);
        for i in 0..n {
            let d = (points[(i + 1) % n] - points[i]).norm();
            knots.push(knots[i] + d);
        }
        let h: Vec<f64> = (0..n).map(|i| knots[i + 1] - knots[i]).collect();

        let sub: Vec<f64> = (0..n).map(|i| h[(i + n - 1) % n]).collect();
        let diag: Vec<f64> = (0..n).map(|i| 2.0 * (h[(i + n - 1) % n] + h[i])).collect();
        let sup: Vec<f64> = h.clone();
        let rhs: Vec<Vec2> = (0..n)
            .map(|i| {
                let prev = points[(i + n - 1) % n];
                let next = points[(i + 1) % n];
                let p = points[i];
                ((next - p) / h[i] - (p - prev) / h[(i + n - 1) % n]) * 6.0
            })
            .collect();
        let second = solve_cyclic(&sub, &diag, &sup, &rhs);
        PeriodicSpline {
            knots,
            points: points.to_vec(),
            second,
        }
    }

    fn n(&self) -> usize {
        self.points.len()
    }

    /// Position at local offset `u` in interval `i`.
    fn eval(&self, i: usize, u: f64) -> Vec2 {
        let j = (i + 1) % self.n();
        let h = self.knots[i + 1] - self.knots[i];
        let v = h - u;
        let (mi, mj) = (self.second[i], self.second[j]);
        let (pi, pj) = (self.points[i], self.points[j]);
        mi * (v * v * v / (6.0 * h))
            + mj * (u * u * u / (6.0 * h))
            + (pi / h - mi * (h / 6.0)) * v
            + (pj / h - mj * (h / 6.0)) * u
    }

    fn derivative(&self, i: usize, u: f64) -> Vec2 {
        let j = (i + 1) % self.n();
        let h = self.knots[i + 1] - self.knots[i];
        let v = h - u;
        let (mi, mj) = (self.second[i], self.second[j]);
        let (pi, pj) = (self.points[i], self.points[j]);
        -mi * (v * v / (2.0 * h)) + mj * (u * u / (2.0 * h)) - (pi / h - mi * (h / 6.0)) + (pj / h - mj * (h / 6.0))
    }

    fn partial_length(&self, i: usize, u: f64) -> f64 {
        let half = 0.5 * u;
        GAUSS_X
            .iter()
            .zip(GAUSS_W.iter())
            .map(|(x, w)| w * self.derivative(i, half * (x + 1.0)).norm())
            .sum::<f64>()
            * half
    }

    /// `count` points at equal spline arclength, the first at the first knot.
    pub fn equal_arclength(&self, count: usize) -> Vec<Vec2> {
        let n = self.n();
        let lengths: Vec<f64> = (0..n)
            .map(|i| self.partial_length(i, self.knots[i + 1] - self.knots[i]))
            .collect();
        let mut cumulative = Vec::with_capacity(n + 1);
        cumulative.push(0.0);
        for l in &lengths {
            cumulative.push(cumulative.last().unwrap() + l);
        }
        let total = cumulative[n];

        let mut out = Vec::with_capacity(count);
        let mut seg = 0;
        for k in 0..count {
            let target = total * k as f64 / count as f64;
            while seg + 1 < n && cumulative[seg + 1] <= target {
                seg += 1;
            }
            let h = self.knots[seg + 1] - self.knots[seg];
            let want = target - cumulative[seg];
            let mut u = (want / lengths[seg]).clamp(0.0, 1.0) * h;
            for _ in 0..8 {
                let speed = self.derivative(seg, u).norm();
                if speed == 0.0 {
                    break;
                }
                let du = (self.partial_length(seg, u) - want) / speed;
                u = (u - du).clamp(0.0, h);
                if du.abs() < 1e-15 * h.max(1.0) {
                    break;
                }
            }
            out.push(self.eval(seg, u));
        }
        out
    }
}

/// Thomas algorithm; `sub[0]` and `sup[n-1]` are ignored.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[Vec2]) -> Vec<Vec2> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![Vec2::zeros(); n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < n { sup[i] / m } else { 0.0 };
        d[i] = (rhs[i] - d[i - 1] * sub[i]) / m;
    }
    let mut x = vec![Vec2::zeros(); n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - x[i + 1] * c[i];
    }
    x
}

/// Cyclic tridiagonal solve by Sherman-Morrison. `sub[0]` couples to the last
/// unknown and `sup[n-1]` to the first.
fn solve_cyclic(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[Vec2]) -> Vec<Vec2> {
    let n = diag.len();
    let alpha = sup[n - 1];
    let beta = sub[0];
    let gamma = -diag[0];
    let mut bb = diag.to_vec();
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;
    let x = solve_tridiagonal(sub, &bb, sup, rhs);

    let mut u = vec![Vec2::zeros(); n];
    u[0] = Vec2::new(gamma, gamma);
    u[n - 1] = Vec2::new(alpha, alpha);
    let z = solve_tridiagonal(sub, &bb, sup, &u);
    // Both columns of `u` are identical, so either component of `z` serves.
    let z: Vec<f64> = z.iter().map(|v| v.x).collect();
    let denom = 1.0 + z[0] + beta * z[n - 1] / gamma;
    let fact = (x[0] + x[n - 1] * (beta / gamma)) / denom;
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * *zi).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn reproduces_circle_to_fourth_order() {
        let n = 64;
        let pts: Vec<Vec2> = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                Vec2::new(t.cos(), t.sin())
            })
            .collect();
        let spline = PeriodicSpline::through(&pts);
        let out = spline.equal_arclength(200);
        let worst = out.iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-6, "radial deviation {worst}");
    }

    #[test]
    fn equal_spacing_on_irregular_input() {
        let pts: Vec<Vec2> = (0..40)
            .map(|i| {
                let s = i as f64 / 40.0;
                let t = TAU * (s + 0.1 * (TAU * s).sin() / TAU);
                Vec2::new(2.0 * t.cos(), t.sin())
            })
            .collect();
        let out = PeriodicSpline::through(&pts).equal_arclength(100);
        let d: Vec<f64> = (0..100).map(|i| (out[(i + 1) % 100] - out[i]).norm()).collect();
        let (lo, hi) = d.iter().fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(hi / lo < 1.01, "spacing ratio {}", hi / lo);
    }
}
