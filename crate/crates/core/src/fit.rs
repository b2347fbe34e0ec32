//! Least-squares line, circle and ellipse fits to point sets.

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen, Vector3, Vector6};
use serde::Serialize;

use crate::curves::PlaneCurve;
use crate::{Error, Result, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub point: Vec2,
    pub direction: Vec2,
    pub rms_deviation: f64,
    pub max_deviation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircleFit {
    pub center: Vec2,
    pub radius: f64,
    /// RMS of `|p - center| - radius`, divided by the radius.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EllipseFit {
    pub center: Vec2,
    /// Semi-major axis.
    pub a: f64,
    /// Semi-minor axis.
    pub b: f64,
    /// Angle of the major axis from the x axis, in `(-π/2, π/2]`.
    pub angle: f64,
    pub eccentricity: f64,
    /// RMS first-order (Sampson) distance to the conic, divided by the
    /// bounding-box diameter of the data.
    pub residual: f64,
}

impl EllipseFit {
    pub fn aspect(&self) -> f64 {
        self.a / self.b
    }
}

struct Normalized {
    mean: Vec2,
    scale: f64,
    points: Vec<Vec2>,
}

/// Centres the points and scales them to unit RMS radius.
fn normalize(points: &[Vec2]) -> Result<Normalized> {
    if points.len() < 3 {
        return Err(Error::FitFailure(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mean = points.iter().sum::<Vec2>() / n;
    let rms = (points.iter().map(|p| (p - mean).norm_squared()).sum::<f64>() / n).sqrt();
    if !(rms > 0.0) || !rms.is_finite() {
        return Err(Error::FitFailure("points are coincident or non-finite".into()));
    }
    Ok(Normalized {
        mean,
        scale: rms,
        points: points.iter().map(|p| (p - mean) / rms).collect(),
    })
}

/// Principal-axis line through the centroid.
pub fn least_squares_line(points: &[Vec2]) -> Result<LineFit> {
    let nz = normalize(points)?;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in &nz.points {
        sxx += p.x * p.x;
        sxy += p.x * p.y;
        syy += p.y * p.y;
    }
    let eig = SymmetricEigen::new(nalgebra::Matrix2::new(sxx, sxy, sxy, syy));
    let major = if eig.eigenvalues[0] >= eig.eigenvalues[1] { 0 } else { 1 };
    let direction = Vec2::new(eig.eigenvectors[(0, major)], eig.eigenvectors[(1, major)]);
    let normal = crate::perp_left(&direction);
    let dev: Vec<f64> = points.iter().map(|p| (p - nz.mean).dot(&normal).abs()).collect();
    Ok(LineFit {
        point: nz.mean,
        direction,
        rms_deviation: (dev.iter().map(|d| d * d).sum::<f64>() / dev.len() as f64).sqrt(),
        max_deviation: dev.iter().copied().fold(0.0, f64::max),
    })
}

/// Algebraic (Kåsa) circle fit: minimizes `Σ (|p|² + D x + E y + F)²`.
pub fn fit_circle_points(points: &[Vec2]) -> Result<CircleFit> {
    let nz = normalize(points)?;
    let n = nz.points.len();
    let a = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => nz.points[i].x,
        1 => nz.points[i].y,
        _ => 1.0,
    });
    let rhs = DVector::from_fn(n, |i, _| -nz.points[i].norm_squared());
    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    if sv.min() <= 1e-10 * smax {
        return Err(Error::FitFailure("points are collinear".into()));
    }
    let sol = svd.solve(&rhs, 1e-14).map_err(|e| Error::FitFailure(e.to_string()))?;
    let c = Vec2::new(-sol[0] / 2.0, -sol[1] / 2.0);
    let r2 = c.norm_squared() - sol[2];
    if !(r2 > 0.0) {
        return Err(Error::FitFailure("fitted circle has no real radius".into()));
    }
    let r = r2.sqrt();
    let rms = (nz.points.iter().map(|p| ((p - c).norm() - r).powi(2)).sum::<f64>() / n as f64).sqrt();
    Ok(CircleFit {
        center: nz.mean + c * nz.scale,
        radius: r * nz.scale,
        residual: rms / r,
    })
}

pub fn fit_circle(curve: &PlaneCurve) -> Result<CircleFit> {
    fit_circle_points(curve.vertices())
}

/// Direct least-squares ellipse fit with the constraint `4AC - B² = 1`,
/// solved in the numerically stable reduced 3x3 form.
pub fn fit_ellipse_points(points: &[Vec2]) -> Result<EllipseFit> {
    let nz = normalize(points)?;
    let mut s1 = Matrix3::zeros();
    let mut s2 = Matrix3::zeros();
    let mut s3 = Matrix3::zeros();
    for p in &nz.points {
        let q = Vector3::new(p.x * p.x, p.x * p.y, p.y * p.y);
        let l = Vector3::new(p.x, p.y, 1.0);
        s1 += q * q.transpose();
        s2 += q * l.transpose();
        s3 += l * l.transpose();
    }
    let s3_inv = s3
        .try_inverse()
        .ok_or_else(|| Error::FitFailure("degenerate point set".into()))?;
    let t = -s3_inv * s2.transpose();
    let m = s1 + s2 * t;
    // Premultiply by the inverse of the constraint matrix.
    let m = Matrix3::from_rows(&[m.row(2) / 2.0, -m.row(1), m.row(0) / 2.0]);

    let mut best: Option<(f64, Vector3<f64>)> = None;
    for lambda in m.complex_eigenvalues().iter() {
        if lambda.im.abs() > 1e-9 * (1.0 + lambda.re.abs()) {
            continue;
        }
        let shifted = m - Matrix3::identity() * lambda.re;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.unwrap();
        let imin = svd.singular_values.imin();
        let v: Vector3<f64> = v_t.row(imin).transpose();
        let cond = 4.0 * v[0] * v[2] - v[1] * v[1];
        if cond > 0.0 {
            let v = v / cond.sqrt();
            let err = (v.transpose() * s1 * v)[0];
            if best.is_none_or(|(e, _)| err < e) {
                best = Some((err, v));
            }
        }
    }
    let (_, a1) = best.ok_or_else(|| Error::FitFailure("no elliptical solution".into()))?;
    let a2 = t * a1;
    let conic = Vector6::new(a1[0], a1[1], a1[2], a2[0], a2[1], a2[2]);
    geometric_ellipse(&conic, &nz, points)
}

pub fn fit_ellipse(curve: &PlaneCurve) -> Result<EllipseFit> {
    fit_ellipse_points(curve.vertices())
}

fn geometric_ellipse(c: &Vector6<f64>, nz: &Normalized, raw: &[Vec2]) -> Result<EllipseFit> {
    let (a, b, cc, d, e, f) = (c[0], c[1], c[2], c[3], c[4], c[5]);
    let det = 4.0 * a * cc - b * b;
    if !(det > 0.0) {
        return Err(Error::FitFailure("conic is not an ellipse".into()));
    }
    let x0 = (b * e - 2.0 * cc * d) / det;
    let y0 = (b * d - 2.0 * a * e) / det;
    let f0 = f + 0.5 * (d * x0 + e * y0);
    let eig = SymmetricEigen::new(nalgebra::Matrix2::new(a, b / 2.0, b / 2.0, cc));
    let (l0, l1) = (eig.eigenvalues[0], eig.eigenvalues[1]);
    let s0 = -f0 / l0;
    let s1 = -f0 / l1;
    if !(s0 > 0.0 && s1 > 0.0) {
        return Err(Error::FitFailure("conic is imaginary or degenerate".into()));
    }
    let (ax0, ax1) = (s0.sqrt(), s1.sqrt());
    let (major, minor, col) = if ax0 >= ax1 { (ax0, ax1, 0) } else { (ax1, ax0, 1) };
    let dir = Vec2::new(eig.eigenvectors[(0, col)], eig.eigenvectors[(1, col)]);
    let mut angle = dir.y.atan2(dir.x);
    if angle <= -std::f64::consts::FRAC_PI_2 {
        angle += std::f64::consts::PI;
    } else if angle > std::f64::consts::FRAC_PI_2 {
        angle -= std::f64::consts::PI;
    }

    let sampson: f64 = nz
        .points
        .iter()
        .map(|p| {
            let val = a * p.x * p.x + b * p.x * p.y + cc * p.y * p.y + d * p.x + e * p.y + f;
            let gx = 2.0 * a * p.x + b * p.y + d;
            let gy = b * p.x + 2.0 * cc * p.y + e;
            let g2 = gx * gx + gy * gy;
            if g2 > 0.0 {
                val * val / g2
            } else {
                0.0
            }
        })
        .sum::<f64>()
        / nz.points.len() as f64;
    let (lo, hi) = raw.iter().fold(
        (Vec2::repeat(f64::INFINITY), Vec2::repeat(f64::NEG_INFINITY)),
        |(lo, hi), p| (lo.inf(p), hi.sup(p)),
    );
    let diameter = (hi - lo).norm();

    Ok(EllipseFit {
        center: nz.mean + Vec2::new(x0, y0) * nz.scale,
        a: major * nz.scale,
        b: minor * nz.scale,
        angle,
        eccentricity: (1.0 - (minor / major).powi(2)).max(0.0).sqrt(),
        residual: sampson.sqrt() * nz.scale / diameter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn exact_two_to_one_ellipse() {
        let fit = fit_ellipse(&shapes::ellipse(2.0, 1.0, 256).unwrap()).unwrap();
        assert!((fit.aspect() - 2.0).abs() < 1e-3);
        assert!((fit.eccentricity - 3f64.sqrt() / 2.0).abs() < 1e-3);
        assert!(fit.residual < 1e-4);
        assert!(fit.center.norm() < 1e-9);
        assert!(fit.angle.abs() < 1e-6);
    }

    #[test]
    fn rotated_translated_ellipse() {
        let (th, c) = (0.7f64, Vec2::new(3.0, -1.0));
        let pts: Vec<Vec2> = (0..100)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / 100.0;
                let (x, y) = (3.0 * t.cos(), 0.5 * t.sin());
                c + Vec2::new(x * th.cos() - y * th.sin(), x * th.sin() + y * th.cos())
            })
            .collect();
        let fit = fit_ellipse_points(&pts).unwrap();
        assert!((fit.a - 3.0).abs() < 1e-9 && (fit.b - 0.5).abs() < 1e-9);
        assert!((fit.angle - th).abs() < 1e-9);
        assert!((fit.center - c).norm() < 1e-9);
    }

    #[test]
    fn circle_has_zero_eccentricity() {
        let fit = fit_ellipse(&shapes::circle(1.5, 128).unwrap()).unwrap();
        assert!(fit.eccentricity < 1e-4, "{}", fit.eccentricity);
        assert!((fit.a - 1.5).abs() < 1e-9);
    }

    #[test]
    fn circle_fit_on_exact_circle() {
        let c = shapes::circle_at(Vec2::new(1.0, 2.0), 0.7, 200).unwrap();
        let fit = fit_circle(&c).unwrap();
        assert!(fit.residual < 1e-6);
        assert!((fit.radius - 0.7).abs() < 1e-9);
        assert!((fit.center - Vec2::new(1.0, 2.0)).norm() < 1e-9);
    }

    #[test]
    fn circle_fit_of_two_to_one_ellipse() {
        let e = shapes::ellipse(2.0, 1.0, 512).unwrap();
        let fit = fit_circle(&e).unwrap();
        // By symmetry the geometric best circle is centred at the origin with
        // radius equal to the mean distance of the samples.
        let rho: Vec<f64> = e.vertices().iter().map(|v| v.norm()).collect();
        let r = rho.iter().sum::<f64>() / rho.len() as f64;
        let geometric = (rho.iter().map(|d| (d - r).powi(2)).sum::<f64>() / rho.len() as f64).sqrt() / r;
        assert!((geometric - 0.2345).abs() < 1e-3, "{geometric}");
        assert!((fit.residual - geometric).abs() < 0.01, "{}", fit.residual);
    }

    #[test]
    fn collinear_points_fail() {
        let pts: Vec<Vec2> = (0..10).map(|i| Vec2::new(i as f64, 2.0 * i as f64)).collect();
        assert!(matches!(fit_circle_points(&pts), Err(Error::FitFailure(_))));
        assert!(fit_ellipse_points(&pts).is_err());
        let line = least_squares_line(&pts).unwrap();
        assert!(line.max_deviation < 1e-12);
    }
}
