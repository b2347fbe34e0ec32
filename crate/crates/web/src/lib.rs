//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every exported method delegates to a plain Rust method returning
//! `Result<_, String>`, so the stepping logic is testable off the browser.

use curveflow::axisym::{
    axi_metrics, build_profile, resample_profile, stable_axi_timestep, step_axi, AxiProfile, AxiShape, Topology,
};
use curveflow::curves::{metrics, resample_smooth, PlaneCurve};
use curveflow::flow::{stable_timestep, step, SpeedLaw};
use curveflow::oracle::{grim_reaper, power_circle_radius, shrinker_radius, Shrinker, ShrinkerKind};
use curveflow::shapes::{self, SpiralSpec};
use wasm_bindgen::prelude::*;

const CFL: f64 = 0.5;
const RESAMPLE_EVERY: usize = 100;
/// Steps allowed per `advance` call, so one animation frame stays short.
const STEP_BUDGET: usize = 20_000;
const STOP_AREA_FRACTION: f64 = 0.02;

fn flatten(points: impl IntoIterator<Item = curveflow::Vec2>) -> Vec<f64> {
    points.into_iter().flat_map(|p| [p.x, p.y]).collect()
}

/// A closed plane curve moving with normal speed `k^p`.
#[wasm_bindgen]
pub struct CurveSim {
    curve: PlaneCurve,
    law: SpeedLaw,
    spacing: f64,
    time: f64,
    steps: usize,
    initial_area: f64,
    finished: bool,
}

impl CurveSim {
    pub fn build(shape: &str, p: f64) -> Result<CurveSim, String> {
        let law = SpeedLaw::new(p).map_err(|e| e.to_string())?;
        let (curve, spacing) = match shape {
            "circle" => (shapes::circle(1.0, 256), 0.025),
            "ellipse" => (shapes::ellipse(2.0, 1.0, 400), 0.025),
            "peanut" => (shapes::peanut(0.6, 400), 0.02),
            "square" => (shapes::square(2.0, 400), 0.02),
            "spiral" => (shapes::spiral(SpiralSpec::FIGURE, 0.02), 0.02),
            other => return Err(format!("unknown shape {other:?}")),
        };
        let curve = curve.map_err(|e| e.to_string())?;
        let initial_area = curve.signed_area();
        Ok(CurveSim {
            curve,
            law,
            spacing,
            time: 0.0,
            steps: 0,
            initial_area,
            finished: false,
        })
    }

    /// Evolves for `duration` or until the area stop; returns whether the
    /// curve is still evolving.
    pub fn run_for(&mut self, duration: f64) -> Result<bool, String> {
        let end = self.time + duration.max(0.0);
        let mut budget = STEP_BUDGET;
        while !self.finished && self.time < end && budget > 0 {
            let dt = (CFL * stable_timestep(&self.curve, self.law)).min(end - self.time);
            self.curve = step(&self.curve, self.law, dt).map_err(|e| e.to_string())?;
            self.time += dt;
            self.steps += 1;
            budget -= 1;
            if self.steps.is_multiple_of(RESAMPLE_EVERY) {
                let n = ((self.curve.length() / self.spacing).ceil() as usize).clamp(64, self.curve.len().max(64));
                self.curve = resample_smooth(&self.curve, n).map_err(|e| e.to_string())?;
            }
            self.finished = self.curve.signed_area() < STOP_AREA_FRACTION * self.initial_area;
        }
        Ok(!self.finished)
    }
}

#[wasm_bindgen]
impl CurveSim {
    #[wasm_bindgen(constructor)]
    pub fn new(shape: &str, p: f64) -> Result<CurveSim, JsError> {
        CurveSim::build(shape, p).map_err(|e| JsError::new(&e))
    }

    pub fn advance(&mut self, duration: f64) -> Result<bool, JsError> {
        self.run_for(duration).map_err(|e| JsError::new(&e))
    }

    /// Vertices as `[x0, y0, x1, y1, ...]`.
    pub fn points(&self) -> Vec<f64> {
        flatten(self.curve.vertices().iter().copied())
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn area(&self) -> f64 {
        self.curve.signed_area()
    }

    pub fn isoperimetric_ratio(&self) -> f64 {
        metrics(&self.curve).isoperimetric_ratio
    }

    pub fn convex(&self) -> bool {
        metrics(&self.curve).convex
    }

    pub fn finished(&self) -> bool {
        self.finished
    }
}

/// A surface of revolution moving by mean curvature, shown through its
/// meridian section.
#[wasm_bindgen]
pub struct AxiSim {
    profile: AxiProfile,
    spacing: f64,
    threshold: f64,
    time: f64,
    steps: usize,
    initial_area: f64,
    finished: bool,
}

impl AxiSim {
    pub fn build(shape: &str) -> Result<AxiSim, String> {
        let (shape, n, spacing) = match shape {
            "sphere" => (AxiShape::Sphere { radius: 1.0 }, 161, 0.02),
            "dumbbell" => (
                AxiShape::Dumbbell {
                    lobe_radius: 1.0,
                    tube_radius: 0.25,
                    tube_length: 1.2,
                },
                701,
                0.0125,
            ),
            "torus" => (
                AxiShape::Torus {
                    ring_radius: 1.0,
                    tube_radius: 0.3,
                },
                160,
                0.0125,
            ),
            other => return Err(format!("unknown surface {other:?}")),
        };
        let profile = build_profile(shape, n).map_err(|e| e.to_string())?;
        let m = axi_metrics(&profile).map_err(|e| e.to_string())?;
        let size = if profile.topology() == Topology::Periodic {
            m.extent
        } else {
            m.min_radius
        };
        Ok(AxiSim {
            threshold: (1e-3 * size).max(5.0 * spacing),
            profile,
            spacing,
            time: 0.0,
            steps: 0,
            initial_area: m.surface_area,
            finished: false,
        })
    }

    pub fn run_for(&mut self, duration: f64) -> Result<bool, String> {
        let end = self.time + duration.max(0.0);
        let mut budget = STEP_BUDGET;
        while !self.finished && self.time < end && budget > 0 {
            let dt = (CFL * stable_axi_timestep(&self.profile)).min(end - self.time);
            self.profile = step_axi(&self.profile, dt).map_err(|e| e.to_string())?;
            self.time += dt;
            self.steps += 1;
            budget -= 1;
            if self.steps.is_multiple_of(RESAMPLE_EVERY) {
                let want = (self.profile.meridian_length() / self.spacing).ceil() as usize;
                let n = want.clamp(32, self.profile.len().max(32));
                self.profile = resample_profile(&self.profile, n).map_err(|e| e.to_string())?;
            }
            let m = axi_metrics(&self.profile).map_err(|e| e.to_string())?;
            self.finished = match self.profile.topology() {
                Topology::Periodic => m.extent < self.threshold,
                _ => m.min_radius < self.threshold || m.surface_area < STOP_AREA_FRACTION * self.initial_area,
            };
        }
        Ok(!self.finished)
    }

    /// Meridian section: the profile followed by its mirror image, or the
    /// tube section alone for a torus.
    pub fn section(&self) -> Vec<curveflow::Vec2> {
        let mut pts = self.profile.samples().to_vec();
        if self.profile.topology() == Topology::TwoPoles {
            let mirror = self.profile.mirrored();
            pts.extend(mirror[1..mirror.len() - 1].iter().rev());
        }
        pts
    }
}

#[wasm_bindgen]
impl AxiSim {
    #[wasm_bindgen(constructor)]
    pub fn new(shape: &str) -> Result<AxiSim, JsError> {
        AxiSim::build(shape).map_err(|e| JsError::new(&e))
    }

    pub fn advance(&mut self, duration: f64) -> Result<bool, JsError> {
        self.run_for(duration).map_err(|e| JsError::new(&e))
    }

    /// Closed section outline as `[x0, r0, x1, r1, ...]`.
    pub fn points(&self) -> Vec<f64> {
        flatten(self.section())
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn min_radius(&self) -> f64 {
        axi_metrics(&self.profile).map_or(f64::NAN, |m| m.min_radius)
    }

    pub fn finished(&self) -> bool {
        self.finished
    }
}

/// Closed-form radius of a shrinking circle (`"circle"`), sphere or
/// cylinder at time `t`, or of a circle under speed `k^p` (`"power"`).
pub fn oracle_radius(kind: &str, r0: f64, p: f64, t: f64) -> Result<f64, String> {
    let shrinker = |k| Shrinker::new(k, r0).and_then(|s| shrinker_radius(s, t));
    match kind {
        "circle" => shrinker(ShrinkerKind::Circle),
        "sphere" => shrinker(ShrinkerKind::Sphere),
        "cylinder" => shrinker(ShrinkerKind::Cylinder),
        "power" => power_circle_radius(r0, p, t),
        other => return Err(format!("unknown oracle {other:?}")),
    }
    .map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = oracleRadius)]
pub fn oracle_radius_js(kind: &str, r0: f64, p: f64, t: f64) -> Result<f64, JsError> {
    oracle_radius(kind, r0, p, t).map_err(|e| JsError::new(&e))
}

/// Grim reaper `y = -ln cos x` translated up by `t`, as `[x0, y0, ...]`.
#[wasm_bindgen(js_name = grimReaper)]
pub fn grim_reaper_js(n: usize, half_width: f64, t: f64) -> Result<Vec<f64>, JsError> {
    let pts = grim_reaper(n, half_width).map_err(|e| JsError::new(&e.to_string()))?;
    Ok(flatten(pts.into_iter().map(|p| curveflow::Vec2::new(p.x, p.y + t))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_follows_the_oracle() {
        let mut sim = CurveSim::build("circle", 1.0).unwrap();
        while sim.time < 0.3 {
            assert!(sim.run_for(0.05).unwrap());
        }
        let r = (sim.curve.signed_area() / std::f64::consts::PI).sqrt();
        let exact = oracle_radius("circle", 1.0, 1.0, sim.time).unwrap();
        assert!((r / exact - 1.0).abs() < 5e-3, "{r} vs {exact}");
    }

    #[test]
    fn curve_runs_stop_at_the_area_floor() {
        let mut sim = CurveSim::build("peanut", 1.0).unwrap();
        let mut frames = 0;
        while sim.run_for(0.02).unwrap() {
            frames += 1;
            assert!(frames < 1000);
        }
        assert!(sim.finished && sim.convex());
        assert!(sim.points().len() >= 128);
    }

    #[test]
    fn dumbbell_pinches_and_torus_collapses() {
        for shape in ["dumbbell", "torus"] {
            let mut sim = AxiSim::build(shape).unwrap();
            let mut frames = 0;
            while sim.run_for(0.005).unwrap() {
                frames += 1;
                assert!(frames < 1000, "{shape}");
            }
            assert!(sim.time > 0.0);
        }
        let sphere = AxiSim::build("sphere").unwrap();
        let pts = sphere.points();
        assert_eq!(pts.len(), 2 * (2 * sphere.profile.len() - 2));
    }

    #[test]
    fn bad_inputs_are_errors() {
        assert!(CurveSim::build("triangle", 1.0).is_err());
        assert!(CurveSim::build("circle", -1.0).is_err());
        assert!(AxiSim::build("cube").is_err());
        assert!(oracle_radius("circle", 1.0, 1.0, 0.6).is_err());
        assert!((oracle_radius("power", 1.0, 1.0 / 3.0, 0.3).unwrap() - 0.6817).abs() < 1e-4);
    }
}
