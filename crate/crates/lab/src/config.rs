//! Scenario catalog format.
//!
//! A catalog is a TOML document with one table per scenario, keyed by the
//! scenario name. Every key is required unless documented as optional, and
//! unknown keys are rejected, so a catalog file fully records each run.

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;

use curveflow::axisym::{build_profile, AxiShape};
use curveflow::curves::PlaneCurve;
use curveflow::flow::{FlowConfig, SpeedLaw};
use curveflow::io::read_curve;
use curveflow::rescale::LimitClass;
use curveflow::shapes::{self, SpiralSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("scenario `{scenario}`, field `{field}`: {msg}")]
    Field {
        scenario: String,
        field: String,
        msg: String,
    },
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl ConfigError {
    fn field(scenario: &str, field: impl Into<String>, msg: impl fmt::Display) -> Self {
        ConfigError::Field {
            scenario: scenario.to_string(),
            field: field.into(),
            msg: msg.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub job: Job,
}

impl Scenario {
    pub fn kind(&self) -> Kind {
        match self.job {
            Job::CurveFlow(_) => Kind::CurveFlow,
            Job::AxiFlow(_) => Kind::AxiFlow,
            Job::RescaleAnalysis(_) => Kind::RescaleAnalysis,
            Job::OracleCheck(_) => Kind::OracleCheck,
        }
    }

    /// Output directory relative to the output root.
    pub fn output(&self) -> &str {
        match &self.job {
            Job::CurveFlow(j) => &j.output,
            Job::AxiFlow(j) => &j.output,
            Job::RescaleAnalysis(j) => &j.output,
            Job::OracleCheck(j) => &j.output,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    CurveFlow,
    AxiFlow,
    RescaleAnalysis,
    OracleCheck,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::CurveFlow => "curve-flow",
            Kind::AxiFlow => "axi-flow",
            Kind::RescaleAnalysis => "rescale-analysis",
            Kind::OracleCheck => "oracle-check",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Job {
    CurveFlow(CurveFlowJob),
    AxiFlow(AxiFlowJob),
    RescaleAnalysis(RescaleJob),
    OracleCheck(OracleJob),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFlowJob {
    pub output: String,
    /// Evolved together with one shared time step; analyses other than
    /// `embedded` and `disjointness` look at the first curve.
    pub curves: Vec<CurveShape>,
    pub law: Law,
    pub flow: FlowSection,
    pub analyses: CurveAnalyses,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiFlowJob {
    pub output: String,
    pub profile: ProfileShape,
    pub samples: usize,
    pub flow: FlowSection,
    pub analyses: AxiAnalyses,
}

/// Rescales a trajectory directory written by an earlier run.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RescaleJob {
    pub output: String,
    pub source: PathBuf,
    pub center: [f64; 2],
    pub reference_time: f64,
    pub scales: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleJob {
    pub output: String,
    pub analyses: OracleAnalyses,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Law {
    pub p: f64,
}

/// Written as a one-key table, e.g. `{ circle = { radius = 1.0, vertices = 64 } }`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum CurveShape {
    Circle {
        radius: f64,
        vertices: usize,
    },
    Ellipse {
        a: f64,
        b: f64,
        vertices: usize,
    },
    Square {
        side: f64,
        vertices: usize,
    },
    Peanut {
        waist: f64,
        vertices: usize,
    },
    Spiral {
        inner_radius: f64,
        outer_radius: f64,
        winding: f64,
        spacing: f64,
    },
    File {
        path: PathBuf,
    },
}

impl CurveShape {
    pub fn build(&self) -> curveflow::Result<PlaneCurve> {
        match *self {
            CurveShape::Circle { radius, vertices } => shapes::circle(radius, vertices),
            CurveShape::Ellipse { a, b, vertices } => shapes::ellipse(a, b, vertices),
            CurveShape::Square { side, vertices } => shapes::square(side, vertices),
            CurveShape::Peanut { waist, vertices } => shapes::peanut(waist, vertices),
            CurveShape::Spiral {
                inner_radius,
                outer_radius,
                winding,
                spacing,
            } => shapes::spiral(
                SpiralSpec {
                    inner_radius,
                    outer_radius,
                    winding,
                },
                spacing,
            ),
            CurveShape::File { ref path } => read_curve(path),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileShape {
    Sphere {
        radius: f64,
    },
    Dumbbell {
        lobe_radius: f64,
        tube_radius: f64,
        tube_length: f64,
    },
    Torus {
        ring_radius: f64,
        tube_radius: f64,
    },
    Cylinder {
        radius: f64,
        period: f64,
    },
}

impl From<ProfileShape> for AxiShape {
    fn from(s: ProfileShape) -> AxiShape {
        match s {
            ProfileShape::Sphere { radius } => AxiShape::Sphere { radius },
            ProfileShape::Dumbbell {
                lobe_radius,
                tube_radius,
                tube_length,
            } => AxiShape::Dumbbell {
                lobe_radius,
                tube_radius,
                tube_length,
            },
            ProfileShape::Torus {
                ring_radius,
                tube_radius,
            } => AxiShape::Torus {
                ring_radius,
                tube_radius,
            },
            ProfileShape::Cylinder { radius, period } => AxiShape::Cylinder { radius, period },
        }
    }
}

/// Every flow parameter, spelled out.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    pub cfl_factor: f64,
    pub resample_every: usize,
    pub target_vertex_spacing: f64,
    pub min_vertices: usize,
    pub stop_area_fraction: f64,
    pub max_curvature_stop: f64,
    pub max_steps: usize,
    pub snapshot_ratio: f64,
}

impl From<FlowSection> for FlowConfig {
    fn from(f: FlowSection) -> FlowConfig {
        FlowConfig {
            cfl_factor: f.cfl_factor,
            resample_every: f.resample_every,
            target_vertex_spacing: f.target_vertex_spacing,
            min_vertices: f.min_vertices,
            stop_area_fraction: f.stop_area_fraction,
            max_curvature_stop: f.max_curvature_stop,
            max_steps: f.max_steps,
            snapshot_ratio: f.snapshot_ratio,
        }
    }
}

/// An analysis without parameters, written `name = {}`.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Enabled {}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct CurveAnalyses {
    pub radius_law: Option<RadiusLaw>,
    pub area_law: Option<AreaLawCheck>,
    pub roundness: Option<RoundnessCheck>,
    pub convexification: Option<ConvexificationCheck>,
    pub eccentricity: Option<EccentricityCheck>,
    pub length_growth: Option<Enabled>,
    pub embedded: Option<Enabled>,
    pub disjointness: Option<Enabled>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct AxiAnalyses {
    pub radius_law: Option<RadiusLaw>,
    pub neck: Option<NeckCheck>,
    pub blowup: Option<BlowupCheck>,
    pub collapse: Option<CollapseCheck>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct OracleAnalyses {
    pub closed_forms: Option<ClosedFormsCheck>,
    pub grim_reaper: Option<GrimReaperCheck>,
}

/// Measured radius against the shrinking round solution up to `until`.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusLaw {
    pub until: f64,
    pub tolerance: f64,
}

/// Fitted `dA/dt` against `-2π` and the extrapolated extinction time
/// against `A(0)/2π`, both relative.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AreaLawCheck {
    /// Optional: omit to check extinction only.
    pub slope_tolerance: Option<f64>,
    pub extinction_tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundnessCheck {
    pub final_residual: f64,
    pub iso_tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvexificationCheck {
    pub max_lifetime: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EccentricityCheck {
    pub drift_tolerance: f64,
    pub residual_tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeckCheck {
    pub ratio_min: f64,
    pub ratio_max: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupCheck {
    /// Number of final snapshots probed at the neck.
    pub probes: usize,
    pub fast: Vec<LimitClass>,
    pub natural: Vec<LimitClass>,
    pub slow: Vec<LimitClass>,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollapseCheck {
    /// Allowed distance from the fitted circle in units of the mean sample
    /// spacing.
    pub spacing_multiple: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosedFormsCheck {
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrimReaperCheck {
    pub samples: usize,
    pub half_width: f64,
    pub duration: f64,
    pub cfl_factor: f64,
    pub resample_every: usize,
    pub tolerance: f64,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates a catalog. Scenarios keep their order in the file.
pub fn parse_config(text: &str) -> Result<Vec<Scenario>, ConfigError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        msg: e.message().to_string(),
    })?;
    let mut scenarios = Vec::with_capacity(table.len());
    let mut outputs = HashSet::new();
    for (name, value) in table {
        let job = parse_job(&name, value)?;
        validate(&name, &job)?;
        let scenario = Scenario { name, job };
        if !outputs.insert(scenario.output().to_string()) {
            return Err(ConfigError::field(
                &scenario.name,
                "output",
                "already used by another scenario",
            ));
        }
        scenarios.push(scenario);
    }
    Ok(scenarios)
}

fn parse_job(name: &str, value: toml::Value) -> Result<Job, ConfigError> {
    let toml::Value::Table(mut table) = value else {
        return Err(ConfigError::field(name, "", "a scenario must be a table"));
    };
    let kind = match table.remove("kind") {
        Some(k) => Kind::deserialize(k).map_err(|e| ConfigError::field(name, "kind", e))?,
        None => return Err(ConfigError::field(name, "kind", "missing field `kind`")),
    };
    fn body<T: serde::de::DeserializeOwned>(name: &str, table: toml::Table) -> Result<T, ConfigError> {
        serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { String::new() } else { path };
            ConfigError::field(name, field, e.inner())
        })
    }
    Ok(match kind {
        Kind::CurveFlow => Job::CurveFlow(body(name, table)?),
        Kind::AxiFlow => Job::AxiFlow(body(name, table)?),
        Kind::RescaleAnalysis => Job::RescaleAnalysis(body(name, table)?),
        Kind::OracleCheck => Job::OracleCheck(body(name, table)?),
    })
}

pub fn read_config(path: &std::path::Path) -> Result<Vec<Scenario>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

struct Checker<'a> {
    scenario: &'a str,
}

impl Checker<'_> {
    fn fail(&self, field: impl Into<String>, msg: impl fmt::Display) -> ConfigError {
        ConfigError::field(self.scenario, field, msg)
    }

    fn positive(&self, field: &str, v: f64) -> Result<(), ConfigError> {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(self.fail(field, format!("must be positive and finite, got {v}")))
        }
    }

    /// Zero is a legal band that no measurement meets.
    fn tolerance(&self, field: &str, v: f64) -> Result<(), ConfigError> {
        if v >= 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(self.fail(field, format!("must be non-negative and finite, got {v}")))
        }
    }

    fn output(&self, output: &str) -> Result<(), ConfigError> {
        let path = std::path::Path::new(output);
        if output.is_empty()
            || path.is_absolute()
            || path.components().any(|c| matches!(c, std::path::Component::ParentDir))
        {
            return Err(self.fail("output", "must be a non-empty relative path inside the output root"));
        }
        Ok(())
    }

    fn flow(&self, flow: FlowSection) -> Result<(), ConfigError> {
        FlowConfig::from(flow).validate().map_err(|e| self.fail("flow", e))
    }
}

fn validate(scenario: &str, job: &Job) -> Result<(), ConfigError> {
    let c = Checker { scenario };
    match job {
        Job::CurveFlow(j) => {
            c.output(&j.output)?;
            let law = SpeedLaw::new(j.law.p).map_err(|e| c.fail("law.p", e))?;
            c.flow(j.flow)?;
            if j.curves.is_empty() {
                return Err(c.fail("curves", "needs at least one curve"));
            }
            for (i, shape) in j.curves.iter().enumerate() {
                if !matches!(shape, CurveShape::File { .. }) {
                    shape.build().map_err(|e| c.fail(format!("curves[{i}]"), e))?;
                }
            }
            let a = &j.analyses;
            if let Some(r) = a.radius_law {
                if !j.curves.iter().take(1).all(|s| matches!(s, CurveShape::Circle { .. })) {
                    return Err(c.fail("analyses.radius-law", "needs a circle as the first curve"));
                }
                c.positive("analyses.radius-law.until", r.until)?;
                c.tolerance("analyses.radius-law.tolerance", r.tolerance)?;
            }
            if let Some(r) = a.area_law {
                if !law.is_curve_shortening() {
                    return Err(c.fail("analyses.area-law", "the area law holds only for p = 1"));
                }
                if let Some(t) = r.slope_tolerance {
                    c.tolerance("analyses.area-law.slope_tolerance", t)?;
                }
                c.tolerance("analyses.area-law.extinction_tolerance", r.extinction_tolerance)?;
            }
            if let Some(r) = a.roundness {
                c.tolerance("analyses.roundness.final_residual", r.final_residual)?;
                c.tolerance("analyses.roundness.iso_tolerance", r.iso_tolerance)?;
            }
            if let Some(r) = a.convexification {
                c.positive("analyses.convexification.max_lifetime", r.max_lifetime)?;
            }
            if let Some(r) = a.eccentricity {
                c.tolerance("analyses.eccentricity.drift_tolerance", r.drift_tolerance)?;
                c.tolerance("analyses.eccentricity.residual_tolerance", r.residual_tolerance)?;
            }
            if a.disjointness.is_some() && j.curves.len() < 2 {
                return Err(c.fail("analyses.disjointness", "needs at least two curves"));
            }
        }
        Job::AxiFlow(j) => {
            c.output(&j.output)?;
            c.flow(j.flow)?;
            build_profile(j.profile.into(), j.samples).map_err(|e| c.fail("profile", e))?;
            let a = &j.analyses;
            if let Some(r) = a.radius_law {
                if !matches!(j.profile, ProfileShape::Sphere { .. } | ProfileShape::Cylinder { .. }) {
                    return Err(c.fail("analyses.radius-law", "needs a sphere or cylinder profile"));
                }
                c.positive("analyses.radius-law.until", r.until)?;
                c.tolerance("analyses.radius-law.tolerance", r.tolerance)?;
            }
            if let Some(r) = a.neck {
                c.positive("analyses.neck.ratio_min", r.ratio_min)?;
                if !(r.ratio_max >= r.ratio_min) {
                    return Err(c.fail("analyses.neck.ratio_max", "must not be below ratio_min"));
                }
            }
            if let Some(r) = &a.blowup {
                if r.probes == 0 {
                    return Err(c.fail("analyses.blowup.probes", "must be positive"));
                }
                for (field, accepted) in [("fast", &r.fast), ("natural", &r.natural), ("slow", &r.slow)] {
                    if accepted.is_empty() {
                        return Err(c.fail(format!("analyses.blowup.{field}"), "needs at least one accepted class"));
                    }
                }
            }
            if let Some(r) = a.collapse {
                c.tolerance("analyses.collapse.spacing_multiple", r.spacing_multiple)?;
            }
        }
        Job::RescaleAnalysis(j) => {
            c.output(&j.output)?;
            if !j.reference_time.is_finite() {
                return Err(c.fail("reference_time", "must be finite"));
            }
            if j.scales.is_empty() {
                return Err(c.fail("scales", "needs at least one scale"));
            }
            for (i, &s) in j.scales.iter().enumerate() {
                c.positive(&format!("scales[{i}]"), s)?;
            }
            if j.scales.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(c.fail("scales", "must be strictly increasing"));
            }
        }
        Job::OracleCheck(j) => {
            c.output(&j.output)?;
            if let Some(r) = j.analyses.closed_forms {
                c.tolerance("analyses.closed-forms.tolerance", r.tolerance)?;
            }
            if let Some(r) = j.analyses.grim_reaper {
                if r.samples < 16 {
                    return Err(c.fail("analyses.grim-reaper.samples", "must be at least 16"));
                }
                if !(r.half_width > 0.0 && r.half_width < std::f64::consts::FRAC_PI_2) {
                    return Err(c.fail("analyses.grim-reaper.half_width", "must lie in (0, π/2)"));
                }
                c.positive("analyses.grim-reaper.duration", r.duration)?;
                if !(r.cfl_factor > 0.0 && r.cfl_factor <= 1.0) {
                    return Err(c.fail("analyses.grim-reaper.cfl_factor", "must lie in (0, 1]"));
                }
                if r.resample_every == 0 {
                    return Err(c.fail("analyses.grim-reaper.resample_every", "must be positive"));
                }
                c.tolerance("analyses.grim-reaper.tolerance", r.tolerance)?;
            }
        }
    }
    Ok(())
}
