//! Plain-text geometry formats and trajectory CSV export.
//!
//! Curves: one `x y` pair per line, counterclockwise, no closing repeat.
//! Profiles: a `# topology=...` header then one `x r` pair per line.
//! Blank lines and other `#` lines are ignored; CRLF endings are accepted.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::axisym::{axi_metrics, AxiProfile, AxiSnapshot, AxiTrajectory, Topology};
use crate::curves::{metrics, PlaneCurve};
use crate::flow::{Snapshot, SpeedLaw, Trajectory};
use crate::{Error, Result, Vec2};

pub const CURVE_CSV_HEADER: &str = "t,length,area,iso_ratio,kmin,kmax,convex";
pub const AXI_CSV_HEADER: &str = "t,area,volume,rmin,rmin_x,hmin,hmax,mean_convex";
pub const TRAJECTORY_CSV: &str = "trajectory.csv";

fn parse_pairs(text: &str) -> Result<Vec<Vec2>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let mut next = |what: &str| -> Result<f64> {
            let f = fields.next().ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("missing {what}"),
            })?;
            f.parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("cannot parse {what} from {f:?}"),
            })
        };
        let x = next("first coordinate")?;
        let y = next("second coordinate")?;
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: i + 1,
                msg: "expected exactly two numbers".into(),
            });
        }
        out.push(Vec2::new(x, y));
    }
    Ok(out)
}

pub fn parse_curve(text: &str) -> Result<PlaneCurve> {
    PlaneCurve::new(parse_pairs(text)?)
}

pub fn format_curve(curve: &PlaneCurve) -> String {
    let mut s = String::new();
    for v in curve.vertices() {
        let _ = writeln!(s, "{} {}", v.x, v.y);
    }
    s
}

pub fn parse_profile(text: &str) -> Result<AxiProfile> {
    let mut topology = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r').trim();
        let Some(rest) = line.strip_prefix('#') else { continue };
        let mut kind = None;
        let mut period = None;
        for field in rest.split_whitespace() {
            if let Some(v) = field.strip_prefix("topology=") {
                kind = Some(v.to_string());
            } else if let Some(v) = field.strip_prefix("period=") {
                period = Some(v.parse::<f64>().map_err(|_| Error::Parse {
                    line: i + 1,
                    msg: format!("cannot parse period from {v:?}"),
                })?);
            }
        }
        let Some(kind) = kind else { continue };
        topology = Some(match (kind.as_str(), period) {
            ("twopoles", _) => Topology::TwoPoles,
            ("periodic", _) => Topology::Periodic,
            ("tube", Some(period)) => Topology::Tube { period },
            ("tube", None) => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "tube topology needs period=".into(),
                })
            }
            (other, _) => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("unknown topology {other:?}"),
                })
            }
        });
        break;
    }
    let topology = topology.ok_or(Error::Parse {
        line: 1,
        msg: "missing `# topology=` header".into(),
    })?;
    AxiProfile::new(parse_pairs(text)?, topology)
}

pub fn format_profile(profile: &AxiProfile) -> String {
    let mut s = match profile.topology() {
        Topology::Tube { period } => format!("# topology=tube period={period}\n"),
        t => format!("# topology={}\n", t.name()),
    };
    for p in profile.samples() {
        let _ = writeln!(s, "{} {}", p.x, p.y);
    }
    s
}

pub fn read_curve(path: &Path) -> Result<PlaneCurve> {
    parse_curve(&fs::read_to_string(path)?)
}

pub fn read_profile(path: &Path) -> Result<AxiProfile> {
    parse_profile(&fs::read_to_string(path)?)
}

pub fn curve_csv(traj: &Trajectory) -> String {
    let mut s = format!("{CURVE_CSV_HEADER}\n");
    for snap in &traj.snapshots {
        let m = &snap.metrics;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            snap.time, m.length, m.enclosed_area, m.isoperimetric_ratio, m.min_curvature, m.max_curvature, m.convex
        );
    }
    s
}

pub fn axi_csv(traj: &AxiTrajectory) -> String {
    let mut s = format!("{AXI_CSV_HEADER}\n");
    for snap in &traj.snapshots {
        let m = &snap.metrics;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            snap.time,
            m.surface_area,
            m.enclosed_volume,
            m.min_radius,
            m.min_radius_location,
            m.min_mean_curvature,
            m.max_mean_curvature,
            m.mean_convex
        );
    }
    s
}

pub fn snapshot_name(index: usize, extension: &str) -> String {
    format!("snap_{index}.{extension}")
}

/// Writes `trajectory.csv` and one `snap_<i>.xy` per snapshot; returns the
/// files written.
pub fn write_trajectory(traj: &Trajectory, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files = vec![dir.join(TRAJECTORY_CSV)];
    fs::write(&files[0], curve_csv(traj))?;
    for (i, s) in traj.snapshots.iter().enumerate() {
        let p = dir.join(snapshot_name(i, "xy"));
        fs::write(&p, format_curve(&s.curve))?;
        files.push(p);
    }
    Ok(files)
}

/// Writes `trajectory.csv` and one `snap_<i>.prof` per snapshot.
pub fn write_axi_trajectory(traj: &AxiTrajectory, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files = vec![dir.join(TRAJECTORY_CSV)];
    fs::write(&files[0], axi_csv(traj))?;
    for (i, s) in traj.snapshots.iter().enumerate() {
        let p = dir.join(snapshot_name(i, "prof"));
        fs::write(&p, format_profile(&s.profile))?;
        files.push(p);
    }
    Ok(files)
}

fn csv_times(text: &str, header: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r'));
    if lines.next() != Some(header) {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header {header:?}"),
        });
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let field = l.split(',').next().unwrap_or("");
            field.parse().map_err(|_| Error::Parse {
                line: i + 2,
                msg: format!("cannot parse time from {field:?}"),
            })
        })
        .collect()
}

/// Either kind of trajectory read back from a directory written by
/// [`write_trajectory`] or [`write_axi_trajectory`].
#[derive(Clone, Debug)]
pub enum StoredTrajectory {
    Curves(Trajectory),
    Surfaces(AxiTrajectory),
}

/// Reads a trajectory directory. Snapshot metrics are recomputed from the
/// geometry; events are not stored and come back empty.
pub fn load_trajectory(dir: &Path) -> Result<StoredTrajectory> {
    let text = fs::read_to_string(dir.join(TRAJECTORY_CSV))?;
    let header = text.lines().next().unwrap_or("").trim_end_matches('\r');
    if header == AXI_CSV_HEADER {
        let times = csv_times(&text, AXI_CSV_HEADER)?;
        let snapshots = times
            .into_iter()
            .enumerate()
            .map(|(i, time)| {
                let profile = read_profile(&dir.join(snapshot_name(i, "prof")))?;
                Ok(AxiSnapshot {
                    time,
                    metrics: axi_metrics(&profile)?,
                    profile,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StoredTrajectory::Surfaces(AxiTrajectory {
            snapshots,
            events: Vec::new(),
            steps: 0,
            collapse_threshold: 0.0,
        }))
    } else {
        let times = csv_times(&text, CURVE_CSV_HEADER)?;
        let snapshots = times
            .into_iter()
            .enumerate()
            .map(|(i, time)| {
                let curve = read_curve(&dir.join(snapshot_name(i, "xy")))?;
                Ok(Snapshot {
                    time,
                    metrics: metrics(&curve),
                    curve,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StoredTrajectory::Curves(Trajectory {
            law: SpeedLaw::CURVE_SHORTENING,
            snapshots,
            events: Vec::new(),
            steps: 0,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axisym::{build_profile, AxiShape};
    use crate::shapes;

    #[test]
    fn curve_roundtrip_with_crlf() {
        let c = shapes::ellipse(2.0, 1.0, 64).unwrap();
        let text = format_curve(&c).replace('\n', "\r\n");
        assert_eq!(parse_curve(&text).unwrap(), c);
    }

    #[test]
    fn curve_parse_errors_carry_line_numbers() {
        let text = "0 0\n1 0\n1 x\n";
        match parse_curve(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_curve("0 0\n1 1\n"), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn profile_roundtrip() {
        for shape in [
            AxiShape::Sphere { radius: 1.0 },
            AxiShape::Torus {
                ring_radius: 1.0,
                tube_radius: 0.1,
            },
            AxiShape::Cylinder {
                radius: 0.2,
                period: 0.5,
            },
        ] {
            let p = build_profile(shape, 64).unwrap();
            let text = format_profile(&p).replace('\n', "\r\n");
            assert_eq!(parse_profile(&text).unwrap(), p);
        }
        assert!(parse_profile("0 0\n").is_err());
        assert!(parse_profile("# topology=klein\n").is_err());
    }

    #[test]
    fn csv_headers() {
        let traj = crate::flow::run(
            &shapes::circle(1.0, 64).unwrap(),
            SpeedLaw::CURVE_SHORTENING,
            &crate::flow::FlowConfig {
                max_steps: 100,
                ..Default::default()
            },
        )
        .unwrap();
        let csv = curve_csv(&traj);
        assert!(csv.starts_with("t,length,area,iso_ratio,kmin,kmax,convex\n"));
        assert_eq!(csv.lines().count(), traj.snapshots.len() + 1);
    }
}
