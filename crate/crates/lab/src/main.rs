use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use curveflow::oracle::{
    bowl_soliton, grim_reaper, power_circle_radius, self_check, shrinker_radius, Shrinker, ShrinkerKind,
};
use curveflow::Vec2;
use curveflow_lab::batch::{run_batch, table, write_summary};
use curveflow_lab::config::{parse_config, read_config, Kind, Scenario};
use curveflow_lab::runner::rescale_directory;
use curveflow_lab::{output_root, BUILTIN_CATALOG};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(version, about = "Curve-shortening and mean curvature flow laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario in a catalog file.
    Run {
        config: PathBuf,
        /// Output root; defaults to $CURVEFLOW_OUT, then ./curveflow-out.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Run the acceptance catalog and print a pass/fail table.
    Accept {
        /// Catalog to run instead of the built-in one.
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Restrict to scenarios of one kind.
        #[arg(long)]
        only: Option<Kind>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Evaluate a closed-form solution.
    ///
    /// circle|sphere|cylinder R0 T: shrinker radius.
    /// power R0 P T: radius of a circle under speed k^P.
    /// grim-reaper N HALF_WIDTH: sampled translating curve.
    /// bowl RHO_MAX N: rotationally symmetric translator (radius, height, slope).
    /// self-check: compare every closed form against ODE integration.
    #[command(verbatim_doc_comment)]
    Oracle {
        kind: OracleKind,
        #[arg(allow_negative_numbers = true)]
        params: Vec<f64>,
    },
    /// Parabolically rescale a stored trajectory about CENTER ("x,y") and
    /// reference time T.
    Rescale {
        dir: PathBuf,
        center: String,
        reference_time: f64,
        /// Comma-separated increasing scales.
        #[arg(long, default_value = "1,2,4,8,16")]
        scales: String,
        /// Destination directory; defaults to <output root>/rescale.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Circle,
    Sphere,
    Cylinder,
    Power,
    GrimReaper,
    Bowl,
    SelfCheck,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn run_catalog(scenarios: &[Scenario], out: Option<PathBuf>, workers: usize) -> ExitCode {
    let root = output_root(out);
    let summary = match run_batch(scenarios, &root, workers) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CHECK_FAILED);
        }
    };
    print!("{}", table(&summary));
    match write_summary(&summary, &root) {
        Ok(path) => println!("summary written to {}", path.display()),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CHECK_FAILED);
        }
    }
    if summary.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}

fn oracle(kind: OracleKind, params: &[f64]) -> ExitCode {
    let arity = match kind {
        OracleKind::Circle | OracleKind::Sphere | OracleKind::Cylinder => 2,
        OracleKind::Power => 3,
        OracleKind::GrimReaper | OracleKind::Bowl => 2,
        OracleKind::SelfCheck => 0,
    };
    if params.len() != arity {
        return usage(format!("expected {arity} parameters, got {}", params.len()));
    }
    let count = |v: f64| -> Result<usize, String> {
        if v >= 0.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(format!("expected a sample count, got {v}"))
        }
    };
    let result: Result<(), String> = (|| {
        match kind {
            OracleKind::Circle | OracleKind::Sphere | OracleKind::Cylinder => {
                let shape = match kind {
                    OracleKind::Circle => ShrinkerKind::Circle,
                    OracleKind::Sphere => ShrinkerKind::Sphere,
                    _ => ShrinkerKind::Cylinder,
                };
                let s = Shrinker::new(shape, params[0]).map_err(|e| e.to_string())?;
                println!("{}", shrinker_radius(s, params[1]).map_err(|e| e.to_string())?);
            }
            OracleKind::Power => {
                println!(
                    "{}",
                    power_circle_radius(params[0], params[1], params[2]).map_err(|e| e.to_string())?
                );
            }
            OracleKind::GrimReaper => {
                let pts = grim_reaper(count(params[0])?, params[1]).map_err(|e| e.to_string())?;
                for p in pts {
                    println!("{} {}", p.x, p.y);
                }
            }
            OracleKind::Bowl => {
                for s in bowl_soliton(params[0], count(params[1])?).map_err(|e| e.to_string())? {
                    println!("{} {} {}", s.radius, s.height, s.slope);
                }
            }
            OracleKind::SelfCheck => {
                let checks = self_check();
                for c in &checks {
                    println!(
                        "{:<40} {:>22.15} {:>22.15} {:.2e}",
                        c.name, c.closed_form, c.integrated, c.abs_error
                    );
                }
                let worst = checks.iter().map(|c| c.abs_error).fold(0.0, f64::max);
                println!("worst mismatch {worst:.2e}");
                if worst >= 1e-6 {
                    return Err("oracle mismatch above 1e-6".into());
                }
            }
        }
        Ok(())
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if matches!(kind, OracleKind::SelfCheck) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
        Err(e) => usage(e),
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot parse {s:?} as a number"))
        })
        .collect()
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out, workers } => match read_config(&config) {
            Ok(scenarios) => run_catalog(&scenarios, out, workers),
            Err(e) => usage(e),
        },
        Command::Accept {
            catalog,
            only,
            out,
            workers,
        } => {
            let parsed = match catalog {
                Some(path) => read_config(&path),
                None => parse_config(BUILTIN_CATALOG),
            };
            match parsed {
                Ok(mut scenarios) => {
                    if let Some(kind) = only {
                        scenarios.retain(|s| s.kind() == kind);
                    }
                    run_catalog(&scenarios, out, workers)
                }
                Err(e) => usage(e),
            }
        }
        Command::Oracle { kind, params } => oracle(kind, &params),
        Command::Rescale {
            dir,
            center,
            reference_time,
            scales,
            out,
        } => {
            let center = match parse_list(&center) {
                Ok(c) if c.len() == 2 => Vec2::new(c[0], c[1]),
                Ok(_) => return usage("center must be \"x,y\""),
                Err(e) => return usage(e),
            };
            let scales = match parse_list(&scales) {
                Ok(s) => s,
                Err(e) => return usage(e),
            };
            let dest = out.unwrap_or_else(|| output_root(None).join("rescale"));
            match rescale_directory(&dir, center, reference_time, &scales, &dest) {
                Ok(files) => {
                    println!("{} frames written to {}", files.len() - 1, dest.display());
                    ExitCode::SUCCESS
                }
                Err(e) => usage(e),
            }
        }
    }
}
