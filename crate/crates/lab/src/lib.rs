//! Scenario catalog, batch runner and artifact writers for curveflow.

pub mod batch;
pub mod config;
pub mod runner;
pub mod svg;

/// The catalog shipped with the crate.
pub const BUILTIN_CATALOG: &str = include_str!("../catalog.toml");

/// Environment variable overriding the default output root.
pub const OUTPUT_ENV: &str = "CURVEFLOW_OUT";
pub const DEFAULT_OUTPUT: &str = "curveflow-out";

/// `--out`, else `$CURVEFLOW_OUT`, else `curveflow-out`.
pub fn output_root(flag: Option<std::path::PathBuf>) -> std::path::PathBuf {
    flag.or_else(|| std::env::var_os(OUTPUT_ENV).filter(|v| !v.is_empty()).map(Into::into))
        .unwrap_or_else(|| DEFAULT_OUTPUT.into())
}
