//! Config-driven front end: JSON config in, JSON report and CSV table out.

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_config, validate, Diagnostic, RunConfig};
pub use run::{execute, run_file, Failure, Outcome, Written, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION};

/// Fixed 17-significant-digit float formatting used by every report.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}
