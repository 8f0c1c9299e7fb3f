//! Problem, option and solution file handling.

mod format;
mod hslr;
mod options;
mod sdpa;
mod solution;

pub use format::{FormatRegistry, HslrFormat, ProblemFormat, SdpaFormat};
pub use hslr::{parse_hslr, write_hslr, LR_SYMMETRY_TOL};
pub use options::{
    merge_options, parse_config, OptionError, OptionKind, OptionSet, OptionSpec, OptionValue,
    Provenance, OPTION_SPECS,
};
pub use sdpa::{parse_sdpa, SdpaProblem};
pub use solution::{
    format_dual, format_primal, parse_dual, parse_primal, parse_warm_start, read_warm_start,
    write_dual, write_primal,
};

use std::path::PathBuf;

use thiserror::Error;

use crate::model::ModelError;

/// Parse failure pinned to a 1-based line and the token that triggered it.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message} (at `{token}`)")]
pub struct ParseError {
    pub line: usize,
    pub token: String,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, token: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            line,
            token: token.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Option(#[from] OptionError),
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("SDPA input has no trace bound; pass --trace_bound on the command line or in the config file")]
    MissingTraceBound,
    #[error("unknown problem format `{0}`")]
    UnknownFormat(String),
}

impl IoError {
    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::File {
            path: path.into(),
            source,
        }
    }
}

/// Shortest round-trip decimal, switching to exponent form for very small or
/// very large magnitudes. Used for CSV solution files.
pub fn fmt_shortest(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Shortest round-trip decimal that always carries a fractional part
/// (`1.0`, `0.5`, `8.844561680506419e-6`). Used for HSLR files and the log.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "Inf".into() } else { "-Inf".into() };
    }
    let a = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&a) {
        let s = format!("{x}");
        if s.contains('.') {
            s
        } else {
            format!("{s}.0")
        }
    } else {
        let s = format!("{x:e}");
        match s.split_once('e') {
            Some((mant, exp)) if !mant.contains('.') => format!("{mant}.0e{exp}"),
            _ => s,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formats() {
        assert_eq!(fmt_float(1.0), "1.0");
        assert_eq!(fmt_float(-0.5), "-0.5");
        assert_eq!(fmt_float(0.0), "0.0");
        assert_eq!(fmt_float(51601.0), "51601.0");
        assert_eq!(fmt_float(8.844561680506419e-6), "8.844561680506419e-6");
        assert_eq!(fmt_float(1e-5), "1.0e-5");
        assert_eq!(fmt_float(0.08356806847402057), "0.08356806847402057");
        assert_eq!(fmt_shortest(0.0), "0");
        assert_eq!(fmt_shortest(-0.0152), "-0.0152");
        assert_eq!(fmt_shortest(1e-20), "1e-20");
        for x in [1e-300, 3.3e-7, -2.5e17, 0.1 + 0.2] {
            assert_eq!(fmt_shortest(x).parse::<f64>().unwrap(), x);
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
    }
}
