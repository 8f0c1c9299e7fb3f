//! Option table, config-file parsing and three-level precedence
//! (command line over config file over compiled defaults).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Default,
    Config,
    Cli,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Default => "default",
            Provenance::Config => "config",
            Provenance::Cli => "cli",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptionKind {
    /// Iteration limits.
    PositiveInt,
    NonNegativeInt,
    /// Tolerances, penalty and Lipschitz parameters, times.
    PositiveReal,
    Path,
    Text,
    Flag,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OptionValue {
    Int(u64),
    Real(f64),
    Text(String),
    Flag(bool),
}

impl fmt::Display for OptionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptionValue::Int(v) => write!(f, "{v}"),
            OptionValue::Real(v) => f.write_str(&super::fmt_float(*v)),
            OptionValue::Text(s) => f.write_str(s),
            OptionValue::Flag(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OptionSpec {
    pub key: &'static str,
    pub kind: OptionKind,
    pub default: Option<&'static str>,
    pub short: Option<char>,
    /// Accepted on the command line only, not in config files.
    pub cli_only: bool,
    pub help: &'static str,
}

const fn opt(
    key: &'static str,
    kind: OptionKind,
    default: Option<&'static str>,
    help: &'static str,
) -> OptionSpec {
    OptionSpec {
        key,
        kind,
        default,
        short: None,
        cli_only: false,
        help,
    }
}

const fn short(mut s: OptionSpec, c: char) -> OptionSpec {
    s.short = Some(c);
    s
}

const fn cli_only(mut s: OptionSpec) -> OptionSpec {
    s.cli_only = true;
    s
}

use OptionKind::*;

pub const OPTION_SPECS: &[OptionSpec] = &[
    // input / output
    short(opt("input_path", Path, None, "Path to the input file (HSLR, or SDPA .dat-s)"), 'i'),
    short(opt("primal_output_path", Path, Some("primal_out.txt"), "Path for the primal solution file"), 'p'),
    short(opt("dual_output_path", Path, Some("dual_out.txt"), "Path for the dual solution file"), 'd'),
    short(opt("output_path", Path, None, "Base path deriving <stem>_primal and <stem>_dual output files"), 'o'),
    cli_only(short(opt("config_path", Path, Some(""), "Path to a configuration file"), 'c')),
    short(opt("initial_solution", Path, Some(""), "CSV file with a dense warm-start factor Y0 (no header)"), 'w'),
    opt("run_tests", Flag, Some("false"), "Run the built-in example instances"),
    opt("format", Text, None, "Input format override (hslr or sdpa)"),
    // ADAP-FISTA
    opt("maxiter_fista", PositiveInt, Some("10000"), "Maximum number of ADAP-FISTA iterations"),
    opt("mu_fista", PositiveReal, Some("0.5"), "FISTA parameter mu"),
    opt("chi_fista", PositiveReal, Some("1e-4"), "FISTA parameter chi"),
    opt("L0_fista", PositiveReal, Some("1.0"), "Initial Lipschitz constant for ADAP-FISTA"),
    opt("L_inc_fista", PositiveReal, Some("2.0"), "Lipschitz constant increment factor"),
    opt("sigma_fista", PositiveReal, Some("0.3"), "FISTA parameter sigma"),
    opt("err_tol_fista", PositiveReal, Some("1e-8"), "Error tolerance for ADAP-FISTA"),
    // AIPP
    opt("maxiter_aipp", PositiveInt, Some("5"), "Maximum number of AIPP iterations"),
    opt("lam0_aipp", PositiveReal, Some("0.1"), "AIPP initial parameter lambda0"),
    // hybrid low-rank and outer loop
    opt("maxiter_hlr", PositiveInt, Some("10"), "Maximum iterations for the hybrid low-rank method"),
    opt("maxiter_hallar", PositiveInt, Some("10000"), "Maximum number of outer iterations"),
    // stopping
    opt("eps_pfeas", PositiveReal, Some("1e-5"), "Primal feasibility tolerance"),
    opt("eps_gap", PositiveReal, Some("1e-5"), "Relative duality gap tolerance"),
    // penalty
    opt("beta0", PositiveReal, Some("10.0"), "Initial penalty parameter"),
    opt("beta_inc", PositiveReal, Some("1.1"), "Increment factor for the penalty"),
    opt("beta_min", PositiveReal, Some("10.0"), "Minimum penalty"),
    opt("beta_max", PositiveReal, Some("1e11"), "Maximum penalty"),
    // scaling
    opt("scale_A", PositiveReal, Some("1.0"), "Positive scaling factor for constraint matrices"),
    opt("scale_C", PositiveReal, Some("1.0"), "Positive scaling factor for the cost matrix"),
    // misc
    opt("verbosity", NonNegativeInt, Some("1"), "0: silent, 1: summary, 2: detailed, 3: debug"),
    opt("time_limit", PositiveReal, Some("3600.0"), "Time limit in seconds"),
    opt("trace_bound", PositiveReal, None, "Trace bound (required for SDPA input)"),
    opt("eps_eig", PositiveReal, Some("1e-8"), "Eigensolver residual tolerance"),
    opt("err_tol_eig", PositiveReal, Some("1e-6"), "Eigensolver acceptance threshold for theta"),
    opt("seed", NonNegativeInt, Some("0"), "Seed for all pseudo-random choices"),
];

pub fn spec_for(key: &str) -> Option<&'static OptionSpec> {
    OPTION_SPECS.iter().find(|s| s.key == key)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptionError {
    #[error("unrecognized option `{key}`{}", line_suffix(*.line))]
    UnknownKey { key: String, line: Option<usize> },
    #[error("option `{key}` expects {expected}, got `{value}`{}", line_suffix(*.line))]
    TypeMismatch {
        key: String,
        value: String,
        expected: &'static str,
        line: Option<usize>,
    },
    #[error("option `{key}` is missing a value{}", line_suffix(*.line))]
    MissingValue { key: String, line: Option<usize> },
    #[error("option `{key}` is only accepted on the command line (line {line})")]
    CliOnly { key: String, line: usize },
    #[error("invalid option combination: {0}")]
    Invalid(String),
}

fn line_suffix(line: Option<usize>) -> String {
    line.map(|l| format!(" on line {l}")).unwrap_or_default()
}

impl OptionError {
    fn at_line(self, l: usize) -> Self {
        match self {
            OptionError::TypeMismatch {
                key,
                value,
                expected,
                ..
            } => OptionError::TypeMismatch {
                key,
                value,
                expected,
                line: Some(l),
            },
            other => other,
        }
    }
}

/// Parses one raw value according to the key's type.
pub fn parse_value(key: &str, raw: &str) -> Result<OptionValue, OptionError> {
    let spec = spec_for(key).ok_or_else(|| OptionError::UnknownKey {
        key: key.to_string(),
        line: None,
    })?;
    let mismatch = |expected| OptionError::TypeMismatch {
        key: key.to_string(),
        value: raw.to_string(),
        expected,
        line: None,
    };
    let raw_t = raw.trim();
    match spec.kind {
        PositiveInt | NonNegativeInt => {
            let expected = if spec.kind == PositiveInt {
                "a positive integer"
            } else {
                "a nonnegative integer"
            };
            // accepts `10000` and integral floats such as `1e4`
            let v = match raw_t.parse::<u64>() {
                Ok(v) => v,
                Err(_) => match raw_t.parse::<f64>() {
                    Ok(f) if f.is_finite() && f >= 0.0 && f.fract() == 0.0 && f < 1.8e19 => f as u64,
                    _ => return Err(mismatch(expected)),
                },
            };
            if spec.kind == PositiveInt && v == 0 {
                return Err(mismatch(expected));
            }
            Ok(OptionValue::Int(v))
        }
        PositiveReal => match raw_t.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(OptionValue::Real(v)),
            _ => Err(mismatch("a positive real number")),
        },
        Path | Text => Ok(OptionValue::Text(raw_t.to_string())),
        Flag => match raw_t {
            "" | "true" | "1" | "yes" => Ok(OptionValue::Flag(true)),
            "false" | "0" | "no" => Ok(OptionValue::Flag(false)),
            _ => Err(mismatch("true or false")),
        },
    }
}

/// One optional value per key, each tagged with where it came from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OptionSet {
    entries: BTreeMap<&'static str, (OptionValue, Provenance)>,
}

impl OptionSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Compiled defaults for every key that has one.
    pub fn defaults() -> Self {
        let mut set = Self::new();
        for spec in OPTION_SPECS {
            if let Some(d) = spec.default {
                let v = parse_value(spec.key, d).expect("compiled default parses");
                set.entries.insert(spec.key, (v, Provenance::Default));
            }
        }
        set
    }

    pub fn set(&mut self, key: &str, value: OptionValue, prov: Provenance) -> Result<(), OptionError> {
        let spec = spec_for(key).ok_or_else(|| OptionError::UnknownKey {
            key: key.to_string(),
            line: None,
        })?;
        self.entries.insert(spec.key, (value, prov));
        Ok(())
    }

    /// Parses `raw` for `key` and stores it.
    pub fn set_raw(&mut self, key: &str, raw: &str, prov: Provenance) -> Result<(), OptionError> {
        let v = parse_value(key, raw)?;
        self.set(key, v, prov)
    }

    pub fn get(&self, key: &str) -> Option<&OptionValue> {
        self.entries.get(key).map(|(v, _)| v)
    }

    pub fn provenance(&self, key: &str) -> Option<Provenance> {
        self.entries.get(key).map(|(_, p)| *p)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &OptionValue, Provenance)> + '_ {
        self.entries.iter().map(|(k, (v, p))| (*k, v, *p))
    }

    pub fn real(&self, key: &str) -> Option<f64> {
        match self.get(key)? {
            OptionValue::Real(v) => Some(*v),
            OptionValue::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn int(&self, key: &str) -> Option<u64> {
        match self.get(key)? {
            OptionValue::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.get(key)? {
            OptionValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn flag(&self, key: &str) -> bool {
        matches!(self.get(key), Some(OptionValue::Flag(true)))
    }

    /// Non-empty path value.
    pub fn path(&self, key: &str) -> Option<&str> {
        self.text(key).filter(|s| !s.is_empty())
    }
}

/// `key = value` or `key value` per line; `#` comments and blank lines ignored.
pub fn parse_config(text: &str) -> Result<OptionSet, OptionError> {
    let mut set = OptionSet::new();
    for (k, raw_line) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = match line.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => match line.split_once(char::is_whitespace) {
                Some((k, v)) => (k.trim(), v.trim()),
                None => (line, ""),
            },
        };
        let spec = spec_for(key).ok_or_else(|| OptionError::UnknownKey {
            key: key.to_string(),
            line: Some(line_no),
        })?;
        if spec.cli_only {
            return Err(OptionError::CliOnly {
                key: key.to_string(),
                line: line_no,
            });
        }
        if value.is_empty() && spec.kind != Flag && spec.kind != Path {
            return Err(OptionError::MissingValue {
                key: key.to_string(),
                line: Some(line_no),
            });
        }
        let v = parse_value(key, value).map_err(|e| e.at_line(line_no))?;
        set.set(key, v, Provenance::Config)?;
    }
    Ok(set)
}

/// Per key: command-line value, else config value, else default.
pub fn merge_options(cli: &OptionSet, cfg: &OptionSet, defaults: &OptionSet) -> OptionSet {
    let mut out = OptionSet::new();
    for spec in OPTION_SPECS {
        let pick = cli
            .entries
            .get(spec.key)
            .or_else(|| cfg.entries.get(spec.key))
            .or_else(|| defaults.entries.get(spec.key));
        if let Some(e) = pick {
            out.entries.insert(spec.key, e.clone());
        }
    }
    out
}
