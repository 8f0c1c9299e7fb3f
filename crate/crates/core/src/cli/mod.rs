//! Command-line front end.

mod gen;
mod render;
mod selftest;

use std::fs;
use std::io::Write;
use std::path::Path;

use clap::{Arg, ArgAction, Command};
use thiserror::Error;

use crate::generators::GenError;
use crate::io::{
    merge_options, parse_config, read_warm_start, write_dual, write_primal, FormatRegistry, IoError,
    OptionError, OptionKind, OptionSet, Provenance, OPTION_SPECS,
};
use crate::solver::{solve_observed, SolverOptions, Status};

pub use gen::gen_main;
pub use render::{
    fmt_sci, render_final, render_iteration, render_problem, render_settings, render_table_header,
    render_written, LogObserver,
};
pub use selftest::{builtin_cases, run_cases, run_tests, SelfTest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Option(#[from] OptionError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Solve,
    RunTests,
    /// Arguments after `gen`.
    Gen(Vec<String>),
    /// Rendered `--help` or `--version` text.
    Info(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub mode: Mode,
    /// Values given on the command line, tagged [`Provenance::Cli`].
    pub overrides: OptionSet,
}

fn command() -> Command {
    let mut cmd = Command::new("lrsdp")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Low-rank augmented Lagrangian solver for trace-bounded SDPs")
        .after_help("Subcommands: `lrsdp gen matcomp ...`, `lrsdp gen stableset ...` (see `lrsdp gen --help`).");
    for spec in OPTION_SPECS {
        let mut arg = Arg::new(spec.key).long(spec.key).help(spec.help);
        if let Some(c) = spec.short {
            arg = arg.short(c);
        }
        arg = match spec.kind {
            OptionKind::Flag => arg.action(ArgAction::SetTrue),
            OptionKind::Path | OptionKind::Text => arg.num_args(1).value_name("PATH"),
            _ => arg.num_args(1).value_name("VALUE").allow_negative_numbers(true),
        };
        cmd = cmd.arg(arg);
    }
    cmd
}

pub fn parse_args(argv: &[String]) -> Result<Invocation, CliError> {
    if argv.get(1).map(String::as_str) == Some("gen") {
        return Ok(Invocation {
            mode: Mode::Gen(argv[2..].to_vec()),
            overrides: OptionSet::new(),
        });
    }
    let matches = match command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Invocation {
                    mode: Mode::Info(e.render().to_string()),
                    overrides: OptionSet::new(),
                }),
                _ => Err(CliError::Usage(e.render().to_string().trim_end().to_string())),
            };
        }
    };
    let mut overrides = OptionSet::new();
    for spec in OPTION_SPECS {
        if spec.kind == OptionKind::Flag {
            if matches.get_flag(spec.key) {
                overrides.set_raw(spec.key, "true", Provenance::Cli)?;
            }
        } else if let Some(raw) = matches.get_one::<String>(spec.key) {
            overrides.set_raw(spec.key, raw, Provenance::Cli)?;
        }
    }
    let mode = if overrides.flag("run_tests") {
        Mode::RunTests
    } else {
        Mode::Solve
    };
    Ok(Invocation { mode, overrides })
}

/// `dir/out.csv` becomes `(dir/out_primal.csv, dir/out_dual.csv)`.
pub fn derive_output_paths(base: &str) -> (String, String) {
    let path = Path::new(base);
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(base);
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| format!(".{e}"))
        .unwrap_or_default();
    let with = |tag: &str| {
        let name = format!("{stem}_{tag}{ext}");
        match path.parent().filter(|p| !p.as_os_str().is_empty()) {
            Some(dir) => dir.join(name).to_string_lossy().into_owned(),
            None => name,
        }
    };
    (with("primal"), with("dual"))
}

/// Resolved primal and dual paths. An explicit `-p`/`-d` beats `-o` when its
/// provenance is at least as strong.
pub fn output_paths(opts: &OptionSet) -> (String, String) {
    let mut primal = opts.text("primal_output_path").unwrap_or("primal_out.txt").to_string();
    let mut dual = opts.text("dual_output_path").unwrap_or("dual_out.txt").to_string();
    if let (Some(base), Some(base_prov)) = (opts.path("output_path"), opts.provenance("output_path")) {
        let (dp, dd) = derive_output_paths(base);
        if opts.provenance("primal_output_path").map_or(true, |p| p < base_prov) {
            primal = dp;
        }
        if opts.provenance("dual_output_path").map_or(true, |p| p < base_prov) {
            dual = dd;
        }
    }
    (primal, dual)
}

fn init_logging(verbosity: u64) {
    let level = match verbosity {
        0 => log::LevelFilter::Error,
        1 | 2 => log::LevelFilter::Warn,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_target(false)
        .format_timestamp(None)
        .try_init();
    log::set_max_level(level);
}

fn read_text(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.to_string(),
        source,
    })
}

/// Entry point for the binary.
pub fn run_main(argv: Vec<String>) -> i32 {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    run_with(&argv, &mut lock)
}

/// [`run_main`] writing the log to `out`. Errors go to stderr.
pub fn run_with(argv: &[String], out: &mut dyn Write) -> i32 {
    match run_inner(argv, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn run_inner(argv: &[String], out: &mut dyn Write) -> Result<i32, CliError> {
    let inv = parse_args(argv)?;
    match &inv.mode {
        Mode::Info(text) => {
            let _ = write!(out, "{text}");
            return Ok(EXIT_OK);
        }
        Mode::Gen(args) => return Ok(gen_main(args, out)),
        Mode::Solve | Mode::RunTests => {}
    }

    let cfg = match inv.overrides.path("config_path") {
        Some(p) => parse_config(&read_text(p)?)?,
        None => OptionSet::new(),
    };
    let opts = merge_options(&inv.overrides, &cfg, &OptionSet::defaults());
    let verbosity = opts.int("verbosity").unwrap_or(1);
    init_logging(verbosity);

    if inv.mode == Mode::RunTests {
        return Ok(run_tests(verbosity, out));
    }

    let solver_opts = SolverOptions::from_option_set(&opts)?;
    let input = opts
        .path("input_path")
        .ok_or_else(|| CliError::Usage("missing required option --input_path (-i)".into()))?
        .to_string();
    let registry = FormatRegistry::builtin();
    let format = registry.select(opts.text("format"), Path::new(&input))?;
    let text = read_text(&input)?;
    let inst = format.read(&text, opts.real("trace_bound"))?;

    let warm = match opts.path("initial_solution") {
        Some(p) => Some(read_warm_start(p, &inst)?),
        None => None,
    };
    let (primal_path, dual_path) = output_paths(&opts);

    let loud = verbosity >= 1;
    if loud {
        let mut shown = opts.clone();
        shown.set_raw("primal_output_path", &primal_path, Provenance::Cli)?;
        shown.set_raw("dual_output_path", &dual_path, Provenance::Cli)?;
        let _ = write!(out, "{}", render_settings(&shown));
        let _ = write!(out, "{}", render_problem(format.label(), &input, &inst));
        let _ = writeln!(out, "\nSolving SDP problem...\n");
        let _ = write!(out, "{}", render_table_header());
    }
    let res = {
        let mut obs = LogObserver { verbosity, out: &mut *out };
        solve_observed(&inst, &solver_opts, warm.as_ref(), &mut obs)
    };
    match res.status {
        Status::Optimal => {}
        Status::IterationLimit => log::warn!(
            "stopped after {} outer iterations without meeting the tolerances",
            res.iterations()
        ),
        Status::TimeLimit => log::warn!(
            "time limit of {} s reached; returning the last iterate",
            solver_opts.time_limit
        ),
    }
    if loud {
        let _ = write!(out, "{}", render_final(&res, res.pval, res.wall_time));
        let _ = writeln!(out, "Writing output");
    }
    write_primal(&res.y, &primal_path)?;
    write_dual(res.theta, &res.p, &dual_path)?;
    if loud {
        let _ = write!(out, "{}", render_written(&primal_path, &dual_path));
    }
    Ok(match res.status {
        Status::Optimal => EXIT_OK,
        Status::IterationLimit | Status::TimeLimit => EXIT_LIMIT,
    })
}
