//! Console log: settings header, iteration table and final block.

use std::io::Write;
use std::time::Duration;

use crate::io::{fmt_float, OptionSet};
use crate::model::SdpInstance;
use crate::solver::{InnerEvent, IterRecord, SolveObserver, SolveResult};

const SECTIONS: &[(&str, &[&str])] = &[
    (
        "Basic Settings",
        &[
            "input_path",
            "output_path",
            "primal_output_path",
            "dual_output_path",
            "config_path",
            "initial_solution",
            "format",
            "trace_bound",
        ],
    ),
    (
        "FISTA Parameters",
        &["maxiter_fista", "mu_fista", "chi_fista", "L0_fista", "L_inc_fista", "sigma_fista", "err_tol_fista"],
    ),
    ("AIPP Parameters", &["maxiter_aipp", "lam0_aipp"]),
    ("Hybrid Low-Rank", &["maxiter_hlr", "maxiter_hallar"]),
    ("Stopping Criteria", &["eps_pfeas", "eps_gap"]),
    ("Penalty Parameters", &["beta0", "beta_inc", "beta_min", "beta_max"]),
    ("Scaling", &["scale_A", "scale_C"]),
    ("Miscellaneous", &["verbosity", "time_limit", "eps_eig", "err_tol_eig", "seed"]),
];

const RULE_WIDTH: usize = 44;
const TABLE_RULE: usize = 74;

/// `x` in scientific notation with `digits` mantissa decimals and a signed
/// two-digit exponent (`2.9e-03`).
pub fn fmt_sci(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "Inf".into() } else { "-Inf".into() };
    }
    let s = format!("{x:.digits$e}");
    let (mant, exp) = s.split_once('e').expect("LowerExp always has an exponent");
    let (sign, digits_part) = match exp.strip_prefix('-') {
        Some(d) => ('-', d),
        None => ('+', exp),
    };
    format!("{mant}e{sign}{digits_part:0>2}")
}

fn section_rule(title: &str) -> String {
    let head = format!("---------- {title} ");
    let pad = RULE_WIDTH.saturating_sub(head.chars().count());
    format!("{head}{}", "-".repeat(pad))
}

/// Settings echo, grouped like the option table. Unset keys are skipped.
pub fn render_settings(opts: &OptionSet) -> String {
    let mut out = String::new();
    for (title, keys) in SECTIONS {
        out.push_str(&section_rule(title));
        out.push('\n');
        for key in *keys {
            if let Some(v) = opts.get(key) {
                let shown = v.to_string();
                if !shown.is_empty() {
                    out.push_str(&format!("{key} = {shown}\n"));
                }
            }
        }
    }
    out
}

pub fn render_problem(label: &str, path: &str, inst: &SdpInstance) -> String {
    format!(
        "Reading {label} file: {path}\nProblem dimensions:\n  - Matrix size: {n} x {n}\n  - Number of constraints: {m}\n  - Trace bound: {tau}\n",
        n = inst.n(),
        m = inst.m(),
        tau = fmt_float(inst.tau()),
    )
}

pub fn render_table_header() -> String {
    format!(
        "{}\n  #   rank        gap    feas    pval    dval    pnlty   steps\n",
        "#".repeat(TABLE_RULE)
    )
}

/// One table row; empty at verbosity 0.
pub fn render_iteration(rec: &IterRecord, verbosity: u64) -> String {
    if verbosity == 0 {
        return String::new();
    }
    let gap = match rec.gap {
        Some(g) => fmt_sci(g, 1),
        None if rec.iter == 0 => "-".into(),
        None => "NaN".into(),
    };
    let dval = rec.dval.map_or_else(|| "NaN".into(), |d| fmt_sci(d, 3));
    let mut line = format!(
        "{:>3}{:>5}{:>11}{:>12}{:>12}{:>12}{:>11}",
        rec.iter,
        rec.rank,
        gap,
        fmt_sci(rec.feas, 1),
        fmt_sci(rec.pval, 3),
        dval,
        fmt_sci(rec.pnlty, 1),
    );
    if !rec.steps.is_empty() {
        line.push(' ');
        line.push_str(&rec.steps);
    }
    line
}

/// Objective, gap and counter summary ending with the run time.
pub fn render_final(res: &SolveResult, unscaled_value: f64, elapsed: Duration) -> String {
    format!(
        "Final Results\n\
         Primal Obj              = {}\n\
         Dual Obj                = {}\n\
         PD Gap                  = {}\n\
         Primal infeasibility      = {}\n\
         \n\
         #ADAP FISTA Calls: {}\n\
         #ACG Iterations: {}\n\
         #FW Calls: {}\n\
         Primal val unscaled = {}\n\
         Run time = {:.6} seconds\n",
        fmt_float(res.scaled_pval),
        fmt_float(res.scaled_dval),
        fmt_float(res.gap),
        fmt_float(res.feas),
        res.counters.fista_calls,
        res.counters.acg_iterations,
        res.counters.fw_calls,
        fmt_float(unscaled_value),
        elapsed.as_secs_f64(),
    )
}

pub fn render_written(primal: &str, dual: &str) -> String {
    format!("Output written to {primal} and {dual}.\n")
}

/// Streams table rows, and inner summaries at verbosity 2 and up.
pub struct LogObserver<'a> {
    pub verbosity: u64,
    pub out: &'a mut dyn Write,
}

impl SolveObserver for LogObserver<'_> {
    fn on_iteration(&mut self, rec: &IterRecord) {
        if self.verbosity >= 1 {
            let _ = writeln!(self.out, "{}", render_iteration(rec, self.verbosity));
        }
    }

    fn wants_inner(&self) -> bool {
        self.verbosity >= 2
    }

    fn on_inner(&mut self, event: InnerEvent<'_>) {
        let line = match event {
            InnerEvent::Descent { outer, outcome: d } => {
                let mut s = format!(
                    "    [{outer}] A: runs {} iters {} grad_map {} converged {}",
                    d.fista_calls,
                    d.iterations,
                    fmt_sci(d.grad_map, 2),
                    d.converged
                );
                if self.verbosity >= 3 {
                    s.push_str(&format!(" L {} f {}", fmt_sci(d.lipschitz, 2), fmt_float(d.objective)));
                }
                s
            }
            InnerEvent::FrankWolfe { outer, outcome: f } => {
                let mut s = format!(
                    "    [{outer}] F: gap {} alpha {} taken {}",
                    fmt_sci(f.fw_gap, 2),
                    fmt_sci(f.alpha, 2),
                    f.took_step
                );
                if self.verbosity >= 3 {
                    s.push_str(&format!(
                        " lambda {} residual {} matvecs {} restarts {}",
                        fmt_sci(f.eig.value, 4),
                        fmt_sci(f.eig.residual, 2),
                        f.eig.matvecs,
                        f.eig.restarts
                    ));
                }
                s
            }
            InnerEvent::Theta { outer, estimate: t } => {
                let mut s = format!(
                    "    [{outer}] theta {} reliable {}",
                    fmt_sci(t.theta, 4),
                    t.reliable
                );
                if self.verbosity >= 3 {
                    s.push_str(&format!(
                        " residual {} matvecs {}",
                        fmt_sci(t.eig.residual, 2),
                        t.eig.matvecs
                    ));
                }
                s
            }
        };
        let _ = writeln!(self.out, "{line}");
    }
}
