use std::io::Write;

use crate::io::parse_hslr;
use crate::solver::{solve, SolverOptions, Status};

use super::{EXIT_FAILURE, EXIT_OK};

/// An embedded instance with its known optimal value.
#[derive(Debug, Clone)]
pub struct SelfTest {
    pub name: &'static str,
    pub hslr: &'static str,
    pub optimum: f64,
    pub tol: f64,
}

pub fn builtin_cases() -> Vec<SelfTest> {
    vec![
        SelfTest {
            name: "hybrid example (n=4, m=3)",
            hslr: include_str!("../../data/mixed.hslr"),
            optimum: 8.0,
            tol: 1e-3,
        },
        SelfTest {
            name: "stable set on C4",
            hslr: include_str!("../../data/c4.hslr"),
            optimum: -2.0,
            tol: 1e-3,
        },
        SelfTest {
            name: "matrix completion 2x2",
            hslr: include_str!("../../data/matcomp.hslr"),
            optimum: 8.0,
            tol: 1e-2,
        },
    ]
}

/// Solves each case with default options; exit 0 iff every case is Optimal
/// and within tolerance of its optimum.
pub fn run_cases(cases: &[SelfTest], verbosity: u64, out: &mut dyn Write) -> i32 {
    let opts = SolverOptions::default();
    let mut failed = 0;
    for case in cases {
        let verdict = match parse_hslr(case.hslr) {
            Err(e) => Err(format!("parse error: {e}")),
            Ok(inst) => {
                let res = solve(&inst, &opts, None);
                let err = (res.pval - case.optimum).abs();
                if res.status != Status::Optimal {
                    Err(format!("status {} (pval {})", res.status, res.pval))
                } else if !(err <= case.tol) {
                    Err(format!("pval {} differs from {} by {err:e}", res.pval, case.optimum))
                } else {
                    Ok(format!(
                        "pval {} in {:.3} s, {} iterations",
                        res.pval,
                        res.wall_time.as_secs_f64(),
                        res.iterations()
                    ))
                }
            }
        };
        if verdict.is_err() {
            failed += 1;
        }
        if verbosity >= 1 {
            let _ = match &verdict {
                Ok(msg) => writeln!(out, "[PASS] {}: {msg}", case.name),
                Err(msg) => writeln!(out, "[FAIL] {}: {msg}", case.name),
            };
        }
    }
    if verbosity >= 1 {
        let _ = writeln!(out, "{} of {} tests passed", cases.len() - failed, cases.len());
    }
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

pub fn run_tests(verbosity: u64, out: &mut dyn Write) -> i32 {
    run_cases(&builtin_cases(), verbosity, out)
}
