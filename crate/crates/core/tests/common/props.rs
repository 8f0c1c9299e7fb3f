//! Property checks shared by the proptest suites and the acceptance runner.

use lrsdp::cli::parse_args;
use lrsdp::io::{merge_options, parse_config, parse_hslr, write_hslr, OptionSet};
use lrsdp::model::{al_gradient, al_objective, apply_a, apply_astar_vec, hm_dense, FactoredPrimal};
use lrsdp::solver::{adap_descent, fw_step, hlr_subproblem, truncate_rank, SolverOptions};
use lrsdp::spectral::{min_eigpair, SlackOperator};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::Rng;

use super::instances::{random_factor, rng, sized_instance};
use super::oracle::DenseProblem;

pub type PropResult = Result<(), TestCaseError>;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// `⟨A(YYᵀ), p⟩ = ⟨A*(p), YYᵀ⟩`, with `A*(p)` applied column by column.
pub fn adjoint_identity(seed: u64, r: usize) -> PropResult {
    let inst = sized_instance(seed);
    let mut g = rng(seed.wrapping_add(1));
    let y = random_factor(&mut g, inst.n(), r, inst.tau());
    let p = DVector::from_fn(inst.m(), |_, _| g.gen_range(-2.0..2.0));
    let lhs = apply_a(&inst, &y).unwrap().dot(&p);
    let mut rhs = 0.0;
    for k in 0..r {
        let col = y.matrix().column(k).into_owned();
        rhs += col.dot(&apply_astar_vec(&inst, &p, &col).unwrap());
    }
    let dense = DenseProblem::from_instance(&inst);
    let x = y.matrix() * y.matrix().transpose();
    let reference = dense.adjoint(&p).dot(&x);
    prop_assert!(close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
    prop_assert!(close(lhs, reference, 1e-12), "{lhs} vs dense {reference}");
    Ok(())
}

/// Central differences of the AL objective against its analytic gradient.
pub fn gradient_matches_differences(seed: u64, r: usize, beta: f64) -> PropResult {
    let inst = sized_instance(seed);
    let mut g = rng(seed.wrapping_add(2));
    let y = random_factor(&mut g, inst.n(), r, inst.tau());
    let p = DVector::from_fn(inst.m(), |_, _| g.gen_range(-2.0..2.0));
    let grad = al_gradient(&inst, &y, &p, beta).unwrap();
    let h = 1e-6;
    let mut fd = DMatrix::zeros(inst.n(), r);
    for i in 0..inst.n() {
        for k in 0..r {
            let mut plus = y.matrix().clone();
            let mut minus = y.matrix().clone();
            plus[(i, k)] += h;
            minus[(i, k)] -= h;
            let fp = al_objective(&inst, &FactoredPrimal::new(plus), &p, beta).unwrap();
            let fm = al_objective(&inst, &FactoredPrimal::new(minus), &p, beta).unwrap();
            fd[(i, k)] = (fp - fm) / (2.0 * h);
        }
    }
    let rel = (&fd - &grad).norm() / grad.norm().max(1.0);
    prop_assert!(rel <= 1e-5, "relative error {rel:e}");
    Ok(())
}

/// Lanczos on a random dense matrix and on an instance slack operator.
pub fn lanczos_matches_dense(seed: u64, n: usize) -> PropResult {
    let mut g = rng(seed);
    let a = DMatrix::from_fn(n, n, |_, _| g.gen_range(-1.0..1.0));
    let s = (&a + a.transpose()) * 0.5;
    let exact = SymmetricEigen::new(s.clone()).eigenvalues.min();
    let pair = min_eigpair(&s, 1e-10, 6000, seed);
    let scale = exact.abs().max(1.0);
    prop_assert!(pair.converged, "not converged, residual {:e}", pair.residual);
    prop_assert!((pair.value - exact).abs() <= 1e-8 * scale, "{} vs {exact}", pair.value);
    let res = (&s * &pair.vector - &pair.vector * pair.value).norm();
    prop_assert!(res <= 1e-8 * scale, "residual {res:e}");

    let inst = sized_instance(seed);
    let q = DVector::from_fn(inst.m(), |_, _| g.gen_range(-2.0..2.0));
    let dense = DenseProblem::from_instance(&inst);
    let slack = &dense.c + dense.adjoint(&q);
    let exact = SymmetricEigen::new(slack.clone()).eigenvalues.min();
    let pair = min_eigpair(&SlackOperator::new(&inst, &q), 1e-10, 6000, seed);
    prop_assert!((pair.value - exact).abs() <= 1e-8 * exact.abs().max(1.0), "{} vs {exact}", pair.value);
    Ok(())
}

/// Descent, Frank-Wolfe and their combination never raise the AL value and
/// stay inside the trace ball.
pub fn al_monotone_across_steps(seed: u64, r: usize, beta: f64) -> PropResult {
    let inst = sized_instance(seed);
    let mut g = rng(seed.wrapping_add(3));
    let y = random_factor(&mut g, inst.n(), r, inst.tau());
    let p = DVector::from_fn(inst.m(), |_, _| g.gen_range(-2.0..2.0));
    let opts = SolverOptions::default();
    let f0 = al_objective(&inst, &y, &p, beta).unwrap();
    let slack = 1e-10 * (1.0 + f0.abs());
    let tau = inst.tau() * (1.0 + 1e-12);

    let a = adap_descent(&inst, &y, &p, beta, &opts, 1e-6);
    let fa = al_objective(&inst, &a.y, &p, beta).unwrap();
    prop_assert!(fa <= f0 + slack, "descent raised {f0} to {fa}");
    prop_assert!(a.y.in_spectraplex(tau));

    let f = fw_step(&inst, &a.y, &p, beta, &opts);
    let ff = al_objective(&inst, &f.y, &p, beta).unwrap();
    prop_assert!(ff <= fa + slack, "FW raised {fa} to {ff}");
    prop_assert!(f.y.in_spectraplex(tau));
    prop_assert!((0.0..=1.0).contains(&f.alpha));

    let h = hlr_subproblem(&inst, &y, &p, beta, &opts, 1e-6);
    let fh = al_objective(&inst, &h.y, &p, beta).unwrap();
    prop_assert!(fh <= f0 + slack, "HLR raised {f0} to {fh}");
    prop_assert!(h.y.in_spectraplex(tau));
    Ok(())
}

const PRECEDENCE_KEYS: &[&str] = &["beta0", "eps_gap", "L_inc_fista", "sigma_fista", "time_limit"];

/// Per key: command line, then config file, then compiled default.
/// `choice[k]` is 0 (unset), 1 (config only), 2 (CLI only) or 3 (both).
pub fn precedence(choice: &[u8], values: &[(f64, f64)]) -> PropResult {
    let mut argv = vec!["lrsdp".to_string()];
    let mut cfg_text = String::from("# generated\n");
    for ((key, &c), &(cli_v, cfg_v)) in PRECEDENCE_KEYS.iter().zip(choice).zip(values) {
        if c & 1 != 0 {
            cfg_text.push_str(&format!("{key} = {cfg_v:e}\n"));
        }
        if c & 2 != 0 {
            argv.push(format!("--{key}"));
            argv.push(format!("{cli_v:e}"));
        }
    }
    let inv = parse_args(&argv).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let cfg = parse_config(&cfg_text).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let defaults = OptionSet::defaults();
    let merged = merge_options(&inv.overrides, &cfg, &defaults);
    for ((key, &c), &(cli_v, cfg_v)) in PRECEDENCE_KEYS.iter().zip(choice).zip(values) {
        let expected = match c {
            2 | 3 => cli_v,
            1 => cfg_v,
            _ => defaults.real(key).unwrap(),
        };
        prop_assert_eq!(merged.real(key), Some(expected), "{}", key);
    }
    Ok(())
}

/// `parse(write(inst))` gives back the same dense data bit for bit.
pub fn hslr_round_trip(seed: u64) -> PropResult {
    let inst = sized_instance(seed);
    let back = parse_hslr(&write_hslr(&inst)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(back.n(), inst.n());
    prop_assert_eq!(back.m(), inst.m());
    prop_assert_eq!(back.tau(), inst.tau());
    prop_assert_eq!(back.b(), inst.b());
    for (a, b) in inst.matrices().iter().zip(back.matrices()) {
        prop_assert_eq!(hm_dense(a).unwrap(), hm_dense(b).unwrap());
    }
    Ok(())
}

/// Truncation keeps `YYᵀ` when the dropped singular values are zero.
pub fn truncation_keeps_product(seed: u64, n: usize, r: usize, extra: usize) -> PropResult {
    let mut g = rng(seed);
    let core = DMatrix::from_fn(n, r, |_, _| g.gen_range(-1.0..1.0));
    let mix = DMatrix::from_fn(r, r + extra, |_, _| g.gen_range(-1.0..1.0));
    let y = &core * mix;
    let t = truncate_rank(&FactoredPrimal::new(y.clone()), 1e-7);
    prop_assert!(t.rank() <= r.max(1));
    let x0 = &y * y.transpose();
    let x1 = t.matrix() * t.matrix().transpose();
    prop_assert!((&x0 - &x1).norm() <= 1e-9 * (1.0 + x0.norm()));
    Ok(())
}

fn show<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| format!("{e}"))
}

/// Runs every suite for `cases` cases each; returns one `(name, result)` per suite.
pub fn run_all(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    let config = || Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut out = Vec::new();
    out.push((
        "adjoint identity",
        show(TestRunner::new(config()).run(&(any::<u64>(), 1usize..4), |(s, r)| adjoint_identity(s, r))),
    ));
    out.push((
        "finite-difference gradient",
        show(TestRunner::new(config()).run(&(any::<u64>(), 1usize..4, 1.0f64..100.0), |(s, r, b)| {
            gradient_matches_differences(s, r, b)
        })),
    ));
    out.push((
        "eigensolver vs dense",
        show(TestRunner::new(config()).run(&(any::<u64>(), 1usize..40), |(s, n)| lanczos_matches_dense(s, n))),
    ));
    out.push((
        "AL monotone across A/F steps",
        show(TestRunner::new(config()).run(&(any::<u64>(), 1usize..4, 1.0f64..100.0), |(s, r, b)| {
            al_monotone_across_steps(s, r, b)
        })),
    ));
    out.push((
        "option precedence",
        show(TestRunner::new(config()).run(&precedence_strategy(), |(c, v)| precedence(&c, &v))),
    ));
    out.push((
        "HSLR round trip",
        show(TestRunner::new(config()).run(&any::<u64>(), hslr_round_trip)),
    ));
    out
}

pub fn precedence_strategy() -> impl Strategy<Value = (Vec<u8>, Vec<(f64, f64)>)> {
    let k = PRECEDENCE_KEYS.len();
    (
        prop::collection::vec(0u8..4, k),
        prop::collection::vec((0.01f64..0.99, 0.01f64..0.99), k),
    )
}
