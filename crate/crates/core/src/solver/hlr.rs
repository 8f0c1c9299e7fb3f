use std::time::Instant;

use nalgebra::DVector;

use super::descent::{descend, DescentOutcome};
use super::frank_wolfe::{self, FwOutcome};
use super::objective::AugLag;
use super::{Counters, SolverOptions};
use crate::model::{FactoredPrimal, SdpInstance};

/// FW steps are skipped below `FW_GAP_FACTOR · err_tol_fista`.
pub const FW_GAP_FACTOR: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct HlrOutcome {
    pub y: FactoredPrimal,
    /// Execution order over `{A, F}`.
    pub steps: String,
    pub counters: Counters,
    /// Stationarity measure after the last descent.
    pub grad_map: f64,
    /// Gap of the last FW check; NaN if none ran.
    pub fw_gap: f64,
    pub converged: bool,
    pub eig_failed: bool,
}

/// Per-solve state carried across subproblems.
#[derive(Debug, Default)]
pub(crate) struct HlrState {
    pub vertex: Option<DVector<f64>>,
}

pub(crate) enum InnerStep<'a> {
    Descent(&'a DescentOutcome),
    FrankWolfe(&'a FwOutcome),
}

/// Alternates descent runs with FW rank-one updates on the AL subproblem.
pub fn hlr_subproblem(
    inst: &SdpInstance,
    y: &FactoredPrimal,
    p: &DVector<f64>,
    beta: f64,
    opts: &SolverOptions,
    target: f64,
) -> HlrOutcome {
    assert_eq!(y.n(), inst.n(), "factor rows must equal n");
    assert_eq!(p.len(), inst.m(), "multiplier length must equal m");
    let al = AugLag::new(inst, p, beta);
    run(&al, y.clone(), opts, target, &mut HlrState::default(), None, &mut |_| {})
}

pub(crate) fn run(
    al: &AugLag,
    mut y: FactoredPrimal,
    opts: &SolverOptions,
    target: f64,
    state: &mut HlrState,
    deadline: Option<Instant>,
    on_step: &mut dyn FnMut(InnerStep),
) -> HlrOutcome {
    let mut steps = String::new();
    let mut counters = Counters::default();
    let mut grad_map = f64::INFINITY;
    let mut fw_gap = f64::NAN;
    let mut converged = false;
    let mut eig_failed = false;

    for _ in 0..opts.maxiter_hlr {
        let d = descend(al, y.into_matrix(), opts, target, deadline);
        steps.push('A');
        counters.fista_calls += d.fista_calls;
        counters.acg_iterations += d.iterations;
        grad_map = d.grad_map;
        converged = d.converged;
        on_step(InnerStep::Descent(&d));
        y = d.y;
        if deadline.is_some_and(|t| Instant::now() >= t) {
            break;
        }

        let fw = frank_wolfe::step(al, &y, opts, state.vertex.as_ref(), opts.seed);
        on_step(InnerStep::FrankWolfe(&fw));
        fw_gap = fw.fw_gap;
        if fw.eig_failed {
            eig_failed = true;
            break;
        }
        state.vertex = Some(fw.eig.vector.clone());
        if fw.took_step && fw.fw_gap > FW_GAP_FACTOR * opts.err_tol_fista {
            steps.push('F');
            counters.fw_calls += 1;
            y = fw.y;
            converged = false;
        } else if converged {
            break;
        }
    }

    HlrOutcome {
        y,
        steps,
        counters,
        grad_map,
        fw_gap,
        converged,
        eig_failed,
    }
}
