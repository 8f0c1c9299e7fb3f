use nalgebra::DVector;

use super::frank_wolfe::{eig_usable, lanczos_opts};
use super::SolverOptions;
use crate::model::{FactoredPrimal, SdpInstance};
use crate::spectral::{min_eigpair_from, EigPair, SlackOperator};

/// `θ = max(0, −λ_min(C + A*(p)))` with the eigenpair behind it.
#[derive(Debug, Clone)]
pub struct ThetaEstimate {
    pub theta: f64,
    pub eig: EigPair,
    /// False when the eigensolver missed `err_tol_eig`; the dual value is then undefined.
    pub reliable: bool,
}

impl ThetaEstimate {
    pub fn defined(&self) -> Option<f64> {
        self.reliable.then_some(self.theta)
    }
}

pub fn compute_theta(inst: &SdpInstance, p: &DVector<f64>, opts: &SolverOptions) -> ThetaEstimate {
    theta_from(inst, p, opts, None, opts.seed)
}

pub(crate) fn theta_from(
    inst: &SdpInstance,
    p: &DVector<f64>,
    opts: &SolverOptions,
    start: Option<&DVector<f64>>,
    seed: u64,
) -> ThetaEstimate {
    let eig = min_eigpair_from(&SlackOperator::new(inst, p), start, &lanczos_opts(opts, seed));
    ThetaEstimate {
        theta: (-eig.value).max(0.0),
        reliable: eig_usable(&eig, opts),
        eig,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Termination {
    pub pval: f64,
    /// NaN when `θ` is undefined.
    pub dval: f64,
    /// `‖A(X) − b‖₂ / (1 + ‖b‖₁)`.
    pub feas: f64,
    /// `|pval − dval| / (1 + |pval| + |dval|)`, NaN when `dval` is.
    pub gap: f64,
    pub done: bool,
}

/// Termination metrics. Pass `theta = NaN` when no reliable `θ` is available.
pub fn check_termination(
    inst: &SdpInstance,
    y: &FactoredPrimal,
    p: &DVector<f64>,
    theta: f64,
    opts: &SolverOptions,
) -> Termination {
    assert_eq!(y.n(), inst.n(), "factor rows must equal n");
    assert_eq!(p.len(), inst.m(), "multiplier length must equal m");
    let ym = y.matrix();
    let r = inst.apply_a_unchecked(ym) - inst.b();
    let feas = r.norm() / (1.0 + inst.b().lp_norm(1));
    let pval = inst.cost().quadform_unchecked(ym);
    let dval = if theta.is_nan() {
        f64::NAN
    } else {
        -inst.b().dot(p) - inst.tau() * theta
    };
    let gap = (pval - dval).abs() / (1.0 + pval.abs() + dval.abs());
    Termination {
        pval,
        dval,
        feas,
        gap,
        done: feas <= opts.eps_pfeas && gap <= opts.eps_gap,
    }
}

/// Grow `β` when feasibility stalls above `eps_pfeas`, shrink it when
/// feasibility improves sharply.
pub fn update_beta(beta: f64, feas_prev: f64, feas: f64, opts: &SolverOptions) -> f64 {
    if feas > 0.5 * feas_prev && feas > opts.eps_pfeas {
        (beta * opts.beta_inc).min(opts.beta_max)
    } else if feas < 0.05 * feas_prev {
        (beta / opts.beta_inc).max(opts.beta_min)
    } else {
        beta
    }
}
