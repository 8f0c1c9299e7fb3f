use nalgebra::{DMatrix, DVector};

use super::objective::AugLag;
use super::SolverOptions;
use crate::model::{FactoredPrimal, SdpInstance};
use crate::spectral::{min_eigpair_from, EigPair, LanczosOptions, SlackOperator};

pub(crate) const EIG_MAX_MATVECS: usize = 6000;

#[derive(Debug, Clone)]
pub struct FwOutcome {
    pub y: FactoredPrimal,
    /// Whether `y` differs from the input.
    pub took_step: bool,
    /// `⟨S, X⟩ − τ·min(0, λ_min(S))` with `S = C + A*(p + βr)`.
    pub fw_gap: f64,
    pub alpha: f64,
    pub eig: EigPair,
    /// The eigensolver missed `err_tol_eig`, so no step was attempted.
    pub eig_failed: bool,
}

pub(crate) fn eig_usable(e: &EigPair, opts: &SolverOptions) -> bool {
    e.converged || e.residual <= opts.err_tol_eig * e.value.abs().max(1.0)
}

pub(crate) fn lanczos_opts(opts: &SolverOptions, seed: u64) -> LanczosOptions {
    LanczosOptions {
        tol: opts.eps_eig,
        max_matvecs: EIG_MAX_MATVECS,
        seed,
        ..LanczosOptions::default()
    }
}

/// One Frank-Wolfe step towards the best spectraplex vertex, with exact line search.
pub fn fw_step(
    inst: &SdpInstance,
    y: &FactoredPrimal,
    p: &DVector<f64>,
    beta: f64,
    opts: &SolverOptions,
) -> FwOutcome {
    assert_eq!(y.n(), inst.n(), "factor rows must equal n");
    assert_eq!(p.len(), inst.m(), "multiplier length must equal m");
    let al = AugLag::new(inst, p, beta);
    step(&al, y, opts, None, opts.seed)
}

pub(crate) fn step(
    al: &AugLag,
    y: &FactoredPrimal,
    opts: &SolverOptions,
    start: Option<&DVector<f64>>,
    seed: u64,
) -> FwOutcome {
    let inst = al.inst;
    let tau = inst.tau();
    let ym = y.matrix();
    let r = al.residual(ym);
    let q = al.multiplier(&r);
    let eig = min_eigpair_from(&SlackOperator::new(inst, &q), start, &lanczos_opts(opts, seed));

    let sy = al.slack_times(&q, ym);
    let sx = sy.dot(ym);
    let lam = eig.value;
    let vertex_lin = if lam < 0.0 { tau * lam } else { 0.0 };
    let fw_gap = sx - vertex_lin;

    let unchanged = |eig: EigPair, eig_failed: bool| FwOutcome {
        y: y.clone(),
        took_step: false,
        fw_gap,
        alpha: 0.0,
        eig,
        eig_failed,
    };
    if !eig_usable(&eig, opts) {
        return unchanged(eig, true);
    }

    let ax = &r + inst.b();
    let av = if lam < 0.0 {
        let v = DMatrix::from_column_slice(inst.n(), 1, eig.vector.as_slice()) * tau.sqrt();
        inst.apply_a_unchecked(&v)
    } else {
        DVector::zeros(inst.m())
    };
    let dr = av - ax;
    // f(α) = f(0) − α·gap + α²·(β/2)‖dr‖²
    let curv = al.beta * dr.norm_squared();
    let alpha = if fw_gap <= 0.0 {
        0.0
    } else if curv > 0.0 {
        (fw_gap / curv).clamp(0.0, 1.0)
    } else {
        1.0
    };
    if alpha == 0.0 {
        return unchanged(eig, false);
    }

    let keep = (1.0 - alpha).max(0.0).sqrt();
    let (n, r0) = (inst.n(), ym.ncols());
    let ynew = if lam < 0.0 {
        let mut out = DMatrix::zeros(n, r0 + 1);
        out.columns_mut(0, r0).copy_from(&(ym * keep));
        out.column_mut(r0).copy_from(&(&eig.vector * (alpha * tau).sqrt()));
        out
    } else {
        ym * keep
    };
    FwOutcome {
        y: FactoredPrimal::new(ynew),
        took_step: true,
        fw_gap,
        alpha,
        eig,
        eig_failed: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{al_objective, HybridMatrix, SparseSym};

    #[test]
    fn moves_to_negative_direction() {
        // min -X_11 over Tr X <= 2, no constraints; from Y = e_2 the vertex is 2 e_1 e_1ᵀ
        let c = SparseSym::from_triplets(2, [(0, 0, -1.0)]).unwrap();
        let inst = SdpInstance::new(2, DVector::zeros(0), 2.0, vec![HybridMatrix::sparse_only(c)]).unwrap();
        let y = FactoredPrimal::new(DMatrix::from_column_slice(2, 1, &[0.0, 1.0]));
        let out = fw_step(&inst, &y, &DVector::zeros(0), 10.0, &SolverOptions::default());
        assert!(out.took_step);
        assert_eq!(out.alpha, 1.0);
        assert!((out.fw_gap - 2.0).abs() < 1e-8);
        assert_eq!(out.y.rank(), 2);
        let f = al_objective(&inst, &out.y, &DVector::zeros(0), 10.0).unwrap();
        assert!((f + 2.0).abs() < 1e-8);
    }

    #[test]
    fn psd_slack_shrinks_towards_zero() {
        // C = I, optimum X = 0: the vertex is the origin
        let c = SparseSym::from_triplets(2, [(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        let inst = SdpInstance::new(2, DVector::zeros(0), 1.0, vec![HybridMatrix::sparse_only(c)]).unwrap();
        let y = FactoredPrimal::new(DMatrix::from_column_slice(2, 1, &[0.5, 0.5]));
        let out = fw_step(&inst, &y, &DVector::zeros(0), 1.0, &SolverOptions::default());
        assert!(out.took_step);
        assert_eq!(out.y.rank(), 1);
        assert!(out.y.frob_sq() < 1e-20);
    }

    #[test]
    fn line_search_is_monotone() {
        let c = SparseSym::from_triplets(3, [(0, 0, 1.0), (0, 2, -2.0), (1, 1, -0.5)]).unwrap();
        let a = SparseSym::from_triplets(3, [(0, 1, 1.0), (2, 2, 1.0)]).unwrap();
        let inst = SdpInstance::new(
            3,
            DVector::from_element(1, 0.7),
            3.0,
            vec![HybridMatrix::sparse_only(c), HybridMatrix::sparse_only(a)],
        )
        .unwrap();
        let y = FactoredPrimal::new(DMatrix::from_column_slice(3, 1, &[0.2, -0.1, 0.4]));
        let p = DVector::from_element(1, -0.4);
        let f0 = al_objective(&inst, &y, &p, 10.0).unwrap();
        let out = fw_step(&inst, &y, &p, 10.0, &SolverOptions::default());
        let f1 = al_objective(&inst, &out.y, &p, 10.0).unwrap();
        assert!(f1 <= f0 + 1e-12);
        assert!(out.y.in_spectraplex(3.0));
    }
}
