//! Augmented Lagrangian outer loop over factored iterates `X = Y Yᵀ`.
//!
//! The solver works on the scaled instance (trace bound 1) and reports
//! feasibility and gap on the original one, after unscaling `(Y, p, θ)`.

mod descent;
mod frank_wolfe;
mod hlr;
mod objective;
mod options;
mod rank;
mod termination;

use std::fmt;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use descent::{adap_descent, DescentOutcome};
pub use frank_wolfe::{fw_step, FwOutcome};
pub use hlr::{hlr_subproblem, HlrOutcome, FW_GAP_FACTOR};
pub use options::SolverOptions;
pub use rank::{truncate_rank, RANK_TOL};
pub use termination::{check_termination, compute_theta, update_beta, Termination, ThetaEstimate};

use crate::model::{FactoredPrimal, SdpInstance};
use crate::scaling::{scale_instance, scale_primal, unscale_dual, unscale_primal, ScaleParams};
use hlr::{HlrState, InnerStep};
use objective::AugLag;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    IterationLimit,
    TimeLimit,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "Optimal",
            Status::IterationLimit => "IterationLimit",
            Status::TimeLimit => "TimeLimit",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub fista_calls: usize,
    pub acg_iterations: usize,
    pub fw_calls: usize,
}

impl std::ops::AddAssign for Counters {
    fn add_assign(&mut self, o: Self) {
        self.fista_calls += o.fista_calls;
        self.acg_iterations += o.acg_iterations;
        self.fw_calls += o.fw_calls;
    }
}

/// One row of the iteration table. Values are in scaled units.
#[derive(Debug, Clone, PartialEq)]
pub struct IterRecord {
    pub iter: usize,
    pub rank: usize,
    pub gap: Option<f64>,
    pub feas: f64,
    pub pval: f64,
    pub dval: Option<f64>,
    pub pnlty: f64,
    pub steps: String,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Factor in original units.
    pub y: FactoredPrimal,
    pub p: DVector<f64>,
    pub theta: f64,
    pub status: Status,
    pub counters: Counters,
    pub records: Vec<IterRecord>,
    pub wall_time: Duration,
    /// `C • X` on the original instance.
    pub pval: f64,
    /// NaN when the last `θ` was not reliable.
    pub dval: f64,
    pub scaled_pval: f64,
    pub scaled_dval: f64,
    pub feas: f64,
    pub gap: f64,
    /// Final penalty in scaled units.
    pub beta: f64,
    pub scale: ScaleParams,
}

impl SolveResult {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}

/// Inner-loop notification passed to [`SolveObserver::on_inner`].
#[derive(Debug, Clone, Copy)]
pub enum InnerEvent<'a> {
    Descent {
        outer: usize,
        outcome: &'a DescentOutcome,
    },
    FrankWolfe {
        outer: usize,
        outcome: &'a FwOutcome,
    },
    Theta {
        outer: usize,
        estimate: &'a ThetaEstimate,
    },
}

/// Progress hooks. Called between steps only; never affects the iterates.
pub trait SolveObserver {
    fn on_iteration(&mut self, _rec: &IterRecord) {}
    fn wants_inner(&self) -> bool {
        false
    }
    fn on_inner(&mut self, _event: InnerEvent<'_>) {}
}

pub struct NoObserver;

impl SolveObserver for NoObserver {}

/// `n x 1` start: seeded random unit vector times `√τ / 2`.
pub fn default_initial(inst: &SdpInstance, seed: u64) -> FactoredPrimal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DMatrix::from_fn(inst.n(), 1, |_, _| rng.gen_range(-1.0..1.0));
    let norm = v.norm();
    if norm > 0.0 {
        v /= norm;
    } else {
        v[(0, 0)] = 1.0;
    }
    FactoredPrimal::new(v * (0.5 * inst.tau().sqrt()))
}

pub fn solve(inst: &SdpInstance, opts: &SolverOptions, warm: Option<&FactoredPrimal>) -> SolveResult {
    solve_observed(inst, opts, warm, &mut NoObserver)
}

/// Full solve. `warm` is in original units; it is pulled into the trace ball if needed.
pub fn solve_observed(
    inst: &SdpInstance,
    opts: &SolverOptions,
    warm: Option<&FactoredPrimal>,
    observer: &mut dyn SolveObserver,
) -> SolveResult {
    let start = Instant::now();
    let deadline = start.checked_add(Duration::from_secs_f64(opts.time_limit.min(1e9)));
    let sp = ScaleParams::for_instance(inst, opts.scale_a, opts.scale_c)
        .expect("validated options give positive scale factors");
    let scaled = scale_instance(inst, &sp);

    let mut y = match warm {
        Some(w) => {
            assert_eq!(w.n(), inst.n(), "warm start rows must equal n");
            let mut m = scale_primal(w, &sp).into_matrix();
            objective::project_ball(&mut m, scaled.tau());
            FactoredPrimal::new(m)
        }
        None => default_initial(&scaled, opts.seed),
    };
    let mut p = DVector::zeros(inst.m());
    let mut beta = opts.beta0;
    let mut theta = 0.0;
    let mut theta_reliable = true;

    let mut feas_prev = check_termination(inst, &unscale_primal(&y, &sp), &p, 0.0, opts).feas;

    let mut counters = Counters::default();
    let mut records = Vec::new();
    let mut state = HlrState::default();
    let mut theta_start: Option<DVector<f64>> = None;
    let mut status = Status::IterationLimit;
    let mut last = None;

    // fixed inner stationarity target; a target growing with β lets the
    // descent stop early once β is large
    let target = opts.err_tol_fista.max(0.1 * opts.beta0 * opts.eps_pfeas);

    for k in 0..opts.maxiter_hallar {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            status = Status::TimeLimit;
            break;
        }
        let al = AugLag::new(&scaled, &p, beta);
        let wants = observer.wants_inner();
        let out = hlr::run(&al, y, opts, target, &mut state, deadline, &mut |ev| {
            if wants {
                let event = match ev {
                    InnerStep::Descent(d) => InnerEvent::Descent { outer: k, outcome: d },
                    InnerStep::FrankWolfe(f) => InnerEvent::FrankWolfe { outer: k, outcome: f },
                };
                observer.on_inner(event);
            }
        });
        counters += out.counters;
        y = out.y;

        let r = scaled.apply_a_unchecked(y.matrix()) - scaled.b();
        p += &r * beta;

        let est = termination::theta_from(&scaled, &p, opts, theta_start.as_ref(), opts.seed);
        if wants {
            observer.on_inner(InnerEvent::Theta {
                outer: k,
                estimate: &est,
            });
        }
        theta_start = Some(est.eig.vector.clone());
        theta = est.theta;
        theta_reliable = est.reliable;

        let dual = unscale_dual(&p, theta, &sp);
        let y_orig = unscale_primal(&y, &sp);
        let theta_for_check = if theta_reliable { dual.theta } else { f64::NAN };
        let term = check_termination(inst, &y_orig, &dual.p, theta_for_check, opts);

        let scaled_pval = scaled.cost().quadform_unchecked(y.matrix());
        let scaled_dval = -scaled.b().dot(&p) - scaled.tau() * theta;
        let rec = IterRecord {
            iter: k,
            rank: y.rank(),
            gap: (!term.gap.is_nan()).then_some(term.gap),
            feas: term.feas,
            pval: scaled_pval,
            dval: theta_reliable.then_some(scaled_dval),
            pnlty: beta,
            steps: out.steps,
        };
        observer.on_iteration(&rec);
        records.push(rec);
        last = Some((term, scaled_pval, scaled_dval));

        if term.done {
            status = Status::Optimal;
            break;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            status = Status::TimeLimit;
            break;
        }
        beta = update_beta(beta, feas_prev, term.feas, opts);
        feas_prev = term.feas;
        y = truncate_rank(&y, RANK_TOL);
    }

    let y_orig = unscale_primal(&y, &sp);
    let dual = unscale_dual(&p, theta, &sp);
    let (term, scaled_pval, scaled_dval) = match last {
        Some(v) => v,
        None => {
            let t = check_termination(inst, &y_orig, &dual.p, dual.theta, opts);
            let spv = scaled.cost().quadform_unchecked(y.matrix());
            (t, spv, -scaled.b().dot(&p) - scaled.tau() * theta)
        }
    };
    SolveResult {
        y: y_orig,
        p: dual.p,
        theta: dual.theta,
        status,
        counters,
        records,
        wall_time: start.elapsed(),
        pval: term.pval,
        dval: term.dval,
        scaled_pval,
        scaled_dval: if theta_reliable { scaled_dval } else { f64::NAN },
        feas: term.feas,
        gap: term.gap,
        beta,
        scale: sp,
    }
}
