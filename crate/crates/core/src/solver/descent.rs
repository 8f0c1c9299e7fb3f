//! Accelerated projected gradient on the factor ball `‖Y‖_F² <= τ`.
//!
//! Each FISTA run backtracks on the curvature estimate `L` and restarts its
//! momentum whenever the objective would increase, so accepted iterates are
//! monotone. A run ends once the projected-gradient residual drops below
//! `max(err_tol_fista, sigma_fista · target)`.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use super::objective::{project_ball, AugLag};
use super::SolverOptions;
use crate::model::{FactoredPrimal, SdpInstance};

const L_CEILING: f64 = 1e30;
/// Exact stationarity is re-measured at least this often.
const EXACT_CHECK_EVERY: usize = 25;

#[derive(Debug, Clone)]
pub struct DescentOutcome {
    pub y: FactoredPrimal,
    pub objective: f64,
    pub iterations: usize,
    pub fista_calls: usize,
    /// Last accepted curvature estimate.
    pub lipschitz: f64,
    /// `L ‖Y − P(Y − ∇f(Y)/L)‖_F` at the returned point.
    pub grad_map: f64,
    pub converged: bool,
}

/// Tolerance for comparing a sum of two terms against zero.
fn rounding(a: f64, b: f64) -> f64 {
    1e-13 * (a.abs() + b.abs())
}

/// AL descent from `y` for fixed `(p, β)` towards a stationarity `target`.
pub fn adap_descent(
    inst: &SdpInstance,
    y: &FactoredPrimal,
    p: &DVector<f64>,
    beta: f64,
    opts: &SolverOptions,
    target: f64,
) -> DescentOutcome {
    assert_eq!(y.n(), inst.n(), "factor rows must equal n");
    assert_eq!(p.len(), inst.m(), "multiplier length must equal m");
    let al = AugLag::new(inst, p, beta);
    descend(&al, y.matrix().clone(), opts, target, None)
}

fn grad_map(al: &AugLag, y: &DMatrix<f64>, g: &DMatrix<f64>, l: f64) -> f64 {
    let mut step = y - g / l;
    project_ball(&mut step, al.inst.tau());
    l * (y - step).norm()
}

pub(crate) fn descend(
    al: &AugLag,
    y0: DMatrix<f64>,
    opts: &SolverOptions,
    target: f64,
    deadline: Option<Instant>,
) -> DescentOutcome {
    let radius_sq = al.inst.tau();
    let threshold = opts.err_tol_fista.max(opts.sigma_fista * target);
    let l_floor = opts.l0_fista;
    let mut l = opts.l0_fista.max(1.0 / opts.lam0_aipp);

    let mut y = y0;
    project_ball(&mut y, radius_sq);
    let ey = al.eval(&y);
    let mut fy = ey.value;
    let mut ry = ey.residual;
    let mut iterations = 0;
    let mut fista_calls = 0;
    let mut converged = false;
    let mut last_map = f64::INFINITY;

    // values are tracked relative to f(y) through exact differences
    'runs: for _ in 0..opts.maxiter_aipp {
        fista_calls += 1;
        let mut z = y.clone();
        let mut rz = ry.clone();
        let mut fz_rel = 0.0;
        let mut t = 1.0_f64;
        let mut at_y = true;

        for it in 0..opts.maxiter_fista {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                break 'runs;
            }
            iterations += 1;
            let gz = al.gradient(&z, &rz);

            l = l_floor.max(opts.mu_fista * l);
            let (cand, r_c, df, d_norm) = loop {
                let mut cand = &z - &gz / l;
                project_ball(&mut cand, radius_sq);
                let d = &cand - &z;
                let (r_c, df) = al.delta(&z, &rz, &cand);
                let dsq = d.norm_squared();
                let lin = gz.dot(&d);
                let model = lin + (1.0 + opts.chi_fista) * 0.5 * l * dsq;
                if df <= model + rounding(lin, l * dsq) || l >= L_CEILING {
                    break (cand, r_c, df, dsq.sqrt());
                }
                l *= opts.l_inc_fista;
            };

            let rel_new = fz_rel + df;
            if rel_new > rounding(fz_rel, df) {
                if at_y {
                    // descent test at z = y cannot fail beyond rounding; stop this run
                    break;
                }
                z = y.clone();
                rz = ry.clone();
                fz_rel = 0.0;
                t = 1.0;
                at_y = true;
                continue;
            }

            let map_z = l * d_norm;
            let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let momentum = (t - 1.0) / t_new;
            let prev = std::mem::replace(&mut y, cand);
            ry = r_c;
            fy += rel_new;
            t = t_new;
            if momentum > 0.0 {
                z = &y + (&y - &prev) * momentum;
                (rz, fz_rel) = al.delta(&y, &ry, &z);
                at_y = false;
            } else {
                z = y.clone();
                rz = ry.clone();
                fz_rel = 0.0;
                at_y = true;
            }

            if map_z <= threshold || (it + 1) % EXACT_CHECK_EVERY == 0 {
                let gy = al.gradient(&y, &ry);
                last_map = grad_map(al, &y, &gy, l);
                if last_map <= threshold {
                    converged = true;
                    break 'runs;
                }
            }
        }
    }

    if !converged {
        let gy = al.gradient(&y, &ry);
        last_map = grad_map(al, &y, &gy, l);
        converged = last_map <= threshold;
    }

    DescentOutcome {
        y: FactoredPrimal::new(y),
        objective: fy,
        iterations,
        fista_calls,
        lipschitz: l,
        grad_map: last_map,
        converged,
    }
}
