//! Smallest eigenpair of implicitly defined symmetric operators.
//!
//! Explicitly restarted Lanczos with full reorthogonalization. Each cycle
//! builds a Krylov basis of at most `krylov_dim` vectors, extracts the smallest
//! Ritz pair from the tridiagonal projection and restarts from that Ritz
//! vector. On breakdown the basis is extended with a fresh random direction
//! orthogonal to everything seen so far, so that eigenvalues outside the
//! starting vector's invariant subspace are still found.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{HybridMatrix, SdpInstance};

pub trait SymOperator {
    fn dim(&self) -> usize;
    /// `out = S x`.
    fn apply(&self, x: &[f64], out: &mut [f64]);
}

impl SymOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.nrows();
        out.iter_mut().for_each(|o| *o = 0.0);
        for j in 0..n {
            let xj = x[j];
            if xj != 0.0 {
                let col = self.column(j);
                for i in 0..n {
                    out[i] += col[i] * xj;
                }
            }
        }
    }
}

/// `S = C + A*(q) + shift·I` for an instance, applied through hybrid matvecs.
pub struct SlackOperator<'a> {
    inst: &'a SdpInstance,
    q: &'a DVector<f64>,
    shift: f64,
}

impl<'a> SlackOperator<'a> {
    pub fn new(inst: &'a SdpInstance, q: &'a DVector<f64>) -> Self {
        assert_eq!(q.len(), inst.m(), "multiplier length must equal m");
        Self {
            inst,
            q,
            shift: 0.0,
        }
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }
}

impl SymOperator for SlackOperator<'_> {
    fn dim(&self) -> usize {
        self.inst.n()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().zip(x).for_each(|(o, xi)| *o = self.shift * xi);
        self.inst.cost().matvec_add(1.0, x, out);
        let cons: &[HybridMatrix] = self.inst.constraints();
        for (a, &w) in cons.iter().zip(self.q.iter()) {
            a.matvec_add(w, x, out);
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigPair {
    pub value: f64,
    pub vector: DVector<f64>,
    pub residual: f64,
    pub converged: bool,
    pub matvecs: usize,
    pub restarts: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Converged when `‖Sv − λv‖ <= tol · max(1, |λ|)`.
    pub tol: f64,
    pub max_matvecs: usize,
    pub krylov_dim: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_matvecs: 4000,
            krylov_dim: 60,
            seed: 0,
        }
    }
}

/// Smallest eigenpair of `opr` from a seeded random start.
pub fn min_eigpair(opr: &dyn SymOperator, tol: f64, maxit: usize, seed: u64) -> EigPair {
    let opts = LanczosOptions {
        tol,
        max_matvecs: maxit,
        seed,
        ..LanczosOptions::default()
    };
    min_eigpair_from(opr, None, &opts)
}

/// Like [`min_eigpair`], warm-started near `start` when given.
pub fn min_eigpair_from(
    opr: &dyn SymOperator,
    start: Option<&DVector<f64>>,
    opts: &LanczosOptions,
) -> EigPair {
    let n = opr.dim();
    assert!(n >= 1, "operator dimension must be positive");
    assert!(opts.tol > 0.0, "tolerance must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut v0 = random_unit(n, &mut rng);
    if let Some(s) = start {
        let norm = s.norm();
        if s.len() == n && norm > 0.0 && norm.is_finite() {
            // small random admixture keeps the start out of exact invariant subspaces
            v0 = s / norm + v0 * 1e-3;
            v0.normalize_mut();
        }
    }

    let kdim = opts.krylov_dim.max(2).min(n);
    let budget = opts.max_matvecs.max(2);
    let mut matvecs = 0usize;
    let mut restarts = 0usize;
    let mut best: Option<EigPair> = None;
    let mut w = vec![0.0; n];

    loop {
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(kdim);
        let mut alphas: Vec<f64> = Vec::with_capacity(kdim);
        let mut betas: Vec<f64> = Vec::with_capacity(kdim);
        basis.push(v0.clone());
        let room = budget.saturating_sub(matvecs + 1).max(1);
        let steps = kdim.min(room);

        for j in 0..steps {
            opr.apply(basis[j].as_slice(), &mut w);
            matvecs += 1;
            let mut wv = DVector::from_column_slice(&w);
            let alpha = basis[j].dot(&wv);
            alphas.push(alpha);
            if j + 1 == steps {
                break;
            }
            wv.axpy(-alpha, &basis[j], 1.0);
            if j > 0 {
                wv.axpy(-betas[j - 1], &basis[j - 1], 1.0);
            }
            reorthogonalize(&mut wv, &basis);
            let beta = wv.norm();
            let scale = alpha.abs().max(betas.last().copied().unwrap_or(0.0)).max(1.0);
            if beta <= 1e-12 * scale {
                if basis.len() == n {
                    break;
                }
                // invariant subspace: continue with a fresh orthogonal direction
                let mut fresh = random_unit(n, &mut rng);
                reorthogonalize(&mut fresh, &basis);
                let fnorm = fresh.norm();
                if fnorm <= 1e-10 {
                    break;
                }
                betas.push(0.0);
                basis.push(fresh / fnorm);
            } else {
                betas.push(beta);
                basis.push(wv / beta);
            }
        }

        let k = alphas.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alphas[i];
            if i + 1 < k {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (imin, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        let s = eig.eigenvectors.column(imin);
        let mut x = DVector::zeros(n);
        for (i, bi) in basis.iter().take(k).enumerate() {
            x.axpy(s[i], bi, 1.0);
        }
        let xn = x.norm();
        if xn == 0.0 || !xn.is_finite() {
            x = v0.clone();
        } else {
            x /= xn;
        }

        opr.apply(x.as_slice(), &mut w);
        matvecs += 1;
        let sx = DVector::from_column_slice(&w);
        let lambda = x.dot(&sx);
        let residual = (&sx - &x * lambda).norm();
        let converged = residual <= opts.tol * lambda.abs().max(1.0);

        let improved = best.as_ref().map_or(true, |b| lambda < b.value);
        if improved {
            best = Some(EigPair {
                value: lambda,
                vector: x.clone(),
                residual,
                converged,
                matvecs,
                restarts,
            });
        }
        let b = best.as_mut().expect("best pair set on first cycle");
        b.matvecs = matvecs;
        b.restarts = restarts;
        if b.converged || matvecs + 2 > budget {
            return b.clone();
        }
        // when the subspace spans the whole space the Ritz pair is exact up to rounding
        if k == n && !improved {
            return b.clone();
        }
        v0 = b.vector.clone();
        restarts += 1;
    }
}

fn reorthogonalize(w: &mut DVector<f64>, basis: &[DVector<f64>]) {
    for _ in 0..2 {
        for v in basis {
            let c = v.dot(w);
            w.axpy(-c, v, 1.0);
        }
    }
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}
