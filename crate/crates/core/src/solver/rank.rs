use nalgebra::{DMatrix, SymmetricEigen};

use crate::model::FactoredPrimal;

/// Relative singular-value cutoff used between outer iterations.
pub const RANK_TOL: f64 = 1e-7;

/// Drops directions of `Y` with `σ_k <= tol · σ_max`. `Y Yᵀ` changes by at
/// most `Σ_{dropped} σ_k²` in trace; the result is `Y V_k = U_k Σ_k`.
///
/// Works from the eigendecomposition of the small Gram matrix `YᵀY`; nalgebra's
/// SVD loses accuracy on rank-deficient wide factors.
pub fn truncate_rank(y: &FactoredPrimal, tol: f64) -> FactoredPrimal {
    let m = y.matrix();
    let eig = SymmetricEigen::new(m.transpose() * m);
    let lam = &eig.eigenvalues;
    let lmax = lam.iter().cloned().fold(0.0_f64, f64::max);
    if !(lmax > 0.0) {
        return FactoredPrimal::zeros(y.n(), 1);
    }
    let cut = tol * tol * lmax;
    let mut keep: Vec<usize> = (0..lam.len()).filter(|&k| lam[k] > cut).collect();
    keep.sort_by(|&a, &b| lam[b].total_cmp(&lam[a]));
    let mut out = DMatrix::zeros(y.n(), keep.len());
    for (c, &k) in keep.iter().enumerate() {
        out.column_mut(c).copy_from(&(m * eig.eigenvectors.column(k)));
    }
    FactoredPrimal::new(out)
}
