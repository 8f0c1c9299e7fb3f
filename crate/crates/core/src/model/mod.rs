//! Problem data: hybrid sparse + low-rank symmetric matrices, SDP instances,
//! factored primal iterates and dual points.
//!
//! All indices are 0-based here. File formats are 1-based and convert at the
//! parse/write boundary.

mod ops;

pub use ops::{
    al_gradient, al_objective, apply_a, apply_astar_vec, dual_value, hm_dense, hm_quadform,
    primal_value, DENSE_LIMIT,
};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("entry ({i}, {j}) lies outside a {n}x{n} matrix")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("entry ({i}, {j}) is below the diagonal; only the upper triangle is stored")]
    LowerTriangle { i: usize, j: usize },
    #[error("duplicate entry ({i}, {j})")]
    DuplicateEntry { i: usize, j: usize },
    #[error("low-rank core D is not symmetric (max asymmetry {asymmetry:e})")]
    NonSymmetric { asymmetry: f64 },
    #[error("low-rank factor must have at least one column")]
    EmptyFactor,
    #[error("trace bound must be positive, got {0}")]
    NonPositiveTraceBound(f64),
    #[error("refusing to densify a {n}x{n} matrix (limit {limit})")]
    SizeGuard { n: usize, limit: usize },
    #[error("dual multiplier theta must be nonnegative, got {0}")]
    NegativeTheta(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

/// Upper triangle of a symmetric sparse matrix in compressed column form.
///
/// Column `j` holds rows `i <= j`, sorted ascending. An off-diagonal entry
/// `(i, j)` stands for both `(i, j)` and `(j, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSym {
    pub fn from_triplets<I>(n: usize, triplets: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(ModelError::IndexOutOfRange { i, j, n });
            }
            if i > j {
                return Err(ModelError::LowerTriangle { i, j });
            }
            if !v.is_finite() {
                return Err(ModelError::NonFinite("sparse entry"));
            }
            entries.push((i, j, v));
        }
        // column-major order
        entries.sort_by_key(|&(i, j, _)| (j, i));
        if let Some(w) = entries
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(ModelError::DuplicateEntry { i: w[0].0, j: w[0].1 });
        }

        let mut col_ptr = vec![0usize; n + 1];
        for &(_, j, _) in &entries {
            col_ptr[j + 1] += 1;
        }
        for j in 0..n {
            col_ptr[j + 1] += col_ptr[j];
        }
        let row_idx = entries.iter().map(|e| e.0).collect();
        let values = entries.iter().map(|e| e.2).collect();
        Ok(Self {
            n,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored entries `(i, j, v)` with `i <= j`, column by column.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |j| {
            (self.col_ptr[j]..self.col_ptr[j + 1]).map(move |k| (self.row_idx[k], j, self.values[k]))
        })
    }

    /// `y += alpha * A x` with the mirror term applied on the fly.
    pub fn matvec_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        for (i, j, v) in self.iter() {
            let av = alpha * v;
            y[i] += av * x[j];
            if i != j {
                y[j] += av * x[i];
            }
        }
    }

    /// `A • (Y Yᵀ)` from row inner products of `Y`.
    pub fn quadform(&self, y: &DMatrix<f64>) -> f64 {
        let r = y.ncols();
        let mut acc = 0.0;
        for (i, j, v) in self.iter() {
            let mut dot = 0.0;
            for k in 0..r {
                dot += y[(i, k)] * y[(j, k)];
            }
            acc += if i == j { v * dot } else { 2.0 * v * dot };
        }
        acc
    }

    /// `tr(Uᵀ A V)`; equals `A • U Vᵀ` by symmetry of `A`.
    pub fn bilinear(&self, u: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
        let r = u.ncols();
        let mut acc = 0.0;
        for (i, j, a) in self.iter() {
            let mut dot = 0.0;
            for k in 0..r {
                dot += u[(i, k)] * v[(j, k)];
                if i != j {
                    dot += u[(j, k)] * v[(i, k)];
                }
            }
            acc += a * dot;
        }
        acc
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }
}

/// Low-rank part `P D Pᵀ` with `P` of size `n x r` and symmetric `D` of size `r x r`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankFactor {
    p: DMatrix<f64>,
    d: DMatrix<f64>,
}

impl LowRankFactor {
    pub const SYMMETRY_TOL: f64 = 1e-12;

    pub fn new(p: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self, ModelError> {
        let r = p.ncols();
        if r == 0 {
            return Err(ModelError::EmptyFactor);
        }
        if d.nrows() != r || d.ncols() != r {
            return Err(ModelError::DimensionMismatch {
                what: "low-rank core D",
                expected: r,
                found: d.nrows().max(d.ncols()),
            });
        }
        if p.iter().chain(d.iter()).any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("low-rank factor"));
        }
        let asymmetry = max_asymmetry(&d);
        if asymmetry > Self::SYMMETRY_TOL * d.amax().max(1.0) {
            return Err(ModelError::NonSymmetric { asymmetry });
        }
        Ok(Self { p, d })
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    pub fn rank(&self) -> usize {
        self.p.ncols()
    }

    /// `⟨D, (PᵀY)(PᵀY)ᵀ⟩`.
    pub fn quadform(&self, y: &DMatrix<f64>) -> f64 {
        let w = self.p.tr_mul(y);
        (&self.d * &w).dot(&w)
    }

    pub fn bilinear(&self, u: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
        (&self.d * self.p.tr_mul(u)).dot(&self.p.tr_mul(v))
    }

    /// `y += alpha * P (D (Pᵀ x))`.
    pub fn matvec_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        let r = self.rank();
        let n = self.n();
        let mut t = vec![0.0; r];
        for (k, tk) in t.iter_mut().enumerate() {
            let col = self.p.column(k);
            *tk = (0..n).map(|i| col[i] * x[i]).sum();
        }
        for k in 0..r {
            let mut s = 0.0;
            for (l, tl) in t.iter().enumerate() {
                s += self.d[(k, l)] * tl;
            }
            let s = alpha * s;
            if s != 0.0 {
                let col = self.p.column(k);
                for i in 0..n {
                    y[i] += s * col[i];
                }
            }
        }
    }

    /// Scales the core `D`; `P` is left untouched.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            p: self.p.clone(),
            d: &self.d * s,
        }
    }
}

pub(crate) fn max_asymmetry(d: &DMatrix<f64>) -> f64 {
    let r = d.nrows();
    let mut worst = 0.0f64;
    for i in 0..r {
        for j in (i + 1)..r {
            worst = worst.max((d[(i, j)] - d[(j, i)]).abs());
        }
    }
    worst
}

/// Symmetric `n x n` matrix stored as an optional sparse part plus an optional
/// low-rank part. Both absent means zero.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridMatrix {
    n: usize,
    sparse: Option<SparseSym>,
    lowrank: Option<LowRankFactor>,
}

impl HybridMatrix {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            sparse: None,
            lowrank: None,
        }
    }

    pub fn new(
        n: usize,
        sparse: Option<SparseSym>,
        lowrank: Option<LowRankFactor>,
    ) -> Result<Self, ModelError> {
        if let Some(s) = &sparse {
            if s.n() != n {
                return Err(ModelError::DimensionMismatch {
                    what: "sparse part",
                    expected: n,
                    found: s.n(),
                });
            }
        }
        if let Some(l) = &lowrank {
            if l.n() != n {
                return Err(ModelError::DimensionMismatch {
                    what: "low-rank part",
                    expected: n,
                    found: l.n(),
                });
            }
        }
        Ok(Self { n, sparse, lowrank })
    }

    pub fn sparse_only(sparse: SparseSym) -> Self {
        Self {
            n: sparse.n(),
            sparse: Some(sparse),
            lowrank: None,
        }
    }

    pub fn lowrank_only(lowrank: LowRankFactor) -> Self {
        Self {
            n: lowrank.n(),
            sparse: None,
            lowrank: Some(lowrank),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sparse(&self) -> Option<&SparseSym> {
        self.sparse.as_ref()
    }

    pub fn lowrank(&self) -> Option<&LowRankFactor> {
        self.lowrank.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.sparse.is_none() && self.lowrank.is_none()
    }

    pub(crate) fn quadform_unchecked(&self, y: &DMatrix<f64>) -> f64 {
        let mut acc = 0.0;
        if let Some(s) = &self.sparse {
            acc += s.quadform(y);
        }
        if let Some(l) = &self.lowrank {
            acc += l.quadform(y);
        }
        acc
    }

    pub(crate) fn bilinear_unchecked(&self, u: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
        let mut acc = 0.0;
        if let Some(s) = &self.sparse {
            acc += s.bilinear(u, v);
        }
        if let Some(l) = &self.lowrank {
            acc += l.bilinear(u, v);
        }
        acc
    }

    pub fn matvec_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        if alpha == 0.0 {
            return;
        }
        if let Some(s) = &self.sparse {
            s.matvec_add(alpha, x, y);
        }
        if let Some(l) = &self.lowrank {
            l.matvec_add(alpha, x, y);
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            sparse: self.sparse.as_ref().map(|m| m.scaled(s)),
            lowrank: self.lowrank.as_ref().map(|m| m.scaled(s)),
        }
    }
}

/// `min C•X  s.t.  A(X) = b,  Tr(X) <= tau,  X ⪰ 0`, with `mats[0] = C`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpInstance {
    n: usize,
    b: DVector<f64>,
    tau: f64,
    mats: Vec<HybridMatrix>,
}

impl SdpInstance {
    /// `mats` holds `C` followed by `A_1..A_m`; `b` must have length `m`.
    pub fn new(
        n: usize,
        b: DVector<f64>,
        tau: f64,
        mats: Vec<HybridMatrix>,
    ) -> Result<Self, ModelError> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(ModelError::NonPositiveTraceBound(tau));
        }
        if mats.is_empty() {
            return Err(ModelError::DimensionMismatch {
                what: "matrix list (cost matrix missing)",
                expected: 1,
                found: 0,
            });
        }
        if b.len() + 1 != mats.len() {
            return Err(ModelError::DimensionMismatch {
                what: "right-hand side b",
                expected: mats.len() - 1,
                found: b.len(),
            });
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("right-hand side b"));
        }
        if let Some(bad) = mats.iter().find(|a| a.n() != n) {
            return Err(ModelError::DimensionMismatch {
                what: "data matrix",
                expected: n,
                found: bad.n(),
            });
        }
        Ok(Self { n, b, tau, mats })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn cost(&self) -> &HybridMatrix {
        &self.mats[0]
    }

    /// Constraint matrix `A_l` for `l` in `1..=m`; `matrix(0)` is `C`.
    pub fn matrix(&self, l: usize) -> &HybridMatrix {
        &self.mats[l]
    }

    pub fn matrices(&self) -> &[HybridMatrix] {
        &self.mats
    }

    pub fn constraints(&self) -> &[HybridMatrix] {
        &self.mats[1..]
    }

    pub fn with_trace_bound(&self, tau: f64) -> Result<Self, ModelError> {
        Self::new(self.n, self.b.clone(), tau, self.mats.clone())
    }

    pub(crate) fn from_parts_unchecked(
        n: usize,
        b: DVector<f64>,
        tau: f64,
        mats: Vec<HybridMatrix>,
    ) -> Self {
        Self { n, b, tau, mats }
    }

    /// `out = Σ_l w_l A_l Y` over all matrices including `C` (`w[0]`).
    pub(crate) fn combine_apply(&self, weights: &[f64], y: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, y.ncols());
        for k in 0..y.ncols() {
            let x = y.column(k);
            let x = x.as_slice();
            let mut col = vec![0.0; self.n];
            for (a, &w) in self.mats.iter().zip(weights) {
                a.matvec_add(w, x, &mut col);
            }
            out.column_mut(k).copy_from_slice(&col);
        }
        out
    }

    /// `(A_l • U Vᵀ)_l` without dimension checks.
    pub(crate) fn apply_a_bilinear_unchecked(&self, u: &DMatrix<f64>, v: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.m(),
            self.constraints().iter().map(|a| a.bilinear_unchecked(u, v)),
        )
    }

    /// `A(Y Yᵀ)` without dimension checks.
    pub(crate) fn apply_a_unchecked(&self, y: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.m(),
            self.constraints().iter().map(|a| a.quadform_unchecked(y)),
        )
    }
}

/// Primal iterate in factored form; `X = Y Yᵀ` is never formed.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredPrimal(DMatrix<f64>);

impl FactoredPrimal {
    pub fn new(y: DMatrix<f64>) -> Self {
        assert!(y.ncols() >= 1, "factor needs at least one column");
        Self(y)
    }

    pub fn zeros(n: usize, r: usize) -> Self {
        Self::new(DMatrix::zeros(n, r.max(1)))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn rank(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// `‖Y‖_F² = Tr(Y Yᵀ)`.
    pub fn frob_sq(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn in_spectraplex(&self, tau: f64) -> bool {
        self.frob_sq() <= tau * (1.0 + 1e-12)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    pub p: DVector<f64>,
    pub theta: f64,
}

impl DualPoint {
    pub fn new(p: DVector<f64>, theta: f64) -> Result<Self, ModelError> {
        if !(theta >= 0.0) {
            return Err(ModelError::NegativeTheta(theta));
        }
        Ok(Self { p, theta })
    }
}
