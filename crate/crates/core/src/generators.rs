//! Instance builders for nuclear-norm matrix completion and the Lovász theta
//! (maximum stable set) relaxation.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{HybridMatrix, LowRankFactor, SdpInstance, SparseSym};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GenError {
    #[error("invalid dimensions: {0}")]
    Dimensions(String),
    #[error("observation ({0}, {1}) is out of range")]
    IndexOutOfRange(usize, usize),
    #[error("duplicate entry ({0}, {1})")]
    Duplicate(usize, usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("{0} observations but {1} values")]
    LengthMismatch(usize, usize),
    #[error("all observed entries are zero, so the trace bound would be 0")]
    ZeroTraceBound,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Observed entries of an `n1 x n2` matrix. Indices are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct MatCompSpec {
    pub n1: usize,
    pub n2: usize,
    pub omega: Vec<(usize, usize)>,
    pub values: Vec<f64>,
}

impl MatCompSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.n1 < 1 || self.n2 < self.n1 {
            return Err(GenError::Dimensions(format!(
                "need n2 >= n1 >= 1, got n1 = {}, n2 = {}",
                self.n1, self.n2
            )));
        }
        if self.omega.len() != self.values.len() {
            return Err(GenError::LengthMismatch(self.omega.len(), self.values.len()));
        }
        let mut seen = BTreeSet::new();
        for &(i, j) in &self.omega {
            if i < 1 || i > self.n1 || j < 1 || j > self.n2 {
                return Err(GenError::IndexOutOfRange(i, j));
            }
            if !seen.insert((i, j)) {
                return Err(GenError::Duplicate(i, j));
            }
        }
        Ok(())
    }

    /// `2 √n1 ‖Ŷ‖_F` with `Ŷ` the zero-filled observation matrix.
    pub fn trace_bound(&self) -> f64 {
        let frob = self.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        2.0 * (self.n1 as f64).sqrt() * frob
    }
}

/// Undirected simple graph on vertices `1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpec {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.n < 1 {
            return Err(GenError::Dimensions("graph needs at least one vertex".into()));
        }
        let mut seen = BTreeSet::new();
        for &(i, j) in &self.edges {
            if i == j {
                return Err(GenError::SelfLoop(i));
            }
            if i < 1 || j < 1 || i > self.n || j > self.n {
                return Err(GenError::IndexOutOfRange(i, j));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(GenError::Duplicate(i, j));
            }
        }
        Ok(())
    }
}

/// Nuclear-norm relaxation: `C = I/2`, one entry `1/2` at `(i, n1 + j)` per observation.
pub fn gen_matcomp(spec: &MatCompSpec) -> Result<SdpInstance, GenError> {
    spec.validate()?;
    let n = spec.n1 + spec.n2;
    let tau = spec.trace_bound();
    if !(tau > 0.0) {
        return Err(GenError::ZeroTraceBound);
    }
    let c = SparseSym::from_triplets(n, (0..n).map(|i| (i, i, 0.5))).expect("diagonal is valid");
    let mut mats = vec![HybridMatrix::sparse_only(c)];
    for &(i, j) in &spec.omega {
        let a = SparseSym::from_triplets(n, [(i - 1, spec.n1 + j - 1, 0.5)]).expect("validated index");
        mats.push(HybridMatrix::sparse_only(a));
    }
    let b = DVector::from_column_slice(&spec.values);
    Ok(SdpInstance::new(n, b, tau, mats).expect("generated data is consistent"))
}

/// Lovász theta relaxation: `C = −e eᵀ` in low-rank form, `X_ij = 0` per edge, `τ = 1`.
pub fn gen_stableset(spec: &GraphSpec) -> Result<SdpInstance, GenError> {
    spec.validate()?;
    let n = spec.n;
    let c = LowRankFactor::new(DMatrix::from_element(n, 1, 1.0), DMatrix::from_element(1, 1, -1.0))
        .expect("rank-one factor is valid");
    let mut mats = vec![HybridMatrix::lowrank_only(c)];
    for &(i, j) in &spec.edges {
        let (i, j) = (i.min(j), i.max(j));
        let a = SparseSym::from_triplets(n, [(i - 1, j - 1, 0.5)]).expect("validated edge");
        mats.push(HybridMatrix::sparse_only(a));
    }
    let b = DVector::zeros(spec.edges.len());
    Ok(SdpInstance::new(n, b, 1.0, mats).expect("generated data is consistent"))
}

/// Seeded rank-`rank` matrix `M = U Vᵀ` with entries of `U`, `V` uniform in
/// `[-1, 1]`, observed on `round(fraction · n1 n2)` uniformly drawn positions
/// (at least one). Returns the spec and `M`.
pub fn gen_random_matcomp(
    n1: usize,
    n2: usize,
    rank: usize,
    sample_fraction: f64,
    seed: u64,
) -> Result<(MatCompSpec, DMatrix<f64>), GenError> {
    if n1 < 1 || n2 < n1 {
        return Err(GenError::Dimensions(format!("need n2 >= n1 >= 1, got {n1}, {n2}")));
    }
    if rank < 1 || rank > n1 {
        return Err(GenError::Dimensions(format!("rank must lie in 1..={n1}, got {rank}")));
    }
    if !(sample_fraction > 0.0 && sample_fraction <= 1.0) {
        return Err(GenError::Dimensions(format!(
            "sample fraction must lie in (0, 1], got {sample_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = DMatrix::from_fn(n1, rank, |_, _| rng.gen_range(-1.0..=1.0));
    let v = DMatrix::from_fn(n2, rank, |_, _| rng.gen_range(-1.0..=1.0));
    let m = &u * v.transpose();

    let total = n1 * n2;
    let count = ((sample_fraction * total as f64).round() as usize).clamp(1, total);
    let mut picks = rand::seq::index::sample(&mut rng, total, count).into_vec();
    picks.sort_unstable();
    let omega: Vec<(usize, usize)> = picks.iter().map(|&k| (k / n2 + 1, k % n2 + 1)).collect();
    let values = omega.iter().map(|&(i, j)| m[(i - 1, j - 1)]).collect();
    Ok((MatCompSpec { n1, n2, omega, values }, m))
}

/// Cycle `1 - 2 - ... - n - 1`.
pub fn gen_cycle(n: usize) -> Result<GraphSpec, GenError> {
    if n < 3 {
        return Err(GenError::Dimensions(format!("a cycle needs n >= 3, got {n}")));
    }
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i, i + 1)).collect();
    edges.push((1, n));
    Ok(GraphSpec { n, edges })
}

fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, l)| {
        let l = l.trim();
        (!l.is_empty() && !l.starts_with('#')).then(|| (k + 1, l.split_whitespace().collect()))
    })
}

fn index_token(line: usize, tok: &str) -> Result<usize, GenError> {
    tok.parse().map_err(|_| GenError::Parse {
        line,
        message: format!("`{tok}` is not a positive integer"),
    })
}

/// One `i j` pair per line, `#` comments. `n` defaults to the largest index seen.
pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<GraphSpec, GenError> {
    let mut edges = Vec::new();
    for (line, toks) in numbered_lines(text) {
        if toks.len() != 2 {
            return Err(GenError::Parse {
                line,
                message: format!("expected `i j`, found {} fields", toks.len()),
            });
        }
        edges.push((index_token(line, toks[0])?, index_token(line, toks[1])?));
    }
    let n = n.unwrap_or_else(|| edges.iter().map(|&(i, j)| i.max(j)).max().unwrap_or(0));
    let spec = GraphSpec { n, edges };
    spec.validate()?;
    Ok(spec)
}

/// One `i j value` triple per line, `#` comments.
pub fn parse_observations(text: &str, n1: usize, n2: usize) -> Result<MatCompSpec, GenError> {
    let mut omega = Vec::new();
    let mut values = Vec::new();
    for (line, toks) in numbered_lines(text) {
        if toks.len() != 3 {
            return Err(GenError::Parse {
                line,
                message: format!("expected `i j value`, found {} fields", toks.len()),
            });
        }
        omega.push((index_token(line, toks[0])?, index_token(line, toks[1])?));
        let v: f64 = toks[2].parse().map_err(|_| GenError::Parse {
            line,
            message: format!("`{}` is not a number", toks[2]),
        })?;
        if !v.is_finite() {
            return Err(GenError::Parse {
                line,
                message: "value must be finite".into(),
            });
        }
        values.push(v);
    }
    let spec = MatCompSpec { n1, n2, omega, values };
    spec.validate()?;
    Ok(spec)
}
