//! Sparse SDPA (`.dat-s`) reader.
//!
//! Blocks are embedded as a direct sum into one symmetric matrix of side
//! `Σ |size_k|`; a negative size marks a diagonal block. The objective matrix
//! (matno 0) becomes `C`, matrix `l` becomes `A_l` and the header vector is `b`.
//! SDPA carries no trace bound, so [`SdpaProblem::into_instance`] takes one.

use std::collections::BTreeMap;

use nalgebra::DVector;

use super::hslr::parse_real;
use super::ParseError;
use crate::model::{HybridMatrix, ModelError, SdpInstance, SparseSym};

/// An SDPA problem before a trace bound has been attached.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpaProblem {
    pub n: usize,
    pub block_sizes: Vec<i64>,
    pub b: DVector<f64>,
    pub mats: Vec<HybridMatrix>,
}

impl SdpaProblem {
    pub fn m(&self) -> usize {
        self.b.len()
    }

    pub fn into_instance(self, tau: f64) -> Result<SdpInstance, ModelError> {
        SdpInstance::new(self.n, self.b, tau, self.mats)
    }
}

fn clean(line: &str) -> String {
    line.chars()
        .map(|c| if matches!(c, ',' | '{' | '}' | '(' | ')') { ' ' } else { c })
        .collect()
}

pub fn parse_sdpa(text: &str) -> Result<SdpaProblem, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, clean(l)))
        .filter(|(_, l)| !l.trim().is_empty())
        .skip_while(|(_, l)| {
            let t = l.trim_start();
            t.starts_with('"') || t.starts_with('*')
        })
        .peekable();
    let last_line = text.lines().count().max(1);
    let eof = |what: &str| ParseError::new(last_line, "<eof>", format!("missing {what}"));

    let first_int = |ln: usize, line: &str, what: &str| -> Result<i64, ParseError> {
        let tok = line.split_whitespace().next().unwrap_or("");
        tok.parse::<i64>()
            .map_err(|_| ParseError::new(ln, tok, format!("{what} must be an integer")))
    };

    let (ln, line) = lines.next().ok_or_else(|| eof("number of constraints"))?;
    let m = first_int(ln, &line, "number of constraints")?;
    if m < 0 {
        return Err(ParseError::new(ln, line.trim(), "number of constraints must be nonnegative"));
    }
    let m = m as usize;

    let (ln, line) = lines.next().ok_or_else(|| eof("number of blocks"))?;
    let nblocks = first_int(ln, &line, "number of blocks")?;
    if nblocks < 1 {
        return Err(ParseError::new(ln, line.trim(), "number of blocks must be positive"));
    }
    let nblocks = nblocks as usize;

    let (ln, line) = lines.next().ok_or_else(|| eof("block structure"))?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() < nblocks {
        return Err(ParseError::new(
            ln,
            line.trim(),
            format!("block structure lists {} sizes, expected {nblocks}", toks.len()),
        ));
    }
    let mut block_sizes = Vec::with_capacity(nblocks);
    for tok in &toks[..nblocks] {
        let s = tok
            .parse::<i64>()
            .map_err(|_| ParseError::new(ln, *tok, "block size must be an integer"))?;
        if s == 0 {
            return Err(ParseError::new(ln, *tok, "block size must be nonzero"));
        }
        block_sizes.push(s);
    }
    let mut offsets = Vec::with_capacity(nblocks);
    let mut n = 0usize;
    for s in &block_sizes {
        offsets.push(n);
        n += s.unsigned_abs() as usize;
    }

    // the objective vector may wrap over several lines
    let mut b = Vec::with_capacity(m);
    while b.len() < m {
        let (ln, line) = lines.next().ok_or_else(|| eof("right-hand side vector"))?;
        for tok in line.split_whitespace() {
            if b.len() == m {
                return Err(ParseError::new(ln, tok, format!("right-hand side has more than m = {m} entries")));
            }
            b.push(parse_real(ln, tok)?);
        }
    }

    let mut entries: Vec<BTreeMap<(usize, usize), f64>> = vec![BTreeMap::new(); m + 1];
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 5 {
            return Err(ParseError::new(ln, line.trim(), "entry must be `matno blkno i j value`"));
        }
        let int = |k: usize| {
            toks[k]
                .parse::<usize>()
                .map_err(|_| ParseError::new(ln, toks[k], "expected a nonnegative integer"))
        };
        let (matno, blk, i, j) = (int(0)?, int(1)?, int(2)?, int(3)?);
        let v = parse_real(ln, toks[4])?;
        if matno > m {
            return Err(ParseError::new(ln, toks[0], format!("matrix number out of range 0..={m}")));
        }
        if blk < 1 || blk > nblocks {
            return Err(ParseError::new(ln, toks[1], format!("block number out of range 1..={nblocks}")));
        }
        let size = block_sizes[blk - 1];
        let side = size.unsigned_abs() as usize;
        for (idx, tok) in [(i, toks[2]), (j, toks[3])] {
            if idx < 1 || idx > side {
                return Err(ParseError::new(ln, tok, format!("index outside block {blk} of size {side}")));
            }
        }
        if i > j {
            return Err(ParseError::new(ln, line.trim(), "entry below the diagonal (need i <= j)"));
        }
        if size < 0 && i != j {
            return Err(ParseError::new(ln, line.trim(), format!("off-diagonal entry in diagonal block {blk}")));
        }
        let off = offsets[blk - 1];
        *entries[matno].entry((off + i - 1, off + j - 1)).or_insert(0.0) += v;
    }

    let mut mats = Vec::with_capacity(m + 1);
    for e in entries {
        if e.is_empty() {
            mats.push(HybridMatrix::zero(n));
        } else {
            let s = SparseSym::from_triplets(n, e.into_iter().map(|((i, j), v)| (i, j, v)))
                .expect("indices validated above");
            mats.push(HybridMatrix::sparse_only(s));
        }
    }
    Ok(SdpaProblem {
        n,
        block_sizes,
        b: DVector::from_vec(b),
        mats,
    })
}
