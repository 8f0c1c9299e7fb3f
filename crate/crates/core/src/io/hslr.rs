//! Hybrid Sparse Low-Rank text format.
//!
//! ```text
//! m n
//! b_1 ... b_m
//! tau
//! l SP            # then lines `i j val`, 1 <= i <= j <= n
//! l LR            # then lines `p_1 .. p_n ; d_1 .. d_r`, one per column
//! ```
//! `#` lines are comments and blank lines are ignored. For one `l` the SP block
//! must come before the LR block.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use super::{fmt_float, ParseError};
use crate::model::{max_asymmetry, HybridMatrix, LowRankFactor, SdpInstance, SparseSym};

/// Relative asymmetry tolerated in an assembled low-rank core `D`.
pub const LR_SYMMETRY_TOL: f64 = 1e-8;

#[derive(Default)]
struct Block {
    sp_line: Option<usize>,
    lr_line: Option<usize>,
    triplets: Vec<(usize, usize, f64)>,
    seen: std::collections::HashSet<(usize, usize)>,
    lr_rows: Vec<(usize, Vec<f64>, Vec<f64>)>,
}

#[derive(Clone, Copy)]
enum Section {
    Sparse(usize),
    LowRank(usize),
}

fn parse_int(line: usize, tok: &str, what: &str) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .map_err(|_| ParseError::new(line, tok, format!("{what} must be a nonnegative integer")))
}

pub(crate) fn parse_real(line: usize, tok: &str) -> Result<f64, ParseError> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ParseError::new(line, tok, "expected a finite number")),
    }
}

pub fn parse_hslr(text: &str) -> Result<SdpInstance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let last_line = text.lines().count().max(1);
    let eof = |what: &str| ParseError::new(last_line, "<eof>", format!("missing {what}"));

    let (ln, head) = lines.next().ok_or_else(|| eof("`m n` header line"))?;
    let toks: Vec<&str> = head.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(ParseError::new(ln, head, "header must hold exactly two integers `m n`"));
    }
    let m = parse_int(ln, toks[0], "m")?;
    let n = parse_int(ln, toks[1], "n")?;
    if n == 0 {
        return Err(ParseError::new(ln, toks[1], "matrix size n must be positive"));
    }

    let b = if m == 0 {
        DVector::zeros(0)
    } else {
        let (ln, bl) = lines.next().ok_or_else(|| eof("right-hand side line"))?;
        let vals = bl
            .split_whitespace()
            .map(|t| parse_real(ln, t))
            .collect::<Result<Vec<_>, _>>()?;
        if vals.len() != m {
            return Err(ParseError::new(
                ln,
                bl,
                format!("right-hand side has {} entries, expected m = {m}", vals.len()),
            ));
        }
        DVector::from_vec(vals)
    };

    let (ln, tl) = lines.next().ok_or_else(|| eof("trace bound line"))?;
    let toks: Vec<&str> = tl.split_whitespace().collect();
    if toks.len() != 1 {
        return Err(ParseError::new(ln, tl, "trace bound line must hold a single number"));
    }
    let tau = parse_real(ln, toks[0])?;
    if tau <= 0.0 {
        return Err(ParseError::new(ln, toks[0], "trace bound must be positive"));
    }

    let mut blocks: BTreeMap<usize, Block> = BTreeMap::new();
    let mut section: Option<Section> = None;

    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() == 2 && (toks[1] == "SP" || toks[1] == "LR") {
            let l = parse_int(ln, toks[0], "matrix index")?;
            if l > m {
                return Err(ParseError::new(ln, toks[0], format!("matrix index out of range 0..={m}")));
            }
            let blk = blocks.entry(l).or_default();
            if toks[1] == "SP" {
                if blk.lr_line.is_some() {
                    return Err(ParseError::new(
                        ln,
                        line,
                        format!("sparse block for matrix {l} must precede its low-rank block"),
                    ));
                }
                if blk.sp_line.is_some() {
                    return Err(ParseError::new(ln, line, format!("second sparse block for matrix {l}")));
                }
                blk.sp_line = Some(ln);
                section = Some(Section::Sparse(l));
            } else {
                if blk.lr_line.is_some() {
                    return Err(ParseError::new(ln, line, format!("second low-rank block for matrix {l}")));
                }
                blk.lr_line = Some(ln);
                section = Some(Section::LowRank(l));
            }
            continue;
        }

        match section {
            None => {
                return Err(ParseError::new(ln, toks[0], "data line before any `l SP` / `l LR` header"))
            }
            Some(Section::Sparse(l)) => {
                if toks.len() != 3 {
                    return Err(ParseError::new(ln, line, "sparse entry must be `i j val`"));
                }
                let i = parse_int(ln, toks[0], "row index")?;
                let j = parse_int(ln, toks[1], "column index")?;
                let v = parse_real(ln, toks[2])?;
                for (idx, tok) in [(i, toks[0]), (j, toks[1])] {
                    if idx < 1 || idx > n {
                        return Err(ParseError::new(ln, tok, format!("index out of range 1..={n}")));
                    }
                }
                if i > j {
                    return Err(ParseError::new(ln, line, "entry below the diagonal (need i <= j)"));
                }
                let blk = blocks.get_mut(&l).expect("block registered at header");
                if !blk.seen.insert((i, j)) {
                    return Err(ParseError::new(ln, line, "duplicate triplet"));
                }
                blk.triplets.push((i - 1, j - 1, v));
            }
            Some(Section::LowRank(l)) => {
                let Some((left, right)) = line.split_once(';') else {
                    return Err(ParseError::new(ln, line, "low-rank line needs `;` between P and D columns"));
                };
                let p = left
                    .split_whitespace()
                    .map(|t| parse_real(ln, t))
                    .collect::<Result<Vec<_>, _>>()?;
                let d = right
                    .split_whitespace()
                    .map(|t| parse_real(ln, t))
                    .collect::<Result<Vec<_>, _>>()?;
                if p.len() != n {
                    return Err(ParseError::new(
                        ln,
                        left.trim(),
                        format!("P column has {} entries, expected n = {n}", p.len()),
                    ));
                }
                if d.is_empty() {
                    return Err(ParseError::new(ln, line, "empty D column"));
                }
                let blk = blocks.get_mut(&l).expect("block registered at header");
                if let Some((_, _, first)) = blk.lr_rows.first() {
                    if first.len() != d.len() {
                        return Err(ParseError::new(
                            ln,
                            right.trim(),
                            format!("D column has {} entries, previous columns had {}", d.len(), first.len()),
                        ));
                    }
                }
                blk.lr_rows.push((ln, p, d));
            }
        }
    }

    let mut mats = Vec::with_capacity(m + 1);
    for l in 0..=m {
        let Some(blk) = blocks.remove(&l) else {
            log::warn!("matrix {l} does not appear in the HSLR file; treating it as zero");
            mats.push(HybridMatrix::zero(n));
            continue;
        };
        let sparse = if blk.triplets.is_empty() {
            None
        } else {
            let line = blk.sp_line.unwrap_or(0);
            Some(
                SparseSym::from_triplets(n, blk.triplets)
                    .map_err(|e| ParseError::new(line, format!("{l} SP"), e.to_string()))?,
            )
        };
        let lowrank = if blk.lr_rows.is_empty() {
            None
        } else {
            Some(assemble_lowrank(l, n, &blk.lr_rows, blk.lr_line.unwrap_or(0))?)
        };
        mats.push(HybridMatrix::new(n, sparse, lowrank).expect("components built with side n"));
    }

    SdpInstance::new(n, b, tau, mats).map_err(|e| ParseError::new(1, head_token(text), e.to_string()))
}

fn head_token(text: &str) -> String {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("")
        .to_string()
}

fn assemble_lowrank(
    l: usize,
    n: usize,
    rows: &[(usize, Vec<f64>, Vec<f64>)],
    header_line: usize,
) -> Result<LowRankFactor, ParseError> {
    let r = rows.len();
    let dlen = rows[0].2.len();
    if dlen != r {
        let (ln, _, _) = rows.last().expect("nonempty");
        return Err(ParseError::new(
            *ln,
            format!("{l} LR"),
            format!("low-rank block has {r} columns but D columns have {dlen} entries"),
        ));
    }
    let p = DMatrix::from_fn(n, r, |i, k| rows[k].1[i]);
    let mut d = DMatrix::from_fn(r, r, |i, k| rows[k].2[i]);
    let asym = max_asymmetry(&d);
    if asym > LR_SYMMETRY_TOL * d.amax().max(1.0) {
        return Err(ParseError::new(
            header_line,
            format!("{l} LR"),
            format!("D is not symmetric (max asymmetry {asym:e})"),
        ));
    }
    d = (&d + d.transpose()) * 0.5;
    LowRankFactor::new(p, d).map_err(|e| ParseError::new(header_line, format!("{l} LR"), e.to_string()))
}

pub fn write_hslr(inst: &SdpInstance) -> String {
    let mut out = String::new();
    let join = |v: &mut dyn Iterator<Item = f64>| v.map(fmt_float).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "# m n");
    let _ = writeln!(out, "{} {}", inst.m(), inst.n());
    let _ = writeln!(out, "# b vector");
    if inst.m() > 0 {
        let _ = writeln!(out, "{}", join(&mut inst.b().iter().copied()));
    }
    let _ = writeln!(out, "# Trace bound");
    let _ = writeln!(out, "{}", fmt_float(inst.tau()));

    for (l, a) in inst.matrices().iter().enumerate() {
        let _ = writeln!(out);
        let _ = writeln!(out, "# Matrix {l}");
        if a.is_zero() {
            let _ = writeln!(out, "{l} SP");
            continue;
        }
        if let Some(s) = a.sparse() {
            let _ = writeln!(out, "{l} SP");
            let mut entries: Vec<_> = s.iter().collect();
            entries.sort_by_key(|&(i, j, _)| (i, j));
            for (i, j, v) in entries {
                let _ = writeln!(out, "{} {} {}", i + 1, j + 1, fmt_float(v));
            }
        }
        if let Some(lr) = a.lowrank() {
            let _ = writeln!(out, "{l} LR");
            for k in 0..lr.rank() {
                let p = join(&mut lr.p().column(k).iter().copied());
                let d = join(&mut lr.d().column(k).iter().copied());
                let _ = writeln!(out, "{p} ; {d}");
            }
        }
    }
    out
}
