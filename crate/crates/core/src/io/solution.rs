//! Solution files and warm starts.
//!
//! Primal: `n` lines of `r` comma-separated fields (one column of `Y` per
//! field position). Dual: a single line `θ,p_1,...,p_m`. No header and no
//! embedded whitespace in either.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::hslr::parse_real;
use super::{fmt_shortest, IoError, ParseError};
use crate::model::{FactoredPrimal, SdpInstance};

pub fn format_primal(y: &FactoredPrimal) -> String {
    let m = y.matrix();
    let mut out = String::with_capacity(m.nrows() * m.ncols() * 12);
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|k| fmt_shortest(m[(i, k)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn format_dual(theta: f64, p: &DVector<f64>) -> String {
    let mut fields = Vec::with_capacity(p.len() + 1);
    fields.push(fmt_shortest(theta));
    fields.extend(p.iter().map(|v| fmt_shortest(*v)));
    let mut out = fields.join(",");
    out.push('\n');
    out
}

pub fn write_primal(y: &FactoredPrimal, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, format_primal(y)).map_err(|e| IoError::file(path, e))
}

pub fn write_dual(theta: f64, p: &DVector<f64>, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, format_dual(theta, p)).map_err(|e| IoError::file(path, e))
}

fn csv_rows(text: &str) -> Result<Vec<(usize, Vec<f64>)>, ParseError> {
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let ln = k + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals = line
            .split(',')
            .map(|t| parse_real(ln, t.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((ln, vals));
    }
    Ok(rows)
}

/// Dense `n x r` block of a primal file.
pub fn parse_primal(text: &str) -> Result<DMatrix<f64>, ParseError> {
    let rows = csv_rows(text)?;
    let Some((_, first)) = rows.first() else {
        return Err(ParseError::new(1, "<eof>", "primal file has no data rows"));
    };
    let r = first.len();
    for (ln, row) in &rows {
        if row.len() != r {
            return Err(ParseError::new(
                *ln,
                format!("{} fields", row.len()),
                format!("ragged row, expected {r} fields"),
            ));
        }
    }
    Ok(DMatrix::from_fn(rows.len(), r, |i, k| rows[i].1[k]))
}

/// `(θ, p)` from a dual file.
pub fn parse_dual(text: &str) -> Result<(f64, DVector<f64>), ParseError> {
    let rows = csv_rows(text)?;
    match rows.as_slice() {
        [(_, fields)] if !fields.is_empty() => {
            Ok((fields[0], DVector::from_column_slice(&fields[1..])))
        }
        [] => Err(ParseError::new(1, "<eof>", "dual file is empty")),
        [_, (ln, _), ..] => Err(ParseError::new(*ln, "<line>", "dual file must hold a single line")),
        [(ln, _)] => Err(ParseError::new(*ln, "<line>", "dual line has no fields")),
    }
}

/// Warm start from CSV text. Rows must equal `n`; an iterate outside the
/// trace ball is pulled radially onto its boundary.
pub fn parse_warm_start(text: &str, inst: &SdpInstance) -> Result<FactoredPrimal, IoError> {
    let mut y = parse_primal(text)?;
    if y.nrows() != inst.n() {
        return Err(ParseError::new(
            text.lines().count().max(1),
            format!("{} rows", y.nrows()),
            format!("warm start must have n = {} rows", inst.n()),
        )
        .into());
    }
    let norm_sq = y.norm_squared();
    if norm_sq > inst.tau() {
        log::warn!(
            "warm start has ||Y0||_F^2 = {norm_sq} > trace bound {}; rescaling onto the trace ball",
            inst.tau()
        );
        y *= (inst.tau() / norm_sq).sqrt();
    }
    Ok(FactoredPrimal::new(y))
}

pub fn read_warm_start(path: impl AsRef<Path>, inst: &SdpInstance) -> Result<FactoredPrimal, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IoError::file(path, e))?;
    parse_warm_start(&text, inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HybridMatrix;

    fn inst(n: usize, tau: f64) -> SdpInstance {
        SdpInstance::new(n, DVector::zeros(0), tau, vec![HybridMatrix::zero(n)]).unwrap()
    }

    #[test]
    fn primal_sample_layout() {
        let y = DMatrix::from_row_slice(
            4,
            2,
            &[0.8561, -0.0152, -0.0152, 0.9998, -0.5163, 0.0021, 0.1005, -0.1009],
        );
        let text = format_primal(&FactoredPrimal::new(y.clone()));
        assert_eq!(text, "0.8561,-0.0152\n-0.0152,0.9998\n-0.5163,0.0021\n0.1005,-0.1009\n");
        assert_eq!(parse_primal(&text).unwrap(), y);
    }

    #[test]
    fn single_zero_entry() {
        assert_eq!(format_primal(&FactoredPrimal::zeros(1, 1)), "0\n");
    }

    #[test]
    fn dual_sample_layout() {
        let p = DVector::from_vec(vec![-0.5873, 3.4121, -1.2345]);
        let text = format_dual(0.5873, &p);
        assert_eq!(text, "0.5873,-0.5873,3.4121,-1.2345\n");
        assert_eq!(parse_dual(&text).unwrap(), (0.5873, p));
        assert_eq!(format_dual(0.0, &DVector::zeros(2)), "0,0,0\n");
    }

    #[test]
    fn caption_comment_is_skipped() {
        let (theta, p) = parse_dual("# File specified by --dual_output_path out_p.csv\n0.5,1\n").unwrap();
        assert_eq!(theta, 0.5);
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn warm_start_checks() {
        let i4 = inst(4, 2.0);
        let y = parse_warm_start("0,0\n0,0\n0,0\n0,0\n", &i4).unwrap();
        assert_eq!(y.frob_sq(), 0.0);
        assert_eq!(y.rank(), 2);
        // boundary: ||Y||^2 == tau stays untouched
        let y = parse_warm_start("1\n1\n0\n0\n", &i4).unwrap();
        assert_eq!(y.matrix()[(0, 0)], 1.0);
        // 2*tau gets rescaled
        let y = parse_warm_start("2\n0\n0\n0\n", &i4).unwrap();
        assert!((y.frob_sq() - 2.0).abs() < 1e-15);
        assert!(parse_warm_start("1,2\n1\n0,0\n0,0\n", &i4).is_err());
        assert!(parse_warm_start("1\n1\n1\n", &i4).is_err());
    }

    #[test]
    fn unwritable_path() {
        let y = FactoredPrimal::zeros(1, 1);
        assert!(matches!(
            write_primal(&y, "/nonexistent-dir/x.csv"),
            Err(IoError::File { .. })
        ));
        assert!(write_dual(0.0, &DVector::zeros(1), "/nonexistent-dir/x.csv").is_err());
    }
}
