//! Output layouts checked against the reference sample files.

use lrsdp::cli::render_iteration;
use lrsdp::io::{format_dual, format_primal, parse_dual, parse_primal, write_dual, write_primal};
use lrsdp::model::FactoredPrimal;
use lrsdp::solver::IterRecord;
use nalgebra::{DMatrix, DVector};

pub const PRIMAL_SAMPLE: &str = "\
# File specified by --primal_output_path out_Y.csv
0.8561,-0.0152
-0.0152,0.9998
-0.5163,0.0021
0.1005,-0.1009
";

pub const DUAL_SAMPLE: &str = "\
# File specified by --dual_output_path out_p.csv
0.5873,-0.5873,3.4121,-1.2345
";

pub const ROW_0: &str = "  0    1          -     2.9e-03   9.690e-06    NaN    1.0e+01 A";
pub const ROW_42: &str = " 42    3        8.8e-06   1.3e-08   8.357e-02   8.357e-02   6.6e+03";

fn data_lines(sample: &str) -> String {
    sample.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}

fn expect(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn primal_layout() -> Result<(), String> {
    let y = DMatrix::from_row_slice(4, 2, &[0.8561, -0.0152, -0.0152, 0.9998, -0.5163, 0.0021, 0.1005, -0.1009]);
    let text = format_primal(&FactoredPrimal::new(y.clone()));
    let want = data_lines(PRIMAL_SAMPLE);
    expect(text == want, || format!("primal text\n{text}differs from\n{want}"))?;
    expect(!text.contains(' ') && !text.contains('\t'), || "whitespace in primal file".into())?;
    let parsed = parse_primal(PRIMAL_SAMPLE).map_err(|e| e.to_string())?;
    expect(parsed == y, || format!("parsed primal {parsed}"))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("out_Y.csv");
    write_primal(&FactoredPrimal::new(y), &path).map_err(|e| e.to_string())?;
    let on_disk = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    expect(on_disk == want, || "written primal file differs".into())
}

pub fn dual_layout() -> Result<(), String> {
    let p = DVector::from_vec(vec![-0.5873, 3.4121, -1.2345]);
    let text = format_dual(0.5873, &p);
    let want = data_lines(DUAL_SAMPLE);
    expect(text == want, || format!("dual text {text:?} differs from {want:?}"))?;
    expect(text.lines().count() == 1 && text.split(',').count() == 4, || "dual field count".into())?;
    let (theta, back) = parse_dual(DUAL_SAMPLE).map_err(|e| e.to_string())?;
    expect(theta == 0.5873 && back == p, || format!("parsed dual {theta} {back}"))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("out_p.csv");
    write_dual(0.5873, &p, &path).map_err(|e| e.to_string())?;
    let on_disk = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    expect(on_disk == want, || "written dual file differs".into())
}

pub fn row_0_record() -> IterRecord {
    IterRecord {
        iter: 0,
        rank: 1,
        gap: None,
        feas: 2.9e-3,
        pval: 9.690e-6,
        dval: None,
        pnlty: 10.0,
        steps: "A".into(),
    }
}

pub fn row_42_record() -> IterRecord {
    IterRecord {
        iter: 42,
        rank: 3,
        gap: Some(8.8e-6),
        feas: 1.3e-8,
        pval: 8.357e-2,
        dval: Some(8.357e-2),
        pnlty: 6.6e3,
        steps: String::new(),
    }
}

fn same_shape(got: &str, want: &str) -> Result<(), String> {
    let g: Vec<&str> = got.split_whitespace().collect();
    let w: Vec<&str> = want.split_whitespace().collect();
    expect(g == w, || format!("fields {g:?} differ from {w:?}"))?;
    // iteration and rank columns are right-aligned the same way
    expect(got.get(..8) == want.get(..8), || format!("prefix of {got:?} differs from {want:?}"))
}

pub fn iteration_rows() -> Result<(), String> {
    same_shape(&render_iteration(&row_0_record(), 1), ROW_0)?;
    same_shape(&render_iteration(&row_42_record(), 1), ROW_42)?;
    expect(render_iteration(&row_42_record(), 0).is_empty(), || "verbosity 0 prints a row".into())
}

pub fn run_all() -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("primal file layout", primal_layout()),
        ("dual file layout", dual_layout()),
        ("iteration rows 0 and 42", iteration_rows()),
    ]
}
