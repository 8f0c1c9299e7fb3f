#![allow(dead_code)]

pub mod golden;
pub mod instances;
pub mod oracle;
pub mod props;

use std::path::PathBuf;

pub const MIXED: &str = include_str!("../../data/mixed.hslr");
pub const C4: &str = include_str!("../../data/c4.hslr");
pub const MATCOMP: &str = include_str!("../../data/matcomp.hslr");

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}
