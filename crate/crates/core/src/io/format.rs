//! Problem readers behind a common trait, looked up by name or file extension.

use std::path::Path;

use super::{parse_hslr, parse_sdpa, write_hslr, IoError};
use crate::model::SdpInstance;

pub trait ProblemFormat: Send + Sync {
    /// Registry key, e.g. `"hslr"`.
    fn name(&self) -> &'static str;
    /// File suffixes claimed by this format, without the leading dot.
    fn extensions(&self) -> &'static [&'static str];
    /// Human-readable label used in log lines ("Reading <label> file").
    fn label(&self) -> &'static str;
    /// `trace_bound` is the user-supplied bound, if any.
    fn read(&self, text: &str, trace_bound: Option<f64>) -> Result<SdpInstance, IoError>;
    fn write(&self, _inst: &SdpInstance) -> Option<String> {
        None
    }
}

pub struct HslrFormat;

impl ProblemFormat for HslrFormat {
    fn name(&self) -> &'static str {
        "hslr"
    }

    fn extensions(&self) -> &'static [&'static str] {
        &["hslr"]
    }

    fn label(&self) -> &'static str {
        "HSLR"
    }

    fn read(&self, text: &str, trace_bound: Option<f64>) -> Result<SdpInstance, IoError> {
        let inst = parse_hslr(text)?;
        if let Some(t) = trace_bound {
            if t != inst.tau() {
                log::warn!(
                    "ignoring --trace_bound {t}: HSLR files carry their own trace bound ({})",
                    inst.tau()
                );
            }
        }
        Ok(inst)
    }

    fn write(&self, inst: &SdpInstance) -> Option<String> {
        Some(write_hslr(inst))
    }
}

pub struct SdpaFormat;

impl ProblemFormat for SdpaFormat {
    fn name(&self) -> &'static str {
        "sdpa"
    }

    fn extensions(&self) -> &'static [&'static str] {
        &["dat-s"]
    }

    fn label(&self) -> &'static str {
        "SDPA"
    }

    fn read(&self, text: &str, trace_bound: Option<f64>) -> Result<SdpInstance, IoError> {
        let prob = parse_sdpa(text)?;
        let tau = trace_bound.ok_or(IoError::MissingTraceBound)?;
        Ok(prob.into_instance(tau)?)
    }
}

pub struct FormatRegistry {
    formats: Vec<Box<dyn ProblemFormat>>,
    fallback: &'static str,
}

impl FormatRegistry {
    pub fn empty(fallback: &'static str) -> Self {
        Self {
            formats: Vec::new(),
            fallback,
        }
    }

    /// HSLR and SDPA; unknown extensions fall back to HSLR.
    pub fn builtin() -> Self {
        let mut reg = Self::empty("hslr");
        reg.register(Box::new(HslrFormat));
        reg.register(Box::new(SdpaFormat));
        reg
    }

    /// Later registrations shadow earlier ones with the same name.
    pub fn register(&mut self, format: Box<dyn ProblemFormat>) {
        self.formats.retain(|f| f.name() != format.name());
        self.formats.push(format);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.formats.iter().map(|f| f.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn ProblemFormat> {
        self.formats
            .iter()
            .find(|f| f.name().eq_ignore_ascii_case(name))
            .map(|f| f.as_ref())
    }

    pub fn detect(&self, path: &Path) -> Option<&dyn ProblemFormat> {
        let fname = path.file_name()?.to_str()?.to_ascii_lowercase();
        self.formats
            .iter()
            .find(|f| {
                f.extensions()
                    .iter()
                    .any(|ext| fname.ends_with(&format!(".{ext}")))
            })
            .map(|f| f.as_ref())
            .or_else(|| self.get(self.fallback))
    }

    /// Explicit name wins over extension sniffing.
    pub fn select(&self, name: Option<&str>, path: &Path) -> Result<&dyn ProblemFormat, IoError> {
        match name {
            Some(n) => self.get(n).ok_or_else(|| IoError::UnknownFormat(n.to_string())),
            None => self
                .detect(path)
                .ok_or_else(|| IoError::UnknownFormat(path.display().to_string())),
        }
    }
}
