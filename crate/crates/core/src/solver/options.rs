use crate::io::{OptionError, OptionSet};

/// Typed solver parameters. Defaults follow the compiled option table.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub maxiter_fista: usize,
    pub mu_fista: f64,
    /// Relative slack on the quadratic upper model in the backtracking test.
    pub chi_fista: f64,
    pub l0_fista: f64,
    pub l_inc_fista: f64,
    pub sigma_fista: f64,
    pub err_tol_fista: f64,

    pub maxiter_aipp: usize,
    pub lam0_aipp: f64,

    pub maxiter_hlr: usize,
    pub maxiter_hallar: usize,

    pub eps_pfeas: f64,
    pub eps_gap: f64,

    pub beta0: f64,
    pub beta_inc: f64,
    pub beta_min: f64,
    pub beta_max: f64,

    pub scale_a: f64,
    pub scale_c: f64,

    /// Seconds.
    pub time_limit: f64,
    /// Ritz residual tolerance.
    pub eps_eig: f64,
    /// Residual below which an unconverged eigenpair is still used.
    pub err_tol_eig: f64,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self::from_option_set(&OptionSet::defaults()).expect("compiled defaults are valid")
    }
}

impl SolverOptions {
    /// Reads every solver key from a merged option set, then validates.
    pub fn from_option_set(set: &OptionSet) -> Result<Self, OptionError> {
        let real = |k: &str| {
            set.real(k)
                .ok_or_else(|| OptionError::Invalid(format!("option `{k}` has no value")))
        };
        let int = |k: &str| {
            set.int(k)
                .map(|v| v as usize)
                .ok_or_else(|| OptionError::Invalid(format!("option `{k}` has no value")))
        };
        let opts = Self {
            maxiter_fista: int("maxiter_fista")?,
            mu_fista: real("mu_fista")?,
            chi_fista: real("chi_fista")?,
            l0_fista: real("L0_fista")?,
            l_inc_fista: real("L_inc_fista")?,
            sigma_fista: real("sigma_fista")?,
            err_tol_fista: real("err_tol_fista")?,
            maxiter_aipp: int("maxiter_aipp")?,
            lam0_aipp: real("lam0_aipp")?,
            maxiter_hlr: int("maxiter_hlr")?,
            maxiter_hallar: int("maxiter_hallar")?,
            eps_pfeas: real("eps_pfeas")?,
            eps_gap: real("eps_gap")?,
            beta0: real("beta0")?,
            beta_inc: real("beta_inc")?,
            beta_min: real("beta_min")?,
            beta_max: real("beta_max")?,
            scale_a: real("scale_A")?,
            scale_c: real("scale_C")?,
            time_limit: real("time_limit")?,
            eps_eig: real("eps_eig")?,
            err_tol_eig: real("err_tol_eig")?,
            seed: set.int("seed").unwrap_or(0),
        };
        opts.validate()?;
        Ok(opts)
    }

    pub fn validate(&self) -> Result<(), OptionError> {
        let bad = |msg: String| Err(OptionError::Invalid(msg));
        let positive = [
            ("mu_fista", self.mu_fista),
            ("chi_fista", self.chi_fista),
            ("L0_fista", self.l0_fista),
            ("err_tol_fista", self.err_tol_fista),
            ("lam0_aipp", self.lam0_aipp),
            ("eps_pfeas", self.eps_pfeas),
            ("eps_gap", self.eps_gap),
            ("beta0", self.beta0),
            ("beta_min", self.beta_min),
            ("beta_max", self.beta_max),
            ("scale_A", self.scale_a),
            ("scale_C", self.scale_c),
            ("time_limit", self.time_limit),
            ("eps_eig", self.eps_eig),
            ("err_tol_eig", self.err_tol_eig),
        ];
        for (k, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("{k} must be a positive finite number, got {v}"));
            }
        }
        for (k, v) in [
            ("maxiter_fista", self.maxiter_fista),
            ("maxiter_aipp", self.maxiter_aipp),
            ("maxiter_hlr", self.maxiter_hlr),
            ("maxiter_hallar", self.maxiter_hallar),
        ] {
            if v < 1 {
                return bad(format!("{k} must be at least 1"));
            }
        }
        if !(self.beta_min <= self.beta0 && self.beta0 <= self.beta_max) {
            return bad(format!(
                "need beta_min <= beta0 <= beta_max, got {} <= {} <= {}",
                self.beta_min, self.beta0, self.beta_max
            ));
        }
        if !(self.beta_inc >= 1.0) {
            return bad(format!("beta_inc must be >= 1, got {}", self.beta_inc));
        }
        if !(self.sigma_fista > 0.0 && self.sigma_fista < 1.0) {
            return bad(format!("sigma_fista must lie in (0, 1), got {}", self.sigma_fista));
        }
        if !(self.chi_fista < 1.0) {
            return bad(format!("chi_fista must lie in (0, 1), got {}", self.chi_fista));
        }
        if !(self.l_inc_fista > 1.0) {
            return bad(format!("L_inc_fista must exceed 1, got {}", self.l_inc_fista));
        }
        Ok(())
    }
}
