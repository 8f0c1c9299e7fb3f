//! Uniform data scaling to a unit trace bound.
//!
//! With `τ_a` (scale_A), `τ_c` (scale_C) and original trace bound `τ`:
//!
//! ```text
//! C̃ = τ_c C    Ã = τ_a A    b̃ = (τ_a/τ) b    Tr(X̃) <= 1
//! X̃ = X/τ      p̃ = (τ_c/τ_a) p    θ̃ = τ_c θ    v = (τ/τ_c) ṽ
//! β̃ = (τ τ_c / τ_a²) β
//! ```

use nalgebra::DVector;
use thiserror::Error;

use crate::model::{DualPoint, FactoredPrimal, HybridMatrix, SdpInstance};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("scale parameters must be positive and finite (scale_A={tau_a}, scale_C={tau_c}, tau={tau})")]
pub struct ScaleError {
    pub tau_a: f64,
    pub tau_c: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleParams {
    tau_a: f64,
    tau_c: f64,
    tau: f64,
}

impl ScaleParams {
    pub fn new(tau_a: f64, tau_c: f64, tau: f64) -> Result<Self, ScaleError> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if ok(tau_a) && ok(tau_c) && ok(tau) {
            Ok(Self { tau_a, tau_c, tau })
        } else {
            Err(ScaleError { tau_a, tau_c, tau })
        }
    }

    pub fn for_instance(inst: &SdpInstance, tau_a: f64, tau_c: f64) -> Result<Self, ScaleError> {
        Self::new(tau_a, tau_c, inst.tau())
    }

    pub fn tau_a(&self) -> f64 {
        self.tau_a
    }

    pub fn tau_c(&self) -> f64 {
        self.tau_c
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

pub fn scale_instance(inst: &SdpInstance, sp: &ScaleParams) -> SdpInstance {
    let mut mats: Vec<HybridMatrix> = Vec::with_capacity(inst.m() + 1);
    mats.push(inst.cost().scaled(sp.tau_c));
    mats.extend(inst.constraints().iter().map(|a| a.scaled(sp.tau_a)));
    let b = inst.b() * (sp.tau_a / sp.tau);
    SdpInstance::from_parts_unchecked(inst.n(), b, 1.0, mats)
}

/// `Y = √τ · Ỹ`, so that `X = τ X̃`.
pub fn unscale_primal(yt: &FactoredPrimal, sp: &ScaleParams) -> FactoredPrimal {
    FactoredPrimal::new(yt.matrix() * sp.tau.sqrt())
}

/// Inverse of [`unscale_primal`], used for warm starts given in original units.
pub fn scale_primal(y: &FactoredPrimal, sp: &ScaleParams) -> FactoredPrimal {
    FactoredPrimal::new(y.matrix() / sp.tau.sqrt())
}

pub fn unscale_dual(pt: &DVector<f64>, thetat: f64, sp: &ScaleParams) -> DualPoint {
    DualPoint {
        p: pt * (sp.tau_a / sp.tau_c),
        theta: (thetat / sp.tau_c).max(0.0),
    }
}

pub fn unscale_value(vt: f64, sp: &ScaleParams) -> f64 {
    sp.tau / sp.tau_c * vt
}

pub fn scale_beta(beta: f64, sp: &ScaleParams) -> f64 {
    sp.tau * sp.tau_c / (sp.tau_a * sp.tau_a) * beta
}

pub fn unscale_beta(beta_t: f64, sp: &ScaleParams) -> f64 {
    beta_t * (sp.tau_a * sp.tau_a) / (sp.tau * sp.tau_c)
}
