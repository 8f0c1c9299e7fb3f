use nalgebra::{DMatrix, DVector};

use crate::model::SdpInstance;

/// Augmented Lagrangian for fixed `(p, β)`, evaluated on raw factors.
pub(crate) struct AugLag<'a> {
    pub inst: &'a SdpInstance,
    pub p: &'a DVector<f64>,
    pub beta: f64,
}

/// Value plus the residual needed for the gradient at the same point.
pub(crate) struct Eval {
    pub value: f64,
    pub residual: DVector<f64>,
}

impl<'a> AugLag<'a> {
    pub fn new(inst: &'a SdpInstance, p: &'a DVector<f64>, beta: f64) -> Self {
        Self { inst, p, beta }
    }

    pub fn residual(&self, y: &DMatrix<f64>) -> DVector<f64> {
        self.inst.apply_a_unchecked(y) - self.inst.b()
    }

    pub fn eval(&self, y: &DMatrix<f64>) -> Eval {
        let residual = self.residual(y);
        let value = self.inst.cost().quadform_unchecked(y)
            + self.p.dot(&residual)
            + 0.5 * self.beta * residual.norm_squared();
        Eval { value, residual }
    }

    /// Residual at `y1` and `f(y1) − f(y0)`, computed from `y1 − y0` so that
    /// small changes keep their relative accuracy.
    pub fn delta(
        &self,
        y0: &DMatrix<f64>,
        r0: &DVector<f64>,
        y1: &DMatrix<f64>,
    ) -> (DVector<f64>, f64) {
        let d = y1 - y0;
        let s = y1 + y0;
        let dr = self.inst.apply_a_bilinear_unchecked(&d, &s);
        let dc = self.inst.cost().bilinear_unchecked(&d, &s);
        let df = dc + self.p.dot(&dr) + 0.5 * self.beta * dr.dot(&(r0 * 2.0 + &dr));
        (r0 + dr, df)
    }

    pub fn multiplier(&self, residual: &DVector<f64>) -> DVector<f64> {
        self.p + residual * self.beta
    }

    /// `(C + A*(q)) Y`.
    pub fn slack_times(&self, q: &DVector<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
        let mut w = Vec::with_capacity(q.len() + 1);
        w.push(1.0);
        w.extend(q.iter());
        self.inst.combine_apply(&w, y)
    }

    pub fn gradient(&self, y: &DMatrix<f64>, residual: &DVector<f64>) -> DMatrix<f64> {
        self.slack_times(&self.multiplier(residual), y) * 2.0
    }
}

/// Radial projection onto `{‖Y‖_F² <= radius_sq}`.
pub(crate) fn project_ball(y: &mut DMatrix<f64>, radius_sq: f64) {
    let nsq = y.norm_squared();
    if nsq > radius_sq {
        *y *= (radius_sq / nsq).sqrt();
    }
}
