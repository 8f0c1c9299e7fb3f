use nalgebra::{DMatrix, DVector};

use super::{FactoredPrimal, HybridMatrix, ModelError, SdpInstance};

/// Largest side `hm_dense` will materialize.
pub const DENSE_LIMIT: usize = 2048;

fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<(), ModelError> {
    if expected == found {
        Ok(())
    } else {
        Err(ModelError::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}

/// `A • (Y Yᵀ)` for a hybrid matrix.
pub fn hm_quadform(a: &HybridMatrix, y: &FactoredPrimal) -> Result<f64, ModelError> {
    check_dim("factor rows", a.n(), y.n())?;
    Ok(a.quadform_unchecked(y.matrix()))
}

/// `A(Y Yᵀ) = (A_1 • YYᵀ, ..., A_m • YYᵀ)`.
pub fn apply_a(inst: &SdpInstance, y: &FactoredPrimal) -> Result<DVector<f64>, ModelError> {
    check_dim("factor rows", inst.n(), y.n())?;
    Ok(inst.apply_a_unchecked(y.matrix()))
}

/// `(Σ_l p_l A_l) v`.
pub fn apply_astar_vec(
    inst: &SdpInstance,
    p: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<DVector<f64>, ModelError> {
    check_dim("multiplier vector", inst.m(), p.len())?;
    check_dim("vector", inst.n(), v.len())?;
    let mut out = vec![0.0; inst.n()];
    for (a, &w) in inst.constraints().iter().zip(p.iter()) {
        a.matvec_add(w, v.as_slice(), &mut out);
    }
    Ok(DVector::from_vec(out))
}

/// `C•X + ⟨p, A(X) − b⟩ + (β/2)‖A(X) − b‖²` at `X = Y Yᵀ`.
pub fn al_objective(
    inst: &SdpInstance,
    y: &FactoredPrimal,
    p: &DVector<f64>,
    beta: f64,
) -> Result<f64, ModelError> {
    check_dim("factor rows", inst.n(), y.n())?;
    check_dim("multiplier vector", inst.m(), p.len())?;
    let r = inst.apply_a_unchecked(y.matrix()) - inst.b();
    Ok(inst.cost().quadform_unchecked(y.matrix()) + p.dot(&r) + 0.5 * beta * r.norm_squared())
}

/// Gradient of [`al_objective`] in `Y`: `2 (C + A*(q)) Y` with `q = p + β(A(YYᵀ) − b)`.
pub fn al_gradient(
    inst: &SdpInstance,
    y: &FactoredPrimal,
    p: &DVector<f64>,
    beta: f64,
) -> Result<DMatrix<f64>, ModelError> {
    check_dim("factor rows", inst.n(), y.n())?;
    check_dim("multiplier vector", inst.m(), p.len())?;
    let r = inst.apply_a_unchecked(y.matrix()) - inst.b();
    let q = p + r * beta;
    let mut w = Vec::with_capacity(inst.m() + 1);
    w.push(2.0);
    w.extend(q.iter().map(|v| 2.0 * v));
    Ok(inst.combine_apply(&w, y.matrix()))
}

/// `pval = C • Y Yᵀ`.
pub fn primal_value(inst: &SdpInstance, y: &FactoredPrimal) -> Result<f64, ModelError> {
    hm_quadform(inst.cost(), y)
}

/// `dval = −bᵀp − τθ`.
pub fn dual_value(inst: &SdpInstance, p: &DVector<f64>, theta: f64) -> Result<f64, ModelError> {
    check_dim("multiplier vector", inst.m(), p.len())?;
    if !(theta >= 0.0) {
        return Err(ModelError::NegativeTheta(theta));
    }
    Ok(-inst.b().dot(p) - inst.tau() * theta)
}

/// Dense symmetric materialization. Meant for checks on small problems only.
pub fn hm_dense(a: &HybridMatrix) -> Result<DMatrix<f64>, ModelError> {
    let n = a.n();
    if n > DENSE_LIMIT {
        return Err(ModelError::SizeGuard {
            n,
            limit: DENSE_LIMIT,
        });
    }
    let mut out = DMatrix::zeros(n, n);
    if let Some(s) = a.sparse() {
        for (i, j, v) in s.iter() {
            out[(i, j)] += v;
            if i != j {
                out[(j, i)] += v;
            }
        }
    }
    if let Some(l) = a.lowrank() {
        out += l.p() * l.d() * l.p().transpose();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LowRankFactor, SparseSym};

    fn a3() -> HybridMatrix {
        let sp = SparseSym::from_triplets(4, [(0, 2, 0.7), (1, 1, 1.0), (1, 3, -0.5), (3, 3, -1.0)])
            .unwrap();
        let p = DMatrix::from_row_slice(4, 2, &[1.0, 2.0, 2.0, 1.0, 1.0, 1.0, 2.0, 1.0]);
        let d = DMatrix::from_row_slice(2, 2, &[1.0, -0.5, -0.5, -2.0]);
        HybridMatrix::new(4, Some(sp), Some(LowRankFactor::new(p, d).unwrap())).unwrap()
    }

    #[test]
    fn zero_matrix_quadform() {
        let y = FactoredPrimal::new(DMatrix::from_element(3, 2, 1.5));
        assert_eq!(hm_quadform(&HybridMatrix::zero(3), &y).unwrap(), 0.0);
    }

    #[test]
    fn quadform_matches_dense_on_a3() {
        let a = a3();
        let e = FactoredPrimal::new(DMatrix::from_element(4, 1, 1.0));
        let dense = hm_dense(&a).unwrap();
        let ones = DVector::from_element(4, 1.0);
        let oracle = ones.dot(&(&dense * &ones));
        let got = hm_quadform(&a, &e).unwrap();
        assert!((got - oracle).abs() <= 1e-12 * oracle.abs().max(1.0));
        // eᵀA₃e = 2·0.7 + 1 − 2·0.5 − 1 + eᵀP₃D₃P₃ᵀe = 0.4 + (6,5)·D₃·(6,5)ᵀ
        assert!((got - (0.4 + 36.0 - 30.0 - 50.0)).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_reported() {
        let y = FactoredPrimal::zeros(3, 1);
        assert!(matches!(
            hm_quadform(&a3(), &y),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dense_guard() {
        assert!(matches!(
            hm_dense(&HybridMatrix::zero(DENSE_LIMIT + 1)),
            Err(ModelError::SizeGuard { .. })
        ));
    }

    #[test]
    fn dual_value_formula() {
        let z = HybridMatrix::zero(1);
        let inst = SdpInstance::new(
            1,
            DVector::from_vec(vec![2.0, 4.0, 7.0]),
            5.0,
            vec![z.clone(), z.clone(), z.clone(), z],
        )
        .unwrap();
        let p = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert_eq!(dual_value(&inst, &p, 1.0).unwrap(), -7.0);
        assert_eq!(dual_value(&inst, &DVector::zeros(3), 0.0).unwrap(), 0.0);
    }
}
