//! Dense reference solver: augmented Lagrangian in X-space with FISTA steps
//! projected onto the spectraplex by a full eigendecomposition.

use lrsdp::model::{hm_dense, SdpInstance};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub struct DenseProblem {
    pub c: DMatrix<f64>,
    pub a: Vec<DMatrix<f64>>,
    pub b: DVector<f64>,
    pub tau: f64,
}

impl DenseProblem {
    pub fn from_instance(inst: &SdpInstance) -> Self {
        Self {
            c: hm_dense(inst.cost()).unwrap(),
            a: inst.constraints().iter().map(|m| hm_dense(m).unwrap()).collect(),
            b: inst.b().clone(),
            tau: inst.tau(),
        }
    }

    pub fn apply(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|a| a.dot(x)))
    }

    pub fn adjoint(&self, p: &DVector<f64>) -> DMatrix<f64> {
        let n = self.c.nrows();
        self.a.iter().zip(p.iter()).fold(DMatrix::zeros(n, n), |acc, (a, &w)| acc + a * w)
    }
}

/// Euclidean projection onto `{x >= 0, Σx <= tau}`.
pub fn project_capped_simplex(v: &[f64], tau: f64) -> Vec<f64> {
    if v.iter().map(|x| x.max(0.0)).sum::<f64>() <= tau {
        return v.iter().map(|x| x.max(0.0)).collect();
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut shift = 0.0;
    for (k, &x) in s.iter().enumerate() {
        acc += x;
        let t = (acc - tau) / (k + 1) as f64;
        if x > t {
            shift = t;
        }
    }
    v.iter().map(|x| (x - shift).max(0.0)).collect()
}

pub fn project_spectraplex(x: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    let sym = (x + x.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let lam = project_capped_simplex(eig.eigenvalues.as_slice(), tau);
    let q = &eig.eigenvectors;
    q * DMatrix::from_diagonal(&DVector::from_vec(lam)) * q.transpose()
}

pub fn min_eig(s: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new((s + s.transpose()) * 0.5).eigenvalues.min()
}

pub struct OracleSolution {
    pub value: f64,
    pub dual_value: f64,
    pub x: DMatrix<f64>,
    pub p: DVector<f64>,
    pub feas: f64,
}

/// Runs until the multiplier residual and inner stationarity are at 1e-9.
pub fn dense_oracle(prob: &DenseProblem) -> OracleSolution {
    let n = prob.c.nrows();
    let m = prob.a.len();
    let mut x = DMatrix::zeros(n, n);
    let mut p = DVector::zeros(m);
    let mut beta = 10.0;
    let a_norm_sq: f64 = prob.a.iter().map(|a| a.norm_squared()).sum();
    let mut last_res = f64::INFINITY;

    for _outer in 0..4000 {
        let lip = (beta * a_norm_sq).max(1.0);
        let grad = |x: &DMatrix<f64>| {
            let r = prob.apply(x) - &prob.b;
            &prob.c + prob.adjoint(&(&p + r * beta))
        };
        let mut y = x.clone();
        let mut t = 1.0f64;
        let mut stat = f64::INFINITY;
        for _ in 0..50_000 {
            let g = grad(&y);
            let x_new = project_spectraplex(&(&y - &g / lip), prob.tau);
            let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            y = &x_new + (&x_new - &x) * ((t - 1.0) / t_new);
            x = x_new;
            t = t_new;
            let gx = grad(&x);
            stat = lip * (&x - project_spectraplex(&(&x - &gx / lip), prob.tau)).norm();
            if stat <= 1e-9 {
                break;
            }
        }
        let r = prob.apply(&x) - &prob.b;
        p += &r * beta;
        let res = r.norm();
        if res <= 1e-9 && stat <= 1e-9 {
            break;
        }
        if res > 0.25 * last_res {
            beta = (beta * 2.0).min(1e6);
        }
        last_res = res;
    }

    let s = &prob.c + prob.adjoint(&p);
    let theta = (-min_eig(&s)).max(0.0);
    OracleSolution {
        value: prob.c.dot(&x),
        dual_value: -prob.b.dot(&p) - prob.tau * theta,
        feas: (prob.apply(&x) - &prob.b).norm(),
        x,
        p,
    }
}
