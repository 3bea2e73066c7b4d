use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::stable_moment;

/// Two exponent tuples whose moment products have opposite signs.
///
/// `I(α) = S_q(α_1)⋯S_q(α_{n-1}) S_q(-α_1-…-α_{n-1}-p)` is, up to a positive
/// factor, the pairing of the transform of `‖x‖_q^{-p}` with a positive test
/// function. `α_i ∈ (-1, 0)` makes the first `n-1` factors positive, and the
/// last factor changes sign as its argument crosses 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub q: f64,
    pub n: usize,
    pub p: f64,
    pub epsilon: f64,
    pub target_pos: f64,
    pub target_neg: f64,
    pub alpha_pos: Vec<f64>,
    pub alpha_neg: Vec<f64>,
    pub i_pos: f64,
    pub i_neg: f64,
}

/// Certificate that `‖x‖_q^{-p}` is not positive definite on `R^n`, for
/// `q > 2`, `n > 3`, `0 < p < n-3`.
///
/// Targets `2 ∓ ε` (starting from `ε = 0.1`, halved while infeasible) are
/// split evenly: `α_i = (-p - target)/(n-1)`.
pub fn sign_change_certificate(q: f64, n: usize, p: f64) -> Result<CertificateReport> {
    if !(q > 2.0) || !q.is_finite() {
        return Err(Error::InfeasibleCertificate(format!("needs 2 < q < inf, got q = {q}")));
    }
    if n <= 3 {
        return Err(Error::InfeasibleCertificate(format!("needs n > 3, got n = {n}")));
    }
    let nf = n as f64;
    if !(p > 0.0 && p < nf - 3.0) {
        return Err(Error::InfeasibleCertificate(format!(
            "needs p in (0, {}), got p = {p}",
            nf - 3.0
        )));
    }
    let m = (n - 1) as f64;
    let feasible = |target: f64| {
        let a = (-p - target) / m;
        a > -1.0 && a < 0.0 && target > -1.0 && target < q && target > -p && target < m - p
    };
    let mut eps = 0.1;
    while eps > 1e-6 {
        let (lo, hi) = (2.0 - eps, 2.0 + eps);
        if feasible(lo) && feasible(hi) {
            let alpha_pos = vec![(-p - lo) / m; n - 1];
            let alpha_neg = vec![(-p - hi) / m; n - 1];
            let i_pos = product(q, &alpha_pos, lo)?;
            let i_neg = product(q, &alpha_neg, hi)?;
            return Ok(CertificateReport {
                q,
                n,
                p,
                epsilon: eps,
                target_pos: lo,
                target_neg: hi,
                alpha_pos,
                alpha_neg,
                i_pos,
                i_neg,
            });
        }
        eps *= 0.5;
    }
    Err(Error::InfeasibleCertificate(format!(
        "no exponent tuple straddles 2 for q = {q}, n = {n}, p = {p}"
    )))
}

fn product(q: f64, alpha: &[f64], target: f64) -> Result<f64> {
    let mut v = stable_moment(q, target)?;
    for &a in alpha {
        v *= stable_moment(q, a)?;
    }
    Ok(v)
}
