use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{lq_norm, HomogeneousNorm, SpaceSpec};

/// True when `‖(u, v)‖ = ‖(u, -v)‖` (block split after `k`) on `trials`
/// random Gaussian points, to relative accuracy `1e-12`.
pub fn symmetry_check(space: &SpaceSpec<f64>, k: usize, trials: usize, seed: u64) -> Result<bool> {
    let n = space.n();
    if !(k >= 1 && k < n) {
        return Err(Error::invalid(format!("block split k must lie in [1, {n}), got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; n];
    for _ in 0..trials {
        for v in x.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        let a = space.norm(&x);
        for v in x[k..].iter_mut() {
            *v = -*v;
        }
        let b = space.norm(&x);
        if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which of the Clarkson-type inequalities hold for one pair `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClarksonResult {
    /// `e^{-‖x+y‖^q} + e^{-‖x-y‖^q} ≥ 2e^{-‖x‖^q-‖y‖^q}`.
    pub exponential: bool,
    /// `‖x+y‖^p + ‖x-y‖^p ≤ 2(‖x‖^q + ‖y‖^q)^{p/q}` for `p ≤ q`, reversed
    /// for `q = 2 < p`; `None` outside both regimes.
    pub power: Option<bool>,
    /// `‖x+y‖^q + ‖x-y‖^q ≤ 2(‖x‖^q + ‖y‖^q)`.
    pub clarkson: bool,
}

/// Evaluates the three inequalities with a relative slack of `1e-12`.
pub fn clarkson_check(x: &[f64], y: &[f64], q: f64, p: f64) -> Result<ClarksonResult> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::invalid("x and y must be nonempty and of equal length"));
    }
    if !(q > 0.0 && q <= 2.0) {
        return Err(Error::invalid(format!("q must lie in (0, 2], got {q}")));
    }
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::invalid(format!("p must be positive, got {p}")));
    }
    let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let (ns, nd) = (lq_norm(q, &sum), lq_norm(q, &diff));
    let (nx, ny) = (lq_norm(q, x), lq_norm(q, y));
    let geq = |lhs: f64, rhs: f64| lhs - rhs >= -1e-12 * lhs.abs().max(rhs.abs()).max(1.0);

    let exponential = geq((-ns.powf(q)).exp() + (-nd.powf(q)).exp(), 2.0 * (-nx.powf(q) - ny.powf(q)).exp());
    let base = 2.0 * (nx.powf(q) + ny.powf(q)).powf(p / q);
    let lhs = ns.powf(p) + nd.powf(p);
    let power = if p <= q {
        Some(geq(base, lhs))
    } else if q == 2.0 {
        Some(geq(lhs, base))
    } else {
        None
    };
    let clarkson = geq(2.0 * (nx.powf(q) + ny.powf(q)), ns.powf(q) + nd.powf(q));
    Ok(ClarksonResult {
        exponential,
        power,
        clarkson,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn lq_spaces_are_symmetric() {
        for s in [SpaceSpec::lq(1.5, 4).unwrap(), SpaceSpec::Linf { n: 2 }] {
            assert!(symmetry_check(&s, 1, 100, 3).unwrap());
        }
    }

    #[test]
    fn mixing_atoms_break_symmetry() {
        // The third atom column mixes the two coordinates.
        let s = SpaceSpec::spectral(vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]], 1.0).unwrap();
        assert!(!symmetry_check(&s, 1, 100, 3).unwrap());
    }

    #[test]
    fn clarkson_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
            let r = clarkson_check(&x, &y, 1.0, 0.7).unwrap();
            assert!(r.exponential && r.power == Some(true) && r.clarkson);
            let r = clarkson_check(&x, &y, 2.0, 3.0).unwrap();
            assert_eq!(r.power, Some(true));
        }
        let x = [0.4, -1.0, 2.0];
        let r = clarkson_check(&x, &x, 1.5, 1.0).unwrap();
        assert!(r.clarkson);
        assert_eq!(clarkson_check(&x, &x, 1.5, 1.7).unwrap().power, None);
    }
}
