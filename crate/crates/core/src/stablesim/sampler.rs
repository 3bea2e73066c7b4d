use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Open01};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::matrix_rank;

/// Stream id of the `X` samples.
pub const STREAM_X: u64 = 1;
/// Stream id of the `Y` samples.
pub const STREAM_Y: u64 = 2;

/// ChaCha stream keyed by `(seed, stream, partition)`.
pub fn stream_rng(seed: u64, stream: u64, partition: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((stream << 32) | partition);
    rng
}

/// A symmetric `q`-stable vector `X_i = Σ_j s_ij U_j` with i.i.d. standard
/// `U_j`, so that `E e^{i(ξ,X)} = exp(-Σ_j |Σ_i ξ_i s_ij|^q)`, and the block
/// split `k` used to build `Y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableSpec {
    pub q: f64,
    pub atoms: Vec<Vec<f64>>,
    pub k: usize,
}

impl StableSpec {
    pub fn new(q: f64, atoms: Vec<Vec<f64>>, k: usize) -> Result<Self> {
        let s = StableSpec { q, atoms, k };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q <= 2.0) {
            return Err(Error::invalid(format!("stable index q must lie in (0, 2], got {}", self.q)));
        }
        let n = self.atoms.len();
        if n < 2 {
            return Err(Error::invalid("need at least two rows of atoms"));
        }
        let m = self.atoms[0].len();
        if m == 0 || self.atoms.iter().any(|r| r.len() != m) {
            return Err(Error::invalid("atom rows must be nonempty and of equal length"));
        }
        if self.atoms.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::invalid("atoms must be finite"));
        }
        if !(self.k >= 1 && self.k < n) {
            return Err(Error::invalid(format!("block split k must lie in [1, {}), got {}", n, self.k)));
        }
        if self.atoms.iter().any(|r| r.iter().all(|&x| x == 0.0)) {
            return Err(Error::invalid("every row of atoms must be nonzero"));
        }
        Ok(())
    }

    /// Dimension of the subspace carrying `X` (the rank of the atoms). It
    /// governs which negative moments of `‖X‖` exist.
    pub fn support_rank(&self) -> usize {
        matrix_rank(&self.atoms)
    }

    pub fn n(&self) -> usize {
        self.atoms.len()
    }

    pub fn m(&self) -> usize {
        self.atoms[0].len()
    }

    /// `n×n` identity atoms.
    pub fn identity_atoms(n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect()).collect()
    }

    /// `I + cyclic shift`: row `i` has ones at columns `i` and `i+1 mod n`.
    /// For `n = 4` this is `[[1,1,0,0],[0,1,1,0],[0,0,1,1],[1,0,0,1]]`, of
    /// rank 3 (even `n` loses one dimension).
    pub fn coupled_atoms(n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| (j == i || j == (i + 1) % n) as u8 as f64).collect())
            .collect()
    }
}

/// Standard symmetric `q`-stable variate (`E e^{itU} = e^{-|t|^q}`) by the
/// Chambers–Mallows–Stuck method. For `q = 2` this is `N(0, 2)`.
pub fn sample_standard_stable<R: Rng + ?Sized>(q: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    let v = PI * (u - 0.5);
    let w: f64 = rng.sample(Exp1);
    if q == 1.0 {
        return v.tan();
    }
    if q == 2.0 {
        return 2.0 * v.sin() * w.sqrt();
    }
    (q * v).sin() / v.cos().powf(1.0 / q) * ((v * (1.0 - q)).cos() / w).powf((1.0 - q) / q)
}

/// Writes one draw of `X` into `out`.
pub fn sample_x<R: Rng + ?Sized>(spec: &StableSpec, rng: &mut R, out: &mut [f64]) {
    let u: Vec<f64> = (0..spec.m()).map(|_| sample_standard_stable(spec.q, rng)).collect();
    combine(&spec.atoms, &u, out, 0..spec.n());
}

/// Writes one draw of `Y`: rows `1..=k` from one set of atoms, rows
/// `k+1..=n` from an independent set, so the two blocks are independent
/// copies of the corresponding blocks of `X`.
pub fn sample_y<R: Rng + ?Sized>(spec: &StableSpec, rng: &mut R, out: &mut [f64]) {
    let u: Vec<f64> = (0..spec.m()).map(|_| sample_standard_stable(spec.q, rng)).collect();
    let u2: Vec<f64> = (0..spec.m()).map(|_| sample_standard_stable(spec.q, rng)).collect();
    combine(&spec.atoms, &u, out, 0..spec.k);
    combine(&spec.atoms, &u2, out, spec.k..spec.n());
}

fn combine(atoms: &[Vec<f64>], u: &[f64], out: &mut [f64], rows: std::ops::Range<usize>) {
    for i in rows {
        out[i] = atoms[i].iter().zip(u).map(|(s, x)| s * x).sum();
    }
}
