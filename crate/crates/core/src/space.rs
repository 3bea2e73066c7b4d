//! Homogeneous spaces `(R^n, ‖·‖)` understood by the evaluators.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A norm on `R^n` evaluated pointwise.
pub trait HomogeneousNorm<T> {
    fn dim(&self) -> usize;
    fn norm(&self, x: &[T]) -> T;
}

/// A homogeneous space.
///
/// `Spectral { atoms, r }` is `‖x‖ = (Σ_j |Σ_i x_i s_ij|^r)^{1/r}` with
/// `atoms[i][j] = s_ij`, i.e. the span of the rows of `atoms` inside `ℓ_r^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec<T> {
    Lq { q: T, n: usize },
    Linf { n: usize },
    Spectral { atoms: Vec<Vec<T>>, r: T },
}

impl<T: Real> SpaceSpec<T> {
    /// `ℓ_q^n`; an infinite `q` gives the max-norm.
    pub fn lq(q: T, n: usize) -> Result<Self> {
        let s = if q.is_infinite() && q > T::zero() {
            SpaceSpec::Linf { n }
        } else {
            SpaceSpec::Lq { q, n }
        };
        s.validate()?;
        Ok(s)
    }

    pub fn spectral(atoms: Vec<Vec<T>>, r: T) -> Result<Self> {
        let s = SpaceSpec::Spectral { atoms, r };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceSpec::Lq { q, n } => {
                if *n == 0 {
                    return Err(Error::invalid("dimension must be positive"));
                }
                if !(*q > T::zero()) || !q.is_finite() {
                    return Err(Error::invalid(format!("q must lie in (0, inf), got {q}")));
                }
            }
            SpaceSpec::Linf { n } => {
                if *n == 0 {
                    return Err(Error::invalid("dimension must be positive"));
                }
            }
            SpaceSpec::Spectral { atoms, r } => {
                if !(*r > T::zero() && *r <= T::lit(2.0)) {
                    return Err(Error::invalid(format!("r must lie in (0, 2], got {r}")));
                }
                let n = atoms.len();
                if n == 0 {
                    return Err(Error::invalid("atom matrix has no rows"));
                }
                let m = atoms[0].len();
                if atoms.iter().any(|row| row.len() != m) {
                    return Err(Error::invalid("atom rows have different lengths"));
                }
                if atoms.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(Error::invalid("atom entries must be finite"));
                }
                if matrix_rank(atoms) < n {
                    return Err(Error::invalid(format!(
                        "atom matrix has rank below {n}: the map is not a norm"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        match self {
            SpaceSpec::Lq { n, .. } | SpaceSpec::Linf { n } => *n,
            SpaceSpec::Spectral { atoms, .. } => atoms.len(),
        }
    }

    /// The exponent of an `ℓ_q` space (infinite for the max-norm).
    pub fn lq_exponent(&self) -> Option<T> {
        match self {
            SpaceSpec::Lq { q, .. } => Some(*q),
            SpaceSpec::Linf { .. } => Some(T::infinity()),
            SpaceSpec::Spectral { .. } => None,
        }
    }

    /// Converts the scalar type (used to hand `f64` specs to `f32` kernels).
    pub fn cast<U: Real>(&self) -> SpaceSpec<U> {
        let c = |x: T| U::lit(x.to_f64_lossy());
        match self {
            SpaceSpec::Lq { q, n } => SpaceSpec::Lq { q: c(*q), n: *n },
            SpaceSpec::Linf { n } => SpaceSpec::Linf { n: *n },
            SpaceSpec::Spectral { atoms, r } => SpaceSpec::Spectral {
                atoms: atoms.iter().map(|row| row.iter().map(|&x| c(x)).collect()).collect(),
                r: c(*r),
            },
        }
    }
}

impl<T: Real> HomogeneousNorm<T> for SpaceSpec<T> {
    fn dim(&self) -> usize {
        self.n()
    }

    fn norm(&self, x: &[T]) -> T {
        match self {
            SpaceSpec::Lq { q, .. } => lq_norm(*q, x),
            SpaceSpec::Linf { .. } => x.iter().fold(T::zero(), |m, v| m.max(v.abs())),
            SpaceSpec::Spectral { atoms, r } => {
                let m = atoms[0].len();
                let y: Vec<T> = (0..m)
                    .map(|j| x.iter().zip(atoms).fold(T::zero(), |acc, (&xi, row)| acc + xi * row[j]))
                    .collect();
                lq_norm(*r, &y)
            }
        }
    }
}

/// `(Σ|x_k|^q)^{1/q}`, scaled by the largest entry to avoid overflow.
pub fn lq_norm<T: Real>(q: T, x: &[T]) -> T {
    let big = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if big == T::zero() || !big.is_finite() {
        return big;
    }
    let s: T = x.iter().map(|v| (v.abs() / big).powf(q)).sum();
    big * s.powf(T::one() / q)
}

impl<T: Real> fmt::Display for SpaceSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Lq { q, n } => write!(f, "l_{q}^{n}"),
            SpaceSpec::Linf { n } => write!(f, "l_inf^{n}"),
            SpaceSpec::Spectral { atoms, r } => {
                write!(f, "spectral(n={}, m={}, r={r})", atoms.len(), atoms[0].len())
            }
        }
    }
}

/// Rank by Gaussian elimination with partial pivoting.
pub fn matrix_rank<T: Real>(rows: &[Vec<T>]) -> usize {
    let mut a: Vec<Vec<T>> = rows.to_vec();
    let n = a.len();
    if n == 0 {
        return 0;
    }
    let m = a[0].len();
    let scale = a.iter().flatten().fold(T::zero(), |acc, x| acc.max(x.abs()));
    if scale == T::zero() {
        return 0;
    }
    let tol = scale * T::epsilon() * T::from_count(n.max(m)) * T::lit(16.0);
    let mut rank = 0;
    for col in 0..m {
        if rank == n {
            break;
        }
        let (piv, best) = (rank..n)
            .map(|r| (r, a[r][col].abs()))
            .fold((rank, T::zero()), |acc, c| if c.1 > acc.1 { c } else { acc });
        if best <= tol {
            continue;
        }
        a.swap(rank, piv);
        for r in rank + 1..n {
            let f = a[r][col] / a[rank][col];
            for c in col..m {
                let v = a[rank][c];
                a[r][c] = a[r][c] - f * v;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms() {
        let l1 = SpaceSpec::lq(1.0_f64, 3).unwrap();
        assert_eq!(l1.norm(&[1.0, -2.0, 3.0]), 6.0);
        let linf = SpaceSpec::lq(f64::INFINITY, 3).unwrap();
        assert_eq!(linf, SpaceSpec::Linf { n: 3 });
        assert_eq!(linf.norm(&[1.0, -4.0, 3.0]), 4.0);
        let l2 = SpaceSpec::lq(2.0_f64, 2).unwrap();
        assert!((l2.norm(&[3.0, 4.0]) - 5.0).abs() < 1e-15);
        assert!((lq_norm(2.0_f64, &[3e200, 4e200]) - 5e200).abs() < 1e188);
    }

    #[test]
    fn spectral_norm_and_rank() {
        let s = SpaceSpec::spectral(vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]], 1.0_f64).unwrap();
        assert_eq!(s.norm(&[1.0, 1.0]), 4.0);
        assert!(SpaceSpec::spectral(vec![vec![1.0, 2.0], vec![2.0, 4.0]], 1.0_f64).is_err());
        assert!(SpaceSpec::spectral(vec![vec![1.0, 2.0]], 2.5_f64).is_err());
        assert_eq!(matrix_rank(&[vec![1.0_f64, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 0.0, 1.0]]), 2);
    }
}
