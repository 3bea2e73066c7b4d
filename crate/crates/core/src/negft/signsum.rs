//! The sign sums `h_{n,p}` and `g_{n,p}` over all `2^n` sign patterns.

use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Real};

use super::check_xi;

/// `h_{n,p}(ξ) = Σ_δ δ_1⋯δ_n |δ·ξ|^p`.
pub fn h_np<T: Real>(p: T, xi: &[T]) -> Result<T> {
    Ok(sign_sum(p, xi, false)?.0)
}

/// `g_{n,p}(ξ) = Σ_δ δ_1⋯δ_n |δ·ξ|^p sgn(δ·ξ)`.
pub fn g_np<T: Real>(p: T, xi: &[T]) -> Result<T> {
    Ok(sign_sum(p, xi, true)?.0)
}

/// `g_{n,p}` for odd `n`, `h_{n,p}` for even `n`: the sum that does not
/// vanish identically.
pub fn u_np<T: Real>(p: T, xi: &[T]) -> Result<T> {
    Ok(sign_sum(p, xi, xi.len() % 2 == 1)?.0)
}

/// Returns the sum and `Σ|terms|`, the scale of its rounding error.
///
/// Under `δ → -δ` a term picks up `(-1)^n` (and another `-1` with the sign
/// factor), so one of the two sums vanishes identically and the other is
/// twice the sum over `δ_1 = +1`.
pub(crate) fn sign_sum<T: Real>(p: T, xi: &[T], signed: bool) -> Result<(T, T)> {
    check_xi(xi)?;
    if !p.is_finite() {
        return Err(Error::invalid(format!("p must be finite, got {p}")));
    }
    let n = xi.len();
    if signed == (n % 2 == 0) {
        return Ok((T::zero(), T::zero()));
    }
    let half = 1usize << (n - 1);
    let mut terms = Vec::with_capacity(half);
    for mask in 0..half {
        let mut v = xi[0];
        let mut parity = false;
        for (k, &x) in xi.iter().enumerate().skip(1) {
            if mask >> (k - 1) & 1 == 1 {
                v = v - x;
                parity = !parity;
            } else {
                v = v + x;
            }
        }
        let mut term = v.abs().powf(p);
        if signed {
            term = if v > T::zero() {
                term
            } else if v < T::zero() {
                -term
            } else {
                T::zero()
            };
        }
        terms.push(if parity { -term } else { term });
    }
    let abs_sum: T = terms.iter().map(|t| t.abs()).sum();
    let two = T::lit(2.0);
    Ok((two * compensated_sum(&mut terms), two * abs_sum))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force over all 2^n patterns without the symmetry reduction.
    fn brute(p: f64, xi: &[f64], signed: bool) -> f64 {
        let n = xi.len();
        let mut s = 0.0;
        for mask in 0..(1usize << n) {
            let mut v = 0.0;
            let mut sign = 1.0;
            for (k, &x) in xi.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    v -= x;
                    sign = -sign;
                } else {
                    v += x;
                }
            }
            let mut t = v.abs().powf(p);
            if signed {
                t *= v.signum() * (v != 0.0) as i32 as f64;
            }
            s += sign * t;
        }
        s
    }

    #[test]
    fn h_small_example() {
        assert_eq!(h_np(1.0, &[1.0, 1.0]).unwrap(), 4.0);
    }

    #[test]
    fn matches_brute_force() {
        for xi in [vec![0.3, 1.7, 2.2], vec![1.0, 2.0, 0.5, 0.7], vec![0.9, 0.1, 0.4, 2.0, 1.1]] {
            for p in [-0.5, 0.7, 1.5, 2.5, 3.3] {
                let (a, b) = (h_np(p, &xi).unwrap(), brute(p, &xi, false));
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{a} {b}");
                let (a, b) = (g_np(p, &xi).unwrap(), brute(p, &xi, true));
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{a} {b}");
            }
        }
    }

    #[test]
    fn vanishing_parity() {
        assert_eq!(g_np(1.5, &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(h_np(1.5, &[1.0, 2.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn sign_table_examples() {
        let xi = [1.0, 2.0, 0.5, 0.7];
        assert!(h_np(2.5, &xi).unwrap() > 0.0);
        assert!(h_np(1.5, &xi).unwrap() < 0.0);
        assert!(g_np(-0.5, &[3.0, 1.0, 1.0]).unwrap() > 0.0);
        assert!(g_np(-0.5, &[1.0, 3.0, 3.0]).unwrap() < 0.0);
        assert!(h_np(-0.5, &[3.0, 1.0, 1.0]).unwrap() == 0.0);
        assert!(g_np(2.5, &[1.0, 1.0, 1.0]).unwrap() > 0.0);
    }

    #[test]
    fn rejects_zero_coordinate() {
        assert!(h_np(1.0, &[1.0, 0.0]).is_err());
    }
}
