//! Self-consistency of the sign sums under the integral recurrence
//! `u_{n,p}(ξ) = p ∫_{-ξ_n}^{ξ_n} u_{n-1,p-1}(ξ_1 + x, ξ_2, …, ξ_{n-1}) dx`.

use crate::error::{Error, Result};
use crate::quad::tanh_sinh;
use crate::scalar::{near_integer, Real};

use super::signsum::sign_sum;

/// Both sides of the recurrence and the quadrature error of the right side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceCheck<T> {
    pub direct: T,
    pub integral: T,
    pub err: T,
}

impl<T: Real> RecurrenceCheck<T> {
    pub fn residual(&self) -> T {
        (self.direct - self.integral).abs()
    }
}

/// `|u_{n,p}(ξ) - p ∫ u_{n-1,p-1}(ξ_1 + x, …) dx|`.
///
/// The integrand has algebraic singularities (exponent `p - 2`) wherever a
/// signed combination `ξ_1 + x ± ξ_2 ± … ± ξ_{n-1}` vanishes; the interval is
/// split there and each piece is integrated with tanh-sinh, with distances to
/// the endpoints taken exactly.
pub fn u_recurrence_residual<T: Real>(p: T, xi: &[T]) -> Result<T> {
    Ok(u_recurrence_check(p, xi)?.residual())
}

pub fn u_recurrence_check<T: Real>(p: T, xi: &[T]) -> Result<RecurrenceCheck<T>> {
    let n = xi.len();
    if n < 3 {
        return Err(Error::domain("the recurrence check needs n >= 3"));
    }
    if xi.iter().any(|x| !(*x > T::zero()) || !x.is_finite()) {
        return Err(Error::domain("the recurrence check needs positive coordinates"));
    }
    if xi[0] < xi[n - 1] {
        return Err(Error::domain("the recurrence check needs xi_1 >= xi_n"));
    }
    if near_integer(p, T::lit(1e-9)) {
        return Err(Error::domain(format!("p = {p} must not be an integer")));
    }
    let direct = sign_sum(p, xi, n % 2 == 1)?.0;

    let inner_signed = (n - 1) % 2 == 1;
    let rest = &xi[1..n - 1];
    let m = rest.len();
    let pm1 = p - T::one();
    // r_δ = -ξ_1 - Σ δ_j ξ_j over the n-2 middle coordinates, with ∏δ_j.
    let roots: Vec<(T, T)> = (0..1usize << m)
        .map(|mask| {
            let mut s = T::zero();
            let mut sign = T::one();
            for (j, &x) in rest.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    s = s - x;
                    sign = -sign;
                } else {
                    s = s + x;
                }
            }
            (-xi[0] - s, sign)
        })
        .collect();
    let lo = -xi[n - 1];
    let hi = xi[n - 1];
    let mut breaks = vec![lo, hi];
    for &(r, _) in &roots {
        if r > lo && r < hi {
            breaks.push(r);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();

    // u_{n-1,p-1}(ξ_1+x, rest): for δ_1 = +1 the linear form is x - r_δ, and
    // the δ_1 = -1 half repeats it.
    let pair = T::lit(2.0);
    let mut total = T::zero();
    let mut err = T::zero();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let f = |x: T, da: T, db: T| {
            let mut s = T::zero();
            for &(r, sign) in &roots {
                let v = if r == a {
                    da
                } else if r == b {
                    -db
                } else {
                    x - r
                };
                let mut t = v.abs().powf(pm1);
                if inner_signed {
                    t = if v < T::zero() { -t } else { t };
                }
                s = s + sign * t;
            }
            pair * s
        };
        let e = tanh_sinh(f, a, b, T::lit(1e-14), T::lit(1e-12), 12)?;
        total = total + e.value;
        err = err + e.err;
    }
    Ok(RecurrenceCheck {
        direct,
        integral: p * total,
        err: p.abs() * err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::negft::u_np;

    fn tol(u: f64) -> f64 {
        1e-6 * u.abs() + 1e-9
    }

    #[test]
    fn examples_hold() {
        for (p, xi) in [(2.5, vec![2.0, 1.0, 1.0]), (3.5, vec![3.0, 1.0, 1.0, 0.5]), (1.3, vec![1.2, 0.7, 0.4])] {
            let c = u_recurrence_check(p, &xi).unwrap();
            assert!(c.residual() <= tol(c.direct), "p={p} {c:?}");
            assert_eq!(c.direct, u_np(p, &xi).unwrap());
        }
    }

    #[test]
    fn scaling_by_two() {
        // Both sides are homogeneous of degree p.
        let p = 2.5;
        let xi = [2.0, 1.0, 1.0];
        let xi2: Vec<f64> = xi.iter().map(|x| 2.0 * x).collect();
        let a = u_recurrence_check(p, &xi).unwrap();
        let b = u_recurrence_check(p, &xi2).unwrap();
        let f = 2f64.powf(p);
        assert!(((b.integral / f - a.integral) / a.integral).abs() < 1e-9);
        assert!(b.residual() / f <= tol(a.direct));
    }

    #[test]
    fn preconditions() {
        assert!(u_recurrence_residual(2.5, &[1.0, 1.0]).is_err());
        assert!(u_recurrence_residual(2.5, &[1.0, 1.0, 2.0]).is_err());
        assert!(u_recurrence_residual(2.0, &[2.0, 1.0, 1.0]).is_err());
    }
}
