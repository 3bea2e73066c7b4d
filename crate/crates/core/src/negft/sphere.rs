//! Sphere-integral formulas for an arbitrary norm when `p ∈ [n-1, n)`.

use std::cell::Cell;

use crate::config::QuadratureConfig;
use crate::error::{Error, Result};
use crate::quad::{self, AdaptiveOpts, Estimate};
use crate::scalar::Real;
use crate::space::HomogeneousNorm;
use crate::specfun::gamma;

use super::linf::sinc;
use super::{Method, TransformValue};

/// `(‖x‖^{-p})^∧(ξ)` for any norm, `p ∈ [n-1, n)`.
///
/// For `p > n-1`: `(π/c) ∫_Ω |(θ,ξ)|^{p-n} ‖θ‖^{-p} dθ` with
/// `c = 2^{p-n+1} √π Γ((p-n+1)/2) / Γ((n-p)/2)`. Writing
/// `θ = sin v·ξ/|ξ| + cos v·ω` with `ω` on the unit sphere of `ξ^⊥` turns this
/// into a one-dimensional integral in `v` of the inner sphere integrals; the
/// substitution `v = (π/2) w^{1/(p-n+1)}` absorbs the singularity at `v = 0`.
///
/// For `p = n-1`: `(π/|ξ|) ∫_{Ω∩ξ^⊥} ‖θ‖^{-p} dθ`.
pub fn ft_sphere<T, N>(norm: &N, p: T, xi: &[T], cfg: &QuadratureConfig) -> Result<TransformValue<T>>
where
    T: Real,
    N: HomogeneousNorm<T> + ?Sized,
{
    cfg.validate()?;
    let n = norm.dim();
    if n < 2 {
        return Err(Error::domain("the sphere route needs n >= 2"));
    }
    if xi.len() != n {
        return Err(Error::invalid(format!("xi has {} coordinates, space has {n}", xi.len())));
    }
    let nf = T::from_count(n);
    if !(p >= nf - T::one() && p < nf) {
        return Err(Error::domain(format!("sphere route needs p in [{}, {n}), got {p}", n - 1)));
    }
    if xi.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("xi must be finite"));
    }
    let r = xi.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
    if r == T::zero() {
        return Err(Error::domain("xi must be nonzero"));
    }
    let e: Vec<T> = xi.iter().map(|&x| x / r).collect();
    let basis = orthonormal_complement(&e);
    let f = |x: &[T]| norm.norm(x).powf(-p);

    let mut inner_opts = cfg.opts::<T>();
    inner_opts.rel_tol = inner_opts.rel_tol * T::lit(0.1);
    inner_opts.abs_tol = inner_opts.abs_tol * T::lit(0.1);
    let worst_inner = Cell::new(T::zero());
    let inner = |v: T| -> T {
        let base: Vec<T> = e.iter().map(|&x| x * v.sin()).collect();
        let est = sphere_integral(&f, &basis, &base, v.cos(), inner_opts);
        if est.value != T::zero() {
            worst_inner.set(worst_inner.get().max(est.err / est.value.abs()));
        }
        est.value
    };

    let a = p - nf;
    if a + T::one() <= T::lit(1e-12) {
        let s = inner(T::zero());
        let value = T::PI() / r * s;
        let err = worst_inner.get() * value.abs();
        return Ok(TransformValue::new(value, err, Method::Sphere));
    }
    let k = a + T::one();
    let half_pi = T::FRAC_PI_2();
    let integrand = |w: T| {
        let v = half_pi * w.powf(T::one() / k);
        sinc(v).powf(a) * v.cos().powi(n as i32 - 2) * inner(v)
    };
    let breaks = [T::zero(), T::lit(0.5), T::lit(0.9), T::lit(0.99), T::one()];
    let c = T::lit(2.0).powf(k) * T::PI().sqrt() * gamma(k * T::lit(0.5))? / gamma(-a * T::lit(0.5))?;
    let scale = T::lit(2.0) * half_pi.powf(k) / k * T::PI() / c * r.powf(a);
    let mut opts = cfg.opts::<T>();
    opts.abs_tol = opts.abs_tol / scale.abs();
    let outer = quad::integrate(integrand, &breaks, opts)?;
    let value = scale * outer.value;
    let err = scale.abs() * (outer.err + worst_inner.get() * outer.abs_value);
    Ok(TransformValue::new(value, err, Method::Sphere))
}

/// Orthonormal basis of `e^⊥` by Gram–Schmidt on the coordinate vectors.
fn orthonormal_complement<T: Real>(e: &[T]) -> Vec<Vec<T>> {
    let n = e.len();
    let mut basis: Vec<Vec<T>> = vec![e.to_vec()];
    // Start from the coordinate axes least aligned with e.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| e[i].abs().partial_cmp(&e[j].abs()).unwrap());
    for &i in &order {
        if basis.len() == n {
            break;
        }
        let mut v = vec![T::zero(); n];
        v[i] = T::one();
        for b in &basis {
            let d = v.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y);
            for (x, &y) in v.iter_mut().zip(b) {
                *x = *x - d * y;
            }
        }
        let len = v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
        if len > T::lit(1e-6) {
            basis.push(v.into_iter().map(|x| x / len).collect());
        }
    }
    basis.remove(0);
    basis
}

/// `∫_{S^{k-1}} f(base + radius·Σ ω_i b_i) dω` over the unit sphere of the
/// span of `basis` (`k = basis.len()`), by nested adaptive quadrature in
/// spherical coordinates. The error is relative to a positive integrand.
fn sphere_integral<T, F>(f: &F, basis: &[Vec<T>], base: &[T], radius: T, opts: AdaptiveOpts<T>) -> Estimate<T>
where
    T: Real,
    F: Fn(&[T]) -> T,
{
    let k = basis.len();
    let point = |coef: &[T]| -> Vec<T> {
        let mut x = base.to_vec();
        for (c, b) in coef.iter().zip(basis) {
            for (xi, &bi) in x.iter_mut().zip(b) {
                *xi = *xi + radius * *c * bi;
            }
        }
        x
    };
    match k {
        0 => Estimate {
            value: f(base),
            ..Estimate::zero()
        },
        1 => {
            let v = f(&point(&[T::one()])) + f(&point(&[-T::one()]));
            Estimate {
                value: v,
                abs_value: v.abs(),
                ..Estimate::zero()
            }
        }
        2 => {
            let quarter = T::FRAC_PI_2();
            let breaks: Vec<T> = (0..=4).map(|i| quarter * T::from_count(i)).collect();
            lenient(quad::integrate(|phi: T| f(&point(&[phi.cos(), phi.sin()])), &breaks, opts))
        }
        _ => {
            let last = &basis[k - 1];
            let rest = &basis[..k - 1];
            let worst = Cell::new(T::zero());
            let g = |psi: T| {
                let shifted: Vec<T> = base
                    .iter()
                    .zip(last)
                    .map(|(&b, &l)| b + radius * psi.sin() * l)
                    .collect();
                let est = sphere_integral(f, rest, &shifted, radius * psi.cos(), opts);
                if est.value != T::zero() {
                    worst.set(worst.get().max(est.err / est.value.abs()));
                }
                psi.cos().powi(k as i32 - 2) * est.value
            };
            let h = T::FRAC_PI_2();
            let breaks = [-h, T::zero(), h];
            let mut e = lenient(quad::integrate(g, &breaks, opts));
            e.err = e.err + worst.get() * e.abs_value;
            e
        }
    }
}

fn lenient<T: Real>(r: Result<Estimate<T>>) -> Estimate<T> {
    match r {
        Ok(e) => e,
        Err(Error::NonConvergence { estimate, err_bound, .. }) => Estimate {
            value: T::lit(estimate),
            err: T::lit(err_bound),
            abs_value: T::lit(estimate.abs()),
            evals: 0,
        },
        Err(_) => Estimate {
            value: T::nan(),
            err: T::infinity(),
            ..Estimate::zero()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::negft::ft_linf_closed;
    use crate::space::SpaceSpec;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: 1e-7,
            ..QuadratureConfig::default()
        }
    }

    #[test]
    fn euclidean_case_is_riesz() {
        let l2 = SpaceSpec::lq(2.0_f64, 3).unwrap();
        let xi = [0.3, -1.0, 0.8];
        let p = 2.5;
        let v = ft_sphere(&l2, p, &xi, &cfg()).unwrap();
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let riesz = 2f64.powf(3.0 - p) * std::f64::consts::PI.powf(1.5) * gamma((3.0 - p) / 2.0).unwrap()
            / gamma(p / 2.0).unwrap()
            * r.powf(p - 3.0);
        assert!(((v.value - riesz) / riesz).abs() < 1e-5, "{} {riesz}", v.value);
    }

    #[test]
    fn max_norm_matches_closed_form() {
        let linf = SpaceSpec::<f64>::Linf { n: 3 };
        let xi = [1.0, 0.5, 2.0];
        let v = ft_sphere(&linf, 2.3, &xi, &cfg()).unwrap();
        let c = ft_linf_closed(2.3, &xi).unwrap();
        assert!(((v.value - c.value) / c.value).abs() < 1e-4, "{} {}", v.value, c.value);
    }

    #[test]
    fn boundary_exponent_is_limit() {
        let l1 = SpaceSpec::lq(1.0_f64, 2).unwrap();
        let xi = [1.0, 0.4];
        let at = ft_sphere(&l1, 1.0, &xi, &cfg()).unwrap().value;
        let near = ft_sphere(&l1, 1.0 + 1e-4, &xi, &cfg()).unwrap().value;
        assert!(((at - near) / at).abs() < 1e-2, "{at} {near}");
        assert!(at > 0.0);
    }

    #[test]
    fn rejects_low_exponent() {
        let l1 = SpaceSpec::lq(1.0_f64, 3).unwrap();
        assert!(ft_sphere(&l1, 1.5, &[1.0, 1.0, 1.0], &cfg()).is_err());
    }
}
