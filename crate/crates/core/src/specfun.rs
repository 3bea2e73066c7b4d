//! Real special functions behind every transform formula: Γ, the constant
//! `c_p` of the one-dimensional transform of `|z|^p`, absolute moments of
//! `γ_q`, and `γ_q` itself (the Fourier transform of `exp(-|z|^q)`).

use crate::config::QuadratureConfig;
use crate::error::{Error, Result};
use crate::quad::{self, Estimate};
use crate::scalar::{near_integer, Real};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum<T: Real>(z: T) -> T {
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (z + T::from_count(i));
    }
    acc
}

/// `sin(πx)` with the argument reduced first, so it is exactly zero at
/// integers and accurate next to them.
pub fn sin_pi<T: Real>(x: T) -> T {
    let two = T::lit(2.0);
    let mut r = x % two;
    if r < T::zero() {
        r = r + two;
    }
    // r in [0, 2)
    let (r, sign) = if r >= T::one() { (r - T::one(), -T::one()) } else { (r, T::one()) };
    let r = if r > T::lit(0.5) { T::one() - r } else { r };
    sign * (T::PI() * r).sin()
}

fn gamma_positive<T: Real>(x: T) -> T {
    // x >= 0.5
    let half = T::lit(0.5);
    let z = x - T::one();
    let t = z + T::lit(LANCZOS_G) + half;
    let ln = (z + half) * t.ln() - t;
    (T::TAU()).sqrt() * ln.exp() * lanczos_sum(z)
}

/// Γ(x) for real `x`; the reflection formula covers `x < 1/2`.
pub fn gamma<T: Real>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("gamma argument {x}")));
    }
    if x <= T::zero() && x == x.floor() {
        return Err(Error::Pole {
            what: "gamma",
            at: x.to_f64_lossy(),
        });
    }
    if x >= T::one() && x <= T::lit(23.0) && x == x.floor() {
        // (x-1)! is exact in double precision up to 22!
        let mut acc = T::one();
        let mut k = T::lit(2.0);
        while k < x {
            acc = acc * k;
            k = k + T::one();
        }
        return Ok(acc);
    }
    if x < T::lit(0.5) {
        let s = sin_pi(x);
        Ok(T::PI() / (s * gamma_positive(T::one() - x)))
    } else {
        Ok(gamma_positive(x))
    }
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    if x < T::lit(0.5) {
        // Γ(x) = Γ(x+1)/x
        return Ok(ln_gamma(x + T::one())? - x.ln());
    }
    let half = T::lit(0.5);
    let z = x - T::one();
    let t = z + T::lit(LANCZOS_G) + half;
    Ok(half * T::TAU().ln() + (z + half) * t.ln() - t + lanczos_sum(z).ln())
}

/// `1/Γ(x)`, which is entire: zero at the poles of Γ.
pub fn recip_gamma<T: Real>(x: T) -> T {
    match gamma(x) {
        Ok(g) => T::one() / g,
        Err(_) => T::zero(),
    }
}

/// Constant in `(|z|^p)^∧(t) = c_p |t|^{-1-p}`:
/// `c_p = 2^{p+1} √π Γ((p+1)/2) / Γ(-p/2)`.
pub fn c_p<T: Real>(p: T) -> Result<T> {
    if !(p > -T::one()) {
        return Err(Error::domain(format!("c_p requires p > -1, got {p}")));
    }
    let half = T::lit(0.5);
    if near_integer(p * half, T::zero()) {
        return Err(Error::Pole {
            what: "c_p (even integer p)",
            at: p.to_f64_lossy(),
        });
    }
    let num = T::lit(2.0).powf(p + T::one()) * T::PI().sqrt() * gamma((p + T::one()) * half)?;
    Ok(num / gamma(-p * half)?)
}

/// Absolute moment `S_q(α) = ∫ |t|^α γ_q(t) dt`
/// `= 2^{α+2} √π Γ(-α/q) Γ((α+1)/2) / (q Γ(-α/2))`.
///
/// Defined on `α ∈ (-1, q)`; even integers (including 0 and 2) are rejected.
/// Positive on `(-1,0) ∪ (0,2)`, negative on `(2, min(q,4))`.
pub fn stable_moment<T: Real>(q: T, alpha: T) -> Result<T> {
    if !(q > T::zero()) {
        return Err(Error::domain(format!("stable_moment needs q > 0, got {q}")));
    }
    if !(alpha > -T::one() && alpha < q) {
        return Err(Error::domain(format!(
            "stable_moment needs alpha in (-1, q) = (-1, {q}), got {alpha}"
        )));
    }
    let half = T::lit(0.5);
    if near_integer(alpha * half, T::zero()) {
        return Err(Error::Pole {
            what: "stable_moment (even integer alpha)",
            at: alpha.to_f64_lossy(),
        });
    }
    let num = T::lit(2.0).powf(alpha + T::lit(2.0))
        * T::PI().sqrt()
        * gamma(-alpha / q)?
        * gamma((alpha + T::one()) * half)?;
    Ok(num / (q * gamma(-alpha * half)?))
}

/// Pólya's limit `lim t^{1+q} γ_q(t) = 2 Γ(q+1) sin(πq/2)`.
///
/// Even integer `q` is rejected: `γ_q` then decays exponentially.
pub fn gamma_q_tail_constant<T: Real>(q: T) -> Result<T> {
    if !(q > T::zero()) {
        return Err(Error::domain(format!("q must be positive, got {q}")));
    }
    if near_integer(q * T::lit(0.5), T::zero()) {
        return Err(Error::domain(format!(
            "q = {q} is an even integer; gamma_q decays exponentially (use the exponential tail policy)"
        )));
    }
    Ok(T::lit(2.0) * gamma(q + T::one())? * sin_pi(q * T::lit(0.5)))
}

/// Truncation point `Z` with `exp(-Z^q) < 1e-16`.
pub(crate) fn gamma_q_cutoff<T: Real>(q: T) -> T {
    T::lit(36.841_361_487_904_734).powf(T::one() / q)
}

/// `γ_q(t) = 2 ∫_0^∞ cos(tz) exp(-z^q) dz`, by adaptive quadrature on
/// `[0, Z]` with panels no wider than `π/(4|t|)`.
///
/// For `q = 2` the integral is taken along the shifted line through the
/// saddle point, which keeps full relative accuracy where
/// `γ_2(t) = √π e^{-t²/4}` underflows the direct cosine integral.
pub fn gamma_q<T: Real>(q: T, t: T, cfg: &QuadratureConfig) -> Result<Estimate<T>> {
    if !(q > T::zero()) || !q.is_finite() {
        return Err(Error::domain(format!("gamma_q needs q > 0, got {q}")));
    }
    if !t.is_finite() {
        return Err(Error::invalid(format!("gamma_q argument {t}")));
    }
    let t = t.abs();
    let two = T::lit(2.0);
    let zmax = gamma_q_cutoff(q);
    let opts = cfg.opts::<T>();

    if q == two {
        // z = x - i t/2: the exponent becomes -x² - t²/4, with no oscillation.
        let shift = (-(t * t) / T::lit(4.0)).exp();
        let e = quad::integrate(|x: T| (-(x * x)).exp(), &[T::zero(), T::one(), zmax], opts)?;
        return Ok(e.scale(two * shift));
    }

    let mut breaks = vec![T::zero()];
    // Geometric points toward 0 resolve the cusp of exp(-z^q) when q < 1.
    if q < T::one() {
        let mut z = zmax;
        let mut near_zero = Vec::new();
        for _ in 0..24 {
            z = z * T::lit(0.25);
            near_zero.push(z);
        }
        near_zero.reverse();
        breaks.extend(near_zero);
    }
    let width_cap = if t > T::zero() {
        T::FRAC_PI_4() / t
    } else {
        zmax
    };
    let start = *breaks.last().unwrap();
    let budget = (cfg.max_panels / 2).max(16);
    let wanted = ((zmax - start) / width_cap).ceil().to_usize().unwrap_or(budget).max(1);
    if wanted > budget {
        // Too many oscillations for the panel budget; the series is accurate
        // exactly there (large t, where it converges or is sharply asymptotic).
        let target = T::lit(cfg.rel_tol * 0.1);
        if let Some((v, err)) = gamma_q_asymptotic(q, t, target) {
            if err <= T::lit(cfg.abs_tol).max(target * v.abs()) {
                return Ok(Estimate {
                    value: v,
                    err,
                    abs_value: v.abs(),
                    evals: 0,
                });
            }
        }
    }
    let pieces = wanted.min(budget);
    let step = (zmax - start) / T::from_count(pieces);
    for i in 1..=pieces {
        breaks.push(start + step * T::from_count(i));
    }
    let e = quad::integrate(|z: T| (t * z).cos() * (-z.powf(q)).exp(), &breaks, opts)?;
    // Truncation at Z contributes at most 2·∫_Z^∞ exp(-z^q) dz.
    let tail = two * (-zmax.powf(q)).exp() * zmax / q;
    let mut e = e.scale(two);
    e.err = e.err + tail;
    Ok(e)
}

/// Pólya's asymptotic expansion
/// `γ_q(t) ~ Σ_{k≥1} (-1)^{k+1} 2Γ(kq+1) sin(πkq/2) / (k! t^{kq+1})`.
///
/// Returns `(value, error bound)` when the series reaches relative accuracy
/// `rel` before its terms start to grow (it converges for `q < 1` and is
/// asymptotic otherwise). Returns `None` for even integer `q`, where every
/// term vanishes.
pub fn gamma_q_asymptotic<T: Real>(q: T, t: T, rel: T) -> Option<(T, T)> {
    let t = t.abs();
    if !(t > T::zero()) || near_integer(q * T::lit(0.5), T::zero()) {
        return None;
    }
    let ln_t = t.ln();
    let ln2 = T::LN_2();
    let mut sum = T::zero();
    let mut max_term = T::zero();
    let mut prev_mag = T::infinity();
    for k in 1..400usize {
        let kf = T::from_count(k);
        let s = sin_pi(kf * q * T::lit(0.5));
        if s == T::zero() {
            continue;
        }
        let ln_mag = ln2 + ln_gamma(kf * q + T::one()).ok()? - ln_gamma(kf + T::one()).ok()?
            - (kf * q + T::one()) * ln_t;
        let mag = ln_mag.exp() * s.abs();
        if mag > prev_mag && k > 2 {
            return None;
        }
        let sign = if k % 2 == 1 { T::one() } else { -T::one() };
        let term = sign * ln_mag.exp() * s;
        if k > 1 && mag <= rel * sum.abs() {
            let err = mag + T::lit(4.0) * T::epsilon() * max_term * kf;
            return Some((sum, err));
        }
        sum = sum + term;
        max_term = max_term.max(mag);
        prev_mag = mag;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_classical_values() {
        assert_eq!(gamma(1.0_f64).unwrap(), 1.0);
        assert!(rel(gamma(0.5_f64).unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(gamma(-0.5_f64).unwrap(), -2.0 * PI.sqrt()) < 1e-14);
        assert!(rel(gamma(5.0_f64).unwrap(), 24.0) < 1e-14);
        // 49! ≈ 6.0828186403426e62
        assert!(rel(gamma(50.0_f64).unwrap(), 6.082_818_640_342_675_6e62) < 1e-13);
    }

    #[test]
    fn gamma_poles_rejected() {
        for x in [0.0, -1.0, -2.0, -17.0] {
            assert!(matches!(gamma(x), Err(Error::Pole { .. })));
        }
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for x in [0.1_f64, 0.7, 3.3, 20.5] {
            assert!((ln_gamma(x).unwrap() - gamma(x).unwrap().ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn c_p_examples() {
        assert!(rel(c_p(1.0_f64).unwrap(), -2.0) < 1e-13);
        assert!(rel(c_p(0.5).unwrap(), -(PI / 2.0).sqrt()) < 1e-13);
        assert!(c_p(1e-9_f64).unwrap().abs() < 1e-8);
        assert!(matches!(c_p(2.0), Err(Error::Pole { .. })));
        assert!(c_p(-1.5).is_err());
    }

    #[test]
    fn stable_moment_examples() {
        assert!(rel(stable_moment(2.0, 1.0).unwrap(), 4.0 * PI.sqrt()) < 1e-13);
        assert!(stable_moment(3.0, 2.5).unwrap() < 0.0);
        assert!(stable_moment(3.0, -0.5).unwrap() > 0.0);
        assert!(stable_moment(3.0, 0.0).is_err());
        assert!(stable_moment(3.0, 2.0).is_err());
        assert!(stable_moment(3.0, 3.5).is_err());
        assert!(stable_moment(3.0, -1.0).is_err());
    }

    #[test]
    fn tail_constant_examples() {
        assert!(rel(gamma_q_tail_constant(1.0).unwrap(), 2.0) < 1e-14);
        assert!(rel(gamma_q_tail_constant(3.0).unwrap(), -12.0) < 1e-14);
        assert!(gamma_q_tail_constant(2.0).is_err());
        assert!(gamma_q_tail_constant(4.0).is_err());
    }

    #[test]
    fn gamma_q_closed_forms() {
        let cfg = QuadratureConfig::default();
        for t in [0.0, 1.0, 5.0] {
            let v = gamma_q(1.0, t, &cfg).unwrap().value;
            assert!(rel(v, 2.0 / (1.0 + t * t)) < 1e-8, "t={t}");
            let v = gamma_q(2.0, t, &cfg).unwrap().value;
            assert!(rel(v, PI.sqrt() * (-t * t / 4.0).exp()) < 1e-8);
        }
        for q in [0.5, 1.5, 3.0, 4.7] {
            let v = gamma_q(q, 0.0, &cfg).unwrap().value;
            assert!(rel(v, 2.0 * gamma(1.0 + 1.0 / q).unwrap()) < 1e-9, "q={q}");
        }
    }

    #[test]
    fn gamma_q_is_even() {
        let cfg = QuadratureConfig::default();
        for t in [0.3, 2.0, 7.5] {
            assert_eq!(gamma_q(1.5, t, &cfg).unwrap().value, gamma_q(1.5, -t, &cfg).unwrap().value);
        }
    }

    #[test]
    fn polya_limit_at_forty() {
        let cfg = QuadratureConfig::default().tightened(100.0);
        let q = 1.5;
        let t: f64 = 40.0;
        let v = gamma_q(q, t, &cfg).unwrap().value;
        let c = gamma_q_tail_constant(q).unwrap();
        assert!(rel(t.powf(1.0 + q) * v, c) < 0.05);
    }

    #[test]
    fn asymptotic_series_matches_cauchy() {
        for t in [3.0, 10.0, 100.0] {
            let (v, e) = gamma_q_asymptotic(1.0_f64, t, 1e-15).unwrap();
            assert!(rel(v, 2.0 / (1.0 + t * t)) < 1e-13);
            assert!(e < 1e-13 * v);
        }
        assert!(gamma_q_asymptotic(2.0_f64, 10.0, 1e-15).is_none());
        // q = 3 is still pre-asymptotic at t = 12.
        assert!(gamma_q_asymptotic(3.0_f64, 12.0, 1e-15).is_none());
        // Small argument: q = 1 series diverges.
        assert!(gamma_q_asymptotic(1.0_f64, 0.5, 1e-15).is_none());
    }

    #[test]
    fn asymptotic_series_matches_quadrature() {
        let cfg = QuadratureConfig::default().tightened(100.0);
        for (q, t) in [(3.0_f64, 60.0_f64), (1.5, 30.0), (0.7, 8.0), (4.7, 120.0)] {
            let quad = gamma_q(q, t, &cfg).unwrap().value;
            let (ser, _) = gamma_q_asymptotic(q, t, 1e-15).unwrap();
            assert!((quad - ser).abs() < 1e-12 + 1e-9 * ser.abs(), "q={q} t={t} {quad} {ser}");
        }
    }

    #[test]
    fn single_precision_gamma() {
        let g = gamma(4.5_f32).unwrap();
        assert!((g - 11.631_728).abs() < 1e-4);
    }
}
