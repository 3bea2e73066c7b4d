use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::Estimate;
use crate::error::{Error, Result};
use crate::scalar::Real;

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOpts<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_panels: usize,
}

impl<T: Real> AdaptiveOpts<T> {
    pub fn new(abs_tol: T, rel_tol: T, max_panels: usize) -> Self {
        AdaptiveOpts {
            abs_tol,
            rel_tol,
            max_panels,
        }
    }

    fn target(&self, value: T) -> T {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    err: T,
    abs_value: T,
    key: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

fn kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Panel<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let hl = half * (b - a);
    let fc = f(center);
    let mut resk = fc * T::lit(WGK[7]);
    let mut resg = fc * T::lit(WG[3]);
    let mut resabs = fc.abs() * T::lit(WGK[7]);
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = hl * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        resk = resk + w * (f1 + f2);
        resabs = resabs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg = resg + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = resk * half;
    let mut resasc = T::lit(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        resasc = resasc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let ahl = hl.abs();
    let value = resk * hl;
    let resabs = resabs * ahl;
    let resasc = resasc * ahl;
    let mut err = ((resk - resg) * hl).abs();
    if resasc != T::zero() && err != T::zero() {
        let scaled = (T::lit(200.0) * err / resasc).powf(T::lit(1.5));
        err = resasc * scaled.min(T::one());
    }
    let floor = T::lit(50.0) * T::epsilon() * resabs;
    if resabs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        err = err.max(floor);
    }
    // A NaN anywhere poisons the panel; make it the first to be split.
    let key = if value.is_finite() && err.is_finite() {
        err.to_f64_lossy()
    } else {
        f64::INFINITY
    };
    Panel {
        a,
        b,
        value,
        err,
        abs_value: resabs,
        key,
    }
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[breaks[0], breaks[last]]`.
///
/// `breaks` must be increasing; each consecutive pair seeds one initial panel,
/// so known kinks, singular points and oscillation scales belong there. The
/// panel with the largest error is bisected until the summed error meets
/// `max(abs_tol, rel_tol·|I|)` or `max_panels` is reached.
pub fn integrate<T, F>(mut f: F, breaks: &[T], opts: AdaptiveOpts<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if breaks.len() < 2 {
        return Err(Error::invalid("quadrature needs at least two breakpoints"));
    }
    if breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("quadrature breakpoints must be strictly increasing"));
    }
    let mut heap = BinaryHeap::with_capacity(breaks.len() * 4);
    let mut settled: Vec<Panel<T>> = Vec::new();
    let mut evals = 0usize;
    for w in breaks.windows(2) {
        heap.push(kronrod(&mut f, w[0], w[1]));
        evals += 15;
    }
    let totals = |heap: &BinaryHeap<Panel<T>>, settled: &[Panel<T>]| {
        let mut v = T::zero();
        let mut e = T::zero();
        for p in heap.iter().chain(settled.iter()) {
            v = v + p.value;
            e = e + p.err;
        }
        (v, e)
    };
    let (mut value, mut err) = totals(&heap, &settled);
    let max_panels = opts.max_panels.max(breaks.len());
    let mut iter = 0usize;
    while !(err <= opts.target(value)) && heap.len() + settled.len() < max_panels {
        let Some(worst) = heap.pop() else { break };
        let mid = T::lit(0.5) * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            settled.push(worst);
            continue;
        }
        let left = kronrod(&mut f, worst.a, mid);
        let right = kronrod(&mut f, mid, worst.b);
        evals += 30;
        value = value - worst.value + left.value + right.value;
        err = err - worst.err + left.err + right.err;
        heap.push(left);
        heap.push(right);
        iter += 1;
        if iter % 64 == 0 {
            let (v, e) = totals(&heap, &settled);
            value = v;
            err = e;
        }
    }
    let (value, err) = totals(&heap, &settled);
    let abs_value = heap
        .iter()
        .chain(settled.iter())
        .fold(T::zero(), |acc, p| acc + p.abs_value);
    if !value.is_finite() || !err.is_finite() {
        return Err(Error::NonConvergence {
            what: "adaptive quadrature (non-finite integrand)",
            estimate: value.to_f64_lossy(),
            err_bound: f64::INFINITY,
        });
    }
    if err > opts.target(value) {
        return Err(Error::NonConvergence {
            what: "adaptive quadrature",
            estimate: value.to_f64_lossy(),
            err_bound: err.to_f64_lossy(),
        });
    }
    Ok(Estimate {
        value,
        err,
        abs_value,
        evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> AdaptiveOpts<f64> {
        AdaptiveOpts::new(1e-13, 1e-12, 10_000)
    }

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x: f64| x * x * x - 2.0 * x, &[0.0, 2.0], opts()).unwrap();
        assert!((r.value - 0.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_sine() {
        let r = integrate(|x: f64| (20.0 * x).sin(), &[0.0, 1.0], opts()).unwrap();
        let exact = (1.0 - 20.0_f64.cos()) / 20.0;
        assert!((r.value - exact).abs() < 1e-12, "{}", r.value - exact);
        assert!(r.err < 1e-11);
    }

    #[test]
    fn kink_resolved_by_bisection() {
        let r = integrate(|x: f64| (x - 0.3).abs(), &[0.0, 1.0], opts()).unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-12);
    }

    #[test]
    fn reports_nonconvergence_with_estimate() {
        let tight = AdaptiveOpts::new(1e-15, 1e-15, 16);
        match integrate(|x: f64| 1.0 / x.sqrt(), &[0.0, 1.0], tight) {
            Err(Error::NonConvergence { estimate, .. }) => assert!((estimate - 2.0).abs() < 0.1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_breaks() {
        assert!(integrate(|x: f64| x, &[1.0, 0.0], opts()).is_err());
    }

    #[test]
    fn single_precision_runs() {
        let o = AdaptiveOpts::new(1e-4_f32, 1e-4, 1000);
        let r = integrate(|x: f32| x.exp(), &[0.0, 1.0], o).unwrap();
        assert!((r.value - (1.0_f32.exp() - 1.0)).abs() < 1e-5);
    }
}
