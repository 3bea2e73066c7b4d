use lpneg::embedcheck::{sign_change_certificate, sign_scan, PointEvaluator, ScanConfig, Verdict};
use lpneg::negft::{ft_linf_closed, u_np, LqEvaluator};
use lpneg::specfun::{gamma, gamma_q};
use lpneg::{QuadratureConfig, SpaceSpec64};
use proptest::prelude::*;

fn non_integer(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo..hi).prop_filter("away from integers", |p| (p - p.round()).abs() > 1e-3)
}

fn xi_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.1f64..3.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_form_is_homogeneous(
        (p, xi) in (2usize..=5).prop_flat_map(|n| (non_integer(0.1, n as f64 - 0.1), xi_vec(n))),
        lambda in 0.2f64..5.0,
    ) {
        let n = xi.len() as f64;
        let a = ft_linf_closed(p, &xi).unwrap();
        let scaled: Vec<f64> = xi.iter().map(|x| lambda * x).collect();
        let b = ft_linf_closed(p, &scaled).unwrap();
        let expect = lambda.powf(p - n) * a.value;
        let tol = b.err_estimate + lambda.powf(p - n) * a.err_estimate + 1e-12 * expect.abs();
        prop_assert!((b.value - expect).abs() <= tol, "{} vs {}", b.value, expect);
    }

    #[test]
    fn closed_form_permutation_and_sign_flip_invariant(
        (p, xi) in (2usize..=5).prop_flat_map(|n| (non_integer(0.1, n as f64 - 0.1), xi_vec(n))),
        flips in prop::collection::vec(any::<bool>(), 5),
        rot in 0usize..5,
    ) {
        let a = ft_linf_closed(p, &xi).unwrap();
        let mut other: Vec<f64> = xi.iter().zip(&flips).map(|(x, f)| if *f { -x } else { *x }).collect();
        let len = other.len();
        other.rotate_left(rot % len);
        let b = ft_linf_closed(p, &other).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.err_estimate + b.err_estimate);
        // The sign sum itself is odd in each coordinate.
        let prod = |v: &[f64]| v.iter().product::<f64>();
        let ua = u_np(p, &xi).unwrap() / prod(&xi);
        let ub = u_np(p, &other).unwrap() / prod(&other);
        prop_assert!((ua - ub).abs() <= 1e-10 * ua.abs().max(1e-300));
    }

    #[test]
    fn gamma_q_bounded_by_value_at_zero(q in 0.3f64..=2.0, t in 0.0f64..30.0) {
        let cfg = QuadratureConfig::default();
        let g0 = gamma_q(q, 0.0, &cfg).unwrap();
        let g = gamma_q(q, t, &cfg).unwrap();
        prop_assert!(g.value.abs() <= g0.value + g.err + g0.err);
    }
}

#[test]
fn gamma_recurrence_on_a_thousand_points() {
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        // Spread over (-9.95, 40) avoiding the poles.
        let x = -9.95 + 0.05 * i as f64;
        if (x - x.round()).abs() < 1e-9 && x <= 0.0 {
            continue;
        }
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        worst = worst.max(((lhs - rhs) / rhs).abs());
    }
    assert!(worst < 1e-12, "worst relative residual {worst:e}");
}

#[test]
fn lq_transform_is_symmetric_and_homogeneous() {
    let cfg = QuadratureConfig::default();
    let eval = LqEvaluator::<f64>::new(3.0, &cfg).unwrap();
    let p = 1.3;
    let xi = [0.4, 1.1, 2.0];
    let a = eval.eval(p, &xi).unwrap();
    let b = eval.eval(p, &[-2.0, 0.4, -1.1]).unwrap();
    assert!((a.value - b.value).abs() <= a.err_estimate + b.err_estimate);
    let c = eval.eval(p, &[0.8, 2.2, 4.0]).unwrap();
    let expect = 2f64.powf(p - 3.0) * a.value;
    assert!((c.value - expect).abs() <= c.err_estimate + 2f64.powf(p - 3.0) * a.err_estimate);
}

#[test]
fn witnesses_reevaluate_with_the_reported_sign() {
    let space = SpaceSpec64::Linf { n: 4 };
    let cfg = ScanConfig::default();
    let r = sign_scan(&space, 0.5, &cfg).unwrap();
    assert_eq!(r.verdict, Verdict::SignChange);
    let eval = PointEvaluator::for_space(&space, 0.5, &cfg.quad).unwrap();
    let pos = r.pos_witness.unwrap();
    let neg = r.neg_witness.unwrap();
    let vp = eval.eval(0.5, &pos.point).unwrap();
    let vn = eval.eval(0.5, &neg.point).unwrap();
    assert!(vp.value - vp.err_estimate > 0.0);
    assert!(vn.value + vn.err_estimate < 0.0);
}

#[test]
fn certificate_agrees_with_scan() {
    let cfg = ScanConfig::default();
    for p in [0.5, 1.5] {
        let cert = sign_change_certificate(3.0, 5, p).unwrap();
        assert!(cert.i_pos > 0.0 && cert.i_neg < 0.0);
        let scan = sign_scan(&SpaceSpec64::lq(3.0, 5).unwrap(), p, &cfg).unwrap();
        assert_eq!(scan.verdict, Verdict::SignChange, "p = {p}");
    }
    // Inside the embedding range neither tool reports a sign change.
    assert!(sign_change_certificate(3.0, 5, 2.5).is_err());
    let scan = sign_scan(&SpaceSpec64::lq(3.0, 5).unwrap(), 2.5, &cfg).unwrap();
    assert_ne!(scan.verdict, Verdict::SignChange);
}
