use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::SpaceSpec;

use super::scan::{sign_scan_with, PointEvaluator, ScanConfig, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalStep {
    pub p: f64,
    pub verdict: Verdict,
    pub min_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub space: SpaceSpec<f64>,
    /// Midpoint of the final bracket, or its floor without a transition.
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    /// False when no sign change was seen at the lower end of the range.
    pub transition: bool,
    /// Set when an inconclusive scan stopped the bisection early.
    pub stalled_at: Option<f64>,
    pub steps: Vec<CriticalStep>,
}

const EDGE: f64 = 0.05;
const WIDTH: f64 = 0.05;

/// Smallest `p` at which `‖x‖_q^{-p}` stops changing sign, by bisection on
/// `(0.05, n-0.05)` of "the scan finds a sign change". The predicate is
/// assumed to hold below a single threshold.
///
/// An inconclusive scan is retried once at a shifted point; a second one
/// ends the search with the current (wider) bracket and `stalled_at` set.
pub fn critical_exponent(space: &SpaceSpec<f64>, cfg: &ScanConfig) -> Result<CriticalReport> {
    let n = space.n();
    match space.lq_exponent() {
        Some(q) if q > 2.0 && n >= 3 => {}
        _ => {
            return Err(Error::domain(format!(
                "critical exponent search needs l_q^n with q > 2 and n >= 3, got {space}"
            )))
        }
    }
    let mut lo = EDGE;
    let mut hi = n as f64 - EDGE;
    let mut eval = PointEvaluator::for_space(space, lo, &cfg.quad)?;
    let mut steps = Vec::new();
    let probe = |p: f64, eval: &mut PointEvaluator, steps: &mut Vec<CriticalStep>| -> Result<Verdict> {
        let e = std::mem::replace(eval, PointEvaluator::LinfClosed);
        *eval = e.retarget(space, p, &cfg.quad)?;
        let r = sign_scan_with(eval, space, p, cfg)?;
        steps.push(CriticalStep {
            p,
            verdict: r.verdict,
            min_value: r.min_value,
        });
        Ok(r.verdict)
    };

    if probe(lo, &mut eval, &mut steps)? != Verdict::SignChange {
        return Ok(CriticalReport {
            space: space.clone(),
            estimate: lo,
            lo,
            hi,
            transition: false,
            stalled_at: None,
            steps,
        });
    }
    let mut stalled_at = None;
    while hi - lo > WIDTH {
        let mid = 0.5 * (lo + hi);
        let mut v = probe(mid, &mut eval, &mut steps)?;
        let mut at = mid;
        if v == Verdict::Inconclusive {
            at = mid + 0.125 * (hi - lo);
            v = probe(at, &mut eval, &mut steps)?;
        }
        match v {
            Verdict::SignChange => lo = at,
            Verdict::AllNonnegative => hi = at,
            Verdict::Inconclusive => {
                stalled_at = Some(at);
                break;
            }
        }
    }
    Ok(CriticalReport {
        space: space.clone(),
        estimate: 0.5 * (lo + hi),
        lo,
        hi,
        transition: true,
        stalled_at,
        steps,
    })
}
