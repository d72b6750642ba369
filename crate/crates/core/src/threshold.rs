//! Threshold results and the bisection driver shared by every method.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Analysis method that produced a threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exact density evolution on the BEC.
    BecDe,
    /// Quantized density evolution with Monte-Carlo GC densities.
    DeMc,
    /// Single-Gaussian approximation.
    Ga,
    /// Gaussian-mixture approximation.
    Gma,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::BecDe => "bec-de",
            Method::DeMc => "de-mc",
            Method::Ga => "ga",
            Method::Gma => "gma",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one evaluation of the channel parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub parameter: f64,
    pub success: bool,
    pub iterations: usize,
    /// Final error probability (or mean, for mean-divergence criteria).
    pub metric: f64,
}

/// A channel-parameter threshold with its search trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub method: Method,
    /// Midpoint of the final bracket.
    pub threshold: f64,
    /// Largest parameter observed to succeed.
    pub lower: f64,
    /// Smallest parameter observed to fail.
    pub upper: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// Set by stochastic methods when a confirmation probe contradicts the
    /// bracket.
    pub uncertain: bool,
    pub trace: Vec<Probe>,
}

impl ThresholdResult {
    /// Width of the final bracket.
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Bisection for the largest parameter at which `eval` succeeds.
///
/// `eval` must succeed at small parameters and fail at large ones. The
/// bracket `[lo, hi]` is widened geometrically (at most 40 times) if `lo`
/// fails or `hi` succeeds. The search stops once the bracket is at most `tol`
/// wide.
pub fn bisect<F>(method: Method, lo: f64, hi: f64, tol: f64, max_iters: usize, mut eval: F) -> Result<ThresholdResult>
where
    F: FnMut(f64) -> Probe,
{
    if !(tol > 0.0) || !(lo < hi) || lo < 0.0 {
        return Err(invalid(format!("bad bisection setup: [{lo}, {hi}], tol {tol}")));
    }
    let mut trace = Vec::new();
    let mut probe = |x: f64, trace: &mut Vec<Probe>| {
        let p = eval(x);
        trace.push(p);
        p.success
    };
    let (mut lo, mut hi) = (lo, hi);
    let mut widen = 0;
    if probe(lo, &mut trace) {
        while probe(hi, &mut trace) {
            widen += 1;
            if widen > 40 {
                return Err(invalid("no failing parameter found while widening the bracket"));
            }
            lo = hi;
            hi *= 2.0;
        }
    } else {
        loop {
            widen += 1;
            if widen > 40 || lo == 0.0 {
                // Nothing succeeds down to the smallest parameter tried.
                return Ok(ThresholdResult {
                    method,
                    threshold: lo,
                    lower: 0.0,
                    upper: lo,
                    tol,
                    max_iters,
                    uncertain: false,
                    trace,
                });
            }
            hi = lo;
            lo *= 0.5;
            if probe(lo, &mut trace) {
                break;
            }
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if probe(mid, &mut trace) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdResult {
        method,
        threshold: 0.5 * (lo + hi),
        lower: lo,
        upper: hi,
        tol,
        max_iters,
        uncertain: false,
        trace,
    })
}
