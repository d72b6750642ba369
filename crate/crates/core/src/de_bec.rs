//! Exact density evolution on the binary erasure channel.
//!
//! With `J`-regular variables and a mixture of constraint types the erasure
//! probability of variable-to-constraint messages evolves as
//! `eps_{l+1} = eps_0 (sum_c w_c e_c(eps_l))^(J-1)`, where `e_c` is the
//! probability that a type-`c` constraint emits an erasure.

use std::io::Write;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::gc_app::{app_erasure_output, ErasureOutput};
use crate::par;
use crate::subcodes::{CheckKind, EdgeProfile, EnsembleSpec, LinearSubcode};
use crate::threshold::{bisect, Method, Probe, ThresholdResult};

/// Largest length for which erasure patterns are enumerated.
pub const MAX_POLY_LENGTH: usize = 20;

/// Output-erasure polynomial of a constraint node,
/// `e(eps) = 1 - sum_w c_w eps^w (1 - eps)^(K-1-w)`, where `c_w` counts the
/// weight-`w` erasure patterns on the other `K - 1` positions that leave the
/// output known.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErasurePolynomial {
    pub coeffs: Vec<u64>,
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

impl ErasurePolynomial {
    /// Number of other positions, `K - 1`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Evaluates `e(eps)` as the sum over erasure patterns that leave the
    /// output erased, which avoids cancellation for small `eps`.
    pub fn eval(&self, eps: f64) -> f64 {
        let n = self.degree();
        let q = 1.0 - eps;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(w, &c)| (binomial(n, w) - c) as f64 * eps.powi(w as i32) * q.powi((n - w) as i32))
            .sum()
    }

    /// Polynomial of the degree-`k` single-parity-check node: the output is
    /// known only if no other position is erased.
    pub fn spc(k: usize) -> Self {
        let mut coeffs = vec![0; k];
        coeffs[0] = 1;
        Self { coeffs }
    }
}

/// Tallies, for every erasure pattern on the positions other than `i`,
/// whether the message to `i` is known.
pub fn gc_erasure_poly(code: &LinearSubcode, i: usize) -> Result<ErasurePolynomial> {
    let k = code.len();
    if k > MAX_POLY_LENGTH {
        return Err(invalid(format!(
            "erasure enumeration limited to length {MAX_POLY_LENGTH}, got {k}"
        )));
    }
    if i >= k {
        return Err(invalid(format!("position {} outside 1..={k}", i + 1)));
    }
    let others: Vec<usize> = (0..k).filter(|&j| j != i).collect();
    let mut coeffs = vec![0u64; k];
    for pattern in 0u32..(1 << (k - 1)) {
        let erased = others
            .iter()
            .enumerate()
            .filter(|(b, _)| pattern >> b & 1 == 1)
            .fold(0u32, |acc, (_, &j)| acc | 1 << j);
        if app_erasure_output(code, i, erased) == ErasureOutput::Known {
            coeffs[pattern.count_ones() as usize] += 1;
        }
    }
    Ok(ErasurePolynomial { coeffs })
}

/// Density-evolution state on the BEC.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BecDeState {
    pub epsilon0: f64,
    pub epsilon: f64,
    pub iteration: usize,
}

impl BecDeState {
    pub fn new(epsilon0: f64) -> Self {
        Self {
            epsilon0,
            epsilon: epsilon0,
            iteration: 0,
        }
    }
}

/// Stopping rule for BEC density evolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BecDeConfig {
    /// Success once the erasure probability drops below this value.
    pub target: f64,
    pub max_iters: usize,
    /// Bisection tolerance on `eps_0`.
    pub tol: f64,
}

impl Default for BecDeConfig {
    fn default() -> Self {
        Self {
            target: 1e-10,
            max_iters: 200_000,
            tol: 1e-5,
        }
    }
}

/// Precomputed erasure polynomials of an edge profile.
#[derive(Clone, Debug)]
pub struct BecDensityEvolution {
    var_degree: usize,
    checks: Vec<(ErasurePolynomial, f64)>,
}

impl BecDensityEvolution {
    pub fn new(profile: &EdgeProfile) -> Result<Self> {
        profile.validate()?;
        let checks = profile
            .checks
            .iter()
            .map(|(kind, w)| {
                let poly = match kind {
                    CheckKind::Spc { degree } => ErasurePolynomial::spc(*degree),
                    CheckKind::Gc(code) => gc_erasure_poly(code, 0)?,
                };
                Ok((poly, *w))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            var_degree: profile.var_degree,
            checks,
        })
    }

    pub fn for_ensemble(spec: &EnsembleSpec) -> Result<Self> {
        Self::new(&spec.edge_profile())
    }

    /// Constraint-to-variable erasure probability given `eps_l`.
    pub fn check_erasure(&self, eps: f64) -> f64 {
        self.checks.iter().map(|(p, w)| w * p.eval(eps)).sum()
    }

    /// One update `eps_{l+1} = eps_0 (sum_c w_c e_c(eps_l))^(J-1)`.
    pub fn step(&self, s: BecDeState) -> BecDeState {
        BecDeState {
            epsilon0: s.epsilon0,
            epsilon: s.epsilon0 * self.check_erasure(s.epsilon).powi(self.var_degree as i32 - 1),
            iteration: s.iteration + 1,
        }
    }

    /// Iterates from `eps_0` until success, a stalled fixed point, or the
    /// iteration budget runs out.
    pub fn run(&self, epsilon0: f64, cfg: &BecDeConfig) -> Probe {
        let mut s = BecDeState::new(epsilon0);
        while s.epsilon >= cfg.target && s.iteration < cfg.max_iters {
            let next = self.step(s);
            if next.epsilon >= s.epsilon {
                s = next;
                break;
            }
            s = next;
        }
        Probe {
            parameter: epsilon0,
            success: s.epsilon < cfg.target,
            iterations: s.iteration,
            metric: s.epsilon,
        }
    }

    /// Largest `eps_0` for which the erasure probability vanishes.
    pub fn threshold(&self, cfg: &BecDeConfig) -> Result<ThresholdResult> {
        bisect(Method::BecDe, 0.0, 1.0, cfg.tol, cfg.max_iters, |e| self.run(e, cfg))
    }
}

/// BEC threshold of an ensemble.
pub fn bec_threshold(spec: &EnsembleSpec, cfg: &BecDeConfig) -> Result<ThresholdResult> {
    BecDensityEvolution::for_ensemble(spec)?.threshold(cfg)
}

/// One row of a BEC sweep over the GC fraction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BecSweepRow {
    pub t: f64,
    pub epsilon_star: f64,
    pub design_rate: f64,
    pub capacity: f64,
    pub gap: f64,
}

/// Thresholds, design rates and capacity gaps over a grid of GC fractions.
/// Grid points are evaluated in parallel.
pub fn sweep_t_bec(
    code: &LinearSubcode,
    var_degree: usize,
    t_grid: &[f64],
    cfg: &BecDeConfig,
) -> Result<Vec<BecSweepRow>> {
    par::map_slice(t_grid, |&t| {
        let spec = EnsembleSpec::new(code.clone(), var_degree, t, code.len())?;
        let r = bec_threshold(&spec, cfg)?;
        let capacity = 1.0 - r.threshold;
        let rate = spec.design_rate();
        Ok(BecSweepRow {
            t,
            epsilon_star: r.threshold,
            design_rate: rate,
            capacity,
            gap: capacity - rate,
        })
    })
    .into_iter()
    .collect()
}

/// Writes sweep rows as CSV with columns `t,epsilon_star,design_rate,capacity,gap`.
pub fn write_sweep_csv<W: Write>(rows: &[BecSweepRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}
