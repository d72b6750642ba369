//! Quantized density evolution on the BI-AWGN channel.
//!
//! Variable messages evolve as `P_{l+1} = P_0 (*) (sum_c w_c Phi_c(P_l))^{(*)(J-1)}`
//! where `(*)` is the variable-node convolution, `Phi_c` is the (K-1)-fold
//! check-node convolution for SPC nodes and a Monte-Carlo estimate of the APP
//! output density for GC nodes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::channels::ChannelModel;
use crate::density::{spc_out_density, var_power, Bin, Grid, QuantizedLDensity};
use crate::error::{invalid, Result};
use crate::gc_app::{AppKernel, LLR_CLIP};
use crate::par;
use crate::subcodes::{CheckKind, EdgeProfile, EnsembleSpec, LinearSubcode};
use crate::threshold::{bisect, Method, Probe, ThresholdResult};

/// Samples per parallel block in Monte-Carlo density estimation.
const BLOCK: usize = 8192;

/// Monte-Carlo estimate of the position-1 APP output density of `code` when
/// every input is drawn independently from `p`.
///
/// Interior bins are sampled at their centres and saturation bins at
/// `+-LLR_CLIP`. Samples are split into fixed-size blocks, each with its own
/// random stream derived from `seed`, so the histogram does not depend on the
/// number of worker threads.
pub fn gc_out_density_mc(code: &LinearSubcode, p: &QuantizedLDensity, n: usize, seed: u64) -> Result<QuantizedLDensity> {
    gc_out_density_with(&AppKernel::new(code), p, n, seed)
}

fn gc_out_density_with(kernel: &AppKernel, p: &QuantizedLDensity, n: usize, seed: u64) -> Result<QuantizedLDensity> {
    if n == 0 {
        return Err(invalid("Monte-Carlo sample count must be positive"));
    }
    if n < 10_000 {
        log::warn!("{n} Monte-Carlo samples give a coarse GC output histogram");
    }
    let grid = p.grid();
    // Slot 0 is -inf, slots 1..=len the interior bins, slot len + 1 is +inf.
    let mut weights = Vec::with_capacity(grid.len() + 2);
    weights.push(p.neg_sat());
    weights.extend_from_slice(p.pmf());
    weights.push(p.pos_sat());
    let values: Vec<f64> = std::iter::once(-LLR_CLIP)
        .chain((0..grid.len()).map(|k| grid.value(k)))
        .chain(std::iter::once(LLR_CLIP))
        .collect();
    let alias = WeightedAliasIndex::new(weights).map_err(|e| invalid(format!("cannot sample density: {e}")))?;
    let k = kernel.len();
    let blocks = n.div_ceil(BLOCK);
    let counts = par::map_indexed(blocks, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(par::stream_seed(seed, b as u64));
        let mut hist = vec![0u32; grid.len() + 2];
        let mut x = vec![0.0; k];
        let len = BLOCK.min(n - b * BLOCK);
        for _ in 0..len {
            for xi in x.iter_mut().skip(1) {
                *xi = values[alias.sample(&mut rng)];
            }
            let slot = match grid.locate(kernel.eval(&x)) {
                Bin::NegSat => 0,
                Bin::Index(i) => i + 1,
                Bin::PosSat => grid.len() + 1,
            };
            hist[slot] += 1;
        }
        hist
    });
    let mut total = vec![0u64; grid.len() + 2];
    for hist in counts {
        for (t, c) in total.iter_mut().zip(hist) {
            *t += u64::from(c);
        }
    }
    let scale = 1.0 / n as f64;
    let pmf = total[1..=grid.len()].iter().map(|&c| c as f64 * scale).collect();
    QuantizedLDensity::from_parts(grid, pmf, total[0] as f64 * scale, total[grid.len() + 1] as f64 * scale)
}

/// Settings for quantized density evolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    pub l_max: f64,
    pub half_bins: usize,
    /// Success once the variable-message error probability is below this.
    pub target_pe: f64,
    pub max_iters: usize,
    /// Failure once the error probability has improved by less than
    /// `stall_ratio` over the last `stall_window` iterations.
    pub stall_window: usize,
    pub stall_ratio: f64,
    /// Monte-Carlo samples per GC density during bisection.
    pub samples: usize,
    /// Samples for the confirmation probes at the final bracket.
    pub confirm_samples: usize,
    /// Bisection tolerance on `sigma`.
    pub tol: f64,
    /// Initial bisection bracket on `sigma`.
    pub bracket: (f64, f64),
    pub seed: u64,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            l_max: 30.0,
            half_bins: 2048,
            target_pe: 1e-6,
            max_iters: 500,
            stall_window: 50,
            stall_ratio: 1e-3,
            samples: 200_000,
            confirm_samples: 1_000_000,
            tol: 1e-3,
            bracket: (0.3, 3.0),
            seed: 0,
        }
    }
}

impl DeConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.l_max, self.half_bins)
    }
}

/// Per-iteration record of a density-evolution run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DeTrace {
    pub error_probability: Vec<f64>,
    pub symmetry_residual: Vec<f64>,
}

/// Density evolution for one edge profile.
#[derive(Clone, Debug)]
pub struct AwgnDensityEvolution {
    profile: EdgeProfile,
    kernels: Vec<Option<AppKernel>>,
    grid: Grid,
}

impl AwgnDensityEvolution {
    pub fn new(profile: EdgeProfile, grid: Grid) -> Result<Self> {
        profile.validate()?;
        let kernels = profile
            .checks
            .iter()
            .map(|(kind, _)| match kind {
                CheckKind::Gc(code) => Some(AppKernel::new(code)),
                CheckKind::Spc { .. } => None,
            })
            .collect();
        Ok(Self { profile, kernels, grid })
    }

    pub fn for_ensemble(spec: &EnsembleSpec, grid: Grid) -> Result<Self> {
        Self::new(spec.edge_profile(), grid)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// True when some constraint type needs Monte-Carlo sampling.
    pub fn is_stochastic(&self) -> bool {
        self.kernels.iter().any(Option::is_some)
    }

    /// Mixture of constraint output densities for variable density `p`.
    /// `seed` drives the Monte-Carlo GC estimates.
    pub fn check_mixture(&self, p: &QuantizedLDensity, samples: usize, seed: u64) -> Result<QuantizedLDensity> {
        let outs = self
            .profile
            .checks
            .iter()
            .zip(&self.kernels)
            .enumerate()
            .map(|(c, ((kind, w), kernel))| {
                let d = match (kind, kernel) {
                    (_, Some(kernel)) => gc_out_density_with(kernel, p, samples, par::stream_seed(seed, c as u64))?,
                    (CheckKind::Spc { degree }, None) => spc_out_density(p, *degree)?,
                    (CheckKind::Gc(_), None) => unreachable!("GC kinds carry kernels"),
                };
                Ok((*w, d))
            })
            .collect::<Result<Vec<_>>>()?;
        let parts: Vec<(f64, &QuantizedLDensity)> = outs.iter().map(|(w, d)| (*w, d)).collect();
        QuantizedLDensity::mixture(&parts)
    }

    /// One update `P_{l+1} = P_0 (*) mixture^{(*)(J-1)}`.
    pub fn step(&self, p: &QuantizedLDensity, p0: &QuantizedLDensity, samples: usize, seed: u64) -> Result<QuantizedLDensity> {
        let mix = self.check_mixture(p, samples, seed)?;
        let incoming = var_power(&mix, self.profile.var_degree - 1)?;
        // Check-node powers raise the total mass to the (K-1)-th power, so
        // round-off deficits compound across iterations unless removed.
        let mut next = crate::density::var_convolve(p0, &incoming)?;
        next.normalize();
        Ok(next)
    }

    /// Runs density evolution at `sigma`. Iteration `l` uses Monte-Carlo
    /// seed `stream_seed(seed, l)`, so probes at different `sigma` share
    /// random numbers.
    pub fn run(&self, sigma: f64, cfg: &DeConfig, samples: usize, seed: u64, mut trace: Option<&mut DeTrace>) -> Result<(Probe, QuantizedLDensity)> {
        let p0 = ChannelModel::awgn(sigma)?.channel_l_density(self.grid);
        let mut p = p0.clone();
        let mut history = vec![p.error_probability()];
        if let Some(t) = trace.as_deref_mut() {
            t.error_probability.push(history[0]);
            t.symmetry_residual.push(p.symmetry_residual());
        }
        let mut iteration = 0;
        while *history.last().unwrap() >= cfg.target_pe && iteration < cfg.max_iters {
            p = self.step(&p, &p0, samples, par::stream_seed(seed, iteration as u64))?;
            iteration += 1;
            let pe = p.error_probability();
            history.push(pe);
            if let Some(t) = trace.as_deref_mut() {
                t.error_probability.push(pe);
                t.symmetry_residual.push(p.symmetry_residual());
            }
            if history.len() > cfg.stall_window {
                let past = history[history.len() - 1 - cfg.stall_window];
                if pe > past * (1.0 - cfg.stall_ratio) {
                    break;
                }
            }
        }
        let pe = *history.last().unwrap();
        Ok((
            Probe {
                parameter: sigma,
                success: pe < cfg.target_pe,
                iterations: iteration,
                metric: pe,
            },
            p,
        ))
    }

    /// Largest `sigma` for which the error probability reaches the target.
    ///
    /// For stochastic profiles the final bracket is confirmed with
    /// `confirm_samples` and a fresh seed. If the confirmation contradicts the
    /// bracket, the search is repeated once with the larger sample count;
    /// a second contradiction sets the `uncertain` flag.
    pub fn threshold(&self, cfg: &DeConfig) -> Result<ThresholdResult> {
        let search = |samples: usize, seed: u64| -> Result<ThresholdResult> {
            let mut err = None;
            let r = bisect(Method::DeMc, cfg.bracket.0, cfg.bracket.1, cfg.tol, cfg.max_iters, |sigma| {
                match self.run(sigma, cfg, samples, seed, None) {
                    Ok((probe, _)) => probe,
                    Err(e) => {
                        err.get_or_insert(e);
                        Probe {
                            parameter: sigma,
                            success: false,
                            iterations: 0,
                            metric: f64::NAN,
                        }
                    }
                }
            })?;
            match err {
                Some(e) => Err(e),
                None => Ok(r),
            }
        };
        let mut r = search(cfg.samples, cfg.seed)?;
        if !self.is_stochastic() {
            return Ok(r);
        }
        let confirm_seed = par::stream_seed(cfg.seed, u64::MAX);
        let consistent = |r: &ThresholdResult| -> Result<bool> {
            let lo = r.lower == 0.0 || self.run(r.lower, cfg, cfg.confirm_samples, confirm_seed, None)?.0.success;
            let hi = !self.run(r.upper, cfg, cfg.confirm_samples, confirm_seed, None)?.0.success;
            Ok(lo && hi)
        };
        if !consistent(&r)? {
            log::warn!("confirmation contradicts the bracket [{}, {}]; repeating with more samples", r.lower, r.upper);
            r = search(cfg.confirm_samples, cfg.seed)?;
            r.uncertain = !consistent(&r)?;
        }
        Ok(r)
    }
}

/// One density-evolution update for a `(C, J, K, t)` ensemble.
pub fn de_step_awgn(
    spec: &EnsembleSpec,
    p_l: &QuantizedLDensity,
    p0: &QuantizedLDensity,
    samples: usize,
    seed: u64,
) -> Result<QuantizedLDensity> {
    AwgnDensityEvolution::for_ensemble(spec, p0.grid())?.step(p_l, p0, samples, seed)
}

/// Density-evolution threshold of a `(C, J, K, t)` ensemble.
pub fn awgn_threshold_de(spec: &EnsembleSpec, cfg: &DeConfig) -> Result<ThresholdResult> {
    AwgnDensityEvolution::for_ensemble(spec, cfg.grid()?)?.threshold(cfg)
}
