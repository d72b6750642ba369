//! Flooding message-passing decoder on a [`TannerGraph`] and a Monte-Carlo
//! block-error-rate harness.
//!
//! Variable and SPC nodes use the belief-propagation sum and tanh rules; GC
//! nodes emit exact extrinsic APP messages computed with the position-1
//! kernel and the subcode's permutation table.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channels::{snr_db, SnrConvention};
use crate::ensemble_graph::{CheckType, TannerGraph};
use crate::error::{invalid, Result};
use crate::gc_app::{AppKernel, LLR_CLIP};
use crate::par;
use crate::subcodes::{pack, PermutationTable};

/// Result of decoding one block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// Hard decision, one entry (0 or 1) per variable.
    pub bits: Vec<u8>,
    /// True when the decision satisfies every constraint.
    pub converged: bool,
    /// Iterations performed; 0 when the channel decision is already valid.
    pub iterations: usize,
}

enum GcRule {
    Permuted { kernel: AppKernel, table: PermutationTable },
    PerPosition(Vec<AppKernel>),
}

/// Message buffers of one decoding run.
#[derive(Clone, Debug, Default)]
pub struct DecoderState {
    /// Variable-to-constraint messages, one per edge.
    pub v2c: Vec<f64>,
    /// Constraint-to-variable messages, one per edge.
    pub c2v: Vec<f64>,
    /// Channel LLR plus every incoming constraint message.
    pub posterior: Vec<f64>,
    pub iteration: usize,
}

/// Decoder bound to a graph. Edges are numbered constraint by constraint in
/// socket order.
pub struct Decoder<'g> {
    graph: &'g TannerGraph,
    check_offsets: Vec<usize>,
    edge_var: Vec<usize>,
    var_offsets: Vec<usize>,
    var_edges: Vec<usize>,
    gc: Option<GcRule>,
}

impl<'g> Decoder<'g> {
    pub fn new(graph: &'g TannerGraph) -> Self {
        let mut check_offsets = vec![0];
        let mut edge_var = Vec::with_capacity(graph.num_edges());
        for check in graph.checks() {
            edge_var.extend_from_slice(&check.vars);
            check_offsets.push(edge_var.len());
        }
        let n = graph.num_vars();
        let mut var_offsets = vec![0usize; n + 1];
        for &v in &edge_var {
            var_offsets[v + 1] += 1;
        }
        for v in 0..n {
            var_offsets[v + 1] += var_offsets[v];
        }
        let mut fill = var_offsets.clone();
        let mut var_edges = vec![0; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v]] = e;
            fill[v] += 1;
        }
        let gc = graph.subcode().map(|code| match code.permutations() {
            Some(table) => GcRule::Permuted {
                kernel: AppKernel::new(code),
                table: table.clone(),
            },
            None => GcRule::PerPosition((0..code.len()).map(|i| AppKernel::at_position(code, i)).collect()),
        });
        Self {
            graph,
            check_offsets,
            edge_var,
            var_offsets,
            var_edges,
            gc,
        }
    }

    pub fn graph(&self) -> &TannerGraph {
        self.graph
    }

    /// Decodes channel LLRs (positive favours bit 0) with at most
    /// `max_iters` flooding iterations.
    pub fn decode(&self, llrs: &[f64], max_iters: usize) -> Result<DecodeOutcome> {
        let mut state = DecoderState::default();
        self.decode_with(llrs, max_iters, &mut state)
    }

    /// Like [`decode`](Self::decode) but reuses the buffers in `state`, which
    /// holds the final messages afterwards.
    pub fn decode_with(&self, llrs: &[f64], max_iters: usize, state: &mut DecoderState) -> Result<DecodeOutcome> {
        let n = self.graph.num_vars();
        if llrs.len() != n {
            return Err(invalid(format!("expected {n} channel LLRs, got {}", llrs.len())));
        }
        let l0: Vec<f64> = llrs.iter().map(|&l| if l.is_nan() { 0.0 } else { clip_finite(l) }).collect();
        let edges = self.edge_var.len();
        state.v2c.clear();
        state.v2c.resize(edges, 0.0);
        state.c2v.clear();
        state.c2v.resize(edges, 0.0);
        state.posterior.clear();
        state.posterior.extend_from_slice(&l0);
        state.iteration = 0;

        let mut bits = hard_decision(&state.posterior);
        if syndrome_check(self.graph, &bits) {
            return Ok(DecodeOutcome {
                bits,
                converged: true,
                iterations: 0,
            });
        }
        let mut x = Vec::new();
        let mut out = Vec::new();
        while state.iteration < max_iters {
            state.iteration += 1;
            self.variable_messages(&l0, &state.c2v, &mut state.v2c);
            for (c, check) in self.graph.checks().iter().enumerate() {
                let range = self.check_offsets[c]..self.check_offsets[c + 1];
                x.clear();
                x.extend_from_slice(&state.v2c[range.clone()]);
                out.clear();
                match check.kind {
                    CheckType::Spc => spc_update(&x, &mut out),
                    CheckType::Gc => self.gc_update(&x, &mut out),
                }
                state.c2v[range].copy_from_slice(&out);
            }
            for (v, post) in state.posterior.iter_mut().enumerate() {
                let incident = &self.var_edges[self.var_offsets[v]..self.var_offsets[v + 1]];
                *post = l0[v] + incident.iter().map(|&e| state.c2v[e]).sum::<f64>();
            }
            bits = hard_decision(&state.posterior);
            if syndrome_check(self.graph, &bits) {
                return Ok(DecodeOutcome {
                    bits,
                    converged: true,
                    iterations: state.iteration,
                });
            }
        }
        Ok(DecodeOutcome {
            bits,
            converged: false,
            iterations: state.iteration,
        })
    }

    /// Variable-to-constraint messages: the channel LLR plus the messages
    /// from every other incident constraint.
    pub fn variable_messages(&self, l0: &[f64], c2v: &[f64], v2c: &mut [f64]) {
        for (v, &l) in l0.iter().enumerate() {
            let incident = &self.var_edges[self.var_offsets[v]..self.var_offsets[v + 1]];
            for &e in incident {
                let others: f64 = incident.iter().filter(|&&f| f != e).map(|&f| c2v[f]).sum();
                v2c[e] = clip_finite(l + others);
            }
        }
    }

    fn gc_update(&self, x: &[f64], out: &mut Vec<f64>) {
        match self.gc.as_ref().expect("GC nodes imply a subcode") {
            GcRule::Permuted { kernel, table } => {
                out.extend(table.iter().map(|perm| clip_finite(kernel.eval_permuted(x, perm))));
            }
            GcRule::PerPosition(kernels) => {
                out.extend(kernels.iter().map(|k| clip_finite(k.eval(x))));
            }
        }
    }
}

fn clip_finite(l: f64) -> f64 {
    l.clamp(-LLR_CLIP, LLR_CLIP)
}

/// `-ln tanh(x / 2)` for `x >= 0`; an involution on `[0, inf]`.
fn gallager(x: f64) -> f64 {
    (2.0 / x.exp_m1()).ln_1p()
}

/// Extrinsic tanh-rule messages for every edge of an SPC node.
fn spc_update(x: &[f64], out: &mut Vec<f64>) {
    let mags: Vec<f64> = x.iter().map(|v| gallager(v.abs())).collect();
    let negatives = x.iter().filter(|&&v| v < 0.0).count();
    for (i, &xi) in x.iter().enumerate() {
        let sum: f64 = mags.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, m)| m).sum();
        let flips = negatives - usize::from(xi < 0.0);
        let mag = gallager(sum).min(LLR_CLIP);
        out.push(if flips % 2 == 1 { -mag } else { mag });
    }
}

/// Bit 1 exactly where the LLR is negative.
fn hard_decision(posterior: &[f64]) -> Vec<u8> {
    posterior.iter().map(|&l| u8::from(l < 0.0)).collect()
}

/// Decodes one block with a fresh [`Decoder`].
pub fn decode(graph: &TannerGraph, llrs: &[f64], max_iters: usize) -> Result<DecodeOutcome> {
    Decoder::new(graph).decode(llrs, max_iters)
}

/// True when every SPC node sees even parity and every GC node sees a
/// subcode codeword in socket order.
pub fn syndrome_check(graph: &TannerGraph, bits: &[u8]) -> bool {
    graph.checks().iter().all(|check| match check.kind {
        CheckType::Spc => check.vars.iter().fold(0u8, |acc, &v| acc ^ bits[v]) == 0,
        CheckType::Gc => {
            let word: Vec<u8> = check.vars.iter().map(|&v| bits[v]).collect();
            graph.subcode().is_some_and(|code| code.contains(pack(&word)))
        }
    })
}

/// Settings of a BLER simulation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlerConfig {
    /// Maximum trials per noise level.
    pub trials: usize,
    pub max_iters: usize,
    /// A noise level stops early once this many block errors are seen.
    pub max_block_errors: usize,
    pub seed: u64,
    pub convention: SnrConvention,
}

impl Default for BlerConfig {
    fn default() -> Self {
        Self {
            trials: 100_000,
            max_iters: 20,
            max_block_errors: 200,
            seed: 0,
            convention: SnrConvention::default(),
        }
    }
}

/// Simulation result at one noise level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlerRecord {
    pub sigma: f64,
    pub snr_db: f64,
    pub trials: usize,
    pub block_errors: usize,
    pub bit_errors: usize,
    pub bler: f64,
    pub avg_iters: f64,
    pub seed: u64,
}

impl BlerRecord {
    /// Binomial standard error of `bler`.
    pub fn std_error(&self) -> f64 {
        (self.bler * (1.0 - self.bler) / self.trials.max(1) as f64).sqrt()
    }
}

/// Trials decoded per parallel batch.
const BATCH: usize = 256;

struct Trial {
    block_error: bool,
    bit_errors: usize,
    iterations: usize,
}

/// Channel LLRs for the all-zero word sent as all `+1` over BI-AWGN.
pub fn awgn_llrs(n: usize, sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 2.0 / (sigma * sigma);
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            scale * (1.0 + sigma * z)
        })
        .collect()
}

/// BLER of the all-zero codeword at each `sigma`.
///
/// Trial `k` at the `p`-th noise level draws its noise from stream
/// `stream_seed(stream_seed(seed, p), k)`. Trials run in parallel batches
/// and are tallied in order, stopping exactly at the trial that produces the
/// `max_block_errors`-th error, so results do not depend on the worker count.
pub fn bler_sim(graph: &TannerGraph, sigmas: &[f64], cfg: &BlerConfig) -> Result<Vec<BlerRecord>> {
    if cfg.trials == 0 || cfg.max_block_errors == 0 {
        return Err(invalid("trials and max block errors must be positive"));
    }
    if let Some(s) = sigmas.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(invalid(format!("noise level {s} must be positive and finite")));
    }
    let decoder = Decoder::new(graph);
    let rate = graph.design_rate();
    let n = graph.num_vars();
    let mut records = Vec::with_capacity(sigmas.len());
    for (p, &sigma) in sigmas.iter().enumerate() {
        let point_seed = par::stream_seed(cfg.seed, p as u64);
        let (mut trials, mut block_errors, mut bit_errors, mut iterations) = (0, 0, 0, 0);
        'batches: while trials < cfg.trials {
            let batch = BATCH.min(cfg.trials - trials);
            let start = trials;
            let results = par::map_indexed(batch, |k| -> Result<Trial> {
                let llrs = awgn_llrs(n, sigma, par::stream_seed(point_seed, (start + k) as u64));
                let out = decoder.decode(&llrs, cfg.max_iters)?;
                let wrong = out.bits.iter().filter(|&&b| b != 0).count();
                Ok(Trial {
                    block_error: wrong > 0,
                    bit_errors: wrong,
                    iterations: out.iterations,
                })
            });
            for trial in results {
                let trial = trial?;
                trials += 1;
                iterations += trial.iterations;
                bit_errors += trial.bit_errors;
                if trial.block_error {
                    block_errors += 1;
                    if block_errors >= cfg.max_block_errors {
                        break 'batches;
                    }
                }
            }
        }
        records.push(BlerRecord {
            sigma,
            snr_db: snr_db(sigma, cfg.convention, rate),
            trials,
            block_errors,
            bit_errors,
            bler: block_errors as f64 / trials as f64,
            avg_iters: iterations as f64 / trials as f64,
            seed: cfg.seed,
        });
        log::info!("sigma {sigma:.4}: {block_errors}/{trials} block errors");
    }
    Ok(records)
}

/// Writes the BLER table with columns
/// `sigma, snr_db, trials, block_errors, bler, avg_iters, seed`.
pub fn write_bler_csv<W: std::io::Write>(records: &[BlerRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["sigma", "snr_db", "trials", "block_errors", "bler", "avg_iters", "seed"])?;
    for r in records {
        out.write_record([
            r.sigma.to_string(),
            r.snr_db.to_string(),
            r.trials.to_string(),
            r.block_errors.to_string(),
            r.bler.to_string(),
            r.avg_iters.to_string(),
            r.seed.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// SNR (dB) at which the BLER curve crosses `target`, interpolating
/// `log10(BLER)` linearly in SNR between neighbouring points.
pub fn snr_at_bler(records: &[BlerRecord], target: f64) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = records.iter().map(|r| (r.snr_db, r.bler)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.windows(2).find_map(|w| {
        let ((s0, b0), (s1, b1)) = (w[0], w[1]);
        if b0 >= target && b1 <= target && b0 > 0.0 {
            if b1 <= 0.0 || b0 == b1 {
                return Some(s1);
            }
            let (l0, l1, lt) = (b0.log10(), b1.log10(), target.log10());
            Some(s0 + (lt - l0) / (l1 - l0) * (s1 - s0))
        } else {
            None
        }
    })
}

/// Indices `k` where the BLER at the `k + 1`-th highest SNR point exceeds the
/// one at the `k`-th by more than three combined standard errors, after
/// sorting by SNR.
pub fn monotonicity_violations(records: &[BlerRecord]) -> Vec<usize> {
    let mut sorted: Vec<&BlerRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
    sorted
        .windows(2)
        .enumerate()
        .filter(|(_, w)| {
            let spread = (w[0].std_error().powi(2) + w[1].std_error().powi(2)).sqrt();
            w[1].bler > w[0].bler + 3.0 * spread
        })
        .map(|(k, _)| k)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble_graph::{clean_graph, sample_graph, Check};
    use crate::gc_app::tanh_rule;
    use crate::subcodes::{builtin_c1, EnsembleSpec};

    fn small_graph(t: f64, n: usize, seed: u64) -> TannerGraph {
        let spec = EnsembleSpec::new(builtin_c1(), 2, t, n).unwrap();
        clean_graph(&sample_graph(&spec, seed).unwrap(), seed, 100_000).unwrap()
    }

    #[test]
    fn spc_update_matches_tanh_rule() {
        let x = [1.3, -0.4, 2.2, 0.05, -3.0];
        let mut out = Vec::new();
        spc_update(&x, &mut out);
        for i in 0..x.len() {
            let others: Vec<f64> = x.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
            assert!((out[i] - tanh_rule(&others)).abs() < 1e-9);
        }
    }

    #[test]
    fn noiseless_input_decodes_immediately() {
        let g = small_graph(0.8, 120, 1);
        let out = decode(&g, &vec![LLR_CLIP; 120], 20).unwrap();
        assert_eq!(out.iterations, 0);
        assert!(out.converged);
        assert!(out.bits.iter().all(|&b| b == 0));
    }

    #[test]
    fn zero_llrs_tie_to_zero() {
        let g = small_graph(0.5, 120, 2);
        let out = decode(&g, &vec![0.0; 120], 7).unwrap();
        assert!(out.bits.iter().all(|&b| b == 0));
        assert!(out.converged);
    }

    #[test]
    fn single_flip_is_corrected() {
        let g = small_graph(0.8, 600, 3);
        let mut llrs = vec![8.0; 600];
        llrs[17] = -8.0;
        let out = decode(&g, &llrs, 20).unwrap();
        assert!(out.converged);
        assert!(out.iterations <= 5);
        assert!(out.bits.iter().all(|&b| b == 0));
    }

    #[test]
    fn syndrome_rejects_single_flips() {
        let g = small_graph(0.5, 120, 4);
        let mut bits = vec![0u8; 120];
        assert!(syndrome_check(&g, &bits));
        for v in 0..120 {
            bits[v] = 1;
            assert!(!syndrome_check(&g, &bits));
            bits[v] = 0;
        }
    }

    #[test]
    fn extrinsic_messages_ignore_own_input() {
        let spc = |vars: &[usize]| Check {
            kind: CheckType::Spc,
            vars: vars.to_vec(),
        };
        let g = TannerGraph::new(3, vec![spc(&[0, 1]), spc(&[1, 2]), spc(&[0, 2])], None, 0.0).unwrap();
        let d = Decoder::new(&g);
        let l0 = [0.5, -0.2, 0.9];
        let c2v = vec![0.3, -1.1, 0.7, 0.2, -0.4, 1.5];
        let mut base = vec![0.0; 6];
        d.variable_messages(&l0, &c2v, &mut base);
        // Edges 0 and 4 both attach variable 0.
        let mut bumped = c2v.clone();
        bumped[0] += 2.5;
        let mut after = vec![0.0; 6];
        d.variable_messages(&l0, &bumped, &mut after);
        assert_eq!(after[0], base[0]);
        assert!((after[4] - base[4] - 2.5).abs() < 1e-12);
        for e in [1, 2, 3, 5] {
            assert_eq!(after[e], base[e]);
        }
    }

    #[test]
    fn bler_is_reproducible_and_bounded() {
        let g = small_graph(0.8, 120, 5);
        let cfg = BlerConfig {
            trials: 300,
            max_iters: 20,
            max_block_errors: 30,
            seed: 11,
            convention: SnrConvention::Es,
        };
        let a = bler_sim(&g, &[0.6, 0.9, 2.0], &cfg).unwrap();
        let b = bler_sim(&g, &[0.6, 0.9, 2.0], &cfg).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert!(r.block_errors <= r.trials);
            assert!(r.block_errors <= cfg.max_block_errors);
        }
        assert_eq!(a[2].block_errors, 30);
        assert!(a[0].bler <= a[2].bler);
        let tiny = bler_sim(&g, &[0.05], &cfg).unwrap();
        assert_eq!(tiny[0].block_errors, 0);
    }

    #[test]
    fn bler_csv_header() {
        let rec = BlerRecord {
            sigma: 0.5,
            snr_db: 6.0,
            trials: 10,
            block_errors: 1,
            bit_errors: 3,
            bler: 0.1,
            avg_iters: 2.5,
            seed: 4,
        };
        let mut buf = Vec::new();
        write_bler_csv(&[rec], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "sigma,snr_db,trials,block_errors,bler,avg_iters,seed\n0.5,6,10,1,0.1,2.5,4\n");
    }

    #[test]
    fn crossing_interpolation() {
        let rec = |snr: f64, bler: f64| BlerRecord {
            sigma: 1.0,
            snr_db: snr,
            trials: 1000,
            block_errors: (bler * 1000.0) as usize,
            bit_errors: 0,
            bler,
            avg_iters: 0.0,
            seed: 0,
        };
        let curve = [rec(1.0, 1e-1), rec(2.0, 1e-3)];
        assert!((snr_at_bler(&curve, 1e-2).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(snr_at_bler(&curve, 1e-4), None);
        assert!(monotonicity_violations(&curve).is_empty());
        assert_eq!(monotonicity_violations(&[rec(1.0, 0.01), rec(2.0, 0.5)]), vec![0]);
    }
}
