//! Gaussian and Gaussian-mixture approximations of density evolution on the
//! BI-AWGN channel.
//!
//! Every message density is modelled by symmetric Gaussians `N(m, 2m)`, so a
//! density is summarized by its mean. Constraint nodes map input means to
//! output means through
//!
//! * `phi_S(m) = phi^-1(1 - (1 - phi(m))^(d-1))` for degree-`d` SPC nodes,
//! * a [`GcMeanMap`] for GC nodes.
//!
//! The single-Gaussian approximation (GA) collapses the variable-node message
//! to one Gaussian. The Gaussian-mixture approximation (GMA) keeps one
//! component per combination of incoming constraint types.

use std::f64::consts::{PI, SQRT_2};
use std::io::{Read, Write};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{invalid, Result};
use crate::gc_app::AppKernel;
use crate::par;
use crate::subcodes::{CheckKind, EdgeProfile, EnsembleSpec, LinearSubcode};
use crate::threshold::{bisect, Method, Probe, ThresholdResult};

/// Gaussian tail `Q(x) = P(N(0,1) > x)`.
pub fn q_func(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Error probability of a symmetric Gaussian message with mean `m`.
pub fn gaussian_error_probability(m: f64) -> f64 {
    q_func((m.max(0.0) / 2.0).sqrt())
}

/// How `phi` is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiMode {
    /// Numerical integration of `E[2 / (1 + e^U)]`, `U ~ N(x, 2x)`.
    Exact,
    /// Closed-form piecewise fit.
    #[default]
    Fit,
}

/// Largest mean ever returned by `phi_inv`.
pub const MEAN_CAP: f64 = 1e4;

const FIT_A: f64 = 0.4527;
const FIT_B: f64 = 0.86;
const FIT_C: f64 = 0.0218;
const FIT_SWITCH: f64 = 10.0;

/// The function `phi(x) = 1 - E[tanh(U / 2)]` for `U ~ N(x, 2x)`, with
/// `phi(0) = 1`, and its inverse.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phi {
    pub mode: PhiMode,
}

impl Phi {
    pub fn new(mode: PhiMode) -> Self {
        Self { mode }
    }

    /// `phi(x)` for `x >= 0`; negative inputs are treated as zero.
    pub fn phi(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match self.mode {
            PhiMode::Exact => phi_exact(x),
            PhiMode::Fit => phi_fit(x),
        }
    }

    /// Inverse of [`phi`](Self::phi). Values `y >= 1` map to 0 and
    /// nonpositive values to [`MEAN_CAP`].
    pub fn phi_inv(&self, y: f64) -> f64 {
        if y >= 1.0 || y.is_nan() {
            return 0.0;
        }
        if y <= 0.0 {
            return MEAN_CAP;
        }
        match self.mode {
            PhiMode::Fit => {
                // The first branch is invertible in closed form. When its
                // inverse lands past the switch point, the second branch
                // holds the answer.
                let x = ((FIT_C - y.ln()) / FIT_A).max(0.0).powf(1.0 / FIT_B);
                if x < FIT_SWITCH {
                    x
                } else {
                    invert_decreasing(phi_fit, y, FIT_SWITCH)
                }
            }
            PhiMode::Exact => invert_decreasing(phi_exact, y, 0.0),
        }
    }

    /// SPC mean map `phi^-1(1 - (1 - phi(m))^(d-1))`.
    pub fn spc_map(&self, m: f64, d: usize) -> f64 {
        let s = self.phi(m).min(1.0);
        self.phi_inv(one_minus_pow(s, (d - 1) as f64))
    }
}

/// `1 - (1 - s)^n` without cancellation for small `s`.
fn one_minus_pow(s: f64, n: f64) -> f64 {
    if s >= 1.0 {
        1.0
    } else {
        -(n * (-s).ln_1p()).exp_m1()
    }
}

fn phi_fit(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x < FIT_SWITCH {
        (-FIT_A * x.powf(FIT_B) + FIT_C).exp().min(1.0)
    } else {
        (PI / x).sqrt() * (-x / 4.0).exp() * (1.0 - 10.0 / (7.0 * x))
    }
}

/// `E[2 / (1 + e^U)]` with `U = x + sqrt(2x) z`, integrated over
/// `z in [-12, 12]` by the composite Simpson rule.
fn phi_exact(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let s = (2.0 * x).sqrt();
    let n = 2 * ((240.0 * s.max(1.0)).ceil() as usize);
    let (lo, hi) = (-12.0, 12.0);
    let h = (hi - lo) / n as f64;
    let f = |z: f64| {
        let u = x + s * z;
        let logistic = if u > 0.0 {
            let e = (-u).exp();
            2.0 * e / (1.0 + e)
        } else {
            2.0 / (1.0 + u.exp())
        };
        logistic * (-0.5 * z * z).exp()
    };
    let mut acc = f(lo) + f(hi);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + i as f64 * h);
    }
    (acc * h / 3.0 / (2.0 * PI).sqrt()).min(1.0)
}

/// Solves `f(x) = y` for decreasing `f` on `[lo, inf)` by bisection.
fn invert_decreasing(f: fn(f64) -> f64, y: f64, lo: f64) -> f64 {
    let mut lo = lo;
    let mut hi = lo.max(1.0);
    while f(hi) > y {
        lo = hi;
        hi *= 2.0;
        if hi > MEAN_CAP {
            return MEAN_CAP;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Piecewise polynomial fits of the GC mean map for the two built-in codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PaperFit {
    C1,
    C2,
}

impl PaperFit {
    pub fn eval(&self, m: f64) -> f64 {
        let m = m.max(0.0);
        match self {
            PaperFit::C1 => {
                if m <= 1.0 {
                    -0.22 * m.powi(3) + 0.86 * m * m + 0.022 * m
                } else if m <= 2.0 {
                    0.20 * m * m + 0.75 * m - 0.28
                } else if m <= 5.0 {
                    0.042 * m * m + 1.4 * m - 1.0
                } else {
                    1.9 * m - 3.0
                }
            }
            PaperFit::C2 => {
                if m <= 1.0 {
                    -0.183 * m.powi(4) + 0.375 * m.powi(3) + 0.149 * m * m - 0.015 * m
                } else if m <= 2.0 {
                    -0.013 * m.powi(4) + 0.013 * m.powi(3) + 0.3634 * m * m - 0.038
                } else if m <= 5.0 {
                    0.0024 * m.powi(4) - 0.051 * m.powi(3) + 0.421 * m * m + 0.064 * m - 0.11
                } else {
                    0.0025 * m * m + 1.71 * m - 2.889
                }
            }
        }
    }
}

/// Map from the mean of symmetric Gaussian GC inputs to the mean of the GC
/// output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GcMeanMap {
    PaperFit(PaperFit),
    /// Monte-Carlo table, linearly interpolated and extrapolated.
    Table {
        input_means: Vec<f64>,
        output_means: Vec<f64>,
        sample_counts: Vec<u64>,
    },
}

impl GcMeanMap {
    /// Fitted map for a built-in code, looked up by name.
    pub fn paper_fit_for(code: &LinearSubcode) -> Option<Self> {
        match code.name() {
            "C1" => Some(Self::PaperFit(PaperFit::C1)),
            "C2" => Some(Self::PaperFit(PaperFit::C2)),
            _ => None,
        }
    }

    /// Builds a table map. Inputs must be strictly increasing and outputs
    /// nondecreasing up to four standard errors of Monte-Carlo noise.
    pub fn from_table(input_means: Vec<f64>, output_means: Vec<f64>, sample_counts: Vec<u64>) -> Result<Self> {
        if input_means.len() < 2
            || input_means.len() != output_means.len()
            || input_means.len() != sample_counts.len()
        {
            return Err(invalid("a GC mean table needs at least two rows of equal length"));
        }
        if input_means.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("GC mean table inputs must be strictly increasing"));
        }
        if output_means.iter().any(|m| !m.is_finite()) {
            return Err(invalid("GC mean table outputs must be finite"));
        }
        for k in 1..output_means.len() {
            let se = |i: usize| (2.0 * output_means[i].max(1.0) / sample_counts[i].max(1) as f64).sqrt();
            if output_means[k] < output_means[k - 1] - 4.0 * (se(k) + se(k - 1)) {
                return Err(invalid(format!(
                    "GC mean table decreases beyond sampling noise at input mean {}",
                    input_means[k]
                )));
            }
        }
        Ok(Self::Table {
            input_means,
            output_means,
            sample_counts,
        })
    }

    pub fn eval(&self, m: f64) -> f64 {
        match self {
            GcMeanMap::PaperFit(fit) => fit.eval(m),
            GcMeanMap::Table {
                input_means: x,
                output_means: y,
                ..
            } => {
                let n = x.len();
                let k = match x.iter().position(|&xi| xi > m) {
                    Some(0) => 1,
                    Some(k) => k,
                    None => n - 1,
                };
                let (x0, x1, y0, y1) = (x[k - 1], x[k], y[k - 1], y[k]);
                (y0 + (y1 - y0) * (m - x0) / (x1 - x0)).max(0.0)
            }
        }
    }

    /// Writes `input_mean,output_mean,sample_count` rows. Fit maps are
    /// tabulated on the default grid.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["input_mean", "output_mean", "sample_count"])?;
        match self {
            GcMeanMap::Table {
                input_means,
                output_means,
                sample_counts,
            } => {
                for ((x, y), n) in input_means.iter().zip(output_means).zip(sample_counts) {
                    wtr.write_record([x.to_string(), y.to_string(), n.to_string()])?;
                }
            }
            GcMeanMap::PaperFit(fit) => {
                for x in default_mean_grid() {
                    wtr.write_record([x.to_string(), fit.eval(x).to_string(), "0".into()])?;
                }
            }
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads a table written by [`write_csv`](Self::write_csv).
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            input_mean: f64,
            output_mean: f64,
            sample_count: u64,
        }
        let mut rdr = csv::Reader::from_reader(r);
        let (mut x, mut y, mut n) = (Vec::new(), Vec::new(), Vec::new());
        for row in rdr.deserialize() {
            let row: Row = row?;
            x.push(row.input_mean);
            y.push(row.output_mean);
            n.push(row.sample_count);
        }
        Self::from_table(x, y, n)
    }
}

/// Input means `0, 0.1, ..., 12` followed by `14, 16, ..., 30`.
pub fn default_mean_grid() -> Vec<f64> {
    (0..=120)
        .map(|k| k as f64 / 10.0)
        .chain((7..=15).map(|k| 2.0 * k as f64))
        .collect()
}

/// Estimates the GC mean map by Monte Carlo: for each grid mean `m`, `n`
/// tuples of `K - 1` inputs drawn from `N(m, 2m)` are fed to the position-1
/// APP map and the output sample mean is recorded. Grid points run in
/// parallel with independent random streams.
pub fn fit_gc_mean_map(code: &LinearSubcode, grid: &[f64], n: usize, seed: u64) -> Result<GcMeanMap> {
    if n == 0 {
        return Err(invalid("sample count must be positive"));
    }
    let kernel = AppKernel::new(code);
    let k = code.len();
    let outputs = par::map_indexed(grid.len(), |g| {
        let m = grid[g].max(0.0);
        let sd = (2.0 * m).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(par::stream_seed(seed, g as u64));
        let mut x = vec![0.0; k];
        let mut acc = 0.0;
        for _ in 0..n {
            for xi in x.iter_mut().skip(1) {
                let z: f64 = StandardNormal.sample(&mut rng);
                *xi = m + sd * z;
            }
            acc += kernel.eval(&x);
        }
        acc / n as f64
    });
    GcMeanMap::from_table(grid.to_vec(), outputs, vec![n as u64; grid.len()])
}

/// Form of the GC factors in the mixture update.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GcFactor {
    /// `F = (1 - phi(phi_G(M)))^(1 / (K - 1))`.
    #[default]
    MeanMapped,
    /// `F = 1 - phi(M)`, the SPC-style factor without the GC mean map.
    Plain,
}

/// Settings shared by GA and GMA threshold searches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub phi: PhiMode,
    /// Success once the variable-message error probability is below this.
    pub target_pe: f64,
    pub max_iters: usize,
    /// Bisection tolerance on `sigma`.
    pub tol: f64,
    pub gc_factor: GcFactor,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            phi: PhiMode::Fit,
            target_pe: 1e-3,
            max_iters: 2000,
            tol: 1e-4,
            gc_factor: GcFactor::MeanMapped,
        }
    }
}

/// All multisets of size `n` over `kinds` items, as count vectors, with
/// their multinomial coefficients.
fn multisets(kinds: usize, n: usize) -> Vec<(f64, Vec<usize>)> {
    fn rec(kinds: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == kinds {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(kinds, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(kinds, n, &mut Vec::new(), &mut out);
    let ln_fact = |k: usize| (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
    out.into_iter()
        .map(|counts| {
            let coef = (ln_fact(n) - counts.iter().map(|&c| ln_fact(c)).sum::<f64>()).exp();
            (coef, counts)
        })
        .collect()
}

/// Per-iteration state of the mixture recursion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussianMixtureState {
    /// Channel LLR mean `2 / sigma^2`.
    pub m_v0: f64,
    /// Output mean of each constraint type, in profile order.
    pub check_means: Vec<f64>,
    pub iteration: usize,
}

/// Mean recursion for an edge profile, in GA or GMA form.
#[derive(Clone, Debug)]
pub struct MeanEvolution {
    profile: EdgeProfile,
    gc_map: Option<Arc<GcMeanMap>>,
    phi: Phi,
    gc_factor: GcFactor,
    /// Variable-node mixture: weight and per-kind counts of the `J - 1`
    /// incoming messages.
    v_components: Vec<(f64, Vec<usize>)>,
    /// Per GC-degree: multisets of `K - 1` variable components.
    gc_inputs: Vec<Option<Vec<(f64, Vec<usize>)>>>,
}

impl MeanEvolution {
    pub fn new(profile: EdgeProfile, gc_map: Option<GcMeanMap>, cfg: &GaConfig) -> Result<Self> {
        profile.validate()?;
        let has_gc = profile.checks.iter().any(|(k, _)| matches!(k, CheckKind::Gc(_)));
        if has_gc && gc_map.is_none() {
            return Err(invalid("profile has GC nodes but no GC mean map was given"));
        }
        let weights: Vec<f64> = profile.checks.iter().map(|(_, w)| *w).collect();
        let v_components: Vec<(f64, Vec<usize>)> = multisets(weights.len(), profile.var_degree - 1)
            .into_iter()
            .map(|(coef, counts)| {
                let p = counts.iter().zip(&weights).map(|(&c, w)| w.powi(c as i32)).product::<f64>();
                (coef * p, counts)
            })
            .collect();
        let v_weights: Vec<f64> = v_components.iter().map(|(w, _)| *w).collect();
        let gc_inputs = profile
            .checks
            .iter()
            .map(|(kind, _)| match kind {
                CheckKind::Gc(code) => Some(
                    multisets(v_weights.len(), code.len() - 1)
                        .into_iter()
                        .map(|(coef, counts)| {
                            let p = counts
                                .iter()
                                .zip(&v_weights)
                                .map(|(&c, w)| w.powi(c as i32))
                                .product::<f64>();
                            (coef * p, counts)
                        })
                        .filter(|(w, _)| *w > 0.0)
                        .collect(),
                ),
                CheckKind::Spc { .. } => None,
            })
            .collect();
        Ok(Self {
            profile,
            gc_map: gc_map.map(Arc::new),
            phi: Phi::new(cfg.phi),
            gc_factor: cfg.gc_factor,
            v_components,
            gc_inputs,
        })
    }

    /// Recursion for a `(C, J, K, t)` ensemble, using the fitted GC map of
    /// a built-in code unless `gc_map` is given.
    pub fn for_ensemble(spec: &EnsembleSpec, gc_map: Option<GcMeanMap>, cfg: &GaConfig) -> Result<Self> {
        let map = match gc_map {
            Some(m) => Some(m),
            None if spec.gc_fraction > 0.0 => Some(GcMeanMap::paper_fit_for(&spec.subcode).ok_or_else(|| {
                invalid(format!(
                    "no fitted GC mean map for `{}`; estimate one by Monte Carlo first",
                    spec.subcode.name()
                ))
            })?),
            None => None,
        };
        Self::new(spec.edge_profile(), map, cfg)
    }

    pub fn profile(&self) -> &EdgeProfile {
        &self.profile
    }

    fn gc_mean(&self, m: f64) -> f64 {
        self.gc_map.as_ref().map_or(0.0, |g| g.eval(m))
    }

    /// Single-Gaussian output mean of a constraint type for input mean `m`.
    fn single_map(&self, kind: &CheckKind, m: f64) -> f64 {
        match kind {
            CheckKind::Spc { degree } => self.phi.spc_map(m, *degree),
            CheckKind::Gc(_) => self.gc_mean(m),
        }
    }

    /// State after the first iteration, where the variable message is the
    /// plain channel Gaussian.
    pub fn initial_state(&self, sigma: f64) -> GaussianMixtureState {
        let m_v0 = 2.0 / (sigma * sigma);
        GaussianMixtureState {
            m_v0,
            check_means: self.profile.checks.iter().map(|(k, _)| self.single_map(k, m_v0)).collect(),
            iteration: 1,
        }
    }

    /// Variable-message mixture: `(weight, mean)` per component.
    pub fn var_mixture(&self, s: &GaussianMixtureState) -> Vec<(f64, f64)> {
        self.v_components
            .iter()
            .map(|(w, counts)| {
                let m = s.m_v0 + counts.iter().zip(&s.check_means).map(|(&c, mu)| c as f64 * mu).sum::<f64>();
                (*w, m)
            })
            .collect()
    }

    /// Mean of the collapsed single Gaussian.
    pub fn var_mean(&self, s: &GaussianMixtureState) -> f64 {
        let j1 = (self.profile.var_degree - 1) as f64;
        s.m_v0
            + j1 * self
                .profile
                .checks
                .iter()
                .zip(&s.check_means)
                .map(|((_, w), mu)| w * mu)
                .sum::<f64>()
    }

    /// Error probability of the variable messages under the mixture model.
    pub fn mixture_error_probability(&self, s: &GaussianMixtureState) -> f64 {
        self.var_mixture(s)
            .iter()
            .map(|&(w, m)| w * gaussian_error_probability(m))
            .sum()
    }

    /// One GA step: every constraint sees a single Gaussian of mean
    /// `m_v0 + (J-1) sum_c w_c mu_c`.
    pub fn ga_step(&self, s: &GaussianMixtureState) -> GaussianMixtureState {
        let m = self.var_mean(s);
        GaussianMixtureState {
            m_v0: s.m_v0,
            check_means: self.profile.checks.iter().map(|(k, _)| self.single_map(k, m)).collect(),
            iteration: s.iteration + 1,
        }
    }

    /// One GMA step.
    pub fn gma_step(&self, s: &GaussianMixtureState) -> GaussianMixtureState {
        let mix = self.var_mixture(s);
        let phi = &self.phi;
        // Probability mass of phi under the mixture, for SPC updates.
        let mixed_phi: f64 = mix.iter().map(|&(w, m)| w * phi.phi(m)).sum::<f64>().min(1.0);
        let check_means = self
            .profile
            .checks
            .iter()
            .zip(&self.gc_inputs)
            .map(|((kind, _), inputs)| match kind {
                CheckKind::Spc { degree } => phi.phi_inv(one_minus_pow(mixed_phi, (*degree - 1) as f64)),
                CheckKind::Gc(code) => {
                    let k1 = (code.len() - 1) as f64;
                    // ln F_v for each variable component.
                    let ln_f: Vec<f64> = mix
                        .iter()
                        .map(|&(_, m)| match self.gc_factor {
                            GcFactor::MeanMapped => (-phi.phi(self.gc_mean(m)).min(1.0)).ln_1p() / k1,
                            GcFactor::Plain => (-phi.phi(m).min(1.0)).ln_1p(),
                        })
                        .collect();
                    inputs
                        .as_ref()
                        .expect("GC kinds carry input multisets")
                        .iter()
                        .map(|(w, counts)| {
                            let ln_prod: f64 = counts.iter().zip(&ln_f).map(|(&c, lf)| c as f64 * lf).sum();
                            w * phi.phi_inv(-ln_prod.exp_m1())
                        })
                        .sum()
                }
            })
            .collect();
        GaussianMixtureState {
            m_v0: s.m_v0,
            check_means,
            iteration: s.iteration + 1,
        }
    }

    /// Runs the recursion at noise level `sigma` until the error probability
    /// drops below `target_pe`, the means stall, or the budget runs out.
    pub fn run(&self, sigma: f64, method: Method, cfg: &GaConfig) -> Probe {
        let mut s = self.initial_state(sigma);
        let pe = |s: &GaussianMixtureState| match method {
            Method::Ga => gaussian_error_probability(self.var_mean(s)),
            _ => self.mixture_error_probability(s),
        };
        let mut p = pe(&s);
        while p >= cfg.target_pe && s.iteration < cfg.max_iters {
            let next = match method {
                Method::Ga => self.ga_step(&s),
                _ => self.gma_step(&s),
            };
            let stalled = next
                .check_means
                .iter()
                .zip(&s.check_means)
                .all(|(a, b)| (a - b).abs() <= 1e-13 * b.abs().max(1.0));
            s = next;
            p = pe(&s);
            if stalled {
                break;
            }
        }
        Probe {
            parameter: sigma,
            success: p < cfg.target_pe,
            iterations: s.iteration,
            metric: p,
        }
    }

    /// Largest `sigma` at which the recursion succeeds.
    pub fn threshold(&self, method: Method, cfg: &GaConfig) -> Result<ThresholdResult> {
        if !matches!(method, Method::Ga | Method::Gma) {
            return Err(invalid("mean recursions support only the ga and gma methods"));
        }
        bisect(method, 0.3, 3.0, cfg.tol, cfg.max_iters, |sigma| self.run(sigma, method, cfg))
    }
}

/// GA threshold of a `(C, J, K, t)` ensemble.
pub fn ga_threshold(spec: &EnsembleSpec, gc_map: Option<GcMeanMap>, cfg: &GaConfig) -> Result<ThresholdResult> {
    MeanEvolution::for_ensemble(spec, gc_map, cfg)?.threshold(Method::Ga, cfg)
}

/// GMA threshold of a `(C, J, K, t)` ensemble.
pub fn gma_threshold(spec: &EnsembleSpec, gc_map: Option<GcMeanMap>, cfg: &GaConfig) -> Result<ThresholdResult> {
    MeanEvolution::for_ensemble(spec, gc_map, cfg)?.threshold(Method::Gma, cfg)
}

/// GA or GMA threshold of an LDPC ensemble with variable degree
/// `var_degree` and check-degree distribution `(degree, edge fraction)`.
pub fn ldpc_threshold(
    var_degree: usize,
    check_degrees: &[(usize, f64)],
    method: Method,
    cfg: &GaConfig,
) -> Result<ThresholdResult> {
    let profile = EdgeProfile::ldpc(var_degree, check_degrees)?;
    MeanEvolution::new(profile, None, cfg)?.threshold(method, cfg)
}
