//! Quantized L-densities and the variable/check-node convolution operators.
//!
//! A density lives on a uniform LLR grid `k * delta`, `k = -h..=h`, with
//! `delta = l_max / h`, plus two saturation bins standing for `-inf` and
//! `+inf`. Mass that a convolution pushes beyond `l_max` is folded into the
//! saturation bin of the same sign.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};

use statrs::function::erf::erfc;

use crate::error::{invalid, Error, Result};

/// Uniform symmetric LLR grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    half_bins: usize,
    l_max: f64,
}

impl Default for Grid {
    /// `l_max = 30`, `delta = 30 / 2048`, 4097 interior bins.
    fn default() -> Self {
        Self {
            half_bins: 2048,
            l_max: 30.0,
        }
    }
}

/// Location of a value on a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bin {
    NegSat,
    Index(usize),
    PosSat,
}

impl Grid {
    pub fn new(l_max: f64, half_bins: usize) -> Result<Self> {
        if !(l_max > 0.0 && l_max.is_finite()) || half_bins == 0 || half_bins > u16::MAX as usize {
            return Err(invalid(format!(
                "grid needs l_max > 0 and 1 <= half_bins <= {}",
                u16::MAX
            )));
        }
        Ok(Self { half_bins, l_max })
    }

    pub fn half_bins(&self) -> usize {
        self.half_bins
    }

    pub fn l_max(&self) -> f64 {
        self.l_max
    }

    /// Bin spacing.
    pub fn delta(&self) -> f64 {
        self.l_max / self.half_bins as f64
    }

    /// Number of interior bins, `2h + 1`.
    pub fn len(&self) -> usize {
        2 * self.half_bins + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the bin centred at zero.
    pub fn zero_index(&self) -> usize {
        self.half_bins
    }

    /// Centre of interior bin `idx`.
    pub fn value(&self, idx: usize) -> f64 {
        (idx as f64 - self.half_bins as f64) * self.delta()
    }

    /// Nearest bin for an LLR; values beyond half a bin past `l_max`
    /// saturate.
    pub fn locate(&self, l: f64) -> Bin {
        let k = (l / self.delta()).round();
        let h = self.half_bins as f64;
        if k < -h {
            Bin::NegSat
        } else if k > h {
            Bin::PosSat
        } else {
            Bin::Index((k + h) as usize)
        }
    }
}

/// Probability mass function of an LLR message on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizedLDensity {
    grid: Grid,
    pmf: Vec<f64>,
    neg_sat: f64,
    pos_sat: f64,
}

impl QuantizedLDensity {
    /// All-zero density (total mass 0); used as an accumulator.
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            pmf: vec![0.0; grid.len()],
            neg_sat: 0.0,
            pos_sat: 0.0,
        }
    }

    /// Builds a density from raw parts. Masses must be nonnegative.
    pub fn from_parts(grid: Grid, pmf: Vec<f64>, neg_sat: f64, pos_sat: f64) -> Result<Self> {
        if pmf.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if pmf.iter().chain([&neg_sat, &pos_sat]).any(|&p| !(p >= 0.0)) {
            return Err(invalid("densities need nonnegative finite masses"));
        }
        Ok(Self {
            grid,
            pmf,
            neg_sat,
            pos_sat,
        })
    }

    /// Unit mass at `l` (which may be infinite).
    pub fn point_mass(grid: Grid, l: f64) -> Self {
        let mut d = Self::zeros(grid);
        d.add_mass(l, 1.0);
        d
    }

    /// Gaussian `N(mean, var)` integrated over each bin; tails beyond the
    /// outermost bin edges go to the saturation bins.
    pub fn gaussian(grid: Grid, mean: f64, var: f64) -> Self {
        if var <= 0.0 {
            return Self::point_mass(grid, mean);
        }
        let s = (2.0 * var).sqrt();
        let upper = |x: f64| 0.5 * erfc((x - mean) / s);
        let lower = |x: f64| 0.5 * erfc((mean - x) / s);
        // Differences are taken on the tail side of the mean to avoid
        // cancellation far from it.
        let between = |lo: f64, hi: f64| {
            if lo >= mean {
                (upper(lo) - upper(hi)).max(0.0)
            } else {
                (lower(hi) - lower(lo)).max(0.0)
            }
        };
        let half = 0.5 * grid.delta();
        let mut d = Self::zeros(grid);
        for (k, p) in d.pmf.iter_mut().enumerate() {
            let x = grid.value(k);
            *p = between(x - half, x + half);
        }
        d.neg_sat = lower(grid.value(0) - half);
        d.pos_sat = upper(grid.value(grid.len() - 1) + half);
        d
    }

    /// Symmetric Gaussian with the given mean (variance `2 * mean`).
    pub fn symmetric_gaussian(grid: Grid, mean: f64) -> Self {
        Self::gaussian(grid, mean, 2.0 * mean)
    }

    /// Adds `mass` at LLR `l`.
    pub fn add_mass(&mut self, l: f64, mass: f64) {
        if l == f64::INFINITY {
            self.pos_sat += mass;
        } else if l == f64::NEG_INFINITY {
            self.neg_sat += mass;
        } else {
            match self.grid.locate(l) {
                Bin::NegSat => self.neg_sat += mass,
                Bin::PosSat => self.pos_sat += mass,
                Bin::Index(k) => self.pmf[k] += mass,
            }
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn neg_sat(&self) -> f64 {
        self.neg_sat
    }

    pub fn pos_sat(&self) -> f64 {
        self.pos_sat
    }

    pub fn total_mass(&self) -> f64 {
        self.pmf.iter().sum::<f64>() + self.neg_sat + self.pos_sat
    }

    /// Rescales so the total mass is one.
    pub fn normalize(&mut self) {
        let total = self.total_mass();
        if total > 0.0 {
            self.scale(1.0 / total);
        }
    }

    fn scale(&mut self, a: f64) {
        self.pmf.iter_mut().for_each(|p| *p *= a);
        self.neg_sat *= a;
        self.pos_sat *= a;
    }

    /// Probability of a wrong hard decision: mass below zero, half the zero
    /// bin, and the negative saturation bin.
    pub fn error_probability(&self) -> f64 {
        let z = self.grid.zero_index();
        self.neg_sat + self.pmf[..z].iter().sum::<f64>() + 0.5 * self.pmf[z]
    }

    /// Mean and variance of the interior part, conditioned on not saturating.
    pub fn interior_moments(&self) -> (f64, f64) {
        let mass: f64 = self.pmf.iter().sum();
        if mass <= 0.0 {
            return (0.0, 0.0);
        }
        let mean = self
            .pmf
            .iter()
            .enumerate()
            .map(|(k, p)| p * self.grid.value(k))
            .sum::<f64>()
            / mass;
        let var = self
            .pmf
            .iter()
            .enumerate()
            .map(|(k, p)| p * (self.grid.value(k) - mean).powi(2))
            .sum::<f64>()
            / mass;
        (mean, var)
    }

    /// Departure from the symmetry condition `f(m) = e^m f(-m)`.
    ///
    /// For each pair of bins `+-m` the symmetric split of the pair mass puts
    /// a fraction `1 / (1 + e^m)` on `-m`. The residual is the total absolute
    /// deviation of the negative-side mass from that split,
    /// `sum_{m > 0} |p(m) - e^m p(-m)| / (1 + e^m)`, which stays bounded by
    /// the total mass and is insensitive to sampling noise in far tails.
    pub fn symmetry_residual(&self) -> f64 {
        let z = self.grid.zero_index();
        (1..=self.grid.half_bins)
            .map(|k| {
                let m = k as f64 * self.grid.delta();
                let (pos, neg) = (self.pmf[z + k], self.pmf[z - k]);
                (pos - m.exp() * neg).abs() / (1.0 + m.exp())
            })
            .sum::<f64>()
            + self.neg_sat
    }

    /// Pointwise convex combination `sum w_i d_i`.
    pub fn mixture(parts: &[(f64, &QuantizedLDensity)]) -> Result<Self> {
        let grid = parts
            .first()
            .map(|(_, d)| d.grid)
            .ok_or_else(|| invalid("empty mixture"))?;
        let mut out = Self::zeros(grid);
        for &(w, d) in parts {
            if d.grid != grid {
                return Err(Error::GridMismatch);
            }
            for (o, p) in out.pmf.iter_mut().zip(&d.pmf) {
                *o += w * p;
            }
            out.neg_sat += w * d.neg_sat;
            out.pos_sat += w * d.pos_sat;
        }
        Ok(out)
    }

    /// Writes `bin_center,mass` rows; saturation bins appear as `-inf`/`inf`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["bin_center", "mass"])?;
        wtr.write_record(["-inf".to_string(), self.neg_sat.to_string()])?;
        for (k, p) in self.pmf.iter().enumerate() {
            wtr.write_record([format!("{:.6}", self.grid.value(k)), p.to_string()])?;
        }
        wtr.write_record(["inf".to_string(), self.pos_sat.to_string()])?;
        wtr.flush()?;
        Ok(())
    }
}

/// Density of the sum of independent LLRs (variable-node convolution).
///
/// `+inf` absorbs finite values, and `+inf` meeting `-inf` lands on zero.
pub fn var_convolve(a: &QuantizedLDensity, b: &QuantizedLDensity) -> Result<QuantizedLDensity> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let grid = a.grid;
    let h = grid.half_bins as isize;
    let n = grid.len();
    let mut out = QuantizedLDensity::zeros(grid);
    let mut wide = vec![0.0f64; 2 * n - 1];
    for (i, &pa) in a.pmf.iter().enumerate() {
        if pa == 0.0 {
            continue;
        }
        for (w, &pb) in wide[i..i + n].iter_mut().zip(&b.pmf) {
            *w += pa * pb;
        }
    }
    // wide[s] holds the sum value (s - 2h) * delta.
    for (s, &p) in wide.iter().enumerate() {
        let k = s as isize - h;
        if k < 0 {
            out.neg_sat += p;
        } else if k >= n as isize {
            out.pos_sat += p;
        } else {
            out.pmf[k as usize] += p;
        }
    }
    let (ia, ib): (f64, f64) = (a.pmf.iter().sum(), b.pmf.iter().sum());
    out.pos_sat += a.pos_sat * (ib + b.pos_sat) + b.pos_sat * ia;
    out.neg_sat += a.neg_sat * (ib + b.neg_sat) + b.neg_sat * ia;
    out.pmf[grid.zero_index()] += a.pos_sat * b.neg_sat + a.neg_sat * b.pos_sat;
    Ok(out)
}

/// Table of output magnitude indices for the check-node operator:
/// `T[i][j] = round(2 atanh(tanh(i d / 2) tanh(j d / 2)) / d)`, capped at
/// `min(i, j)`.
struct CheckTable {
    size: usize,
    idx: Vec<u16>,
}

impl CheckTable {
    fn build(grid: Grid) -> Self {
        let size = grid.half_bins + 1;
        let d = grid.delta();
        let th: Vec<f64> = (0..size).map(|k| (0.5 * k as f64 * d).tanh()).collect();
        let mut idx = vec![0u16; size * size];
        for i in 0..size {
            for j in 0..=i {
                let v = 2.0 * (th[i] * th[j]).atanh();
                let k = ((v / d).round() as usize).min(j);
                idx[i * size + j] = k as u16;
                idx[j * size + i] = k as u16;
            }
        }
        Self { size, idx }
    }

    fn cached(grid: Grid) -> Arc<CheckTable> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, u64), Arc<CheckTable>>>> = OnceLock::new();
        let key = (grid.half_bins, grid.l_max.to_bits());
        let mut map = CACHE.get_or_init(Default::default).lock().expect("table cache poisoned");
        map.entry(key)
            .or_insert_with(|| Arc::new(CheckTable::build(grid)))
            .clone()
    }
}

/// Splits a density into magnitude-indexed positive and negative parts; the
/// zero bin is shared evenly between the two signs.
fn sign_split(d: &QuantizedLDensity) -> (Vec<f64>, Vec<f64>) {
    let z = d.grid.zero_index();
    let size = z + 1;
    let mut pos = vec![0.0; size];
    let mut neg = vec![0.0; size];
    for k in 1..size {
        pos[k] = d.pmf[z + k];
        neg[k] = d.pmf[z - k];
    }
    pos[0] = 0.5 * d.pmf[z];
    neg[0] = 0.5 * d.pmf[z];
    (pos, neg)
}

/// Density of `2 atanh(tanh(L1 / 2) tanh(L2 / 2))` for independent `L1`,
/// `L2` (check-node convolution). `+inf` is the identity and `-inf` flips
/// the sign.
pub fn chk_convolve(a: &QuantizedLDensity, b: &QuantizedLDensity) -> Result<QuantizedLDensity> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let grid = a.grid;
    let table = CheckTable::cached(grid);
    let size = table.size;
    let (ap, an) = sign_split(a);
    let (bp, bn) = sign_split(b);
    let mut op = vec![0.0f64; size];
    let mut on = vec![0.0f64; size];
    for i in 0..size {
        let (pi, ni) = (ap[i], an[i]);
        if pi == 0.0 && ni == 0.0 {
            continue;
        }
        let row = &table.idx[i * size..(i + 1) * size];
        // Entries with j >= i all map to a magnitude <= i; entries in the
        // row are nondecreasing in j, so the work is a plain scatter.
        for j in 0..size {
            let (pj, nj) = (bp[j], bn[j]);
            let k = row[j] as usize;
            op[k] += pi * pj + ni * nj;
            on[k] += pi * nj + ni * pj;
        }
    }
    let mut out = QuantizedLDensity::zeros(grid);
    let z = grid.zero_index();
    for k in 1..size {
        out.pmf[z + k] = op[k];
        out.pmf[z - k] = on[k];
    }
    out.pmf[z] = op[0] + on[0];
    // Saturated inputs pass the other operand through, possibly mirrored.
    for k in 0..grid.len() {
        out.pmf[k] += a.pos_sat * b.pmf[k] + b.pos_sat * a.pmf[k];
        let mirror = grid.len() - 1 - k;
        out.pmf[mirror] += a.neg_sat * b.pmf[k] + b.neg_sat * a.pmf[k];
    }
    out.pos_sat = a.pos_sat * b.pos_sat + a.neg_sat * b.neg_sat;
    out.neg_sat = a.pos_sat * b.neg_sat + a.neg_sat * b.pos_sat;
    Ok(out)
}

/// `n`-fold check-node convolution power by repeated squaring (`n >= 1`).
pub fn chk_power(d: &QuantizedLDensity, n: usize) -> Result<QuantizedLDensity> {
    if n == 0 {
        return Err(invalid("check-node power needs n >= 1"));
    }
    let mut base = d.clone();
    let mut acc: Option<QuantizedLDensity> = None;
    let mut e = n;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => chk_convolve(&a, &base)?,
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = chk_convolve(&base, &base)?;
    }
    Ok(acc.expect("n >= 1"))
}

/// `n`-fold variable-node convolution power (`n >= 1`).
pub fn var_power(d: &QuantizedLDensity, n: usize) -> Result<QuantizedLDensity> {
    if n == 0 {
        return Err(invalid("variable-node power needs n >= 1"));
    }
    let mut acc = d.clone();
    for _ in 1..n {
        acc = var_convolve(&acc, d)?;
    }
    Ok(acc)
}

/// Output density of a degree-`k` single-parity-check node.
pub fn spc_out_density(p: &QuantizedLDensity, k: usize) -> Result<QuantizedLDensity> {
    if k < 2 {
        return Err(invalid("SPC degree must be at least 2"));
    }
    chk_power(p, k - 1)
}
