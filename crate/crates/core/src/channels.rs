//! BEC and BI-AWGN channel models with BPSK mapping `x = 1 - 2c`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::density::{Grid, QuantizedLDensity};
use crate::error::{invalid, Result};

/// A binary-input memoryless channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "channel", rename_all = "snake_case")]
pub enum ChannelModel {
    /// Binary erasure channel with erasure probability `epsilon`.
    Bec { epsilon: f64 },
    /// BPSK over additive white Gaussian noise with standard deviation `sigma`.
    BiAwgn { sigma: f64 },
}

/// One channel output symbol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Observation {
    Erased,
    /// Unerased BEC symbol (`+1` or `-1`).
    Symbol(f64),
    /// Real-valued AWGN output.
    Real(f64),
}

impl ChannelModel {
    pub fn bec(epsilon: f64) -> Result<Self> {
        let m = Self::Bec { epsilon };
        m.validate()?;
        Ok(m)
    }

    pub fn awgn(sigma: f64) -> Result<Self> {
        let m = Self::BiAwgn { sigma };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelModel::Bec { epsilon } if (0.0..=1.0).contains(&epsilon) => Ok(()),
            ChannelModel::BiAwgn { sigma } if sigma > 0.0 && sigma.is_finite() => Ok(()),
            ChannelModel::Bec { epsilon } => {
                Err(invalid(format!("erasure probability {epsilon} outside [0, 1]")))
            }
            ChannelModel::BiAwgn { sigma } => Err(invalid(format!("noise level {sigma} must be positive"))),
        }
    }

    /// Sends `x` (entries `+-1`) through the channel.
    pub fn transmit(&self, x: &[f64], seed: u64) -> Vec<Observation> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.transmit_with(x, &mut rng)
    }

    /// Same as [`transmit`](Self::transmit) with a caller-provided generator.
    pub fn transmit_with<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> Vec<Observation> {
        match *self {
            ChannelModel::Bec { epsilon } => x
                .iter()
                .map(|&xi| {
                    if rng.random::<f64>() < epsilon {
                        Observation::Erased
                    } else {
                        Observation::Symbol(xi)
                    }
                })
                .collect(),
            ChannelModel::BiAwgn { sigma } => x
                .iter()
                .map(|&xi| {
                    let z: f64 = StandardNormal.sample(rng);
                    Observation::Real(xi + sigma * z)
                })
                .collect(),
        }
    }

    /// Channel LLR `ln p(y | c = 0) / p(y | c = 1)` of one observation.
    pub fn llr(&self, y: Observation) -> f64 {
        match (*self, y) {
            (_, Observation::Erased) => 0.0,
            (_, Observation::Symbol(s)) => {
                if s > 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            }
            (ChannelModel::BiAwgn { sigma }, Observation::Real(v)) => 2.0 * v / (sigma * sigma),
            (ChannelModel::Bec { .. }, Observation::Real(v)) => {
                if v > 0.0 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// LLRs for a block of observations.
    pub fn channel_llr(&self, y: &[Observation]) -> Vec<f64> {
        y.iter().map(|&o| self.llr(o)).collect()
    }

    /// Density of the channel LLR given that `+1` was sent.
    pub fn channel_l_density(&self, grid: Grid) -> QuantizedLDensity {
        match *self {
            ChannelModel::Bec { epsilon } => {
                let mut d = QuantizedLDensity::zeros(grid);
                d.add_mass(0.0, epsilon);
                d.add_mass(f64::INFINITY, 1.0 - epsilon);
                d
            }
            ChannelModel::BiAwgn { sigma } => {
                let s2 = sigma * sigma;
                QuantizedLDensity::gaussian(grid, 2.0 / s2, 4.0 / s2)
            }
        }
    }

    /// Capacity in bits per channel use.
    pub fn capacity(&self) -> f64 {
        match *self {
            ChannelModel::Bec { epsilon } => 1.0 - epsilon,
            ChannelModel::BiAwgn { sigma } => biawgn_capacity(sigma),
        }
    }
}

/// Capacity of BPSK over AWGN: `1 - E[log2(1 + e^{-L})]` with
/// `L ~ N(2/s^2, 4/s^2)`, integrated by the composite Simpson rule over
/// `+-12` standard deviations.
pub fn biawgn_capacity(sigma: f64) -> f64 {
    let mean = 2.0 / (sigma * sigma);
    let sd = 2.0 / sigma;
    let n = 4000;
    let (lo, hi) = (mean - 12.0 * sd, mean + 12.0 * sd);
    let h = (hi - lo) / n as f64;
    let f = |l: f64| {
        let z = (l - mean) / sd;
        let pdf = (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt());
        // log2(1 + e^{-l}) evaluated without overflow.
        let softplus = if l > 0.0 {
            (-l).exp().ln_1p()
        } else {
            -l + l.exp().ln_1p()
        };
        pdf * softplus / std::f64::consts::LN_2
    };
    let mut s = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(lo + i as f64 * h);
    }
    (1.0 - s * h / 3.0).clamp(0.0, 1.0)
}

/// SNR convention for reporting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrConvention {
    /// `10 log10(1 / sigma^2)`.
    #[default]
    Es,
    /// `10 log10(1 / (2 R sigma^2))`.
    EbN0,
}

/// SNR in dB for noise level `sigma`; `rate` is only used for `EbN0`.
pub fn snr_db(sigma: f64, convention: SnrConvention, rate: f64) -> f64 {
    match convention {
        SnrConvention::Es => -20.0 * sigma.log10(),
        SnrConvention::EbN0 => -10.0 * (2.0 * rate * sigma * sigma).log10(),
    }
}

/// Inverse of [`snr_db`].
pub fn sigma_from_db(db: f64, convention: SnrConvention, rate: f64) -> f64 {
    match convention {
        SnrConvention::Es => 10f64.powf(-db / 20.0),
        SnrConvention::EbN0 => (10f64.powf(-db / 10.0) / (2.0 * rate)).sqrt(),
    }
}
