//! Extrinsic APP messages at generalized constraint nodes.
//!
//! The message to position `i` given LLRs `L_j` at the other positions is
//!
//! ```text
//! L_i = ln sum_{c: c_i = 0} exp(sum_{j != i} [c_j = 0] L_j)
//!     - ln sum_{c: c_i = 1} exp(sum_{j != i} [c_j = 0] L_j)
//! ```
//!
//! Subtracting the common term `sum_{j != i} L_j` from both branches turns each
//! exponent into `-sum_{j in supp(c), j != i} L_j`, which is what the kernels
//! evaluate with a max-shifted log-sum-exp.

use crate::error::{Error, Result};
use crate::subcodes::LinearSubcode;

/// Finite LLRs are clipped to this magnitude before exponentiation.
pub const LLR_CLIP: f64 = 50.0;

/// Clips a finite LLR to `[-LLR_CLIP, LLR_CLIP]`; infinities pass through.
#[inline]
pub fn clip(l: f64) -> f64 {
    if l.is_finite() {
        l.clamp(-LLR_CLIP, LLR_CLIP)
    } else {
        l
    }
}

/// Outcome of the erasure-domain message map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErasureOutput {
    Known,
    Erased,
}

/// Precomputed message map to one target position for finite inputs.
///
/// The kernel stores the codeword supports split by the target bit, with
/// the target bit stripped. It is the hot path of Monte-Carlo density
/// estimation and of the decoder.
#[derive(Clone, Debug)]
pub struct AppKernel {
    len: usize,
    target: usize,
    zero_branch: Vec<u32>,
    one_branch: Vec<u32>,
}

impl AppKernel {
    /// Kernel for the message to position 1.
    pub fn new(code: &LinearSubcode) -> Self {
        Self::at_position(code, 0)
    }

    /// Kernel for the message to 0-based position `target`.
    pub fn at_position(code: &LinearSubcode, target: usize) -> Self {
        let bit = 1u32 << target;
        let (one, zero): (Vec<u32>, Vec<u32>) = code.codewords().iter().partition(|&&c| c & bit != 0);
        Self {
            len: code.len(),
            target,
            zero_branch: zero,
            one_branch: one.into_iter().map(|c| c & !bit).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Message to the target position from a full-length vector `x` (the
    /// target entry is ignored). Entries must be finite; they are clipped to
    /// `LLR_CLIP`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.len);
        let mut buf = [0.0f64; 32];
        for (b, &v) in buf.iter_mut().zip(x) {
            *b = v.clamp(-LLR_CLIP, LLR_CLIP);
        }
        lse_neg_support(&self.zero_branch, &buf) - lse_neg_support(&self.one_branch, &buf)
    }

    /// Position-1 kernel evaluated on `y_j = x[perm[j]]`.
    pub fn eval_permuted(&self, x: &[f64], perm: &[usize]) -> f64 {
        debug_assert_eq!(self.target, 0);
        let mut buf = [0.0f64; 32];
        for (b, &p) in buf.iter_mut().zip(perm) {
            *b = x[p].clamp(-LLR_CLIP, LLR_CLIP);
        }
        lse_neg_support(&self.zero_branch, &buf) - lse_neg_support(&self.one_branch, &buf)
    }
}

#[inline]
fn support_sum(mut mask: u32, x: &[f64; 32]) -> f64 {
    let mut s = 0.0;
    while mask != 0 {
        let j = mask.trailing_zeros() as usize;
        s += x[j];
        mask &= mask - 1;
    }
    s
}

/// `ln sum_c exp(-sum_{j in c} x_j)` over the given supports.
#[inline]
fn lse_neg_support(masks: &[u32], x: &[f64; 32]) -> f64 {
    let mut exps = [0.0f64; 64];
    if masks.len() <= exps.len() {
        let exps = &mut exps[..masks.len()];
        let mut max = f64::NEG_INFINITY;
        for (e, &m) in exps.iter_mut().zip(masks) {
            *e = -support_sum(m, x);
            max = max.max(*e);
        }
        max + exps.iter().map(|e| (e - max).exp()).sum::<f64>().ln()
    } else {
        let max = masks
            .iter()
            .map(|&m| -support_sum(m, x))
            .fold(f64::NEG_INFINITY, f64::max);
        max + masks
            .iter()
            .map(|&m| (-support_sum(m, x) - max).exp())
            .sum::<f64>()
            .ln()
    }
}

/// Exact message to `target` from a full-length vector (the `target` entry is
/// ignored). Infinite inputs exclude the codewords they contradict.
fn app_exact(codewords: &[u32], len: usize, target: usize, x: &[f64]) -> Result<f64> {
    let mut forced_zero = 0u32;
    let mut forced_one = 0u32;
    let mut buf = [0.0f64; 32];
    for (j, &l) in x.iter().enumerate().take(len) {
        if j == target {
            continue;
        }
        if l.is_nan() {
            return Err(crate::error::invalid("NaN LLR"));
        }
        if l == f64::INFINITY {
            forced_zero |= 1 << j;
        } else if l == f64::NEG_INFINITY {
            forced_one |= 1 << j;
        } else {
            buf[j] = clip(l);
        }
    }
    let finite = !(forced_zero | forced_one | (1 << target));
    let bit = 1u32 << target;
    let mut zero = Vec::new();
    let mut one = Vec::new();
    for &c in codewords {
        if c & forced_zero != 0 || !c & forced_one != 0 {
            continue;
        }
        if c & bit == 0 {
            zero.push(c & finite);
        } else {
            one.push(c & finite);
        }
    }
    match (zero.is_empty(), one.is_empty()) {
        (true, true) => Err(Error::InconsistentEvidence),
        (false, true) => Ok(f64::INFINITY),
        (true, false) => Ok(f64::NEG_INFINITY),
        (false, false) => Ok(lse_neg_support(&zero, &buf) - lse_neg_support(&one, &buf)),
    }
}

fn expand(len: usize, i: usize, incoming: &[f64]) -> Result<Vec<f64>> {
    if i >= len {
        return Err(crate::error::invalid(format!(
            "target position {} outside 1..={len}",
            i + 1
        )));
    }
    if incoming.len() + 1 != len {
        return Err(crate::error::invalid(format!(
            "expected {} incoming LLRs, got {}",
            len - 1,
            incoming.len()
        )));
    }
    let mut x = Vec::with_capacity(len);
    x.extend_from_slice(&incoming[..i]);
    x.push(0.0);
    x.extend_from_slice(&incoming[i..]);
    Ok(x)
}

/// Extrinsic APP message to 0-based position `i`, by direct summation over
/// the codewords.
///
/// `incoming` holds the `K - 1` LLRs of the other positions in increasing
/// position order. Infinite LLRs act as hard evidence.
///
/// ```
/// use gldpc::{gc_app::app_message, subcodes::builtin_c1};
/// let c1 = builtin_c1();
/// assert_eq!(app_message(&c1, 0, &[0.0; 5]).unwrap(), 0.0);
/// assert_eq!(app_message(&c1, 0, &[f64::INFINITY; 5]).unwrap(), f64::INFINITY);
/// ```
pub fn app_message(code: &LinearSubcode, i: usize, incoming: &[f64]) -> Result<f64> {
    let x = expand(code.len(), i, incoming)?;
    app_exact(code.codewords(), code.len(), i, &x)
}

/// Same as [`app_message`] but evaluated through the permutation table: the
/// position-1 map applied to `x_j = L_{pi_i(j)}`.
pub fn app_message_via_permutation(code: &LinearSubcode, i: usize, incoming: &[f64]) -> Result<f64> {
    let table = code
        .permutations()
        .ok_or_else(|| Error::MissingPermutationTable(code.name().to_string()))?;
    let x = expand(code.len(), i, incoming)?;
    let y: Vec<f64> = table.get(i).iter().map(|&p| x[p]).collect();
    app_exact(code.codewords(), code.len(), 0, &y)
}

/// Erasure-domain message to 0-based position `i` when the positions in the
/// bit mask `erased` are erased and all others are known.
///
/// The output is erased iff some codeword with a one at `i` has the rest of
/// its support inside the erased set.
pub fn app_erasure_output(code: &LinearSubcode, i: usize, erased: u32) -> ErasureOutput {
    let bit = 1u32 << i;
    let erased = erased & !bit;
    let undetermined = code
        .codewords()
        .iter()
        .any(|&c| c & bit != 0 && (c & !bit) & !erased == 0);
    if undetermined {
        ErasureOutput::Erased
    } else {
        ErasureOutput::Known
    }
}

/// Check-node tanh rule `2 atanh(prod tanh(L_j / 2))`.
pub fn tanh_rule(incoming: &[f64]) -> f64 {
    let p: f64 = incoming.iter().map(|&l| (clip(l) / 2.0).tanh()).product();
    2.0 * p.clamp(-1.0, 1.0).atanh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subcodes::{builtin_c1, builtin_c2, pack, LinearSubcode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_llrs(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-scale..scale)).collect()
    }

    /// Literal summation with the full exponent, without the cancellation trick.
    fn naive(code: &LinearSubcode, i: usize, incoming: &[f64]) -> f64 {
        let x = expand(code.len(), i, incoming).unwrap();
        let (mut num, mut den) = (0.0f64, 0.0f64);
        for &c in code.codewords() {
            let e: f64 = (0..code.len())
                .filter(|&j| j != i && c >> j & 1 == 0)
                .map(|j| x[j])
                .sum();
            if c >> i & 1 == 0 {
                num += e.exp();
            } else {
                den += e.exp();
            }
        }
        (num / den).ln()
    }

    #[test]
    fn zero_input_gives_zero() {
        let c1 = builtin_c1();
        for i in 0..6 {
            assert_eq!(app_message(&c1, i, &[0.0; 5]).unwrap(), 0.0);
        }
    }

    #[test]
    fn c1_first_position_closed_form() {
        let c1 = builtin_c1();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let l = random_llrs(&mut rng, 5, 6.0);
            let (l2, l3, l4, l5, l6) = (l[0], l[1], l[2], l[3], l[4]);
            let num = (l2 + l3 + l4 + l5 + l6).exp() + (l2 + l3).exp() + (l4 + l5).exp() + l6.exp();
            let den = (l2 + l4 + l6).exp() + (l3 + l5 + l6).exp() + (l2 + l5).exp() + (l3 + l4).exp();
            let expected = (num / den).ln();
            let got = app_message(&c1, 0, &l).unwrap();
            assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
        }
    }

    #[test]
    fn matches_naive_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for code in [builtin_c1(), builtin_c2()] {
            for _ in 0..200 {
                let i = rng.random_range(0..code.len());
                let l = random_llrs(&mut rng, code.len() - 1, 8.0);
                let got = app_message(&code, i, &l).unwrap();
                assert!((got - naive(&code, i, &l)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn kernel_matches_direct_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for code in [builtin_c1(), builtin_c2()] {
            let kernel = AppKernel::new(&code);
            let table = code.permutations().unwrap();
            for _ in 0..200 {
                let x = random_llrs(&mut rng, code.len(), 10.0);
                for i in 0..code.len() {
                    let mut incoming = x.clone();
                    incoming.remove(i);
                    let direct = app_message(&code, i, &incoming).unwrap();
                    let fast = kernel.eval_permuted(&x, table.get(i));
                    assert!((direct - fast).abs() < 1e-9);
                }
                assert_eq!(kernel.eval(&x), kernel.eval_permuted(&x, table.get(0)));
                for i in 0..code.len() {
                    let direct = AppKernel::at_position(&code, i).eval(&x);
                    assert!((direct - kernel.eval_permuted(&x, table.get(i))).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn infinite_inputs_filter_codewords() {
        let c1 = builtin_c1();
        assert_eq!(
            app_message(&c1, 0, &[f64::INFINITY; 5]).unwrap(),
            f64::INFINITY
        );
        // Forcing positions 2 and 3 to one leaves only codewords 110011 and
        // 011011 minus those with c2 = 0, so the output sign follows bit 1.
        let inf = f64::INFINITY;
        let ninf = f64::NEG_INFINITY;
        let out = app_message(&c1, 0, &[ninf, ninf, 0.0, 0.0, 0.0]).unwrap();
        let survivors: Vec<u32> = c1
            .codewords()
            .iter()
            .copied()
            .filter(|c| c & 0b110 == 0b110)
            .collect();
        let ones = survivors.iter().filter(|&&c| c & 1 == 1).count();
        if ones == survivors.len() {
            assert_eq!(out, ninf);
        } else if ones == 0 {
            assert_eq!(out, inf);
        } else {
            assert!(out.is_finite());
        }
    }

    #[test]
    fn inconsistent_evidence_is_an_error() {
        // Repetition code: positions 2 and 3 cannot disagree.
        let h = crate::subcodes::ParityCheck::from_rows(&[[1u8, 1, 0], [0, 1, 1]]).unwrap();
        let rep = LinearSubcode::new("rep3", h).unwrap();
        assert!(matches!(
            app_message(&rep, 0, &[f64::INFINITY, f64::NEG_INFINITY]),
            Err(Error::InconsistentEvidence)
        ));
    }

    #[test]
    fn missing_table_is_an_error() {
        let h = crate::subcodes::ParityCheck::from_rows(&[[1u8, 1, 0], [0, 1, 1]]).unwrap();
        let rep = LinearSubcode::new("rep3", h).unwrap();
        assert!(matches!(
            app_message_via_permutation(&rep, 1, &[0.0, 0.0]),
            Err(Error::MissingPermutationTable(_))
        ));
    }

    #[test]
    fn erasure_examples() {
        let c1 = builtin_c1();
        assert_eq!(app_erasure_output(&c1, 0, 0), ErasureOutput::Known);
        assert_eq!(app_erasure_output(&c1, 0, 0b111110), ErasureOutput::Erased);
        let c2 = builtin_c2();
        let erased = pack(&[0, 0, 0, 1, 1, 0, 0]);
        let brute = c2
            .codewords()
            .iter()
            .any(|&c| c & 1 == 1 && (c & !1) & !erased == 0);
        assert_eq!(
            app_erasure_output(&c2, 0, erased) == ErasureOutput::Erased,
            brute
        );
    }

    #[test]
    fn erasure_agrees_with_infinite_llrs() {
        // Known positions carry +inf, erased positions carry 0.
        for code in [builtin_c1(), builtin_c2()] {
            let k = code.len();
            for i in 0..k {
                for erased in 0u32..(1 << k) {
                    if erased >> i & 1 == 1 {
                        continue;
                    }
                    let incoming: Vec<f64> = (0..k)
                        .filter(|&j| j != i)
                        .map(|j| if erased >> j & 1 == 1 { 0.0 } else { f64::INFINITY })
                        .collect();
                    let soft = app_message(&code, i, &incoming).unwrap();
                    let hard = app_erasure_output(&code, i, erased);
                    assert_eq!(hard == ErasureOutput::Known, soft == f64::INFINITY);
                }
            }
        }
    }
}
