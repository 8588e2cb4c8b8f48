//! Brute-force reference decoders for tiny codes: SC by exhaustive
//! marginalization, bitwise-MAP-SC over constraint-consistent completions,
//! and blockwise MAP.
//!
//! Input vectors are indexed as integers with `u_0` as the most significant
//! bit, so every prefix `u_0^i` owns a contiguous range of completions.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::CodeSpec;
use crate::error::{Error, Result};
use crate::gf2::{polar_transform, BitVector};
use crate::symbol::ErasureSymbol;

pub const MAX_MARGINAL_LOG2_LEN: u32 = 4;
pub const MAX_BLOCKWISE_DIMENSION: usize = 20;

/// Per-position channel log-likelihoods `ln W(y_j | x_j)` up to a constant.
pub trait Observation: Sync {
    fn len(&self) -> usize;
    fn log_likelihood(&self, j: usize, bit: u8) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn codeword_log_likelihood(&self, x: &[u8]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(j, &b)| self.log_likelihood(j, b))
            .sum()
    }
}

/// BPSK over AWGN: `y_j = (1 - 2 x_j) + z_j`, `z_j ~ N(0, σ²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AwgnObservation {
    pub y: Vec<f64>,
    pub sigma2: f64,
}

impl AwgnObservation {
    pub fn new(y: Vec<f64>, sigma2: f64) -> Result<Self> {
        if sigma2.is_nan() || sigma2 <= 0.0 {
            return Err(Error::Domain(format!(
                "noise variance {sigma2} must be positive"
            )));
        }
        Ok(Self { y, sigma2 })
    }

    /// Noise variance for a given `Es/N0` in dB with unit symbol energy.
    pub fn sigma2_for_esn0_db(esn0_db: f64) -> f64 {
        1.0 / (2.0 * 10f64.powf(esn0_db / 10.0))
    }

    pub fn transmit<R: Rng + ?Sized>(x: &BitVector, sigma2: f64, rng: &mut R) -> Result<Self> {
        let noise = Normal::new(0.0, sigma2.sqrt()).map_err(|e| Error::Domain(e.to_string()))?;
        let y = x
            .iter()
            .map(|b| 1.0 - 2.0 * b as f64 + noise.sample(rng))
            .collect();
        Self::new(y, sigma2)
    }
}

impl Observation for AwgnObservation {
    fn len(&self) -> usize {
        self.y.len()
    }

    fn log_likelihood(&self, j: usize, bit: u8) -> f64 {
        let d = self.y[j] - (1.0 - 2.0 * bit as f64);
        -d * d / (2.0 * self.sigma2)
    }
}

/// Erasure channel output; an unerased mismatch has likelihood zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BecObservation(pub Vec<ErasureSymbol>);

impl Observation for BecObservation {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn log_likelihood(&self, j: usize, bit: u8) -> f64 {
        match self.0[j].bit() {
            Some(v) if v != bit => f64::NEG_INFINITY,
            _ => 0.0,
        }
    }
}

fn check_marginal(spec: &CodeSpec, y: &dyn Observation) -> Result<()> {
    if spec.log2_len() > MAX_MARGINAL_LOG2_LEN {
        return Err(Error::Capacity(format!(
            "exhaustive marginalization needs N <= {}, got {}",
            1 << MAX_MARGINAL_LOG2_LEN,
            spec.len()
        )));
    }
    check_len(spec, y)
}

fn check_len(spec: &CodeSpec, y: &dyn Observation) -> Result<()> {
    if y.len() != spec.len() {
        return Err(Error::Shape(format!(
            "observation of length {} for N = {}",
            y.len(),
            spec.len()
        )));
    }
    Ok(())
}

fn bits_of(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|j| ((index >> (n - 1 - j)) & 1) as u8).collect()
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln W(y | uG)` for every input vector, and whether it satisfies the code
/// constraints.
fn input_table(spec: &CodeSpec, y: &dyn Observation) -> (Vec<f64>, Vec<bool>) {
    let n = spec.len();
    (0..1usize << n)
        .map(|index| {
            let u = bits_of(index, n);
            let valid =
                (0..n).all(|i| spec.constrained_value(i, &u[..i]).is_none_or(|v| v == u[i]));
            let mut x = u;
            polar_transform(&mut x);
            (y.codeword_log_likelihood(&x), valid)
        })
        .unzip()
}

/// Sequential decisions that marginalize each bit over the completions of
/// the decided prefix; `valid_only` keeps only constraint-consistent ones.
fn sequential_marginal(spec: &CodeSpec, ll: &[f64], valid: &[bool], valid_only: bool) -> BitVector {
    let n = spec.len();
    let mut u: Vec<u8> = Vec::with_capacity(n);
    let mut base = 0usize;
    for i in 0..n {
        let span = 1usize << (n - 1 - i);
        let bit = match spec.constrained_value(i, &u) {
            Some(v) => v,
            None => {
                let mass = |b: usize| {
                    let start = base + b * span;
                    (start..start + span)
                        .filter(|&m| !valid_only || valid[m])
                        .fold(f64::NEG_INFINITY, |acc, m| log_add(acc, ll[m]))
                };
                (mass(1) > mass(0)) as u8
            }
        };
        base += bit as usize * span;
        u.push(bit);
    }
    BitVector::from(u)
}

/// Blockwise MAP over the input table. Valid inputs in increasing index
/// order are in increasing message order, since two valid inputs first
/// differ at an information bit.
fn table_blockwise(spec: &CodeSpec, ll: &[f64], valid: &[bool]) -> BitVector {
    let best = (0..ll.len())
        .filter(|&m| valid[m])
        .fold(None, |best: Option<usize>, m| match best {
            Some(b) if ll[b] >= ll[m] => Some(b),
            _ => Some(m),
        })
        .expect("the all-zero input is valid");
    BitVector::from(bits_of(best, spec.len()))
}

/// SC decisions by exhaustive marginalization over all future inputs.
pub fn sc_marginal_decode(spec: &CodeSpec, y: &dyn Observation) -> Result<BitVector> {
    check_marginal(spec, y)?;
    let (ll, valid) = input_table(spec, y);
    Ok(sequential_marginal(spec, &ll, &valid, false))
}

/// Bitwise-MAP-SC: like SC, but marginalizing only over futures that satisfy
/// the code constraints.
pub fn bitwise_map_sc_decode(spec: &CodeSpec, y: &dyn Observation) -> Result<BitVector> {
    check_marginal(spec, y)?;
    let (ll, valid) = input_table(spec, y);
    Ok(sequential_marginal(spec, &ll, &valid, true))
}

/// Number of constraint-consistent completions of `prefix`.
pub fn valid_completions(spec: &CodeSpec, prefix: &[u8]) -> Result<usize> {
    if spec.log2_len() > MAX_MARGINAL_LOG2_LEN {
        return Err(Error::Capacity(format!(
            "N = {} too large to enumerate",
            spec.len()
        )));
    }
    let n = spec.len();
    let free = n - prefix.len();
    let mut count = 0;
    for tail in 0..1usize << free {
        let mut u = prefix.to_vec();
        u.extend(bits_of(tail, free));
        count +=
            (0..n).all(|i| spec.constrained_value(i, &u[..i]).is_none_or(|v| v == u[i])) as usize;
    }
    Ok(count)
}

/// All messages with their codewords, in increasing message order
/// (`a_0` most significant).
fn codebook(spec: &CodeSpec) -> Result<Vec<(BitVector, BitVector)>> {
    let k = spec.dimension();
    if k > MAX_BLOCKWISE_DIMENSION {
        return Err(Error::Capacity(format!(
            "blockwise enumeration needs K <= {MAX_BLOCKWISE_DIMENSION}, got {k}"
        )));
    }
    (0..1usize << k)
        .map(|m| {
            let (u, _) = spec.encode(&BitVector::from(bits_of(m, k)))?;
            let mut x = u.bits().to_vec();
            polar_transform(&mut x);
            Ok((u, BitVector::from(x)))
        })
        .collect()
}

/// Blockwise MAP: the most likely valid input; ties go to the smaller
/// message.
pub fn blockwise_map_decode(spec: &CodeSpec, y: &dyn Observation) -> Result<BitVector> {
    check_len(spec, y)?;
    let mut best: Option<(f64, BitVector)> = None;
    for (u, x) in codebook(spec)? {
        let score = y.codeword_log_likelihood(x.bits());
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, u));
        }
    }
    Ok(best.expect("codebook has at least one entry").1)
}

/// Messages whose codewords agree with every unerased position.
pub fn bec_consistent_messages(spec: &CodeSpec, y: &[ErasureSymbol]) -> Result<Vec<BitVector>> {
    let obs = BecObservation(y.to_vec());
    check_len(spec, &obs)?;
    Ok(codebook(spec)?
        .into_iter()
        .filter(|(_, x)| obs.codeword_log_likelihood(x.bits()) == 0.0)
        .map(|(u, _)| spec.message_of(u.bits()))
        .collect())
}

/// One Es/N0 point of the toy comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyPoint {
    pub esn0_db: f64,
    pub trials: u64,
    pub sc_errors: u64,
    pub bitwise_errors: u64,
    pub blockwise_errors: u64,
    /// Trials where blockwise MAP failed but SC succeeded, and the reverse.
    pub block_lost_vs_sc: u64,
    pub block_won_vs_sc: u64,
    /// The same counts against bitwise-MAP-SC.
    pub block_lost_vs_bitwise: u64,
    pub block_won_vs_bitwise: u64,
}

impl ToyPoint {
    pub fn bler(&self, errors: u64) -> f64 {
        errors as f64 / self.trials as f64
    }
}

/// Runs the three decoders on the same AWGN trials at each Es/N0 point.
pub fn toy_compare(
    spec: &CodeSpec,
    esn0_db_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<ToyPoint>> {
    if spec.log2_len() > MAX_MARGINAL_LOG2_LEN {
        return Err(Error::Capacity(format!(
            "toy comparison needs N <= 16, got {}",
            spec.len()
        )));
    }
    esn0_db_grid
        .iter()
        .map(|&esn0_db| {
            let sigma2 = AwgnObservation::sigma2_for_esn0_db(esn0_db);
            let outcomes: Vec<[bool; 3]> = (0..trials)
                .into_par_iter()
                .map(|index| -> Result<[bool; 3]> {
                    let mut rng = crate::sim::stream(seed, index, 0);
                    let a = BitVector::from(
                        (0..spec.dimension())
                            .map(|_| rng.random_range(0..2u8))
                            .collect::<Vec<_>>(),
                    );
                    let (u, x) = spec.encode(&a)?;
                    let y = AwgnObservation::transmit(&x, sigma2, &mut rng)?;
                    let (ll, valid) = input_table(spec, &y);
                    Ok([
                        sequential_marginal(spec, &ll, &valid, false) == u,
                        sequential_marginal(spec, &ll, &valid, true) == u,
                        table_blockwise(spec, &ll, &valid) == u,
                    ])
                })
                .collect::<Result<_>>()?;
            let count =
                |f: &dyn Fn(&[bool; 3]) -> bool| outcomes.iter().filter(|o| f(o)).count() as u64;
            Ok(ToyPoint {
                esn0_db,
                trials,
                sc_errors: count(&|o| !o[0]),
                bitwise_errors: count(&|o| !o[1]),
                blockwise_errors: count(&|o| !o[2]),
                block_lost_vs_sc: count(&|o| o[0] && !o[2]),
                block_won_vs_sc: count(&|o| !o[0] && o[2]),
                block_lost_vs_bitwise: count(&|o| o[1] && !o[2]),
                block_won_vs_bitwise: count(&|o| !o[1] && o[2]),
            })
        })
        .collect()
}
