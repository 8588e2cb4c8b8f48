//! Finite-blocklength reference curves for the BEC.
//!
//! With `e` erasures out of `N`, a code of `M = 2^K` codewords keeps `N - e`
//! unerased bits, so the information density of the true codeword is
//! `N - e` bits and a competing codeword survives the erasure pattern with
//! probability `2^{-(N-e)}` under random linear coding. Dependence testing
//! then bounds the average error by
//! `Σ_e Binom(N, e, p) · min(1, (M - 1)/2 · 2^{-(N-e)})`, counting ties as
//! half an error. The converse follows from counting: with `N - e < K` known
//! bits at most `2^{N-e}` of the `2^K` messages can be told apart, giving
//! `Σ_e Binom(N, e, p) · max(0, 1 - 2^{N-e-K})`.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::code::CodeSpec;
use crate::error::{Error, Result};
use crate::search::decode_sc;
use crate::sim::{decoder_rng, trial_input};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Dt,
    Mc,
    MlSim,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub kind: BoundKind,
    /// `(p, bler)` pairs.
    pub points: Vec<(f64, f64)>,
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "erasure probability {p} outside [0, 1]"
        )))
    }
}

/// `ln Binom(N, e, p)`, with the `0^0 = 1` convention at the endpoints.
fn ln_binom_pmf(n: u64, e: u64, p: f64) -> f64 {
    let term = |count: u64, prob: f64| {
        if count == 0 {
            0.0
        } else {
            count as f64 * prob.ln()
        }
    };
    ln_binomial(n, e) + term(e, p) + term(n - e, 1.0 - p)
}

/// `log2(1 - 2^x)` for `x <= 0`.
fn log2_one_minus_pow2(x: f64) -> f64 {
    (-(x * LN_2).exp_m1()).ln() / LN_2
}

/// `Σ_e Binom(N, e, p) · w(e)` for a weight in `[0, 1]` given as its base-2
/// log (`-inf` for zero). Near 1 the complement `Σ Binom · (1 - w)` is
/// summed instead so the result keeps its relative precision at both ends.
fn binomial_sum(n: usize, p: f64, log2_weight: impl Fn(usize) -> f64) -> f64 {
    let sum = |g: &dyn Fn(usize) -> f64| -> f64 {
        (0..=n)
            .map(|e| {
                let w = g(e);
                if w == f64::NEG_INFINITY {
                    0.0
                } else {
                    (ln_binom_pmf(n as u64, e as u64, p) + w * LN_2).exp()
                }
            })
            .sum()
    };
    let direct = sum(&log2_weight);
    if direct < 0.5 {
        return direct.max(0.0);
    }
    let complement = sum(&|e| log2_one_minus_pow2(log2_weight(e)));
    (1.0 - complement).clamp(0.0, 1.0)
}

/// Dependence-testing achievability bound on the average block error rate
/// of an `(N, K)` code over a BEC.
pub fn dt_bound(n: usize, k: usize, p: f64) -> Result<f64> {
    check_p(p)?;
    if k == 0 {
        return Ok(0.0);
    }
    // log2((2^K - 1) / 2)
    let log2_half_m = k as f64 + log2_one_minus_pow2(-(k as f64)) - 1.0;
    Ok(binomial_sum(n, p, |e| {
        (log2_half_m - (n - e) as f64).min(0.0)
    }))
}

/// Converse bound: no `(N, K)` code over a BEC does better.
pub fn mc_bound(n: usize, k: usize, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(binomial_sum(n, p, |e| {
        let known = n - e;
        if known >= k {
            f64::NEG_INFINITY
        } else {
            log2_one_minus_pow2(known as f64 - k as f64)
        }
    }))
}

pub fn bound_curve(kind: BoundKind, n: usize, k: usize, grid: &[f64]) -> Result<BoundCurve> {
    let f = match kind {
        BoundKind::Dt => dt_bound,
        BoundKind::Mc => mc_bound,
        BoundKind::MlSim => {
            return Err(Error::Usage(
                "the ML curve needs a code and a simulation".into(),
            ))
        }
    };
    Ok(BoundCurve {
        kind,
        points: grid
            .iter()
            .map(|&p| Ok((p, f(n, k, p)?)))
            .collect::<Result<_>>()?,
    })
}

/// Simulated lower estimate of the ML block error rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlBoundEstimate {
    pub p: f64,
    pub trials: u64,
    /// Trials where SC returned a wrong codeword that agrees with every
    /// unerased output.
    pub events: u64,
    pub ratio: f64,
    pub stderr: f64,
}

/// Runs plain SC on `trials` blocks and counts the errors an ML decoder
/// could not avoid either: a wrong codeword exactly as likely as the sent
/// one. Trials share seeds with the simulation harness.
pub fn ml_bound_sim(spec: &CodeSpec, p: f64, trials: u64, seed: u64) -> Result<MlBoundEstimate> {
    check_p(p)?;
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let events: u64 = (0..trials)
        .into_par_iter()
        .map(|index| -> Result<u64> {
            let (a, x, y) = trial_input(spec, p, seed, index)?;
            let out = decode_sc(spec, &y, &mut decoder_rng(seed, index))?;
            if out.matches(spec, &a) {
                return Ok(0);
            }
            let (_, x_hat) = spec.encode(&spec.message_of(out.u_hat.bits()))?;
            let consistent = y
                .iter()
                .zip(x_hat.iter())
                .all(|(s, b)| s.bit().is_none_or(|v| v == b));
            Ok((consistent && x_hat != x) as u64)
        })
        .sum::<Result<u64>>()?;
    let ratio = events as f64 / trials as f64;
    Ok(MlBoundEstimate {
        p,
        trials,
        events,
        ratio,
        stderr: (ratio * (1.0 - ratio) / trials as f64).sqrt(),
    })
}
