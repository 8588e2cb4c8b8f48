//! Sequential decoding as a tree search: SC, and the FC-aided decoders with
//! optional stack-based backjumping.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::CodeSpec;
use crate::decoder::{build_hypothesis, check_hypothesis, CheckOptions, Hypothesis, ScState};
use crate::error::{Error, Result};
use crate::fc::ConstraintCache;
use crate::gf2::BitVector;
use crate::symbol::ErasureSymbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeStatus {
    Success,
    Failure,
}

/// Result of decoding one block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    /// Estimated encoder input; on failure, the partial prefix reached.
    pub u_hat: BitVector,
    pub visited_nodes: u64,
    pub backjumps: u64,
    /// BP sweeps summed over all hypothesis checks.
    pub iterations: u64,
    /// Decisions taken by a fair coin on an undetermined symbol.
    pub coin_flips: u64,
}

impl DecodeOutcome {
    pub fn is_success(&self) -> bool {
        self.status == DecodeStatus::Success
    }

    /// Whether the decoded information bits equal `a`.
    pub fn matches(&self, spec: &CodeSpec, a: &BitVector) -> bool {
        self.is_success() && spec.message_of(self.u_hat.bits()) == *a
    }
}

/// Node-visit count of a decoding run: one per hypothesis evaluation for the
/// FC decoders (a resumed checkpoint counts once), one per position for SC,
/// and the running list size summed over positions for SCL.
pub fn count_visits(outcome: &DecodeOutcome) -> u64 {
    outcome.visited_nodes
}

fn check_len(spec: &CodeSpec, y: &[ErasureSymbol]) -> Result<()> {
    if y.len() != spec.len() {
        return Err(Error::Shape(format!(
            "observation of length {} for N = {}",
            y.len(),
            spec.len()
        )));
    }
    Ok(())
}

/// Plain SC: hard decisions in index order, erased information bits settled
/// by a fair coin, never backtracks.
pub fn decode_sc<R: Rng + ?Sized>(
    spec: &CodeSpec,
    y: &[ErasureSymbol],
    rng: &mut R,
) -> Result<DecodeOutcome> {
    check_len(spec, y)?;
    let mut state = ScState::new(y);
    let mut coin_flips = 0;
    for i in 0..spec.len() {
        let symbol = state.metric(false);
        let bit = match spec.constrained_value(i, state.decided()) {
            Some(v) => v,
            None => symbol.bit().unwrap_or_else(|| {
                coin_flips += 1;
                rng.random_range(0..2)
            }),
        };
        state.decide(bit);
    }
    Ok(DecodeOutcome {
        status: DecodeStatus::Success,
        u_hat: BitVector::from(state.into_decided()),
        visited_nodes: spec.len() as u64,
        backjumps: 0,
        iterations: 0,
        coin_flips,
    })
}

/// Hypothesis-check engine used by the FC-aided search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Future constraints up to the processing bit only.
    Scc,
    /// FCCN message passing with at most `i_max` sweeps.
    BpScc { i_max: usize },
}

impl Engine {
    pub fn options(self) -> CheckOptions {
        match self {
            Engine::Scc => CheckOptions::SCC,
            Engine::BpScc { i_max } => CheckOptions::bp_scc(i_max),
        }
    }
}

/// Search settings for [`decode_with_fc`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub engine: Engine,
    /// Stack-based backjumping on dead-ends.
    pub sbj: bool,
    /// Give up with a failure once this many nodes were visited.
    pub max_visits: Option<u64>,
}

/// An unvisited branch: `u_target = value` after the snapshot `prefix`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchCheckpoint {
    pub target: usize,
    pub value: u8,
    pub prefix: Vec<u8>,
}

/// FC-aided decoding. For each information bit `H_{i,0}` is checked first;
/// when it passes with a decided processing bit the decoder proceeds with 0
/// and stacks the unverified `u_i = 1` branch. Otherwise `H_{i,1}` is checked
/// too: a single passing hypothesis is taken, two passing hypotheses are
/// settled by a coin with the other one stacked. A dead-end fails, or with
/// backjumping resumes the most recent stacked branch after verifying it.
pub fn decode_with_fc<R: Rng + ?Sized>(
    spec: &CodeSpec,
    cache: &ConstraintCache,
    y: &[ErasureSymbol],
    opts: SearchOptions,
    rng: &mut R,
) -> Result<DecodeOutcome> {
    check_len(spec, y)?;
    let check_opts = opts.engine.options();
    let info = spec.info_set();
    let mut out = DecodeOutcome {
        status: DecodeStatus::Failure,
        u_hat: BitVector::zeros(0),
        visited_nodes: 0,
        backjumps: 0,
        iterations: 0,
        coin_flips: 0,
    };
    let mut stack: Vec<BranchCheckpoint> = Vec::new();
    let mut prefix: Vec<u8> = Vec::with_capacity(spec.len());
    for k in 0..info[0] {
        let v = spec
            .constrained_value(k, &prefix)
            .expect("positions before the first information bit are constrained");
        prefix.push(v);
    }
    let check = |hyp: &Hypothesis, out: &mut DecodeOutcome| -> Result<_> {
        out.visited_nodes += 1;
        let rep = check_hypothesis(spec, cache, y, hyp, check_opts)?;
        out.iterations += rep.iterations as u64;
        Ok(rep)
    };
    let over_budget = |out: &DecodeOutcome| opts.max_visits.is_some_and(|m| out.visited_nodes >= m);

    let mut idx = 0;
    while idx < info.len() {
        let i = info[idx];
        debug_assert_eq!(prefix.len(), i);
        let h0 = build_hypothesis(spec, &prefix, i, 0)?;
        let r0 = check(&h0, &mut out)?;
        let next = if r0.passed && r0.symbol.is_concrete() {
            stack.push(BranchCheckpoint {
                target: i,
                value: 1,
                prefix: prefix.clone(),
            });
            Some(h0)
        } else if over_budget(&out) {
            r0.passed.then_some(h0)
        } else {
            let h1 = build_hypothesis(spec, &prefix, i, 1)?;
            let r1 = check(&h1, &mut out)?;
            match (r0.passed, r1.passed) {
                (true, true) => {
                    // neither hypothesis conflicts: pick one at random
                    out.coin_flips += 1;
                    let (take, keep) = if rng.random_range(0..2u8) == 0 {
                        (h0, 1)
                    } else {
                        (h1, 0)
                    };
                    stack.push(BranchCheckpoint {
                        target: i,
                        value: keep,
                        prefix: prefix.clone(),
                    });
                    Some(take)
                }
                (true, false) => Some(h0),
                (false, true) => Some(h1),
                (false, false) => None,
            }
        };
        match next {
            Some(h) => {
                prefix = h.prefix;
                idx += 1;
            }
            None if !opts.sbj => return Ok(fail(out, prefix)),
            None => {
                let mut resumed = None;
                while let Some(cp) = stack.pop() {
                    if over_budget(&out) {
                        break;
                    }
                    out.backjumps += 1;
                    let h = build_hypothesis(spec, &cp.prefix, cp.target, cp.value)?;
                    if check(&h, &mut out)?.passed {
                        resumed = Some((cp.target, h));
                        break;
                    }
                }
                let Some((target, h)) = resumed else {
                    return Ok(fail(out, prefix));
                };
                idx = info.partition_point(|&k| k <= target);
                prefix = h.prefix;
            }
        }
        if over_budget(&out) && idx < info.len() {
            return Ok(fail(out, prefix));
        }
    }
    out.status = DecodeStatus::Success;
    out.u_hat = BitVector::from(prefix);
    Ok(out)
}

fn fail(mut out: DecodeOutcome, prefix: Vec<u8>) -> DecodeOutcome {
    out.status = DecodeStatus::Failure;
    out.u_hat = BitVector::from(prefix);
    out
}
