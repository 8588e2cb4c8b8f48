//! List SC decoding over the BEC with random pruning.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::code::CodeSpec;
use crate::decoder::ScState;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::search::{DecodeOutcome, DecodeStatus};
use crate::symbol::ErasureSymbol;

/// SCL decoding with list cap `list_size`. Erased information bits split a
/// path, known bits and conflicts kill paths, and an overfull list is cut to
/// a uniformly random subset. Among the final paths one is chosen at random.
///
/// `visited_nodes` is the sum over positions of the number of paths entering
/// that position.
pub fn decode_scl<R: Rng + ?Sized>(
    spec: &CodeSpec,
    y: &[ErasureSymbol],
    list_size: usize,
    rng: &mut R,
) -> Result<DecodeOutcome> {
    if list_size == 0 {
        return Err(Error::Domain("list size must be at least 1".into()));
    }
    if y.len() != spec.len() {
        return Err(Error::Shape(format!(
            "observation of length {} for N = {}",
            y.len(),
            spec.len()
        )));
    }
    let mut paths = vec![ScState::new(y)];
    let mut visited = 0u64;
    let mut coin_flips = 0u64;
    for i in 0..spec.len() {
        visited += paths.len() as u64;
        let mut next = Vec::with_capacity(paths.len() * 2);
        for mut path in paths {
            let symbol = path.metric(true);
            if symbol.is_conflict() {
                continue;
            }
            match spec.constrained_value(i, path.decided()) {
                Some(v) => {
                    if symbol.bit().is_none_or(|b| b == v) {
                        path.decide(v);
                        next.push(path);
                    }
                }
                None => match symbol.bit() {
                    Some(b) => {
                        path.decide(b);
                        next.push(path);
                    }
                    None => {
                        let mut other = path.clone();
                        path.decide(0);
                        other.decide(1);
                        next.push(path);
                        next.push(other);
                    }
                },
            }
        }
        if next.len() > list_size {
            coin_flips += 1;
            next.shuffle(rng);
            next.truncate(list_size);
        }
        paths = next;
    }
    let survivors: Vec<Vec<u8>> = paths
        .into_iter()
        .map(ScState::into_decided)
        .filter(|u| {
            BitVector::from(u.clone())
                .mul_matrix(spec.h_prime())
                .is_ok_and(|s| s.is_zero())
        })
        .collect();
    let (status, u_hat) = match survivors.len() {
        0 => (DecodeStatus::Failure, BitVector::zeros(0)),
        1 => (DecodeStatus::Success, BitVector::from(survivors[0].clone())),
        m => {
            coin_flips += 1;
            (
                DecodeStatus::Success,
                BitVector::from(survivors[rng.random_range(0..m)].clone()),
            )
        }
    };
    Ok(DecodeOutcome {
        status,
        u_hat,
        visited_nodes: visited,
        backjumps: 0,
        iterations: 0,
        coin_flips,
    })
}
