//! Future constraints and their conversion into parity checks on
//! encoder-output and intermediate variables.

use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::code::CodeSpec;
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// `L_i`: the frozen and parity positions at or after `i`.
pub fn future_constraints(spec: &CodeSpec, i: usize) -> Vec<usize> {
    let c = spec.constrained_set();
    c[c.partition_point(|&k| k < i)..].to_vec()
}

/// First index of the aligned `2^t` block containing `i`.
pub fn block_start(i: usize, t: u32) -> usize {
    (i >> t) << t
}

/// `T(i,t)`, the aligned `2^t` block containing `i`.
pub fn block(i: usize, t: u32) -> std::ops::Range<usize> {
    let s = block_start(i, t);
    s..s + (1 << t)
}

/// `L_{i,t}`: the constraints of `L_i` that first fall inside the `2^t` block
/// around `i` at stage `t`. Stage 0 holds `i` itself when it is constrained,
/// so the sets over `t = 0..=n` partition `L_i`.
pub fn stage_constraints(spec: &CodeSpec, i: usize, t: u32) -> Vec<usize> {
    let inner = if t == 0 { i..i } else { block(i, t - 1) };
    let outer = block(i, t);
    future_constraints(spec, i)
        .into_iter()
        .filter(|k| outer.contains(k) && !inner.contains(k))
        .collect()
}

/// `Q = G H'`: every codeword satisfies `x Q = 0`.
pub fn global_q(spec: &CodeSpec) -> BitMatrix {
    spec.generator()
        .mat_mul(spec.h_prime())
        .expect("G and H' share the code length")
}

/// Full-graph system for target `i`: returns `(Q^(i), H_{0:i-1, L_i})` with
/// `Q^(i) = G_{*, i:N-1} H_{i:N-1, L_i}`. For the true prefix,
/// `u_0^{i-1} H_{0:i-1, L_i} = x Q^(i)`.
pub fn instant_q_full(spec: &CodeSpec, i: usize) -> Result<(BitMatrix, BitMatrix)> {
    let len = spec.len();
    if i >= len {
        return Err(Error::Bounds { index: i, len });
    }
    let l = future_constraints(spec, i);
    let tail: Vec<usize> = (i..len).collect();
    let head: Vec<usize> = (0..i).collect();
    let all: Vec<usize> = (0..len).collect();
    let h = spec.parity_check();
    let coeffs = spec
        .generator()
        .slice(&all, &tail)?
        .mat_mul(&h.slice(&tail, &l)?)?;
    Ok((coeffs, h.slice(&head, &l)?))
}

/// Coefficients `(F^{⊗t})_{*, rows - s} H_{rows, cols}` for a block starting
/// at `s`, built column by column: column `c` of `F^{⊗t}` is the set of
/// `t`-bit supersets of `c`.
fn block_coefficients(
    spec: &CodeSpec,
    t: u32,
    s: usize,
    rows: &[usize],
    cols: &[usize],
) -> BitMatrix {
    let width = 1usize << t;
    let h = spec.parity_check();
    let mut q = BitMatrix::zeros(width, cols.len());
    for (j, &col) in cols.iter().enumerate() {
        let mut column = vec![0u8; width];
        for &m in rows {
            if h.get(m, col) == 1 {
                let c = m - s;
                for (row, bit) in column.iter_mut().enumerate() {
                    if row & c == c {
                        *bit ^= 1;
                    }
                }
            }
        }
        for (row, bit) in column.into_iter().enumerate() {
            if bit == 1 {
                q.set(row, j, 1);
            }
        }
    }
    q
}

/// Subgraph coefficients for target `i` at stage `t`: returns `L_{i,t}` and
/// `Q^(i,t) = (F^{⊗t})_{*, T'-s} H_{T', L_{i,t}}` with `T' = T(i,t) ∩ {i..}`.
pub fn subgraph_coefficients(spec: &CodeSpec, i: usize, t: u32) -> Result<(Vec<usize>, BitMatrix)> {
    let n = spec.log2_len();
    if t > n {
        return Err(Error::Bounds {
            index: t as usize,
            len: n as usize + 1,
        });
    }
    if i >= spec.len() {
        return Err(Error::Bounds {
            index: i,
            len: spec.len(),
        });
    }
    let cols = stage_constraints(spec, i, t);
    let rows: Vec<usize> = (i..block(i, t).end).collect();
    let q = block_coefficients(spec, t, block_start(i, t), &rows, &cols);
    Ok((cols, q))
}

/// FCCNs at one stage: a parity system `x^(t) Q = φ` over the `2^t` stage
/// variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstantConstraintSystem {
    pub stage: u32,
    /// Input positions of the converted constraints, one per FCCN.
    pub constraints: Vec<usize>,
    pub coefficients: BitMatrix,
    pub phi: Vec<u8>,
    /// `V_j`: the variables checked by FCCN `j`.
    pub var_neighbors: Vec<Vec<usize>>,
    /// `C_k`: the FCCNs attached to variable `k`.
    pub check_neighbors: Vec<Vec<usize>>,
}

impl InstantConstraintSystem {
    fn new(
        spec: &CodeSpec,
        stage: u32,
        constraints: Vec<usize>,
        coefficients: BitMatrix,
        prefix: &[u8],
    ) -> Self {
        let var_neighbors: Vec<Vec<usize>> = (0..coefficients.cols())
            .map(|j| coefficients.column_support(j))
            .collect();
        let mut check_neighbors = vec![Vec::new(); coefficients.rows()];
        for (j, vars) in var_neighbors.iter().enumerate() {
            for &k in vars {
                check_neighbors[k].push(j);
            }
        }
        let phi = constraint_offsets(spec, &constraints, prefix);
        Self {
            stage,
            constraints,
            coefficients,
            phi,
            var_neighbors,
            check_neighbors,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }
}

/// `φ_j = prefix · H_{0:len-1, j}` for each constraint column `j`.
pub fn constraint_offsets(spec: &CodeSpec, constraints: &[usize], prefix: &[u8]) -> Vec<u8> {
    let h = spec.parity_check();
    constraints
        .iter()
        .map(|&j| {
            prefix
                .iter()
                .enumerate()
                .take(j)
                .fold(0, |acc, (m, &b)| acc ^ (b & h.get(m, j)))
        })
        .collect()
}

/// The stage-`t` system for processing bit `ell`: constraints `L_{ell+1,t}`
/// with coefficients `Q^(ell+1,t)` and offsets from the hypothesis prefix
/// `ū_0^{ell}`.
pub fn instant_q_subgraph(
    spec: &CodeSpec,
    ell: usize,
    t: u32,
    prefix: &[u8],
) -> Result<InstantConstraintSystem> {
    let n = spec.log2_len();
    if t == 0 || t > n {
        return Err(Error::Bounds {
            index: t as usize,
            len: n as usize + 1,
        });
    }
    check_prefix(spec, ell, prefix)?;
    let (cols, q) = if ell + 1 == spec.len() {
        (Vec::new(), BitMatrix::zeros(1 << t, 0))
    } else {
        subgraph_coefficients(spec, ell + 1, t)?
    };
    Ok(InstantConstraintSystem::new(spec, t, cols, q, prefix))
}

fn check_prefix(spec: &CodeSpec, ell: usize, prefix: &[u8]) -> Result<()> {
    if ell >= spec.len() {
        return Err(Error::Bounds {
            index: ell,
            len: spec.len(),
        });
    }
    if prefix.len() != ell + 1 {
        return Err(Error::Shape(format!(
            "prefix of length {} for processing bit {ell}",
            prefix.len()
        )));
    }
    Ok(())
}

/// Stage-`t` constraints that live in the instant graph of processing bit
/// `ell`: the members of `L_{ell+1}` entering `ell`'s own block at stage `t`.
/// Coefficients are taken over `T(ell,t) ∩ {ell+1..}`.
pub fn anchored_coefficients(spec: &CodeSpec, ell: usize, t: u32) -> (Vec<usize>, BitMatrix) {
    let outer = block(ell, t);
    let inner = if t == 0 {
        ell..ell + 1
    } else {
        block(ell, t - 1)
    };
    let cols: Vec<usize> = future_constraints(spec, ell + 1)
        .into_iter()
        .filter(|k| outer.contains(k) && !inner.contains(k))
        .collect();
    let rows: Vec<usize> = (ell + 1..outer.end).collect();
    let q = block_coefficients(spec, t, outer.start, &rows, &cols);
    (cols, q)
}

/// The FCCN systems for stages `1..=n` of processing bit `ell`, offsets set
/// from `prefix`.
pub fn anchored_systems(
    spec: &CodeSpec,
    ell: usize,
    prefix: &[u8],
) -> Result<Vec<InstantConstraintSystem>> {
    check_prefix(spec, ell, prefix)?;
    Ok((1..=spec.log2_len())
        .map(|t| {
            let (cols, q) = anchored_coefficients(spec, ell, t);
            InstantConstraintSystem::new(spec, t, cols, q, prefix)
        })
        .collect())
}

/// Prefix-independent part of one stage's FCCNs, in the sparse form the
/// decoders iterate over.
#[derive(Debug, Clone)]
pub struct StageChecks {
    pub stage: u32,
    pub constraints: Vec<usize>,
    pub var_neighbors: Vec<Vec<usize>>,
    /// Parity-check support `{m <= ell : H_{m,j} = 1}` per constraint, used to
    /// form the offsets.
    offset_support: Vec<Vec<usize>>,
}

impl StageChecks {
    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Offsets `φ` for a hypothesis prefix covering at least `0..=ell`.
    pub fn offsets(&self, prefix: &[u8]) -> Vec<u8> {
        self.offset_support
            .iter()
            .map(|rows| rows.iter().fold(0, |acc, &m| acc ^ prefix[m]))
            .collect()
    }
}

/// Lazily memoized anchored FCCN structure for every processing bit of a
/// code; safe to share between threads.
#[derive(Debug)]
pub struct ConstraintCache {
    per_ell: Vec<OnceLock<Vec<StageChecks>>>,
}

impl ConstraintCache {
    pub fn new(spec: &CodeSpec) -> Self {
        Self {
            per_ell: (0..spec.len()).map(|_| OnceLock::new()).collect(),
        }
    }

    /// Stages `0..=n` (index = stage; stage 0 is always empty).
    pub fn stages(&self, spec: &CodeSpec, ell: usize) -> &[StageChecks] {
        self.per_ell[ell].get_or_init(|| {
            (0..=spec.log2_len())
                .map(|t| {
                    let (cols, q) = anchored_coefficients(spec, ell, t);
                    let var_neighbors = (0..q.cols()).map(|j| q.column_support(j)).collect();
                    let h = spec.parity_check();
                    let offset_support = cols
                        .iter()
                        .map(|&j| (0..=ell).filter(|&m| h.get(m, j) == 1).collect())
                        .collect();
                    StageChecks {
                        stage: t,
                        constraints: cols,
                        var_neighbors,
                        offset_support,
                    }
                })
                .collect()
        })
    }
}

/// Human-readable table of `L_i`, its stage partition, and the FCCN
/// adjacency of each stage's converted system.
pub fn dump_table(spec: &CodeSpec, i: usize) -> Result<String> {
    if i >= spec.len() {
        return Err(Error::Bounds {
            index: i,
            len: spec.len(),
        });
    }
    let mut out = String::new();
    let fmt_set = |s: &[usize]| {
        let items: Vec<String> = s.iter().map(usize::to_string).collect();
        format!("{{{}}}", items.join(","))
    };
    writeln!(out, "i = {i}").unwrap();
    writeln!(out, "L_i = {}", fmt_set(&future_constraints(spec, i))).unwrap();
    writeln!(
        out,
        "{:>5}  {:>9}  {:<24}  fccn adjacency",
        "stage", "block", "L_(i,t)"
    )
    .unwrap();
    for t in 0..=spec.log2_len() {
        let (cols, q) = subgraph_coefficients(spec, i, t)?;
        let b = block(i, t);
        let adjacency: Vec<String> = cols
            .iter()
            .enumerate()
            .map(|(j, c)| format!("u{c}:{}", fmt_set(&q.column_support(j))))
            .collect();
        writeln!(
            out,
            "{t:>5}  {:>9}  {:<24}  {}",
            format!("{}..{}", b.start, b.end - 1),
            fmt_set(&cols),
            adjacency.join(" ")
        )
        .unwrap();
    }
    Ok(out)
}
