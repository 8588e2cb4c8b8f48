//! Concatenated polar code construction: index sets, the outer CRC, the
//! precoding matrix `T`, the input-side parity-check matrix `H`, and encoding.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gf2::{polar_transform, BitMatrix, BitVector};

const NR_SEQUENCE: &str = include_str!("../data/nr_reliability.txt");

/// Generator taps of the 11-bit NR CRC, `D^11 + D^10 + D^9 + D^5 + 1`,
/// highest degree first.
pub const CRC11_NR_TAPS: [u8; 12] = [1, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1];

/// The outer code placed in front of the polar transform.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OuterCode {
    None,
    /// Systematic CRC. `taps` holds the coefficients of `g(D)` from `D^r`
    /// down to `D^0`.
    Crc {
        taps: Vec<u8>,
    },
    /// Parity rules supplied directly as columns of `T` (hand-built codes).
    Explicit,
}

impl OuterCode {
    pub fn nr_crc11() -> Self {
        OuterCode::Crc {
            taps: CRC11_NR_TAPS.to_vec(),
        }
    }

    pub fn crc(taps: Vec<u8>) -> Result<Self> {
        if taps.len() < 2 || taps[0] != 1 || taps.iter().any(|&t| t > 1) {
            return Err(Error::Domain(
                "CRC generator must be a monic 0/1 polynomial of degree >= 1".into(),
            ));
        }
        Ok(OuterCode::Crc { taps })
    }

    /// Number of parity bits the outer code appends.
    pub fn parity_count(&self) -> usize {
        match self {
            OuterCode::Crc { taps } => taps.len() - 1,
            _ => 0,
        }
    }
}

/// Systematic CRC parity: the remainder of `message(D) · D^r` modulo `g(D)`,
/// with `message[0]` the highest-degree coefficient. Returns `r` bits, the
/// highest-degree remainder coefficient first.
pub fn crc_remainder(taps: &[u8], message: &BitVector) -> BitVector {
    let r = taps.len() - 1;
    let mut reg = vec![0u8; r];
    for bit in message.iter() {
        let feedback = bit ^ reg[0];
        reg.rotate_left(1);
        reg[r - 1] = 0;
        if feedback == 1 {
            for (cell, &t) in reg.iter_mut().zip(&taps[1..]) {
                *cell ^= t;
            }
        }
    }
    BitVector::from(reg)
}

/// Sub-channel ordering, least reliable first and most reliable last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReliabilityProfile {
    ordering: Vec<usize>,
}

impl ReliabilityProfile {
    pub fn from_ordering(ordering: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; ordering.len()];
        for &i in &ordering {
            if i >= ordering.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Domain(format!(
                    "reliability ordering is not a permutation (offending entry {i})"
                )));
            }
        }
        Ok(Self { ordering })
    }

    /// The 5G NR universal reliability sequence for `N_max = 1024`.
    pub fn nr() -> Self {
        let ordering = NR_SEQUENCE
            .lines()
            .filter(|l| !l.starts_with('#'))
            .flat_map(str::split_whitespace)
            .map(|t| t.parse().expect("bundled sequence is numeric"))
            .collect();
        Self::from_ordering(ordering).expect("bundled sequence is a permutation")
    }

    pub fn max_len(&self) -> usize {
        self.ordering.len()
    }

    /// The ordering restricted to indices below `len`, relative order kept.
    pub fn restricted(&self, len: usize) -> Vec<usize> {
        self.ordering.iter().copied().filter(|&i| i < len).collect()
    }
}

/// Role of one encoder-input position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BitRole {
    Info,
    Parity,
    Frozen,
}

/// A concatenated polar code together with its precoding and parity-check
/// matrices. Immutable after construction.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    n: u32,
    info: Vec<usize>,
    parity: Vec<usize>,
    frozen: Vec<usize>,
    constrained: Vec<usize>,
    roles: Vec<BitRole>,
    // for each parity position, the earlier information positions it sums
    parity_deps: Vec<Vec<usize>>,
    precoder: BitMatrix,
    parity_check: BitMatrix,
    h_prime: BitMatrix,
    outer: OuterCode,
}

impl CodeSpec {
    /// Builds a code of length `2^n` from its information set and parity
    /// rules. Each parity entry is `(position, information positions it sums)`;
    /// every other position is frozen.
    pub fn from_parts(
        n: u32,
        info: Vec<usize>,
        parity_rules: Vec<(usize, Vec<usize>)>,
        outer: OuterCode,
    ) -> Result<Self> {
        let len = 1usize << n;
        if info.is_empty() {
            return Err(Error::Domain(
                "code needs at least one information bit".into(),
            ));
        }
        let mut roles = vec![BitRole::Frozen; len];
        for &i in &info {
            if i >= len {
                return Err(Error::Bounds { index: i, len });
            }
            if roles[i] != BitRole::Frozen {
                return Err(Error::Domain(format!("position {i} listed twice")));
            }
            roles[i] = BitRole::Info;
        }
        let mut deps_by_pos = vec![Vec::new(); len];
        for (p, deps) in &parity_rules {
            if *p >= len {
                return Err(Error::Bounds { index: *p, len });
            }
            if roles[*p] != BitRole::Frozen {
                return Err(Error::Domain(format!("position {p} listed twice")));
            }
            roles[*p] = BitRole::Parity;
            for &d in deps {
                if d >= *p || roles.get(d) != Some(&BitRole::Info) {
                    return Err(Error::Domain(format!(
                        "parity {p} depends on position {d}, which is not an earlier information bit"
                    )));
                }
            }
            let mut deps = deps.clone();
            deps.sort_unstable();
            deps.dedup();
            deps_by_pos[*p] = deps;
        }
        let pick = |role| -> Vec<usize> { (0..len).filter(|&i| roles[i] == role).collect() };
        let (info, parity, frozen) = (
            pick(BitRole::Info),
            pick(BitRole::Parity),
            pick(BitRole::Frozen),
        );
        let constrained: Vec<usize> = (0..len).filter(|&i| roles[i] != BitRole::Info).collect();

        let mut precoder = BitMatrix::zeros(len, len);
        let mut parity_check = BitMatrix::zeros(len, len);
        for &i in &info {
            precoder.set(i, i, 1);
        }
        for &i in &frozen {
            parity_check.set(i, i, 1);
        }
        for &i in &parity {
            for &d in &deps_by_pos[i] {
                precoder.set(d, i, 1);
                parity_check.set(d, i, 1);
            }
            parity_check.set(i, i, 1);
        }
        let h_prime = parity_check.select_columns(&constrained)?;
        let parity_deps = parity.iter().map(|&p| deps_by_pos[p].clone()).collect();

        Ok(Self {
            n,
            info,
            parity,
            frozen,
            constrained,
            roles,
            parity_deps,
            precoder,
            parity_check,
            h_prime,
            outer,
        })
    }

    /// The (8,3) toy code with `A = {3,5,7}`, `P = {6}` and `u6 = u3 + u5`.
    pub fn example1() -> Self {
        Self::from_parts(3, vec![3, 5, 7], vec![(6, vec![3, 5])], OuterCode::Explicit)
            .expect("static example")
    }

    /// NR-style construction: the `K + r` most reliable sub-channels carry
    /// `(a ‖ crc(a))` in ascending index order, so the `r` CRC bits occupy the
    /// largest allocated positions.
    pub fn nr(n: u32, k: usize, profile: &ReliabilityProfile, outer: OuterCode) -> Result<Self> {
        let len = 1usize << n;
        if len > profile.max_len() {
            return Err(Error::Capacity(format!(
                "length {len} exceeds the reliability profile ({})",
                profile.max_len()
            )));
        }
        if k == 0 {
            return Err(Error::Domain(
                "code needs at least one information bit".into(),
            ));
        }
        let r = outer.parity_count();
        if k + r > len {
            return Err(Error::Capacity(format!(
                "K + r = {} exceeds N = {len}",
                k + r
            )));
        }
        let order = profile.restricted(len);
        let mut allocated = order[len - (k + r)..].to_vec();
        allocated.sort_unstable();
        let (info, parity_pos) = allocated.split_at(k);

        let mut rules = Vec::with_capacity(r);
        if let OuterCode::Crc { taps } = &outer {
            // CRC is linear with zero init: parity j of a = XOR over the set
            // bits m of parity j of the unit message e_m.
            let mut deps = vec![Vec::new(); r];
            for (m, &pos) in info.iter().enumerate() {
                let mut unit = BitVector::zeros(k);
                unit.set(m, 1);
                for (j, bit) in crc_remainder(taps, &unit).iter().enumerate() {
                    if bit == 1 {
                        deps[j].push(pos);
                    }
                }
            }
            rules = parity_pos.iter().copied().zip(deps).collect();
        }
        Self::from_parts(n, info.to_vec(), rules, outer)
    }

    pub fn log2_len(&self) -> u32 {
        self.n
    }

    /// Code length `N`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    /// Always false; constructed codes have at least one position.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Code dimension `K`.
    pub fn dimension(&self) -> usize {
        self.info.len()
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info
    }

    pub fn parity_set(&self) -> &[usize] {
        &self.parity
    }

    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen
    }

    /// `A^c` in ascending order; the column order of `H'`.
    pub fn constrained_set(&self) -> &[usize] {
        &self.constrained
    }

    pub fn role(&self, i: usize) -> BitRole {
        self.roles[i]
    }

    pub fn is_info(&self, i: usize) -> bool {
        self.roles[i] == BitRole::Info
    }

    pub fn precoder(&self) -> &BitMatrix {
        &self.precoder
    }

    pub fn parity_check(&self) -> &BitMatrix {
        &self.parity_check
    }

    /// `H' = H_{*, A^c}`.
    pub fn h_prime(&self) -> &BitMatrix {
        &self.h_prime
    }

    pub fn outer(&self) -> &OuterCode {
        &self.outer
    }

    /// `G = F^{⊗n}`.
    pub fn generator(&self) -> BitMatrix {
        BitMatrix::kron_power(&BitMatrix::polar_kernel(), self.n)
    }

    /// Information positions a parity bit is the sum of; empty for other roles.
    pub fn parity_dependencies(&self, i: usize) -> &[usize] {
        match self.parity.binary_search(&i) {
            Ok(j) => &self.parity_deps[j],
            Err(_) => &[],
        }
    }

    /// Value of a frozen or parity bit given the bits before it.
    /// Returns `None` for information positions.
    pub fn constrained_value(&self, i: usize, prefix: &[u8]) -> Option<u8> {
        match self.roles[i] {
            BitRole::Info => None,
            BitRole::Frozen => Some(0),
            BitRole::Parity => Some(
                self.parity_dependencies(i)
                    .iter()
                    .fold(0, |acc, &d| acc ^ prefix[d]),
            ),
        }
    }

    /// Rate-profiles `a` into `v`, precodes `u = vT`, and transforms `x = uG`.
    pub fn encode(&self, a: &BitVector) -> Result<(BitVector, BitVector)> {
        if a.len() != self.dimension() {
            return Err(Error::Shape(format!(
                "message of length {} for K = {}",
                a.len(),
                self.dimension()
            )));
        }
        let mut u = vec![0u8; self.len()];
        for (&pos, bit) in self.info.iter().zip(a.iter()) {
            u[pos] = bit;
        }
        for (&p, deps) in self.parity.iter().zip(&self.parity_deps) {
            u[p] = deps.iter().fold(0, |acc, &d| acc ^ u[d]);
        }
        let mut x = u.clone();
        polar_transform(&mut x);
        Ok((BitVector::from(u), BitVector::from(x)))
    }

    /// The information bits `u_A` of an encoder input.
    pub fn message_of(&self, u: &[u8]) -> BitVector {
        BitVector::from(self.info.iter().map(|&i| u[i]).collect::<Vec<_>>())
    }

    /// SHA-256 over the canonical text of `T` followed by `H`.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.precoder.to_text().as_bytes());
        h.update(self.parity_check.to_text().as_bytes());
        hex::encode(h.finalize())
    }
}
