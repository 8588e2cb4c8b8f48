//! Density evolution over the decoding alphabet for SC, SCC and single-sweep
//! BP-SCC.

use serde::{Deserialize, Serialize};

use crate::code::CodeSpec;
use crate::decoder::{processing_index, Hypothesis, InstantGraph};
use crate::error::{Error, Result};
use crate::fc::ConstraintCache;
use crate::symbol::ErasureSymbol;

/// Probability mass function over `{0, 1, ε, η}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolPmf {
    pub p0: f64,
    pub p1: f64,
    pub pe: f64,
    pub peta: f64,
}

impl SymbolPmf {
    pub fn new(p0: f64, p1: f64, pe: f64, peta: f64) -> Self {
        Self { p0, p1, pe, peta }
    }

    pub fn point(symbol: ErasureSymbol) -> Self {
        let mut pmf = Self::new(0.0, 0.0, 0.0, 0.0);
        *pmf.get_mut(symbol) = 1.0;
        pmf
    }

    /// Channel output PMF for a transmitted 0 over a BEC.
    pub fn erasure_channel(p: f64) -> Self {
        Self::new(1.0 - p, 0.0, p, 0.0)
    }

    pub fn get(&self, symbol: ErasureSymbol) -> f64 {
        match symbol {
            ErasureSymbol::Zero => self.p0,
            ErasureSymbol::One => self.p1,
            ErasureSymbol::Erasure => self.pe,
            ErasureSymbol::Conflict => self.peta,
        }
    }

    fn get_mut(&mut self, symbol: ErasureSymbol) -> &mut f64 {
        match symbol {
            ErasureSymbol::Zero => &mut self.p0,
            ErasureSymbol::One => &mut self.p1,
            ErasureSymbol::Erasure => &mut self.pe,
            ErasureSymbol::Conflict => &mut self.peta,
        }
    }

    fn bit(&self, b: u8) -> f64 {
        if b == 0 {
            self.p0
        } else {
            self.p1
        }
    }

    pub fn total(&self) -> f64 {
        self.p0 + self.p1 + self.pe + self.peta
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        [self.p0, self.p1, self.pe, self.peta]
            .iter()
            .all(|&v| v >= -tol)
            && (self.total() - 1.0).abs() <= tol
    }
}

/// PMF of `a ⊞ b` for independent `a ~ p1`, `b ~ p2`.
pub fn psi_boxplus(p1: &SymbolPmf, p2: &SymbolPmf) -> SymbolPmf {
    SymbolPmf {
        p0: p1.p0 * p2.p0 + p1.p1 * p2.p1,
        p1: p1.p0 * p2.p1 + p1.p1 * p2.p0,
        pe: p1.pe * (p2.p0 + p2.p1 + p2.pe) + p2.pe * (p1.p0 + p1.p1),
        peta: p1.peta + p2.peta - p1.peta * p2.peta,
    }
}

/// `ψ_⊞` folded over a set; the empty set gives the point mass at 0.
pub fn psi_boxplus_all<'a>(pmfs: impl IntoIterator<Item = &'a SymbolPmf>) -> SymbolPmf {
    pmfs.into_iter()
        .fold(SymbolPmf::point(ErasureSymbol::Zero), |acc, p| {
            psi_boxplus(p, &acc)
        })
}

/// PMF of `(a ⊞ b) ⊡ c` for `a ~ p1`, `c ~ p2` and a known bit `b`.
pub fn psi_boxdot(p1: &SymbolPmf, p2: &SymbolPmf, b: u8) -> SymbolPmf {
    let (same, flip) = (p1.bit(b), p1.bit(1 - b));
    SymbolPmf {
        p0: same * (p2.p0 + p2.pe) + p1.pe * p2.p0,
        p1: flip * (p2.p1 + p2.pe) + p1.pe * p2.p1,
        pe: p1.pe * p2.pe,
        peta: same * p2.p1 + flip * p2.p0 + p1.peta * (1.0 - p2.peta) + p2.peta,
    }
}

/// Decoder whose error rate is predicted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeDecoder {
    Sc,
    Scc,
    /// BP-SCC with a single sweep.
    BpScc1,
}

/// FCCN update of the stage PMFs: each variable takes only the incoming
/// check message with the largest conflict probability (first one on ties).
pub fn de_fccn_update(pmfs: &mut [SymbolPmf], var_neighbors: &[Vec<usize>], phi: &[u8]) {
    let mut best: Vec<Option<SymbolPmf>> = vec![None; pmfs.len()];
    for (vars, &offset) in var_neighbors.iter().zip(phi) {
        let deg = vars.len();
        // exclusive folds through prefix and suffix products
        let mut prefix = Vec::with_capacity(deg + 1);
        prefix.push(SymbolPmf::point(ErasureSymbol::from_bit(offset)));
        for &l in vars {
            let last = *prefix.last().unwrap();
            prefix.push(psi_boxplus(&last, &pmfs[l]));
        }
        let mut suffix = SymbolPmf::point(ErasureSymbol::Zero);
        for (pos, &k) in vars.iter().enumerate().rev() {
            let q = psi_boxplus(&prefix[pos], &suffix);
            match &best[k] {
                Some(b) if b.peta >= q.peta => {}
                _ => best[k] = Some(q),
            }
            suffix = psi_boxplus(&pmfs[k], &suffix);
        }
    }
    for (p, q) in pmfs.iter_mut().zip(best) {
        if let Some(q) = q {
            *p = psi_boxdot(p, &q, 0);
        }
    }
}

/// Per-bit and block error predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeResult {
    /// `(i, P_b(i))` for every information position.
    pub per_bit: Vec<(usize, f64)>,
    pub bler: f64,
}

/// Density evolution under the all-zero codeword: for each information bit
/// the `u_i = 1` hypothesis is tracked through its instant graph, and
/// `P_b(i) = (p[ū_ℓ] + p[ε]) / 2`. The block error rate is
/// `1 - Π (1 - P_b(i))`.
pub fn de_run(
    spec: &CodeSpec,
    cache: &ConstraintCache,
    decoder: DeDecoder,
    p: f64,
) -> Result<DeResult> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "erasure probability {p} outside [0, 1]"
        )));
    }
    let n = spec.log2_len();
    let mut per_bit = Vec::with_capacity(spec.dimension());
    let mut survive = 1.0;
    for &i in spec.info_set() {
        let ell = match decoder {
            DeDecoder::Sc => i,
            _ => processing_index(spec, i)?,
        };
        let hyp = Hypothesis::with_processing(spec, &vec![0; i], i, 1, ell)?;
        let mut graph = InstantGraph::new(&vec![ErasureSymbol::Erasure; spec.len()])?;
        graph.cancel_prefix(&hyp);
        let stages = (decoder == DeDecoder::BpScc1).then(|| cache.stages(spec, ell));
        let mut pmfs = vec![SymbolPmf::erasure_channel(p); spec.len()];
        for t in (0..n).rev() {
            if let Some(stages) = stages {
                let checks = &stages[t as usize + 1];
                if !checks.is_empty() {
                    de_fccn_update(
                        &mut pmfs,
                        &checks.var_neighbors,
                        &checks.offsets(&hyp.prefix),
                    );
                }
            }
            let half = 1usize << t;
            let next: Vec<SymbolPmf> = match graph.beta(t) {
                Some(beta) => (0..half)
                    .map(|k| psi_boxdot(&pmfs[k], &pmfs[k + half], beta[k]))
                    .collect(),
                None => (0..half)
                    .map(|k| psi_boxplus(&pmfs[k], &pmfs[k + half]))
                    .collect(),
            };
            pmfs = next;
        }
        let root = pmfs[0];
        let pb = 0.5 * (root.bit(hyp.processing_bit()) + root.pe);
        survive *= 1.0 - pb;
        per_bit.push((i, pb));
    }
    Ok(DeResult {
        per_bit,
        bler: 1.0 - survive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{OuterCode, ReliabilityProfile};
    use crate::symbol::ErasureSymbol::*;
    use proptest::prelude::*;

    fn close(a: &SymbolPmf, b: &SymbolPmf) -> bool {
        [a.p0 - b.p0, a.p1 - b.p1, a.pe - b.pe, a.peta - b.peta]
            .iter()
            .all(|d| d.abs() < 1e-12)
    }

    fn pmf_strategy() -> impl Strategy<Value = SymbolPmf> {
        (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64).prop_filter_map(
            "nonzero",
            |(a, b, c, d)| {
                let s = a + b + c + d;
                (s > 1e-9).then(|| SymbolPmf::new(a / s, b / s, c / s, d / s))
            },
        )
    }

    #[test]
    fn point_masses_reproduce_the_operators() {
        for a in ErasureSymbol::ALL {
            for c in ErasureSymbol::ALL {
                let sum = psi_boxplus(&SymbolPmf::point(a), &SymbolPmf::point(c));
                assert!(close(&sum, &SymbolPmf::point(a.box_plus(c))), "{a} ⊞ {c}");
                for b in 0..2 {
                    let dot = psi_boxdot(&SymbolPmf::point(a), &SymbolPmf::point(c), b);
                    let expected = a.plus_bit(b).box_dot(c);
                    assert!(close(&dot, &SymbolPmf::point(expected)), "({a}+{b}) ⊡ {c}");
                }
            }
        }
    }

    #[test]
    fn erasure_formula_expands_symbolically() {
        let p = 0.3;
        let ch = SymbolPmf::erasure_channel(p);
        let out = psi_boxplus(&ch, &ch);
        assert!((out.pe - (2.0 * p - p * p)).abs() < 1e-15);
        let certain = psi_boxplus(&SymbolPmf::point(Conflict), &ch);
        assert_eq!(certain.peta, 1.0);
        let clash = psi_boxdot(&SymbolPmf::point(One), &SymbolPmf::point(Zero), 0);
        assert_eq!(clash.peta, 1.0);
    }

    #[test]
    fn degree_one_check_pins_its_variable() {
        let p = 0.4;
        let mut pmfs = vec![SymbolPmf::erasure_channel(p), SymbolPmf::erasure_channel(p)];
        de_fccn_update(&mut pmfs, &[vec![0]], &[0]);
        assert!(close(&pmfs[0], &SymbolPmf::point(Zero)));
        assert!(close(&pmfs[1], &SymbolPmf::erasure_channel(p)));
        let mut pmfs = vec![SymbolPmf::new(0.5, 0.2, 0.3, 0.0)];
        de_fccn_update(&mut pmfs, &[vec![0]], &[0]);
        assert!((pmfs[0].peta - 0.2).abs() < 1e-15);
    }

    #[test]
    fn most_conflicting_check_wins() {
        let quiet = SymbolPmf::erasure_channel(0.5);
        let noisy = SymbolPmf::new(0.5, 0.2, 0.2, 0.1);
        let mut pmfs = vec![quiet, quiet, noisy];
        // check 0 links {0,1}: no conflict mass; check 1 links {0,2}
        de_fccn_update(&mut pmfs, &[vec![0, 1], vec![0, 2]], &[0, 0]);
        let from_noisy = psi_boxplus(&noisy, &SymbolPmf::point(Zero));
        assert!(close(&pmfs[0], &psi_boxdot(&quiet, &from_noisy, 0)));
    }

    #[test]
    fn extreme_channels() {
        let code = CodeSpec::nr(6, 32, &ReliabilityProfile::nr(), OuterCode::nr_crc11()).unwrap();
        let cache = ConstraintCache::new(&code);
        for dec in [DeDecoder::Sc, DeDecoder::Scc, DeDecoder::BpScc1] {
            assert_eq!(de_run(&code, &cache, dec, 0.0).unwrap().bler, 0.0);
            let all = de_run(&code, &cache, dec, 1.0).unwrap();
            assert!(all.per_bit.iter().all(|&(_, pb)| (pb - 0.5).abs() < 1e-12));
            assert!((all.bler - (1.0 - 0.5f64.powi(32))).abs() < 1e-12);
            assert!(matches!(
                de_run(&code, &cache, dec, 1.5),
                Err(Error::Domain(_))
            ));
        }
    }

    #[test]
    fn sc_matches_bhattacharyya_recursion() {
        let code = CodeSpec::nr(6, 32, &ReliabilityProfile::nr(), OuterCode::nr_crc11()).unwrap();
        let cache = ConstraintCache::new(&code);
        let p = 0.4;
        let res = de_run(&code, &cache, DeDecoder::Sc, p).unwrap();
        for &(i, pb) in &res.per_bit {
            let mut z = p;
            for t in (0..6).rev() {
                z = if (i >> t) & 1 == 1 {
                    z * z
                } else {
                    2.0 * z - z * z
                };
            }
            assert!((pb - z / 2.0).abs() < 1e-12, "bit {i}");
        }
    }

    #[test]
    fn predictions_are_ordered_and_monotone() {
        for n in [6u32, 7] {
            let k = 1usize << (n - 1);
            let code =
                CodeSpec::nr(n, k, &ReliabilityProfile::nr(), OuterCode::nr_crc11()).unwrap();
            let cache = ConstraintCache::new(&code);
            let mut last = [0.0f64; 3];
            for step in 0..=20 {
                let p = step as f64 * 0.05;
                let b: Vec<f64> = [DeDecoder::Sc, DeDecoder::Scc, DeDecoder::BpScc1]
                    .iter()
                    .map(|&d| de_run(&code, &cache, d, p).unwrap().bler)
                    .collect();
                assert!(
                    b[0] >= b[1] - 1e-12 && b[1] >= b[2] - 1e-12,
                    "n={n} p={p}: {b:?}"
                );
                for j in 0..3 {
                    assert!(b[j] >= last[j] - 1e-12, "n={n} p={p}");
                    last[j] = b[j];
                }
            }
        }
    }

    proptest! {
        #[test]
        fn outputs_are_pmfs(a in pmf_strategy(), c in pmf_strategy(), b in 0u8..2) {
            prop_assert!(psi_boxplus(&a, &c).is_valid(1e-12));
            prop_assert!(psi_boxdot(&a, &c, b).is_valid(1e-12));
        }

        #[test]
        fn boxdot_bit_swaps_zero_and_one(a in pmf_strategy(), c in pmf_strategy()) {
            let swapped = SymbolPmf::new(a.p1, a.p0, a.pe, a.peta);
            prop_assert!(close(&psi_boxdot(&a, &c, 1), &psi_boxdot(&swapped, &c, 0)));
        }

        #[test]
        fn boxplus_commutes(a in pmf_strategy(), c in pmf_strategy()) {
            prop_assert!(close(&psi_boxplus(&a, &c), &psi_boxplus(&c, &a)));
        }
    }
}
