//! Synthetic datasets and instances built from classic hard problems, with
//! brute-force oracles for their optimal sizes.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::criteria::label_criterion;
use crate::criterion::{Criterion, CriterionDescriptor, CriterionFlags, Instance, SegmentFn};
use crate::dataset::{CriterionSpec, Dataset};
use crate::error::{Error, Result};
use crate::model::{SegmentRef, StateSequence};

/// Weights out of [`RingChain::TOTAL`]: stay, each neighbour, each node two away.
const STAY: u32 = 70;
const NEAR: u32 = 10;
const FAR: u32 = 5;

/// Markov chain on a ring of `k` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RingChain {
    k: usize,
}

impl RingChain {
    pub const TOTAL: u32 = 100;

    pub fn new(k: usize) -> Result<Self> {
        if k < 5 {
            return Err(Error::InvalidParameter(format!(
                "ring needs at least 5 nodes, got {k}"
            )));
        }
        Ok(RingChain { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Integer weights of the transitions out of `node`, summing to
    /// [`RingChain::TOTAL`].
    pub fn weights(&self, node: usize) -> Vec<(usize, u32)> {
        let k = self.k;
        vec![
            (node, STAY),
            ((node + 1) % k, NEAR),
            ((node + k - 1) % k, NEAR),
            ((node + 2) % k, FAR),
            ((node + k - 2) % k, FAR),
        ]
    }

    /// Transition probabilities out of `node`.
    pub fn row(&self, node: usize) -> Vec<(usize, f64)> {
        self.weights(node)
            .into_iter()
            .map(|(n, w)| (n, f64::from(w) / f64::from(Self::TOTAL)))
            .collect()
    }

    pub fn step(&self, node: usize, rng: &mut impl Rng) -> usize {
        let mut draw = rng.gen_range(0..Self::TOTAL);
        for (n, w) in self.weights(node) {
            if draw < w {
                return n;
            }
            draw -= w;
        }
        unreachable!("weights sum to TOTAL")
    }

    /// `n` nodes starting from a uniformly random one.
    pub fn sample(&self, n: usize, rng: &mut impl Rng) -> Vec<usize> {
        let mut node = rng.gen_range(0..self.k);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                node = self.step(node, rng);
            }
            out.push(node);
        }
        out
    }
}

pub fn node_label(node: usize) -> String {
    format!("c{node}")
}

/// `m` sequences of `n` states sampled from a ring of `k` nodes, with one
/// label criterion per node. ChaCha8 seeded from `seed`.
pub fn generate_dataset(m: usize, n: usize, k: usize, seed: u64) -> Result<Dataset> {
    let chain = RingChain::new(k)?;
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("m and n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sequences = (0..m)
        .map(|i| {
            let labels: Vec<String> = chain
                .sample(n, &mut rng)
                .into_iter()
                .map(node_label)
                .collect();
            StateSequence::from_labels(format!("T{i}"), &labels)
        })
        .collect::<Result<_>>()?;
    let criteria = (0..k)
        .map(|c| CriterionSpec::label(&node_label(c)))
        .collect();
    Ok(Dataset {
        sequences,
        criteria,
    })
}

/// Criterion fulfilled only by a single state labelled `tag`.
fn single_state_criterion(tag: &str) -> Criterion {
    let label = tag.to_string();
    Criterion::segment(
        CriterionDescriptor::new(tag, tag, CriterionFlags::MONOTONE_INDEPENDENT)
            .expect("valid flags"),
        SegmentFn(move |seqs: &[StateSequence], segs: &[SegmentRef]| {
            segs.iter()
                .all(|s| s.len() == 1 && seqs[s.seq].state(s.start).has_label(&label))
        }),
    )
}

/// One sequence per string, one criterion per character. A criterion
/// covers one state at a time, so a diagram's labelled nodes read in
/// topological order spell a common supersequence.
pub fn scs_instance(strings: &[&str]) -> Result<Instance> {
    if strings.is_empty() {
        return Err(Error::InvalidParameter("no strings".into()));
    }
    let mut alphabet = BTreeSet::new();
    let mut sequences = Vec::with_capacity(strings.len());
    for (i, s) in strings.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::InvalidParameter(format!("string {i} is empty")));
        }
        let labels: Vec<String> = s.chars().map(String::from).collect();
        alphabet.extend(labels.iter().cloned());
        sequences.push(StateSequence::from_labels(format!("r{i}"), &labels)?);
    }
    let criteria = alphabet.iter().map(|c| single_state_criterion(c)).collect();
    Instance::new(sequences, criteria)
}

pub const SCS_MAX_STRINGS: usize = 3;
pub const SCS_MAX_LEN: usize = 10;

/// Length of a shortest common supersequence, by dynamic programming over
/// suffix positions.
pub fn scs_oracle(strings: &[&str]) -> Result<usize> {
    if strings.len() > SCS_MAX_STRINGS || strings.iter().any(|s| s.chars().count() > SCS_MAX_LEN) {
        return Err(Error::CapExceeded {
            vertices: strings
                .iter()
                .map(|s| s.chars().count() as u128 + 1)
                .product(),
            cap: (SCS_MAX_LEN as u128 + 1).pow(SCS_MAX_STRINGS as u32),
        });
    }
    let chars: Vec<Vec<char>> = strings.iter().map(|s| s.chars().collect()).collect();
    let mut memo = HashMap::new();
    Ok(scs_from(&chars, vec![0; chars.len()], &mut memo))
}

fn scs_from(chars: &[Vec<char>], pos: Vec<usize>, memo: &mut HashMap<Vec<usize>, usize>) -> usize {
    if let Some(&v) = memo.get(&pos) {
        return v;
    }
    let heads: BTreeSet<char> = chars
        .iter()
        .zip(&pos)
        .filter_map(|(s, &p)| s.get(p).copied())
        .collect();
    let best = heads
        .into_iter()
        .map(|c| {
            let next = chars
                .iter()
                .zip(&pos)
                .map(|(s, &p)| if s.get(p) == Some(&c) { p + 1 } else { p })
                .collect();
            1 + scs_from(chars, next, memo)
        })
        .min()
        .unwrap_or(0);
    memo.insert(pos, best);
    best
}

pub fn set_label(j: usize) -> String {
    format!("S{j}")
}

/// One two-state sequence per element; both states carry the labels of the
/// sets containing the element, and each set is a label criterion.
pub fn set_cover_instance(universe: usize, sets: &[BTreeSet<usize>]) -> Result<Instance> {
    if universe == 0 {
        return Err(Error::InvalidParameter("empty universe".into()));
    }
    let mut sequences = Vec::with_capacity(universe);
    for e in 0..universe {
        let labels: Vec<String> = sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(&e))
            .map(|(j, _)| set_label(j))
            .collect();
        if labels.is_empty() {
            return Err(Error::Infeasible(format!("element {e} is in no set")));
        }
        let state = crate::model::State::labelled(labels);
        sequences.push(StateSequence::new(
            format!("e{e}"),
            vec![state.clone(), state],
        )?);
    }
    let criteria = (0..sets.len())
        .map(|j| label_criterion(&set_label(j)))
        .collect();
    Instance::new(sequences, criteria)
}

pub const SET_COVER_MAX_SETS: usize = 20;

/// Size of a minimum cover of `0..universe`, enumerating subsets by
/// cardinality.
pub fn set_cover_oracle(universe: usize, sets: &[BTreeSet<usize>]) -> Result<usize> {
    if sets.len() > SET_COVER_MAX_SETS {
        return Err(Error::CapExceeded {
            vertices: 1u128 << sets.len(),
            cap: 1u128 << SET_COVER_MAX_SETS,
        });
    }
    if universe == 0 {
        return Ok(0);
    }
    let masks: Vec<u64> = sets
        .iter()
        .map(|s| {
            s.iter()
                .filter(|&&e| e < universe)
                .fold(0u64, |m, &e| m | 1 << e)
        })
        .collect();
    let full = if universe >= 64 {
        u64::MAX
    } else {
        (1u64 << universe) - 1
    };
    for size in 1..=sets.len() {
        for pick in 0u32..(1 << sets.len()) {
            if pick.count_ones() as usize != size {
                continue;
            }
            let cover = masks
                .iter()
                .enumerate()
                .filter(|(j, _)| pick >> j & 1 == 1)
                .fold(0u64, |m, (_, s)| m | s);
            if cover == full {
                return Ok(size);
            }
        }
    }
    Err(Error::Infeasible("some element is in no set".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::solve_exact;

    #[test]
    fn ring_row_k10() {
        let row: HashMap<usize, f64> = RingChain::new(10).unwrap().row(0).into_iter().collect();
        let expected = HashMap::from([(0, 0.7), (1, 0.1), (9, 0.1), (2, 0.05), (8, 0.05)]);
        assert_eq!(row, expected);
    }

    #[test]
    fn ring_rows_sum_exactly() {
        for k in [5, 6, 10, 128] {
            let chain = RingChain::new(k).unwrap();
            for node in 0..k {
                let w = chain.weights(node);
                assert_eq!(w.iter().map(|(_, w)| w).sum::<u32>(), RingChain::TOTAL);
                let distinct: BTreeSet<_> = w.iter().map(|(n, _)| n).collect();
                assert_eq!(distinct.len(), 5);
            }
        }
    }

    #[test]
    fn small_ring_rejected() {
        assert!(matches!(RingChain::new(4), Err(Error::InvalidParameter(_))));
        assert!(generate_dataset(1, 1, 3, 0).is_err());
        assert!(generate_dataset(0, 1, 5, 0).is_err());
    }

    #[test]
    fn generation_is_seeded() {
        let a = generate_dataset(4, 4, 10, 1).unwrap();
        assert_eq!(a, generate_dataset(4, 4, 10, 1).unwrap());
        assert_ne!(a, generate_dataset(4, 4, 10, 2).unwrap());
        assert_eq!(a.sequences.len(), 4);
        assert!(a.sequences.iter().all(|s| s.len() == 4));
        assert_eq!(a.criteria.len(), 10);
    }

    #[test]
    fn stationary_distribution_is_uniform() {
        let chain = RingChain::new(10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let walk = chain.sample(100_000, &mut rng);
        let mut counts = [0usize; 10];
        for n in walk {
            counts[n] += 1;
        }
        for c in counts {
            assert!((c as f64 / 100_000.0 - 0.1).abs() <= 0.01, "{counts:?}");
        }
    }

    #[test]
    fn scs_oracle_examples() {
        assert_eq!(scs_oracle(&["ab", "ba"]).unwrap(), 3);
        assert_eq!(scs_oracle(&["aa", "aa"]).unwrap(), 2);
        assert_eq!(scs_oracle(&["a", "b"]).unwrap(), 2);
        assert!(matches!(
            scs_oracle(&["a", "a", "a", "a"]),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(
            scs_oracle(&["aaaaaaaaaaa"]),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn scs_instance_examples() {
        let inst = scs_instance(&["ab", "ba"]).unwrap();
        assert_eq!((inst.arity(), inst.criteria.len()), (2, 2));
        assert_eq!(solve_exact(&inst).unwrap().fd_size(), 5);
        assert_eq!(
            solve_exact(&scs_instance(&["a"]).unwrap())
                .unwrap()
                .fd_size(),
            3
        );
        assert_eq!(
            solve_exact(&scs_instance(&["aa", "aa"]).unwrap())
                .unwrap()
                .fd_size(),
            4
        );
        assert!(scs_instance(&["a", ""]).is_err());
    }

    fn sets(v: &[&[usize]]) -> Vec<BTreeSet<usize>> {
        v.iter().map(|s| s.iter().copied().collect()).collect()
    }

    #[test]
    fn set_cover_examples() {
        let s = sets(&[&[0, 1], &[2], &[1, 2]]);
        assert_eq!(set_cover_oracle(3, &s).unwrap(), 2);
        let inst = set_cover_instance(3, &s).unwrap();
        assert_eq!((inst.arity(), inst.criteria.len()), (3, 3));
        assert_eq!(solve_exact(&inst).unwrap().fd_size(), 4);
        let one = sets(&[&[0, 1, 2]]);
        assert_eq!(set_cover_oracle(3, &one).unwrap(), 1);
        assert_eq!(
            solve_exact(&set_cover_instance(3, &one).unwrap())
                .unwrap()
                .fd_size(),
            3
        );
        assert_eq!(set_cover_oracle(0, &s).unwrap(), 0);
    }

    #[test]
    fn set_cover_errors() {
        let s = sets(&[&[0]]);
        assert!(matches!(
            set_cover_instance(2, &s),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(set_cover_oracle(2, &s), Err(Error::Infeasible(_))));
        let many = vec![BTreeSet::from([0]); 21];
        assert!(matches!(
            set_cover_oracle(1, &many),
            Err(Error::CapExceeded { .. })
        ));
    }
}
