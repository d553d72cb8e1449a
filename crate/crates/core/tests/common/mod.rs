#![allow(dead_code)]

use std::collections::BTreeMap;

use flowdiag::criteria::{label_criterion, table_criterion, TableMatch};
use flowdiag::datagen::generate_dataset;
use flowdiag::{Criterion, Instance, SegmentRef, StateSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn chars(id: &str, s: &str) -> StateSequence {
    let v: Vec<String> = s.chars().map(String::from).collect();
    StateSequence::from_labels(id, &v).unwrap()
}

/// Instance of label sequences over `alphabet`, one label criterion per
/// letter.
pub fn label_instance(strings: &[&str], alphabet: &str) -> Instance {
    let seqs = strings
        .iter()
        .enumerate()
        .map(|(i, s)| chars(&format!("T{i}"), s))
        .collect();
    let crit = alphabet
        .chars()
        .map(|c| label_criterion(&c.to_string()))
        .collect();
    Instance::new(seqs, crit).unwrap()
}

pub fn generated(m: usize, n: usize, k: usize, seed: u64) -> Instance {
    generate_dataset(m, n, k, seed).unwrap().instance().unwrap()
}

/// Random table criteria over sequences of the given lengths. Every state
/// gets at least one criterion covering it alone, so instances stay feasible.
pub fn table_instance(lengths: &[usize], k: usize, matching: TableMatch, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seqs: Vec<StateSequence> = lengths
        .iter()
        .enumerate()
        .map(|(i, &n)| StateSequence::from_labels(format!("T{i}"), &vec!["x"; n]).unwrap())
        .collect();
    let mut tables: Vec<BTreeMap<String, Vec<(usize, usize)>>> = vec![BTreeMap::new(); k];
    for seq in &seqs {
        let n = seq.len();
        for pos in 0..n {
            let c = rng.gen_range(0..k);
            tables[c]
                .entry(seq.id.clone())
                .or_default()
                .push((pos, pos + 1));
        }
        for table in tables.iter_mut() {
            for _ in 0..rng.gen_range(0..=2) {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(a + 1..=n);
                table.entry(seq.id.clone()).or_default().push((a, b));
            }
        }
    }
    let crit = tables
        .into_iter()
        .enumerate()
        .map(|(c, t)| table_criterion(&format!("C{c}"), &format!("C{c}"), t, matching).unwrap())
        .collect();
    Instance::new(seqs, crit).unwrap()
}

/// Whether `seq` splits into consecutive non-empty segments fulfilling a
/// subsequence of `word`, in order.
fn parses(instance: &Instance, j: usize, word: &[usize]) -> bool {
    let n = instance.sequences[j].len();
    // reachable[x]: cursor x reachable after the letters read so far.
    let mut reachable = vec![false; n + 1];
    reachable[0] = true;
    for &c in word {
        let crit: &Criterion = &instance.criteria[c];
        let mut next = reachable.clone();
        for a in (0..n).filter(|&a| reachable[a]) {
            for (b, slot) in next.iter_mut().enumerate().skip(a + 1) {
                if crit
                    .evaluate(&instance.sequences, &[SegmentRef::new(j, a, b)])
                    .unwrap()
                {
                    *slot = true;
                }
            }
        }
        reachable = next;
    }
    reachable[n]
}

/// Smallest diagram for independent criteria, found by enumerating the
/// words read along a topological order of the labelled nodes.
pub fn word_oracle(instance: &Instance, max_len: usize) -> Option<usize> {
    let k = instance.criteria.len();
    for len in 1..=max_len {
        let mut word = vec![0; len];
        loop {
            if (0..instance.arity()).all(|j| parses(instance, j, &word)) {
                return Some(len + 2);
            }
            let mut i = len;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                word[i] += 1;
                if word[i] < k {
                    break;
                }
                word[i] = 0;
            }
            if word.iter().all(|&x| x == 0) {
                break;
            }
        }
    }
    None
}
