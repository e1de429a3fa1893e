//! Set partitions of sample labels and the finite Kingman coalescent on them.
//!
//! Labels are 0-based internally and printed 1-based.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

/// A partition in canonical form: elements sorted inside each block, blocks
/// ordered by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Self {
        blocks.retain(|b| !b.is_empty());
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Partition { blocks }
    }

    /// Every label in its own block.
    pub fn singletons(n: usize) -> Self {
        Partition { blocks: (0..n).map(|i| vec![i]).collect() }
    }

    /// Groups `0..labels.len()` by equal label value.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut seen: Vec<(usize, Vec<usize>)> = Vec::new();
        for (i, &l) in labels.iter().enumerate() {
            match seen.iter_mut().find(|(k, _)| *k == l) {
                Some((_, b)) => b.push(i),
                None => seen.push((l, vec![i])),
            }
        }
        Partition::new(seen.into_iter().map(|(_, b)| b).collect())
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Number of labels covered.
    pub fn size(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Index of the block holding `label`.
    pub fn block_of(&self, label: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&label))
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        matches!((self.block_of(a), self.block_of(b)), (Some(x), Some(y)) if x == y)
    }

    /// Sorted block sizes, largest first.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.blocks.iter().map(Vec::len).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    /// Whether the blocks are disjoint and cover exactly `0..n`.
    pub fn is_partition_of(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for b in &self.blocks {
            if b.is_empty() {
                return false;
            }
            for &i in b {
                if i >= n || seen[i] {
                    return false;
                }
                seen[i] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Whether every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.blocks.iter().all(|b| {
            let home = coarser.block_of(b[0]);
            home.is_some() && b.iter().all(|&i| coarser.block_of(i) == home)
        })
    }

    /// `self ∘ eta`, where `eta` partitions the block indices of `self`:
    /// labels `k`, `l` share a block iff their blocks share a block of `eta`.
    pub fn compose(&self, eta: &Partition) -> Partition {
        Partition::new(
            eta.blocks
                .iter()
                .map(|group| group.iter().flat_map(|&j| self.blocks[j].iter().copied()).collect())
                .collect(),
        )
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, i) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", i + 1)?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// One merge of a Kingman coalescent: the waiting time since the previous
/// state and the partition of the starting blocks after the merge.
#[derive(Debug, Clone, PartialEq)]
pub struct KingmanStep {
    pub time: f64,
    pub state: Partition,
}

/// Runs a Kingman coalescent (rate 1 per pair) on `k` blocks until one
/// block remains. Times are cumulative from the start.
pub fn kingman_path<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<KingmanStep> {
    let mut state: Vec<Vec<usize>> = (0..k).map(|i| vec![i]).collect();
    let mut t = 0.0;
    let mut steps = Vec::with_capacity(k.saturating_sub(1));
    while state.len() > 1 {
        let m = state.len();
        let rate = (m * (m - 1)) as f64 / 2.0;
        t += Exp::new(rate).expect("positive rate").sample(rng);
        let i = rng.random_range(0..m);
        let mut j = rng.random_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let moved = state.swap_remove(hi);
        state[lo].extend(moved);
        steps.push(KingmanStep { time: t, state: Partition::new(state.clone()) });
    }
    steps
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn canonical_form_and_display() {
        let p = Partition::new(vec![vec![3, 2], vec![], vec![1], vec![0, 4]]);
        assert_eq!(p.to_string(), "{{1,5},{2},{3,4}}");
        assert!(p.is_partition_of(5));
        assert!(!p.is_partition_of(6));
        assert_eq!(p.block_sizes(), vec![2, 2, 1]);
        assert!(p.same_block(0, 4));
        assert!(!p.same_block(0, 1));
    }

    #[test]
    fn from_labels_groups_equal_values() {
        let p = Partition::from_labels(&[7, 3, 7, 9]);
        assert_eq!(p, Partition::new(vec![vec![0, 2], vec![1], vec![3]]));
    }

    #[test]
    fn overlapping_blocks_are_not_a_partition() {
        let p = Partition { blocks: vec![vec![0, 1], vec![1, 2]] };
        assert!(!p.is_partition_of(3));
    }

    #[test]
    fn composition_coarsens() {
        let upsilon = Partition::new(vec![vec![0], vec![1, 2], vec![3], vec![4, 5]]);
        let eta = Partition::new(vec![vec![0, 2], vec![1], vec![3]]);
        let c = upsilon.compose(&eta);
        assert_eq!(c, Partition::new(vec![vec![0, 3], vec![1, 2], vec![4, 5]]));
        assert!(upsilon.refines(&c));
        assert!(!c.refines(&upsilon));
    }

    #[test]
    fn kingman_on_one_block_is_empty() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert!(kingman_path(1, &mut rng).is_empty());
        assert!(kingman_path(0, &mut rng).is_empty());
    }

    #[test]
    fn kingman_first_merge_rate() {
        // k = 4 blocks: first merge ~ Exp(6), mean 1/6.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let reps = 20_000;
        let total: f64 = (0..reps).map(|_| kingman_path(4, &mut rng)[0].time).sum();
        let mean = total / reps as f64;
        let se = (1.0 / 6.0) / (reps as f64).sqrt();
        assert!((mean - 1.0 / 6.0).abs() < 4.0 * se, "mean {mean}");
    }

    proptest! {
        #[test]
        fn kingman_steps_coarsen_monotonically(k in 1usize..9, seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let steps = kingman_path(k, &mut rng);
            prop_assert_eq!(steps.len(), k.saturating_sub(1));
            let mut prev = Partition::singletons(k);
            let mut t = 0.0;
            for s in steps {
                prop_assert!(s.state.is_partition_of(k));
                prop_assert!(prev.refines(&s.state));
                prop_assert_eq!(s.state.len() + 1, prev.len());
                prop_assert!(s.time > t);
                t = s.time;
                prev = s.state;
            }
        }

        #[test]
        fn from_labels_is_always_a_partition(labels in proptest::collection::vec(0usize..5, 1..12)) {
            let p = Partition::from_labels(&labels);
            prop_assert!(p.is_partition_of(labels.len()));
            for i in 0..labels.len() {
                for j in 0..labels.len() {
                    prop_assert_eq!(p.same_block(i, j), labels[i] == labels[j]);
                }
            }
        }
    }
}
