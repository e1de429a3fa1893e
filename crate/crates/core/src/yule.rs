//! The marked Yule forest with immigration.
//!
//! A forest is grown level by level with Hoppe's urn: going from `i` to
//! `i + 1` lines, a uniformly chosen line splits with probability
//! `i/(theta + i)`, otherwise a new tree is founded. A branch born at the
//! transition out of level `i1` and last alive at level `i2` covers levels
//! `i1 + 1..=i2`; the founder of the first tree has `i1 = 0`.

use std::io::Write;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{LevelSum, LevelWeights};
use crate::error::{Error, Result};
use crate::params::SweepParams;
use crate::partition::{kingman_path, Partition};
use crate::rng::replicate_rng;
use crate::stats::Estimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub start: usize,
    pub end: usize,
    /// `None` for the founder of a tree.
    pub parent: Option<usize>,
    pub tree: usize,
}

/// How many lines the forest has when growth stops.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopRule {
    /// Exactly `floor(2 alpha)` lines.
    #[default]
    Floor,
    /// A Poisson(2 alpha) number of lines, at least one.
    Poisson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YuleForest {
    branches: Vec<Branch>,
    leaves: Vec<usize>,
    final_level: usize,
    trees: usize,
}

impl YuleForest {
    /// Grows a forest to `final_level >= 1` lines.
    pub fn grow<R: Rng + ?Sized>(final_level: usize, theta: f64, rng: &mut R) -> Result<Self> {
        if final_level == 0 {
            return Err(Error::InvalidParams("a forest needs at least one line".into()));
        }
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParams(format!("theta must be >= 0, got {theta}")));
        }
        let mut branches = Vec::with_capacity(2 * final_level);
        branches.push(Branch { start: 0, end: final_level, parent: None, tree: 0 });
        let mut live = vec![0usize];
        let mut trees = 1;
        for i in 1..final_level {
            let fi = i as f64;
            if rng.random::<f64>() * (theta + fi) < fi {
                let slot = rng.random_range(0..live.len());
                let parent = live.swap_remove(slot);
                branches[parent].end = i;
                let tree = branches[parent].tree;
                for _ in 0..2 {
                    live.push(branches.len());
                    branches.push(Branch { start: i, end: final_level, parent: Some(parent), tree });
                }
            } else {
                live.push(branches.len());
                branches.push(Branch { start: i, end: final_level, parent: None, tree: trees });
                trees += 1;
            }
        }
        Ok(YuleForest { branches, leaves: live, final_level, trees })
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Branch ids alive at the final level.
    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    pub fn final_level(&self) -> usize {
        self.final_level
    }

    pub fn tree_count(&self) -> usize {
        self.trees
    }

    /// Checks level counts, parent links and leaf ends.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvariantViolation(m));
        let top = self.final_level;
        let mut delta = vec![0i64; top + 2];
        for (id, b) in self.branches.iter().enumerate() {
            if b.start >= b.end || b.end > top {
                return bad(format!("branch {id} spans ({}, {}]", b.start, b.end));
            }
            if let Some(p) = b.parent {
                let pb = &self.branches[p];
                if pb.end != b.start || pb.tree != b.tree {
                    return bad(format!("branch {id} does not start where parent {p} ends"));
                }
            } else if b.start == 0 && id != 0 {
                return bad(format!("only the first founder starts at level 0, not {id}"));
            }
            delta[b.start + 1] += 1;
            delta[b.end + 1] -= 1;
        }
        let mut alive = 0;
        for (i, d) in delta.iter().enumerate().take(top + 1).skip(1) {
            alive += d;
            if alive != i as i64 {
                return bad(format!("{alive} branches alive at level {i}"));
            }
        }
        if self.leaves.len() != top || self.leaves.iter().any(|&l| self.branches[l].end != top) {
            return bad("leaves do not match the final level".into());
        }
        Ok(())
    }

    /// Branch ids from `leaf` up to its tree's founder.
    fn lineage(&self, leaf: usize) -> Vec<usize> {
        let mut out = vec![leaf];
        let mut cur = leaf;
        while let Some(p) = self.branches[cur].parent {
            out.push(p);
            cur = p;
        }
        out
    }

    /// One line per branch: `id parent start end marked`.
    pub fn write_text<W: Write>(&self, sample: Option<&MarkedSample>, mut out: W) -> Result<()> {
        writeln!(out, "# branch parent start end marked")?;
        for (id, b) in self.branches.iter().enumerate() {
            let parent = b.parent.map_or_else(|| "root".to_string(), |p| p.to_string());
            let marked = sample.is_some_and(|s| s.marks.contains(&id));
            writeln!(out, "{id} {parent} {} {} {}", b.start, b.end, u8::from(marked))?;
        }
        Ok(())
    }
}

/// Grows the forest for selection `alpha`: `floor(2 alpha)` lines.
pub fn grow_forest<R: Rng + ?Sized>(alpha: f64, theta: f64, rng: &mut R) -> Result<YuleForest> {
    YuleForest::grow(crate::analytics::yule_levels(alpha)?, theta, rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkedSample {
    /// Sampled leaf branch ids; sample label `k` is `leaves[k]`.
    pub leaves: Vec<usize>,
    /// Branches below some pairwise common ancestor of the sample.
    pub subtree: Vec<usize>,
    pub marks: Vec<usize>,
    /// Labels grouped by tree.
    pub partition_tilde: Partition,
    /// Labels grouped by tree with no mark between them.
    pub partition: Partition,
}

/// Draws `n` distinct leaves and marks each subtree branch `(i1, i2)`
/// independently with probability `1 - p(i1, i2)`.
pub fn sample_and_mark<R: Rng + ?Sized>(
    forest: &YuleForest,
    n: usize,
    weights: &LevelWeights,
    rng: &mut R,
) -> Result<MarkedSample> {
    let top = forest.final_level;
    if n > top {
        return Err(Error::SampleTooLarge { requested: n, available: top });
    }
    if weights.levels() < top {
        return Err(Error::InvalidArgument(format!("weights cover {} levels, forest has {top}", weights.levels())));
    }
    let leaves: Vec<usize> = sample_indices(rng, top, n).into_iter().map(|k| forest.leaves[k]).collect();
    let lineages: Vec<Vec<usize>> = leaves.iter().map(|&l| forest.lineage(l)).collect();

    // a branch is in the subtree if it lies strictly below the meeting point
    // of two sampled lineages
    let mut subtree: Vec<usize> = Vec::new();
    let mut pair_below: Vec<(usize, usize, usize)> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let (la, lb) = (&lineages[a], &lineages[b]);
            if forest.branches[leaves[a]].tree != forest.branches[leaves[b]].tree {
                continue;
            }
            // lineages end at the shared founder; strip the common suffix
            let common = la.iter().rev().zip(lb.iter().rev()).take_while(|(x, y)| x == y).count();
            let (da, db) = (la.len() - common, lb.len() - common);
            subtree.extend_from_slice(&la[..da]);
            subtree.extend_from_slice(&lb[..db]);
            pair_below.push((a, b, da.max(db)));
        }
    }
    subtree.sort_unstable();
    subtree.dedup();

    let mut marks = Vec::new();
    for &id in &subtree {
        let br = &forest.branches[id];
        if rng.random::<f64>() >= weights.p(br.start, br.end)? {
            marks.push(id);
        }
    }

    let tree_labels: Vec<usize> = leaves.iter().map(|&l| forest.branches[l].tree).collect();
    let partition_tilde = Partition::from_labels(&tree_labels);

    let mut uf: Vec<usize> = (0..n).collect();
    fn find(uf: &mut [usize], mut i: usize) -> usize {
        while uf[i] != i {
            uf[i] = uf[uf[i]];
            i = uf[i];
        }
        i
    }
    for &(a, b, _) in &pair_below {
        let (la, lb) = (&lineages[a], &lineages[b]);
        let common = la.iter().rev().zip(lb.iter().rev()).take_while(|(x, y)| x == y).count();
        let below = la[..la.len() - common].iter().chain(&lb[..lb.len() - common]);
        let mut separated = false;
        for id in below {
            if marks.binary_search(id).is_ok() {
                separated = true;
                break;
            }
        }
        if !separated {
            let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
            uf[ra] = rb;
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut uf, i)).collect();
    let partition = Partition::from_labels(&roots);

    Ok(MarkedSample { leaves, subtree, marks, partition_tilde, partition })
}

/// One state of the composed genealogy: `partition` holds from `time` on.
#[derive(Debug, Clone, PartialEq)]
pub struct GenealogyStep {
    pub time: f64,
    pub partition: Partition,
}

/// Runs a Kingman coalescent on the blocks of the marked partition and
/// returns the composed path, starting with the marked partition at time 0.
pub fn compose_with_kingman<R: Rng + ?Sized>(sample: &MarkedSample, rng: &mut R) -> Vec<GenealogyStep> {
    let upsilon = &sample.partition;
    let mut out = vec![GenealogyStep { time: 0.0, partition: upsilon.clone() }];
    for step in kingman_path(upsilon.len(), rng) {
        out.push(GenealogyStep { time: step.time, partition: upsilon.compose(&step.state) });
    }
    out
}

/// Repeated forest draws for a fixed parameter set.
#[derive(Debug, Clone)]
pub struct YuleSampler {
    alpha: f64,
    theta: f64,
    weights: LevelWeights,
    stop: StopRule,
}

impl YuleSampler {
    pub fn new(alpha: f64, theta: f64, gamma: f64, sum: LevelSum) -> Result<Self> {
        let weights = LevelWeights::for_sweep(alpha, theta, gamma, sum)?;
        Ok(YuleSampler { alpha, theta, weights, stop: StopRule::Floor })
    }

    pub fn from_params(params: &SweepParams, sum: LevelSum) -> Result<Self> {
        Self::new(params.alpha(), params.theta(), params.gamma(), sum)
    }

    pub fn stop_rule(mut self, stop: StopRule) -> Result<Self> {
        if stop == StopRule::Poisson {
            // room for the Poisson tail
            let cap = (2.0 * self.alpha + 12.0 * (2.0 * self.alpha).sqrt() + 20.0) as usize;
            self.weights = LevelWeights::new(cap, self.theta, self.weights.intensity(), self.weights.convention())?;
        }
        self.stop = stop;
        Ok(self)
    }

    pub fn weights(&self) -> &LevelWeights {
        &self.weights
    }

    pub fn grow<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<YuleForest> {
        let top = match self.stop {
            StopRule::Floor => self.weights.levels(),
            StopRule::Poisson => {
                let draw: f64 =
                    Poisson::new(2.0 * self.alpha).map_err(|e| Error::InvalidParams(e.to_string()))?.sample(rng);
                (draw as usize).clamp(1, self.weights.levels())
            }
        };
        YuleForest::grow(top, self.theta, rng)
    }

    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<MarkedSample> {
        let forest = self.grow(rng)?;
        sample_and_mark(&forest, n, &self.weights, rng)
    }

    /// Fraction of draws in which a sampled pair forms one marked block.
    pub fn pair_identity(&self, draws: usize, seed: u64, cell: u32) -> Result<Estimate> {
        if draws == 0 {
            return Err(Error::InvalidArgument("need at least one draw".into()));
        }
        let hits = (0..draws)
            .into_par_iter()
            .map(|i| {
                let mut rng = replicate_rng(seed, cell, i as u32);
                self.draw(2, &mut rng).map(|s| usize::from(s.partition.len() == 1))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Estimate::proportion(hits.iter().sum(), draws))
    }
}

/// Monte Carlo estimate of the probability that a pair shares a block of the
/// marked partition, with marks `p(i1, i2)` summed over `i1 + 1..=i2`.
pub fn pair_identity_prob_mc(params: &SweepParams, draws: usize) -> Result<Estimate> {
    YuleSampler::from_params(params, LevelSum::Exclusive)?.pair_identity(draws, params.seed(), 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::pair_partition_prob_exact_with;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn no_immigration_gives_one_tree() {
        let f = grow_forest(50.0, 0.0, &mut rng(1)).unwrap();
        assert_eq!(f.tree_count(), 1);
        f.validate().unwrap();
        let w = LevelWeights::new(100, 0.0, 0.0, LevelSum::Exclusive).unwrap();
        let s = sample_and_mark(&f, 5, &w, &mut rng(2)).unwrap();
        assert_eq!(s.partition_tilde.len(), 1);
        assert_eq!(s.partition, s.partition_tilde);
        assert!(s.marks.is_empty());
    }

    #[test]
    fn single_line_forest() {
        let f = YuleForest::grow(1, 3.0, &mut rng(0)).unwrap();
        f.validate().unwrap();
        assert_eq!(f.leaves(), &[0]);
        assert!(YuleForest::grow(0, 1.0, &mut rng(0)).is_err());
    }

    #[test]
    fn oversized_sample_is_rejected() {
        let f = YuleForest::grow(10, 1.0, &mut rng(3)).unwrap();
        let w = LevelWeights::new(10, 1.0, 0.1, LevelSum::Exclusive).unwrap();
        assert!(matches!(sample_and_mark(&f, 11, &w, &mut rng(4)), Err(Error::SampleTooLarge { .. })));
    }

    #[test]
    fn pair_shares_tree_with_ewens_probability() {
        let theta = 1.0;
        let reps = 4000;
        let w = LevelWeights::new(200, theta, 0.0, LevelSum::Exclusive).unwrap();
        let mut r = rng(5);
        let hits = (0..reps)
            .filter(|_| {
                let f = YuleForest::grow(200, theta, &mut r).unwrap();
                sample_and_mark(&f, 2, &w, &mut r).unwrap().partition_tilde.len() == 1
            })
            .count();
        let e = Estimate::proportion(hits, reps);
        assert!(e.within(0.5, 4.0), "{e:?}");
    }

    #[test]
    fn tree_count_mean_is_harmonic() {
        let reps = 2000;
        let mut r = rng(6);
        let counts: Vec<f64> =
            (0..reps).map(|_| YuleForest::grow(2000, 1.0, &mut r).unwrap().tree_count() as f64).collect();
        let e = Estimate::mean_of(&counts);
        let h: f64 = (1..=2000).map(|i| 1.0 / i as f64).sum();
        assert!((h - 8.18).abs() < 0.01);
        assert!(e.within(h, 4.0), "{e:?} vs {h}");
    }

    #[test]
    fn mark_free_branches_never_marked() {
        // a huge intensity marks every branch that spans a level
        let f = YuleForest::grow(30, 0.0, &mut rng(7)).unwrap();
        let w = LevelWeights::new(30, 0.0, 1e6, LevelSum::Exclusive).unwrap();
        let s = sample_and_mark(&f, 30, &w, &mut rng(8)).unwrap();
        assert_eq!(s.marks, s.subtree);
        assert_eq!(s.partition.len(), 30);
    }

    #[test]
    fn mc_matches_exact_sum_small_forest() {
        let sampler = YuleSampler::new(20.0, 0.5, 0.8, LevelSum::Exclusive).unwrap();
        let exact = pair_partition_prob_exact_with(sampler.weights()).unwrap();
        let e = sampler.pair_identity(20_000, 11, 0).unwrap();
        // the exact sum includes one extra level transition, an O(1/alpha^2) term
        assert!(e.within(exact, 4.0) || (e.mean - exact).abs() < 0.003, "{e:?} vs {exact}");
    }

    #[test]
    fn pair_identity_trivial_limits() {
        let p = SweepParams::new(100.0, 0.0).unwrap().with_seed(3);
        let e = pair_identity_prob_mc(&p, 200).unwrap();
        assert_eq!(e.mean, 1.0);
        let p = SweepParams::new(100.0, 1e6).unwrap();
        assert!(pair_identity_prob_mc(&p, 200).unwrap().mean < 0.05);
    }

    #[test]
    fn poisson_stop_varies_line_count() {
        let s = YuleSampler::new(50.0, 0.5, 0.0, LevelSum::Exclusive).unwrap().stop_rule(StopRule::Poisson).unwrap();
        let mut r = rng(9);
        let sizes: Vec<usize> = (0..200).map(|_| s.grow(&mut r).unwrap().final_level()).collect();
        let mean = sizes.iter().sum::<usize>() as f64 / sizes.len() as f64;
        assert!((mean - 100.0).abs() < 3.0, "{mean}");
        assert!(sizes.iter().any(|&k| k != sizes[0]));
    }

    #[test]
    fn kingman_composition_coarsens_and_ends_in_one_block() {
        let s = YuleSampler::new(50.0, 1.0, 0.5, LevelSum::Exclusive).unwrap();
        let mut r = rng(10);
        let sample = s.draw(6, &mut r).unwrap();
        let path = compose_with_kingman(&sample, &mut r);
        assert_eq!(path.len(), sample.partition.len());
        assert_eq!(path.last().unwrap().partition.len(), 1);
        for w in path.windows(2) {
            assert!(sample.partition.refines(&w[1].partition));
            assert!(w[0].partition.refines(&w[1].partition));
        }
    }

    #[test]
    fn text_export_lists_every_branch() {
        let f = YuleForest::grow(8, 1.0, &mut rng(12)).unwrap();
        let w = LevelWeights::new(8, 1.0, 0.3, LevelSum::Exclusive).unwrap();
        let s = sample_and_mark(&f, 4, &w, &mut rng(13)).unwrap();
        let mut buf = Vec::new();
        f.write_text(Some(&s), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), f.branches().len() + 1);
        assert!(text.lines().nth(1).unwrap().starts_with("0 root 0 "));
    }

    proptest! {
        #[test]
        fn forests_are_well_formed(top in 1usize..300, theta in 0.0f64..5.0, seed in any::<u64>()) {
            let f = YuleForest::grow(top, theta, &mut rng(seed)).unwrap();
            prop_assert!(f.validate().is_ok());
            prop_assert_eq!(f.leaves().len(), top);
        }

        #[test]
        fn marked_partition_refines_tree_partition(
            top in 2usize..200, n in 1usize..8, theta in 0.0f64..3.0,
            intensity in 0.0f64..2.0, seed in any::<u64>()
        ) {
            let n = n.min(top);
            let mut r = rng(seed);
            let f = YuleForest::grow(top, theta, &mut r).unwrap();
            let w = LevelWeights::new(top, theta, intensity, LevelSum::Exclusive).unwrap();
            let s = sample_and_mark(&f, n, &w, &mut r).unwrap();
            prop_assert!(s.partition.is_partition_of(n));
            prop_assert!(s.partition_tilde.is_partition_of(n));
            prop_assert!(s.partition.refines(&s.partition_tilde));
            prop_assert!(s.marks.iter().all(|m| s.subtree.contains(m)));
        }
    }
}
