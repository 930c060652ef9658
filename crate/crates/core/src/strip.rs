//! Edge-removal subsets of a parent hypergraph.
//!
//! Subsets are named by the set of removed edge indices and enumerated in
//! colexicographic order of that set: `{c0 < c1 < ... < c(k-1)}` has rank
//! `C(c0,1) + C(c1,2) + ... + C(c(k-1),k)`. Windows are half-open rank
//! ranges `[start, end)` in that order, so disjoint windows split a run
//! across workers.

use std::collections::HashSet;
use std::time::{SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::mmp::{is_connected, renormalize, serialize_mmp, Hypergraph};

#[derive(Debug, Error, PartialEq)]
pub enum StripError {
    #[error("cannot remove {k} edges from a hypergraph with {n}")]
    TooManyRemoved { k: usize, n: usize },
    #[error("window {start}:{end} outside 0:{total}")]
    Window { start: u128, end: u128, total: u128 },
    #[error("increment must be a finite number >= 1, got {0}")]
    Increment(f64),
    #[error("C({n},{k}) does not fit in 128 bits")]
    Overflow { n: usize, k: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionMode {
    /// Keep candidate `t` when a real accumulator stepping by the increment
    /// crosses it: ranks 0, ⌈i⌉, ⌈2i⌉, ... of the candidate stream.
    Uniform,
    /// Keep each candidate independently with probability `1/i`.
    Randomized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedProvenance {
    User,
    Entropy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerSeed {
    pub seed: u64,
    pub provenance: SeedProvenance,
}

impl SamplerSeed {
    pub fn user(seed: u64) -> Self {
        SamplerSeed {
            seed,
            provenance: SeedProvenance::User,
        }
    }

    /// Hash of wall-clock time, process id and process CPU time. The value
    /// is logged so the run can be repeated with `user`.
    pub fn from_entropy() -> Self {
        let wall = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or(0);
        let mut cpu = libc::timespec {
            tv_sec: 0,
            tv_nsec: 0,
        };
        // SAFETY: clock_gettime only writes into the provided timespec.
        unsafe { libc::clock_gettime(libc::CLOCK_PROCESS_CPUTIME_ID, &mut cpu) };
        let mut hasher = Sha256::new();
        hasher.update(wall.to_le_bytes());
        hasher.update(std::process::id().to_le_bytes());
        hasher.update(cpu.tv_sec.to_le_bytes());
        hasher.update(cpu.tv_nsec.to_le_bytes());
        let digest = hasher.finalize();
        let seed = u64::from_le_bytes(digest[..8].try_into().unwrap());
        log::info!("random seed {seed} (pass --seed {seed} to repeat)");
        SamplerSeed {
            seed,
            provenance: SeedProvenance::Entropy,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StripPlan {
    /// Number of edges removed.
    pub k: usize,
    /// Half-open colex rank window.
    pub window: Option<(u128, u128)>,
    pub increment: f64,
    pub mode: SelectionMode,
    pub connected_only: bool,
    pub renormalize: bool,
    /// Needed for randomized mode; drawn from entropy when absent.
    pub seed: Option<SamplerSeed>,
}

impl StripPlan {
    pub fn remove(k: usize) -> Self {
        StripPlan {
            k,
            window: None,
            increment: 1.0,
            mode: SelectionMode::Uniform,
            connected_only: false,
            renormalize: false,
            seed: None,
        }
    }

    pub fn window(mut self, start: u128, end: u128) -> Self {
        self.window = Some((start, end));
        self
    }

    pub fn increment(mut self, i: f64, mode: SelectionMode) -> Self {
        self.increment = i;
        self.mode = mode;
        self
    }

    pub fn seed(mut self, seed: SamplerSeed) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn connected_only(mut self, on: bool) -> Self {
        self.connected_only = on;
        self
    }

    pub fn renormalize(mut self, on: bool) -> Self {
        self.renormalize = on;
        self
    }

    pub(crate) fn thinner(&self) -> Result<Thinner, StripError> {
        if !(self.increment.is_finite() && self.increment >= 1.0) {
            return Err(StripError::Increment(self.increment));
        }
        let rng = match self.mode {
            SelectionMode::Uniform => None,
            SelectionMode::Randomized => {
                Some(self.seed.unwrap_or_else(SamplerSeed::from_entropy).rng())
            }
        };
        Ok(Thinner {
            increment: self.increment,
            next: 0.0,
            count: 0,
            rng,
        })
    }
}

pub(crate) struct Thinner {
    increment: f64,
    next: f64,
    count: u64,
    rng: Option<ChaCha8Rng>,
}

impl Thinner {
    pub(crate) fn keep(&mut self) -> bool {
        if self.increment == 1.0 {
            return true;
        }
        if let Some(rng) = &mut self.rng {
            return rng.gen::<f64>() < 1.0 / self.increment;
        }
        let t = self.count as f64;
        self.count += 1;
        if t >= self.next {
            self.next += self.increment;
            true
        } else {
            false
        }
    }
}

/// Exact `C(n, k)` in 128 bits, `None` on overflow.
pub fn binomial_u128(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// The k-subset of `0..n` with the given colex rank.
pub fn colex_unrank(mut rank: u128, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for i in (0..k).rev() {
        // Largest c with C(c, i+1) <= rank.
        let mut c = i;
        while binomial_u128(c + 1, i + 1).is_some_and(|b| b <= rank) {
            c += 1;
        }
        rank -= binomial_u128(c, i + 1).unwrap();
        out[i] = c;
    }
    out
}

pub fn colex_rank(subset: &[usize]) -> u128 {
    subset
        .iter()
        .enumerate()
        .map(|(i, &c)| binomial_u128(c, i + 1).unwrap())
        .sum()
}

/// Advances to the colex successor; false when `subset` was the last one.
fn colex_next(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    for i in 0..k {
        let limit = if i + 1 < k { subset[i + 1] } else { n };
        if subset[i] + 1 < limit {
            subset[i] += 1;
            for (j, c) in subset[..i].iter_mut().enumerate() {
                *c = j;
            }
            return true;
        }
    }
    false
}

/// Child hypergraph together with the parent edge indices that were removed.
#[derive(Clone, Debug)]
pub struct Subset {
    pub removed: Vec<usize>,
    pub hypergraph: Hypergraph,
}

/// Streams the edge-removal subsets of `parent` selected by `plan`.
pub fn enumerate_subsets<'a>(
    parent: &'a Hypergraph,
    plan: &StripPlan,
) -> Result<SubsetIter<'a>, StripError> {
    let n = parent.num_edges();
    let k = plan.k;
    if k > n {
        return Err(StripError::TooManyRemoved { k, n });
    }
    let total = binomial_u128(n, k).ok_or(StripError::Overflow { n, k })?;
    let (start, end) = plan.window.unwrap_or((0, total));
    if start > end || end > total {
        return Err(StripError::Window { start, end, total });
    }
    Ok(SubsetIter {
        parent,
        n,
        current: colex_unrank(start, k),
        rank: start,
        end,
        thinner: plan.thinner()?,
        connected_only: plan.connected_only,
        renormalize: plan.renormalize,
        mask: vec![false; n],
    })
}

pub struct SubsetIter<'a> {
    parent: &'a Hypergraph,
    n: usize,
    current: Vec<usize>,
    rank: u128,
    end: u128,
    thinner: Thinner,
    connected_only: bool,
    renormalize: bool,
    mask: Vec<bool>,
}

impl SubsetIter<'_> {
    /// Rank of the next candidate in colex order.
    pub fn rank(&self) -> u128 {
        self.rank
    }
}

impl Iterator for SubsetIter<'_> {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        while self.rank < self.end {
            let removed = self.current.clone();
            self.rank += 1;
            if self.rank < self.end {
                colex_next(&mut self.current, self.n);
            }
            if !self.thinner.keep() {
                continue;
            }
            for &i in &removed {
                self.mask[i] = true;
            }
            let child = self.parent.retain_edges(|i| !self.mask[i]);
            for &i in &removed {
                self.mask[i] = false;
            }
            if self.connected_only && !is_connected(&child) {
                continue;
            }
            let hypergraph = if self.renormalize {
                renormalize(&child)
            } else {
                child
            };
            return Some(Subset {
                removed,
                hypergraph,
            });
        }
        None
    }
}

/// One child per (input, removed edge), thinned by the plan's increment with
/// a single accumulator running across the whole batch. Children whose
/// renormalized MMP line was already emitted are dropped. `plan.k` and
/// `plan.window` are ignored.
pub fn strip_one_each<I>(
    hs: I,
    plan: &StripPlan,
) -> Result<impl Iterator<Item = Hypergraph>, StripError>
where
    I: IntoIterator<Item = Hypergraph>,
{
    let mut thinner = plan.thinner()?;
    let connected_only = plan.connected_only;
    let renorm = plan.renormalize;
    let mut seen = HashSet::new();
    Ok(hs.into_iter().flat_map(move |h| {
        let mut out = Vec::new();
        for i in 0..h.num_edges() {
            if !thinner.keep() {
                continue;
            }
            let child = h.without_edge(i);
            if connected_only && !is_connected(&child) {
                continue;
            }
            let normal = renormalize(&child);
            if !seen.insert(serialize_mmp(&normal)) {
                continue;
            }
            out.push(if renorm { normal } else { child });
        }
        out
    }))
}

/// `count` independent uniformly random subsets that each remove `k` edges
/// of `h`, drawn with replacement.
pub fn sample_subsets(
    h: &Hypergraph,
    k: usize,
    count: usize,
    seed: SamplerSeed,
) -> Result<impl Iterator<Item = Subset> + '_, StripError> {
    let n = h.num_edges();
    if k > n {
        return Err(StripError::TooManyRemoved { k, n });
    }
    let mut rng = seed.rng();
    Ok((0..count).map(move |_| {
        let mut removed = rand::seq::index::sample(&mut rng, n, k).into_vec();
        removed.sort_unstable();
        let mut mask = vec![false; n];
        for &i in &removed {
            mask[i] = true;
        }
        Subset {
            hypergraph: h.retain_edges(|i| !mask[i]),
            removed,
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: u32) -> Hypergraph {
        Hypergraph::from_index_lists((0..n).map(|i| vec![3 * i, 3 * i + 1, 3 * i + 2, 3 * i + 3]))
            .unwrap()
    }

    #[test]
    fn colex_rank_round_trip() {
        let n = 9;
        let mut s = vec![0, 1, 2];
        let mut r = 0;
        loop {
            assert_eq!(colex_rank(&s), r);
            assert_eq!(colex_unrank(r, 3), s);
            r += 1;
            if !colex_next(&mut s, n) {
                break;
            }
        }
        assert_eq!(r, binomial_u128(9, 3).unwrap());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_u128(75, 2), Some(2775));
        assert_eq!(binomial_u128(5, 0), Some(1));
        assert_eq!(binomial_u128(3, 4), Some(0));
        assert!(binomial_u128(75, 37).is_some());
    }

    #[test]
    fn k_zero_is_identity() {
        let h = chain(5);
        let out: Vec<_> = enumerate_subsets(&h, &StripPlan::remove(0))
            .unwrap()
            .collect();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].hypergraph, h);
    }

    #[test]
    fn windows_partition_the_stream() {
        let h = chain(8);
        let all: Vec<_> = enumerate_subsets(&h, &StripPlan::remove(3))
            .unwrap()
            .map(|s| s.removed)
            .collect();
        let mut parts = Vec::new();
        for (a, b) in [(0, 20), (20, 21), (21, 56)] {
            parts.extend(
                enumerate_subsets(&h, &StripPlan::remove(3).window(a, b))
                    .unwrap()
                    .map(|s| s.removed),
            );
        }
        assert_eq!(all, parts);
        assert!(enumerate_subsets(&h, &StripPlan::remove(3).window(0, 57)).is_err());
        assert!(enumerate_subsets(&h, &StripPlan::remove(9)).is_err());
    }

    #[test]
    fn uniform_increment_two_keeps_even_ranks() {
        let h = chain(20);
        let plan = StripPlan::remove(1).increment(2.0, SelectionMode::Uniform);
        let kept: Vec<_> = enumerate_subsets(&h, &plan)
            .unwrap()
            .map(|s| s.removed[0])
            .collect();
        assert_eq!(kept, (0..20).step_by(2).collect::<Vec<_>>());
        let children: Vec<_> = strip_one_each([h], &plan).unwrap().collect();
        assert_eq!(children.len(), 10);
    }

    #[test]
    fn fractional_increment_count() {
        let h = chain(10);
        let plan = StripPlan::remove(2).increment(2.5, SelectionMode::Uniform);
        let n = enumerate_subsets(&h, &plan).unwrap().count();
        // 45 candidates: ranks 0, 2.5, 5, ... up to 42.5 → 18 kept.
        assert_eq!(n, 18);
    }

    #[test]
    fn connected_filter_on_chain() {
        // Removing an interior edge of a chain disconnects it.
        let h = chain(5);
        let plan = StripPlan::remove(1).connected_only(true);
        let kept: Vec<_> = enumerate_subsets(&h, &plan)
            .unwrap()
            .map(|s| s.removed[0])
            .collect();
        assert_eq!(kept, vec![0, 4]);
    }

    #[test]
    fn random_modes_are_seeded() {
        let h = chain(12);
        let plan = StripPlan::remove(2)
            .increment(3.0, SelectionMode::Randomized)
            .seed(SamplerSeed::user(42));
        let a: Vec<_> = enumerate_subsets(&h, &plan)
            .unwrap()
            .map(|s| s.removed)
            .collect();
        let b: Vec<_> = enumerate_subsets(&h, &plan)
            .unwrap()
            .map(|s| s.removed)
            .collect();
        assert_eq!(a, b);
        let s1: Vec<_> = sample_subsets(&h, 4, 50, SamplerSeed::user(7))
            .unwrap()
            .map(|s| s.removed)
            .collect();
        let s2: Vec<_> = sample_subsets(&h, 4, 50, SamplerSeed::user(7))
            .unwrap()
            .map(|s| s.removed)
            .collect();
        assert_eq!(s1, s2);
        assert!(s1
            .iter()
            .all(|r| r.len() == 4 && r.windows(2).all(|w| w[0] < w[1])));
    }

    #[test]
    fn strip_one_each_drops_exact_duplicates() {
        // The second copy contributes nothing, and removing either end edge
        // of a chain gives the same renormalized line.
        let children: Vec<_> = strip_one_each([chain(4), chain(4)], &StripPlan::remove(1))
            .unwrap()
            .collect();
        assert_eq!(children.len(), 3);
    }
}
