//! In-context example selection under the primitive coverage principle:
//! every noun and verb of the test item appears in at least one selected
//! demonstration.

use std::collections::{BTreeSet, HashMap};

use compose_core::Seed;
use rand::seq::SliceRandom;
use rand::Rng;

use super::syntax::SentencePair;
use crate::error::{Error, Result};

/// Candidate demonstrations with a primitive -> item index.
#[derive(Clone, Debug)]
pub struct Pool {
    items: Vec<SentencePair>,
    index: HashMap<String, Vec<usize>>,
}

impl Pool {
    /// Builds the pool, dropping repeated source sentences.
    pub fn new(items: impl IntoIterator<Item = SentencePair>) -> Self {
        let mut seen = BTreeSet::new();
        let items: Vec<SentencePair> = items
            .into_iter()
            .filter(|p| seen.insert(p.source.clone()))
            .collect();
        let mut index: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, p) in items.iter().enumerate() {
            for prim in &p.primitives {
                index.entry(prim.clone()).or_default().push(i);
            }
        }
        Self { items, index }
    }

    pub fn items(&self) -> &[SentencePair] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Indices of `k` items covering `test`, restricted to `allowed` items
    /// and never repeating the test sentence. Returned in a seeded random
    /// order.
    pub fn select_indices<R: Rng + ?Sized>(
        &self,
        test: &SentencePair,
        k: usize,
        allowed: &dyn Fn(usize) -> bool,
        rng: &mut R,
    ) -> Result<Vec<usize>> {
        let usable = |i: usize| allowed(i) && self.items[i].source != test.source;
        let missing: Vec<String> = test
            .primitives
            .iter()
            .filter(|p| {
                !self
                    .index
                    .get(*p)
                    .is_some_and(|ids| ids.iter().any(|&i| usable(i)))
            })
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(Error::Uncovered(missing));
        }

        let mut order: Vec<usize> = (0..self.items.len()).collect();
        order.shuffle(rng);
        let mut rank = vec![0usize; order.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }

        let mut chosen: Vec<usize> = Vec::with_capacity(k);
        let mut uncovered: BTreeSet<&String> = test.primitives.iter().collect();
        while !uncovered.is_empty() {
            if chosen.len() == k {
                return Err(Error::Uncovered(uncovered.into_iter().cloned().collect()));
            }
            let mut best: Option<(usize, usize)> = None;
            for p in &uncovered {
                for &i in &self.index[*p] {
                    if !usable(i) || chosen.contains(&i) {
                        continue;
                    }
                    let gain = self.items[i]
                        .primitives
                        .iter()
                        .filter(|q| uncovered.contains(q))
                        .count();
                    let better = match best {
                        None => true,
                        Some((bi, bg)) => gain > bg || (gain == bg && rank[i] < rank[bi]),
                    };
                    if better {
                        best = Some((i, gain));
                    }
                }
            }
            let (i, _) = best.expect("every uncovered primitive has a usable item");
            for q in &self.items[i].primitives {
                uncovered.remove(q);
            }
            chosen.push(i);
        }

        for &i in &order {
            if chosen.len() == k {
                break;
            }
            if usable(i) && !chosen.contains(&i) {
                chosen.push(i);
            }
        }
        if chosen.len() < k {
            return Err(Error::Exhausted(format!(
                "pool has only {} usable items, need {k}",
                chosen.len()
            )));
        }
        chosen.sort_by_key(|&i| rank[i]);
        Ok(chosen)
    }
}

/// True when every primitive of `test` occurs in some demonstration.
pub fn covers(test: &SentencePair, demos: &[SentencePair]) -> bool {
    test.primitives
        .iter()
        .all(|p| demos.iter().any(|d| d.primitives.contains(p)))
}

/// `k` pool items covering the test item's primitives, deterministic per
/// seed.
pub fn select_in_context(
    test: &SentencePair,
    pool: &[SentencePair],
    k: usize,
    seed: Seed,
) -> Result<Vec<SentencePair>> {
    let pool = Pool::new(pool.iter().cloned());
    let idx = pool.select_indices(test, k, &|_| true, &mut seed.stream(0))?;
    Ok(idx.into_iter().map(|i| pool.items[i].clone()).collect())
}
