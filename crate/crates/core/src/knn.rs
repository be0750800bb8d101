//! k-nearest-neighbor voting over retrieved examples.
//!
//! The first `k` neighbors are taken, the selection is widened through every
//! neighbor tied with the k-th one, and the result is cut at a hard cap of
//! ten. Equal vote counts are resolved in favor of the label that appears
//! earliest in the ranking.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::annotation::Encoder;
use crate::error::{Result, TamError};
use crate::similarity::{Neighbor, SuffixIndex};
use crate::taxonomy::TamCategory;

/// Upper bound on the number of neighbors that vote.
pub const MAX_NEIGHBORS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KnnConfig {
    pub k: usize,
    pub cap: usize,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig {
            k: 5,
            cap: MAX_NEIGHBORS,
        }
    }
}

impl KnnConfig {
    pub fn new(k: usize) -> Self {
        KnnConfig {
            k,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(TamError::InvalidArgument("k must be positive".into()));
        }
        if self.cap == 0 {
            return Err(TamError::InvalidArgument("cap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VoteTrace {
    pub k_requested: usize,
    pub neighbors_used: Vec<Neighbor>,
    pub tally: BTreeMap<TamCategory, usize>,
    pub winner: TamCategory,
    pub tie_broken: bool,
}

impl VoteTrace {
    pub fn best_similarity(&self) -> usize {
        self.neighbors_used.first().map_or(0, |n| n.similarity.value())
    }
}

/// Selection with the default cap of ten.
pub fn select_neighbors(ranked: &[Neighbor], k: usize) -> Result<Vec<Neighbor>> {
    select_neighbors_capped(ranked, k, MAX_NEIGHBORS)
}

/// `ranked` must already be in ranking order.
pub fn select_neighbors_capped(ranked: &[Neighbor], k: usize, cap: usize) -> Result<Vec<Neighbor>> {
    if ranked.is_empty() {
        return Err(TamError::EmptyNeighborList);
    }
    if k == 0 || cap == 0 {
        return Err(TamError::InvalidArgument("k and cap must be positive".into()));
    }
    let mut end = k.min(ranked.len());
    let boundary = ranked[end - 1].similarity;
    while end < ranked.len() && ranked[end].similarity == boundary {
        end += 1;
    }
    end = end.min(cap);
    Ok(ranked[..end].to_vec())
}

/// Majority vote; ties go to the label of the earliest neighbor among the
/// labels sharing the top count.
pub fn vote(k_requested: usize, selected: &[Neighbor]) -> Result<VoteTrace> {
    let first = selected.first().ok_or(TamError::EmptyNeighborList)?;
    let mut tally: BTreeMap<TamCategory, usize> = BTreeMap::new();
    for n in selected {
        *tally.entry(n.label).or_insert(0) += 1;
    }
    let top = tally.values().copied().max().unwrap_or(0);
    let leaders = tally.values().filter(|&&c| c == top).count();
    let winner = selected
        .iter()
        .map(|n| n.label)
        .find(|l| tally[l] == top)
        .unwrap_or(first.label);
    Ok(VoteTrace {
        k_requested,
        neighbors_used: selected.to_vec(),
        tally,
        winner,
        tie_broken: leaders > 1,
    })
}

/// Retrieve, select and vote for one sentence.
pub fn classify(index: &SuffixIndex, encoder: &Encoder<'_>, sentence: &str, config: KnnConfig) -> Result<VoteTrace> {
    classify_excluding(index, encoder, sentence, config, None)
}

/// As [`classify`], with one corpus ordinal hidden from retrieval.
pub fn classify_excluding(
    index: &SuffixIndex,
    encoder: &Encoder<'_>,
    sentence: &str,
    config: KnnConfig,
    exclude: Option<usize>,
) -> Result<VoteTrace> {
    config.validate()?;
    if index.is_empty() {
        return Err(TamError::EmptyCorpus);
    }
    let query = encoder.encode(sentence)?;
    let ranked = index.retrieve(&query, config.cap, exclude)?;
    let selected = select_neighbors_capped(&ranked, config.k, config.cap)?;
    vote(config.k, &selected)
}
