//! Suffix similarity and nearest-example retrieval.
//!
//! The similarity of two unit sequences is the number of units they share
//! at their ends. [`SuffixIndex`] keeps every example sorted by its
//! reversed unit sequence, so the examples sharing the longest suffix with
//! a query sit next to the query's insertion point and the shared length
//! only shrinks while walking away from it.

use std::cmp::Ordering;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::annotation::{Encoder, Method, Unit, UnitSequence};
use crate::corpus::Corpus;
use crate::error::{Result, TamError};
use crate::taxonomy::TamCategory;

/// Number of matching trailing units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimilarityScore(pub usize);

impl SimilarityScore {
    pub fn value(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Neighbor {
    pub ordinal: usize,
    pub similarity: SimilarityScore,
    pub label: TamCategory,
}

/// Ranking order: higher similarity first, then smaller ordinal.
pub fn rank_order(a: &Neighbor, b: &Neighbor) -> Ordering {
    b.similarity.cmp(&a.similarity).then(a.ordinal.cmp(&b.ordinal))
}

fn common_suffix(a: &[Unit], b: &[Unit]) -> usize {
    a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count()
}

pub fn suffix_similarity(a: &UnitSequence, b: &UnitSequence) -> Result<SimilarityScore> {
    if a.method() != b.method() {
        return Err(TamError::MethodMismatch {
            expected: a.method(),
            found: b.method(),
        });
    }
    Ok(SimilarityScore(common_suffix(a.units(), b.units())))
}

fn cmp_reversed(a: &[Unit], b: &[Unit]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub ordinal: usize,
    pub label: TamCategory,
    pub units: Vec<Unit>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixIndex {
    method: Method,
    entries: Vec<IndexEntry>,
    /// `adjacent[i]` is the shared suffix length of entries `i` and `i + 1`.
    adjacent: Vec<usize>,
}

const SNAPSHOT_FORMAT: &str = "tamex-suffix-index";
const SNAPSHOT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Snapshot {
    format: String,
    version: u32,
    method: Method,
    entries: Vec<IndexEntry>,
}

impl SuffixIndex {
    /// Sorts entries by reversed unit sequence; equal sequences keep
    /// ordinal order.
    pub fn from_entries(method: Method, mut entries: Vec<IndexEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(TamError::EmptyCorpus);
        }
        entries.sort_by(|a, b| cmp_reversed(&a.units, &b.units).then(a.ordinal.cmp(&b.ordinal)));
        let adjacent = entries
            .windows(2)
            .map(|w| common_suffix(&w[0].units, &w[1].units))
            .collect();
        Ok(SuffixIndex {
            method,
            entries,
            adjacent,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn entries(&self) -> &[IndexEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The `cap` best neighbors of `query`, ranked by [`rank_order`].
    /// `exclude` removes one ordinal from consideration (leave-one-out).
    pub fn retrieve(&self, query: &UnitSequence, cap: usize, exclude: Option<usize>) -> Result<Vec<Neighbor>> {
        if query.method() != self.method {
            return Err(TamError::MethodMismatch {
                expected: self.method,
                found: query.method(),
            });
        }
        let available = self.len() - usize::from(exclude.is_some_and(|o| self.contains(o)));
        if available == 0 {
            return Err(TamError::EmptyIndex);
        }
        let q = query.units();
        let n = self.entries.len();
        let pos = self
            .entries
            .partition_point(|e| cmp_reversed(&e.units, q) == Ordering::Less);

        // Cursors walk outward from the insertion point, each carrying the
        // shared suffix length of the entry it points at.
        let mut left = pos
            .checked_sub(1)
            .map(|i| (i, common_suffix(&self.entries[i].units, q)));
        let mut right = (pos < n).then(|| (pos, common_suffix(&self.entries[pos].units, q)));

        let mut out: Vec<Neighbor> = Vec::with_capacity(cap.min(available));
        let mut group: Vec<Neighbor> = Vec::new();
        while out.len() < cap && (left.is_some() || right.is_some()) {
            let level = left.map_or(0, |(_, l)| l).max(right.map_or(0, |(_, l)| l));
            group.clear();
            while let Some((i, l)) = left.filter(|&(_, l)| l == level) {
                group.push(self.neighbor(i, l));
                left = i.checked_sub(1).map(|j| (j, l.min(self.adjacent[j])));
            }
            while let Some((i, l)) = right.filter(|&(_, l)| l == level) {
                group.push(self.neighbor(i, l));
                right = (i + 1 < n).then(|| (i + 1, l.min(self.adjacent[i])));
            }
            group.retain(|nb| Some(nb.ordinal) != exclude);
            group.sort_by(rank_order);
            let take = (cap - out.len()).min(group.len());
            out.extend_from_slice(&group[..take]);
        }
        Ok(out)
    }

    fn neighbor(&self, i: usize, shared: usize) -> Neighbor {
        let e = &self.entries[i];
        Neighbor {
            ordinal: e.ordinal,
            similarity: SimilarityScore(shared),
            label: e.label,
        }
    }

    fn contains(&self, ordinal: usize) -> bool {
        self.entries.iter().any(|e| e.ordinal == ordinal)
    }

    pub fn to_json(&self) -> Result<String> {
        let snap = Snapshot {
            format: SNAPSHOT_FORMAT.to_string(),
            version: SNAPSHOT_VERSION,
            method: self.method,
            entries: self.entries.clone(),
        };
        Ok(serde_json::to_string(&snap)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let snap: Snapshot = serde_json::from_str(text)?;
        if snap.format != SNAPSHOT_FORMAT {
            return Err(TamError::Snapshot(format!("unexpected format {:?}", snap.format)));
        }
        if snap.version != SNAPSHOT_VERSION {
            return Err(TamError::Snapshot(format!("unsupported version {}", snap.version)));
        }
        SuffixIndex::from_entries(snap.method, snap.entries)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| TamError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| TamError::io(path, e))?;
        SuffixIndex::from_json(&text)
    }
}

/// Encodes the chosen pairs of `corpus`. Used by index construction and by
/// the naive reference scan.
pub fn encode_entries<'c>(
    corpus: &'c Corpus,
    encoder: &Encoder<'_>,
    keep: impl Fn(usize) -> bool + Sync,
) -> Result<Vec<IndexEntry>> {
    let encode = |p: &'c crate::corpus::ExamplePair| -> Option<Result<IndexEntry>> {
        keep(p.ordinal).then(|| {
            encoder.encode(&p.japanese).map(|seq| IndexEntry {
                ordinal: p.ordinal,
                label: p.label,
                units: seq.units().to_vec(),
            })
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        corpus.pairs().par_iter().filter_map(encode).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        corpus.pairs().iter().filter_map(encode).collect()
    }
}

pub fn build_index(corpus: &Corpus, encoder: &Encoder<'_>) -> Result<SuffixIndex> {
    if corpus.is_empty() {
        return Err(TamError::EmptyCorpus);
    }
    SuffixIndex::from_entries(encoder.method(), encode_entries(corpus, encoder, |_| true)?)
}

/// Reference retrieval: scores every entry, sorts, truncates.
pub fn naive_retrieve(
    method: Method,
    entries: &[IndexEntry],
    query: &UnitSequence,
    cap: usize,
    exclude: Option<usize>,
) -> Result<Vec<Neighbor>> {
    if query.method() != method {
        return Err(TamError::MethodMismatch {
            expected: method,
            found: query.method(),
        });
    }
    let mut all: Vec<Neighbor> = entries
        .iter()
        .filter(|e| Some(e.ordinal) != exclude)
        .map(|e| Neighbor {
            ordinal: e.ordinal,
            similarity: SimilarityScore(common_suffix(&e.units, query.units())),
            label: e.label,
        })
        .collect();
    if all.is_empty() {
        return Err(TamError::EmptyIndex);
    }
    all.sort_by(rank_order);
    all.truncate(cap);
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::raw_units;
    use proptest::prelude::*;
    use TamCategory::*;

    fn corpus(rows: &[(&str, TamCategory)]) -> Corpus {
        Corpus::from_records(rows.iter().map(|&(j, l)| (j, "", l)), "mem").unwrap()
    }

    fn raw(s: &str) -> UnitSequence {
        raw_units(s).unwrap()
    }

    #[test]
    fn similarity_basics() {
        assert_eq!(suffix_similarity(&raw("abc"), &raw("abc")).unwrap().value(), 3);
        assert_eq!(suffix_similarity(&raw("abc"), &raw("abd")).unwrap().value(), 0);
        assert_eq!(suffix_similarity(&raw("xbc"), &raw("zzbc")).unwrap().value(), 2);
        let other = UnitSequence::new(Method::Annotated, raw("abc").units().to_vec());
        assert!(matches!(
            suffix_similarity(&raw("abc"), &other),
            Err(TamError::MethodMismatch { .. })
        ));
    }

    #[test]
    fn build_is_deterministic() {
        let c = corpus(&[("かれだ", Present), ("これだ", Past), ("あれか", Present)]);
        let a = build_index(&c, &Encoder::Raw).unwrap();
        let b = build_index(&c, &Encoder::Raw).unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(a, b);
        let empty = corpus(&[]);
        assert!(matches!(build_index(&empty, &Encoder::Raw), Err(TamError::EmptyCorpus)));
    }

    #[test]
    fn zero_similarity_falls_back_to_ordinal_order() {
        let c = corpus(&[("あい", Present), ("かき", Past), ("さし", Present), ("たち", Past)]);
        let idx = build_index(&c, &Encoder::Raw).unwrap();
        let got = idx.retrieve(&raw("xyz"), 10, None).unwrap();
        assert_eq!(got.iter().map(|n| n.ordinal).collect::<Vec<_>>(), [0, 1, 2, 3]);
        assert!(got.iter().all(|n| n.similarity.value() == 0));
    }

    #[test]
    fn cap_truncates_the_full_ordering() {
        let rows: Vec<(String, TamCategory)> = (0..10)
            .map(|i| (format!("{}だ", "あ".repeat(i + 1)), Present))
            .collect();
        let rows: Vec<(&str, TamCategory)> = rows.iter().map(|(s, l)| (s.as_str(), *l)).collect();
        let idx = build_index(&corpus(&rows), &Encoder::Raw).unwrap();
        let q = raw("ああああだ");
        let full = idx.retrieve(&q, 10, None).unwrap();
        assert_eq!(full.len(), 10);
        assert_eq!(idx.retrieve(&q, 3, None).unwrap(), full[..3].to_vec());
        assert_eq!(full[0].ordinal, 3);
    }

    #[test]
    fn exact_match_first_unless_excluded() {
        let c = corpus(&[("いぬだ", Past), ("ねこだ", Present), ("ねこだ", Past)]);
        let idx = build_index(&c, &Encoder::Raw).unwrap();
        let got = idx.retrieve(&raw("ねこだ"), 10, None).unwrap();
        assert_eq!(got[0].ordinal, 1);
        assert_eq!(got[0].similarity.value(), 3);
        let got = idx.retrieve(&raw("ねこだ"), 10, Some(1)).unwrap();
        assert_eq!(got.iter().map(|n| n.ordinal).collect::<Vec<_>>(), [2, 0]);
    }

    #[test]
    fn excluding_the_only_entry_is_an_error() {
        let idx = build_index(&corpus(&[("ねこ", Past)]), &Encoder::Raw).unwrap();
        assert!(matches!(
            idx.retrieve(&raw("ねこ"), 10, Some(0)),
            Err(TamError::EmptyIndex)
        ));
        assert_eq!(idx.retrieve(&raw("ねこ"), 10, Some(5)).unwrap().len(), 1);
    }

    #[test]
    fn snapshot_round_trip() {
        let c = corpus(&[("かれだ", Present), ("これだ", Past), ("あれか", Present)]);
        let idx = build_index(&c, &Encoder::Raw).unwrap();
        let back = SuffixIndex::from_json(&idx.to_json().unwrap()).unwrap();
        assert_eq!(back, idx);
        let bad = idx.to_json().unwrap().replace("\"version\":1", "\"version\":9");
        assert!(matches!(SuffixIndex::from_json(&bad), Err(TamError::Snapshot(_))));
    }

    fn arb_units(max: usize) -> impl Strategy<Value = Vec<Unit>> {
        // a small alphabet so that long shared suffixes are common
        let unit = prop_oneof![
            proptest::sample::select(vec!['あ', 'い', 'だ']).prop_map(Unit::SurfaceChar),
            (0u8..3).prop_map(Unit::CategoryDigit),
            Just(Unit::Delimiter),
        ];
        proptest::collection::vec(unit, 0..max)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn similarity_is_symmetric_and_bounded(a in arb_units(12), b in arb_units(12)) {
            let (sa, sb) = (UnitSequence::new(Method::Raw, a.clone()), UnitSequence::new(Method::Raw, b.clone()));
            let ab = suffix_similarity(&sa, &sb).unwrap().value();
            prop_assert_eq!(ab, suffix_similarity(&sb, &sa).unwrap().value());
            prop_assert!(ab <= a.len().min(b.len()));
        }

        #[test]
        fn similarity_threshold_matches_slicing(a in arb_units(10), b in arb_units(10), n in 0usize..12) {
            let sim = common_suffix(&a, &b);
            let agree = n <= a.len() && n <= b.len() && a[a.len() - n..] == b[b.len() - n..];
            prop_assert_eq!(sim >= n, agree);
        }

        #[test]
        fn indexed_matches_naive(
            seqs in proptest::collection::vec((arb_units(8), 0usize..3), 1..20),
            query in arb_units(8),
            cap in 1usize..12,
            exclude in proptest::option::of(0usize..22),
        ) {
            let labels = [Present, Past, PresentPerfect];
            let entries: Vec<IndexEntry> = seqs
                .into_iter()
                .enumerate()
                .map(|(ordinal, (units, l))| IndexEntry { ordinal, label: labels[l], units })
                .collect();
            let idx = SuffixIndex::from_entries(Method::Raw, entries.clone()).unwrap();
            let q = UnitSequence::new(Method::Raw, query);
            let fast = idx.retrieve(&q, cap, exclude).ok();
            let slow = naive_retrieve(Method::Raw, &entries, &q, cap, exclude).ok();
            prop_assert_eq!(fast, slow);
        }
    }
}
