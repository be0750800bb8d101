//! Leave-one-out and held-out evaluation with accuracy grouped as
//! All / Present / Past / Other and per category.
//!
//! A prediction counts as correct only if it equals the stored label
//! exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::annotation::{Encoder, Method};
use crate::corpus::{Corpus, ExamplePair};
use crate::error::{Result, TamError};
use crate::exec::Execution;
use crate::knn::{classify_excluding, KnnConfig};
use crate::similarity::{encode_entries, SuffixIndex};
use crate::taxonomy::{EvalGroup, TamCategory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Tally {
    pub correct: usize,
    pub total: usize,
}

impl Tally {
    fn record(&mut self, correct: bool) {
        self.total += 1;
        self.correct += usize::from(correct);
    }

    pub fn accuracy(&self) -> Option<f64> {
        (self.total > 0).then(|| self.correct as f64 / self.total as f64)
    }
}

impl fmt::Display for Tally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.accuracy() {
            Some(a) => write!(f, "{:.1}% ({}/{})", a * 100.0, self.correct, self.total),
            None => write!(f, "-   (0/0)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Protocol {
    LeaveOneOut,
    Split { test_size: usize, seed: Option<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SentenceResult {
    pub ordinal: usize,
    pub gold: TamCategory,
    pub predicted: TamCategory,
    pub best_similarity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalReport {
    pub protocol: Protocol,
    pub method: Method,
    pub k: usize,
    pub cap: usize,
    pub overall: Tally,
    pub by_group: BTreeMap<EvalGroup, Tally>,
    pub by_category: BTreeMap<TamCategory, Tally>,
    pub per_sentence: Vec<SentenceResult>,
}

impl EvalReport {
    fn assemble(protocol: Protocol, method: Method, config: KnnConfig, per_sentence: Vec<SentenceResult>) -> Self {
        let mut overall = Tally::default();
        let mut by_group: BTreeMap<EvalGroup, Tally> = [EvalGroup::Present, EvalGroup::Past, EvalGroup::Other]
            .into_iter()
            .map(|g| (g, Tally::default()))
            .collect();
        let mut by_category: BTreeMap<TamCategory, Tally> = BTreeMap::new();
        for r in &per_sentence {
            let ok = r.gold == r.predicted;
            overall.record(ok);
            by_group.entry(r.gold.eval_group()).or_default().record(ok);
            by_category.entry(r.gold).or_default().record(ok);
        }
        EvalReport {
            protocol,
            method,
            k: config.k,
            cap: config.cap,
            overall,
            by_group,
            by_category,
            per_sentence,
        }
    }

    pub fn group(&self, g: EvalGroup) -> Tally {
        self.by_group.get(&g).copied().unwrap_or_default()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row in the All / Present / Past / Other layout.
    pub fn table_row(&self) -> String {
        format!(
            "Method {}(k={})\t{}\t{}\t{}\t{}",
            self.method.number(),
            self.k,
            self.overall,
            self.group(EvalGroup::Present),
            self.group(EvalGroup::Past),
            self.group(EvalGroup::Other),
        )
    }

    /// Grouped table followed by per-category accuracy.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "\tAll\tPresent\tPast\tOther");
        let _ = writeln!(out, "{}", self.table_row());
        let _ = writeln!(out);
        let _ = writeln!(out, "Category\tNo.\tAccuracy");
        for (c, t) in &self.by_category {
            let _ = writeln!(out, "{}\t{}\t{}", c.short_name(), t.total, t);
        }
        out
    }
}

fn result_for(
    index: &SuffixIndex,
    encoder: &Encoder<'_>,
    pair: &ExamplePair,
    config: KnnConfig,
    exclude: Option<usize>,
) -> Result<SentenceResult> {
    let trace = classify_excluding(index, encoder, &pair.japanese, config, exclude)?;
    Ok(SentenceResult {
        ordinal: pair.ordinal,
        gold: pair.label,
        predicted: trace.winner,
        best_similarity: trace.best_similarity(),
    })
}

/// Classifies every pair with that pair hidden from retrieval.
pub fn evaluate_loo(
    corpus: &Corpus,
    encoder: &Encoder<'_>,
    config: KnnConfig,
    execution: Execution,
) -> Result<EvalReport> {
    config.validate()?;
    if corpus.len() < 2 {
        return Err(TamError::EmptyCorpus);
    }
    let index = SuffixIndex::from_entries(encoder.method(), encode_entries(corpus, encoder, |_| true)?)?;
    let results = execution.map(corpus.pairs(), |p| {
        result_for(&index, encoder, p, config, Some(p.ordinal))
    });
    let per_sentence = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::assemble(
        Protocol::LeaveOneOut,
        encoder.method(),
        config,
        per_sentence,
    ))
}

/// Classifies the pairs in `test` against an index of all other pairs.
pub fn evaluate_split(
    corpus: &Corpus,
    test: &BTreeSet<usize>,
    encoder: &Encoder<'_>,
    config: KnnConfig,
    execution: Execution,
    seed: Option<u64>,
) -> Result<EvalReport> {
    config.validate()?;
    if let Some(&bad) = test.iter().find(|&&o| o >= corpus.len()) {
        return Err(TamError::InvalidArgument(format!(
            "test ordinal {bad} is outside the corpus (size {})",
            corpus.len()
        )));
    }
    if test.len() >= corpus.len() {
        return Err(TamError::EmptyTrainingSet);
    }
    let entries = encode_entries(corpus, encoder, |o| !test.contains(&o))?;
    let index = SuffixIndex::from_entries(encoder.method(), entries)?;
    let test_pairs: Vec<&ExamplePair> = test.iter().map(|&o| &corpus.pairs()[o]).collect();
    let results = execution.map(&test_pairs, |p| result_for(&index, encoder, p, config, None));
    let per_sentence = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::assemble(
        Protocol::Split {
            test_size: test.len(),
            seed,
        },
        encoder.method(),
        config,
        per_sentence,
    ))
}

/// Draws `test_size` distinct ordinals from `0..corpus_len` with a seeded
/// ChaCha8 generator.
pub fn random_split(corpus_len: usize, test_size: usize, seed: u64) -> Result<BTreeSet<usize>> {
    if test_size == 0 || test_size >= corpus_len {
        return Err(TamError::InvalidArgument(format!(
            "test size must be in 1..{corpus_len}, got {test_size}"
        )));
    }
    let mut ordinals: Vec<usize> = (0..corpus_len).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ordinals.shuffle(&mut rng);
    Ok(ordinals.into_iter().take(test_size).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use TamCategory::*;

    fn corpus(rows: &[(&str, TamCategory)]) -> Corpus {
        Corpus::from_records(rows.iter().map(|&(j, l)| (j, "x", l)), "mem").unwrap()
    }

    #[test]
    fn duplicated_pairs_are_always_right() {
        let c = corpus(&[("ねこだ", Past); 4]);
        for k in [1, 3, 5, 7, 9] {
            let r = evaluate_loo(&c, &Encoder::Raw, KnnConfig::new(k), Execution::Sequential).unwrap();
            assert_eq!(r.overall, Tally { correct: 4, total: 4 });
        }
    }

    #[test]
    fn distinct_endings_fall_back_to_ordinal_order() {
        // Every final character is distinct, so all similarities are 0 and
        // the whole remaining corpus (up to 10) votes. Worked by hand:
        //   0: voters 1..5        -> Present 4, Past 1 -> Present (gold Past)  wrong
        //   1: voters 0,2,3,4,5   -> Present 3, Past 2 -> Present              right
        //   2: voters 0,1,3,4,5   -> Present 3, Past 2 -> Present              right
        //   3: voters 0,1,2,4,5   -> Present 4, Past 1 -> Present (gold Past)  wrong
        //   4: voters 0,1,2,3,5   -> Present 3, Past 2 -> Present              right
        //   5: voters 0..4        -> Present 3, Past 2 -> Present              right
        // which is the frequency of the majority label, 4/6.
        let c = corpus(&[
            ("あか", Past),
            ("いき", Present),
            ("うく", Present),
            ("えけ", Past),
            ("おこ", Present),
            ("かさ", Present),
        ]);
        let r = evaluate_loo(&c, &Encoder::Raw, KnnConfig::new(1), Execution::Sequential).unwrap();
        let predicted: Vec<_> = r.per_sentence.iter().map(|s| s.predicted).collect();
        assert_eq!(predicted, [Present; 6]);
        assert_eq!(r.overall, Tally { correct: 4, total: 6 });
        assert!(r.per_sentence.iter().all(|s| s.best_similarity == 0));
    }

    #[test]
    fn loo_needs_two_pairs() {
        let c = corpus(&[("ねこだ", Past)]);
        assert!(matches!(
            evaluate_loo(&c, &Encoder::Raw, KnnConfig::new(1), Execution::Sequential),
            Err(TamError::EmptyCorpus)
        ));
    }

    #[test]
    fn split_rejects_whole_corpus_as_test() {
        let c = corpus(&[("ねこだ", Past), ("いぬだ", Present)]);
        let all: BTreeSet<usize> = [0, 1].into();
        assert!(matches!(
            evaluate_split(&c, &all, &Encoder::Raw, KnnConfig::new(1), Execution::Sequential, None),
            Err(TamError::EmptyTrainingSet)
        ));
        let outside: BTreeSet<usize> = [7].into();
        assert!(evaluate_split(
            &c,
            &outside,
            &Encoder::Raw,
            KnnConfig::new(1),
            Execution::Sequential,
            None
        )
        .is_err());
    }

    #[test]
    fn exact_duplicate_in_training_fixes_k1() {
        let mut rows = vec![
            ("彼は来た", Past),
            ("雨が降っている", PresentProgressive),
            ("彼は来る", Present),
        ];
        let c = corpus(&rows);
        let test: BTreeSet<usize> = [2].into();
        let before = evaluate_split(&c, &test, &Encoder::Raw, KnnConfig::new(1), Execution::Sequential, None).unwrap();
        assert_eq!(before.overall.correct, 0);
        rows.push(("彼は来る", Present));
        let c = corpus(&rows);
        let after = evaluate_split(&c, &test, &Encoder::Raw, KnnConfig::new(1), Execution::Sequential, None).unwrap();
        assert_eq!(after.overall.correct, 1);
    }

    #[test]
    fn random_split_is_seeded() {
        let a = random_split(50, 10, 1).unwrap();
        assert_eq!(a, random_split(50, 10, 1).unwrap());
        assert_eq!(a.len(), 10);
        assert!(a.iter().all(|&o| o < 50));
        assert!(random_split(5, 5, 1).is_err());
        assert!(random_split(5, 0, 1).is_err());
    }

    #[test]
    fn table_layout() {
        let c = corpus(&[("ねこだ", Past), ("いぬだ", Present), ("とりだ", Present)]);
        let r = evaluate_loo(&c, &Encoder::Raw, KnnConfig::new(1), Execution::Sequential).unwrap();
        let row = r.table_row();
        assert!(row.starts_with("Method 1(k=1)\t"), "{row}");
        assert!(row.contains('%'));
        assert!(r.render_table().contains("Pr."));
        let json: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(json["overall"]["total"], 3);
    }
}
