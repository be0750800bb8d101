//! Example-based tense/aspect/modality classification.
//!
//! A Japanese sentence is matched against a bilingual example corpus by the
//! length of the expression it shares with each example at the end of the
//! sentence. The English-side labels of the nearest examples then vote.
//!
//! ```
//! use tamex_core::{build_index, classify, Corpus, Encoder, KnnConfig, TamCategory};
//!
//! let corpus = Corpus::from_records(
//!     [
//!         ("彼は学生だ", "He is a student.", TamCategory::Present),
//!         ("彼は学校へ行った", "He went to school.", TamCategory::Past),
//!     ],
//!     "inline",
//! )
//! .unwrap();
//! let index = build_index(&corpus, &Encoder::Raw).unwrap();
//! let trace = classify(&index, &Encoder::Raw, "私は駅へ行った", KnnConfig::new(1)).unwrap();
//! assert_eq!(trace.winner, TamCategory::Past);
//! ```

pub mod annotation;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod exec;
pub mod knn;
pub mod labeler;
pub mod similarity;
pub mod taxonomy;

pub use annotation::{
    annotate_morpheme, encode_sentence, raw_units, CategoryCode, Encoder, Lexicon, Method, Morpheme, Tokenizer, Unit,
    UnitSequence,
};
pub use corpus::{load_corpus, validate_corpus, Corpus, CorpusFormat, ExamplePair, ValidationReport};
pub use error::{Result, TamError};
pub use evaluation::{evaluate_loo, evaluate_split, random_split, EvalReport, Tally};
pub use exec::Execution;
pub use knn::{classify, select_neighbors, vote, KnnConfig, VoteTrace, MAX_NEIGHBORS};
pub use labeler::RuleSet;
pub use similarity::{build_index, naive_retrieve, suffix_similarity, Neighbor, SimilarityScore, SuffixIndex};
pub use taxonomy::{EvalGroup, TamCategory};
