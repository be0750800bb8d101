//! Bilingual example corpus: loading, serialization and validation.
//!
//! Records keep the order of the source file. That order is what "obtained
//! first" means when equally similar examples have to be ranked.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TamError};
use crate::labeler::RuleSet;
use crate::taxonomy::TamCategory;

const TERMINAL_PUNCTUATION: &[char] = &['。', '．', '.', '!', '?', '！', '？'];

/// Removes trailing sentence punctuation and surrounding whitespace.
/// Applying it twice is the same as applying it once.
pub fn strip_terminal_punctuation(s: &str) -> &str {
    s.trim()
        .trim_end_matches(|c: char| TERMINAL_PUNCTUATION.contains(&c) || c.is_whitespace())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Tsv,
    Jsonl,
}

impl CorpusFormat {
    /// `.jsonl`/`.json` files are JSON lines; everything else is TSV.
    pub fn from_path(path: &Path) -> CorpusFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("jsonl") || ext.eq_ignore_ascii_case("json") => CorpusFormat::Jsonl,
            _ => CorpusFormat::Tsv,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = TamError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(CorpusFormat::Tsv),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            _ => Err(TamError::InvalidArgument(format!("unknown corpus format {s:?}"))),
        }
    }
}

impl fmt::Display for CorpusFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorpusFormat::Tsv => "tsv",
            CorpusFormat::Jsonl => "jsonl",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExamplePair {
    pub ordinal: usize,
    pub japanese: String,
    pub english: String,
    pub label: TamCategory,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CorpusStats {
    pub pair_count: usize,
    pub histogram: BTreeMap<TamCategory, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pairs: Vec<ExamplePair>,
    source_path: String,
    stats: CorpusStats,
}

#[derive(Deserialize)]
struct JsonRecord {
    japanese: String,
    #[serde(default)]
    english: String,
    #[serde(default)]
    label: Option<String>,
}

#[derive(Serialize)]
struct JsonRecordOut<'a> {
    japanese: &'a str,
    english: &'a str,
    label: TamCategory,
}

impl Corpus {
    /// Builds a corpus from `(japanese, english, label)` records, assigning
    /// ordinals in order and stripping terminal punctuation from the
    /// Japanese side.
    pub fn from_records<I, J, E>(records: I, source_path: impl Into<String>) -> Result<Self>
    where
        I: IntoIterator<Item = (J, E, TamCategory)>,
        J: AsRef<str>,
        E: Into<String>,
    {
        let mut pairs = Vec::new();
        for (ordinal, (japanese, english, label)) in records.into_iter().enumerate() {
            let japanese = strip_terminal_punctuation(japanese.as_ref());
            if japanese.is_empty() {
                return Err(TamError::format(ordinal + 1, "empty Japanese sentence"));
            }
            pairs.push(ExamplePair {
                ordinal,
                japanese: japanese.to_string(),
                english: english.into(),
                label,
            });
        }
        Ok(Corpus::from_pairs(pairs, source_path))
    }

    fn from_pairs(pairs: Vec<ExamplePair>, source_path: impl Into<String>) -> Self {
        let mut histogram = BTreeMap::new();
        for p in &pairs {
            *histogram.entry(p.label).or_insert(0) += 1;
        }
        let stats = CorpusStats {
            pair_count: pairs.len(),
            histogram,
        };
        Corpus {
            pairs,
            source_path: source_path.into(),
            stats,
        }
    }

    pub fn pairs(&self) -> &[ExamplePair] {
        &self.pairs
    }

    pub fn get(&self, ordinal: usize) -> Option<&ExamplePair> {
        self.pairs.get(ordinal)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ExamplePair> {
        self.pairs.iter()
    }

    pub fn source_path(&self) -> &str {
        &self.source_path
    }

    pub fn stats(&self) -> &CorpusStats {
        &self.stats
    }

    /// Parses corpus text. Records with a missing or unknown label are
    /// rejected unless `fallback` is given, in which case the label is
    /// derived from the English side.
    pub fn parse(
        text: &str,
        format: CorpusFormat,
        fallback: Option<&RuleSet>,
        source_path: impl Into<String>,
    ) -> Result<Self> {
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let (japanese, english, label) = match format {
                CorpusFormat::Tsv => {
                    if line.starts_with('#') {
                        continue;
                    }
                    let fields: Vec<&str> = line.split('\t').collect();
                    if fields.len() < 2 || fields.len() > 3 {
                        return Err(TamError::format(
                            line_no,
                            format!("expected 2 or 3 tab-separated fields, found {}", fields.len()),
                        ));
                    }
                    let label = fields.get(2).map(|s| s.trim().to_string());
                    (fields[0].to_string(), fields[1].trim().to_string(), label)
                }
                CorpusFormat::Jsonl => {
                    let rec: JsonRecord =
                        serde_json::from_str(line).map_err(|e| TamError::format(line_no, e.to_string()))?;
                    (rec.japanese, rec.english.trim().to_string(), rec.label)
                }
            };
            let japanese = strip_terminal_punctuation(&japanese);
            if japanese.is_empty() {
                return Err(TamError::format(line_no, "empty Japanese sentence"));
            }
            let label = resolve_label(line_no, label.as_deref(), &english, fallback)?;
            pairs.push(ExamplePair {
                ordinal: pairs.len(),
                japanese: japanese.to_string(),
                english,
                label,
            });
        }
        Ok(Corpus::from_pairs(pairs, source_path))
    }

    pub fn write<W: Write>(&self, format: CorpusFormat, mut out: W) -> Result<()> {
        let io = |e| TamError::io(&self.source_path, e);
        for p in &self.pairs {
            match format {
                CorpusFormat::Tsv => {
                    if [&p.japanese, &p.english].iter().any(|s| s.contains(['\t', '\n', '\r'])) {
                        return Err(TamError::InvalidArgument(format!(
                            "record {} contains a tab or newline and cannot be written as TSV",
                            p.ordinal
                        )));
                    }
                    writeln!(out, "{}\t{}\t{}", p.japanese, p.english, p.label).map_err(io)?;
                }
                CorpusFormat::Jsonl => {
                    let rec = JsonRecordOut {
                        japanese: &p.japanese,
                        english: &p.english,
                        label: p.label,
                    };
                    serde_json::to_writer(&mut out, &rec)?;
                    writeln!(out).map_err(io)?;
                }
            }
        }
        Ok(())
    }

    pub fn to_string_as(&self, format: CorpusFormat) -> Result<String> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        Ok(String::from_utf8(buf).expect("corpus text is UTF-8"))
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a ExamplePair;
    type IntoIter = std::slice::Iter<'a, ExamplePair>;

    fn into_iter(self) -> Self::IntoIter {
        self.pairs.iter()
    }
}

fn resolve_label(line: usize, label: Option<&str>, english: &str, fallback: Option<&RuleSet>) -> Result<TamCategory> {
    let given = label.filter(|s| !s.is_empty());
    if let Some(text) = given {
        if let Ok(c) = TamCategory::parse_label(text) {
            return Ok(c);
        }
    }
    let unknown = || TamError::UnknownLabelAt {
        line,
        label: given.unwrap_or("").to_string(),
    };
    match fallback {
        Some(rules) => rules.label(english).map_err(|_| unknown()),
        None => Err(unknown()),
    }
}

/// Reads a corpus file.
pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat, fallback: Option<&RuleSet>) -> Result<Corpus> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| TamError::io(path, e))?;
    Corpus::parse(&text, format, fallback, path.display().to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IssueKind {
    DuplicateJapanese {
        ordinals: Vec<usize>,
        conflicting_labels: bool,
    },
    EmptyEnglish {
        ordinal: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub severity: Severity,
    #[serde(flatten)]
    pub kind: IssueKind,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        match &self.kind {
            IssueKind::DuplicateJapanese {
                ordinals,
                conflicting_labels,
            } => {
                let list: Vec<String> = ordinals.iter().map(|o| o.to_string()).collect();
                write!(f, "{sev}: duplicate Japanese sentence at ordinals {}", list.join(", "))?;
                if *conflicting_labels {
                    f.write_str(" (labels differ)")?;
                }
                Ok(())
            }
            IssueKind::EmptyEnglish { ordinal } => {
                write!(f, "{sev}: empty English side at ordinal {ordinal}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
    pub stats: CorpusStats,
}

impl ValidationReport {
    pub fn has_errors(&self) -> bool {
        self.issues.iter().any(|i| i.severity == Severity::Error)
    }
}

/// Flags duplicate Japanese sentences (warnings) and empty English sides
/// (errors). Issues are ordered by the first ordinal they cite.
pub fn validate_corpus(corpus: &Corpus) -> ValidationReport {
    let mut by_text: HashMap<&str, Vec<usize>> = HashMap::new();
    for p in corpus {
        by_text.entry(p.japanese.as_str()).or_default().push(p.ordinal);
    }
    let mut keyed: Vec<(usize, Issue)> = Vec::new();
    for ordinals in by_text.into_values().filter(|o| o.len() > 1) {
        let first = corpus.pairs[ordinals[0]].label;
        let conflicting_labels = ordinals.iter().any(|&o| corpus.pairs[o].label != first);
        keyed.push((
            ordinals[0],
            Issue {
                severity: Severity::Warning,
                kind: IssueKind::DuplicateJapanese {
                    ordinals,
                    conflicting_labels,
                },
            },
        ));
    }
    for p in corpus.iter().filter(|p| p.english.trim().is_empty()) {
        keyed.push((
            p.ordinal,
            Issue {
                severity: Severity::Error,
                kind: IssueKind::EmptyEnglish { ordinal: p.ordinal },
            },
        ));
    }
    keyed.sort_by_key(|(o, issue)| (*o, issue.severity));
    ValidationReport {
        issues: keyed.into_iter().map(|(_, i)| i).collect(),
        stats: corpus.stats.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use TamCategory::*;

    fn tsv(text: &str) -> Result<Corpus> {
        Corpus::parse(text, CorpusFormat::Tsv, None, "test.tsv")
    }

    #[test]
    fn loads_tsv_with_ordinals_and_histogram() {
        let c = tsv("彼は学生だ。\tHe is a student.\tPresent\n# comment\n彼は来た\tHe came.\tPast\n雨だ\tIt is rain.\tPresent\n").unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.pairs().iter().map(|p| p.ordinal).collect::<Vec<_>>(), [0, 1, 2]);
        assert_eq!(c.pairs()[0].japanese, "彼は学生だ");
        assert_eq!(c.stats().pair_count, 3);
        assert_eq!(c.stats().histogram[&Present], 2);
        assert_eq!(c.stats().histogram[&Past], 1);
    }

    #[test]
    fn empty_file_is_empty_corpus() {
        let c = tsv("").unwrap();
        assert!(c.is_empty());
        assert_eq!(c.stats().pair_count, 0);
    }

    #[test]
    fn unknown_label_without_fallback() {
        let err = tsv("彼だ\tHe is.\tPresent\n彼だった\tHe was.\tPluperfect\n").unwrap_err();
        assert!(matches!(err, TamError::UnknownLabelAt { line: 2, ref label } if label == "Pluperfect"));
        let err = tsv("彼だ\tHe is.\n").unwrap_err();
        assert!(matches!(err, TamError::UnknownLabelAt { line: 1, .. }));
    }

    #[test]
    fn unknown_label_with_fallback() {
        let rules = RuleSet::default();
        let c = Corpus::parse(
            "登録した\tI registered yesterday.\n彼だ\tHe is reliable.\tPluperfect\n",
            CorpusFormat::Tsv,
            Some(&rules),
            "x",
        )
        .unwrap();
        assert_eq!(c.pairs()[0].label, Past);
        assert_eq!(c.pairs()[1].label, Present);
    }

    #[test]
    fn format_errors_cite_the_line() {
        assert!(matches!(tsv("only one field\n"), Err(TamError::Format { line: 1, .. })));
        assert!(matches!(
            tsv("ok\tok\tPresent\n。\tx\tPresent\n"),
            Err(TamError::Format { line: 2, .. })
        ));
        let err = Corpus::parse("{not json}\n", CorpusFormat::Jsonl, None, "x").unwrap_err();
        assert!(matches!(err, TamError::Format { line: 1, .. }));
    }

    #[test]
    fn loads_jsonl() {
        let text = r#"{"japanese":"彼は学生だ。","english":"He is a student.","label":"Present"}
{"japanese":"登録した","english":"I registered yesterday.","label":"Past"}
"#;
        let c = Corpus::parse(text, CorpusFormat::Jsonl, None, "x.jsonl").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.pairs()[1].label, Past);
        assert_eq!(c.pairs()[0].japanese, "彼は学生だ");
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(CorpusFormat::from_path(Path::new("a/b.jsonl")), CorpusFormat::Jsonl);
        assert_eq!(CorpusFormat::from_path(Path::new("a/b.tsv")), CorpusFormat::Tsv);
        assert_eq!(CorpusFormat::from_path(Path::new("a/b")), CorpusFormat::Tsv);
    }

    #[test]
    fn strips_punctuation() {
        assert_eq!(strip_terminal_punctuation("彼だ。"), "彼だ");
        assert_eq!(strip_terminal_punctuation("本当？！"), "本当");
        assert_eq!(strip_terminal_punctuation("x. "), "x");
        assert_eq!(strip_terminal_punctuation("。"), "");
    }

    #[test]
    fn validation_flags_duplicates_and_empty_english() {
        let c = tsv("彼だ\tHe is.\tPresent\n雨だ\t\tPresent\n彼だ\tIt was him.\tPast\n").unwrap();
        let report = validate_corpus(&c);
        assert_eq!(report.issues.len(), 2);
        assert_eq!(
            report.issues[0],
            Issue {
                severity: Severity::Warning,
                kind: IssueKind::DuplicateJapanese {
                    ordinals: vec![0, 2],
                    conflicting_labels: true
                }
            }
        );
        assert_eq!(report.issues[1].kind, IssueKind::EmptyEnglish { ordinal: 1 });
        assert!(report.has_errors());

        let clean = tsv("彼だ\tHe is.\tPresent\n").unwrap();
        assert!(validate_corpus(&clean).issues.is_empty());
    }

    fn arb_corpus() -> impl Strategy<Value = Corpus> {
        let record = (
            "[あ-ん彼私。]{1,8}",
            "[A-Za-z ,']{0,12}",
            proptest::sample::select(TamCategory::ALL.to_vec()),
        );
        proptest::collection::vec(record, 0..12).prop_filter_map("non-empty japanese", |recs| {
            Corpus::from_records(recs.into_iter().map(|(j, e, l)| (j, e.trim().to_string(), l)), "mem").ok()
        })
    }

    proptest! {
        #[test]
        fn serialization_round_trips(c in arb_corpus(), jsonl in any::<bool>()) {
            let format = if jsonl { CorpusFormat::Jsonl } else { CorpusFormat::Tsv };
            let text = c.to_string_as(format).unwrap();
            let back = Corpus::parse(&text, format, None, "mem").unwrap();
            prop_assert_eq!(back, c);
        }

        #[test]
        fn stripping_is_idempotent(s in "[a-zあ-ん。．.!? ]{0,10}") {
            let once = strip_terminal_punctuation(&s);
            prop_assert_eq!(strip_terminal_punctuation(once), once);
        }

        #[test]
        fn histogram_sums_to_pair_count(c in arb_corpus()) {
            prop_assert_eq!(c.stats().histogram.values().sum::<usize>(), c.stats().pair_count);
            prop_assert_eq!(c.stats().pair_count, c.len());
        }
    }
}
