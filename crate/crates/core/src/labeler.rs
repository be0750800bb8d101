//! Heuristic TAM labels for English sentences.
//!
//! Used to bootstrap labels for corpora that only have raw sentence pairs.
//! It looks at auxiliary patterns first, then at the first finite verb
//! group. It is not a parser; accuracy on real data should be measured
//! separately from classifier accuracy.

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Result, TamError};
use crate::taxonomy::TamCategory;

const DEFAULT_AUXILIARIES: &str = include_str!("../data/auxiliaries.txt");
const DEFAULT_IRREGULAR: &str = include_str!("../data/irregular_verbs.txt");
const DEFAULT_BASE_VERBS: &str = include_str!("../data/base_verbs.txt");
const DEFAULT_ED_EXCEPTIONS: &str = include_str!("../data/ed_exceptions.txt");
const DEFAULT_ING_EXCEPTIONS: &str = include_str!("../data/ing_exceptions.txt");

/// Words that may sit between an auxiliary and its verb.
const ADVERBS: &[&str] = &[
    "not",
    "never",
    "already",
    "just",
    "ever",
    "always",
    "also",
    "still",
    "long",
    "recently",
    "often",
    "really",
    "only",
    "even",
    "once",
    "all",
    "both",
    "certainly",
    "probably",
    "yet",
];

const SUBJECTS: &[&str] = &["i", "you", "he", "she", "it", "we", "they"];

const NOT_VERB_START: &[&str] = &[
    "the", "a", "an", "my", "your", "his", "her", "its", "our", "their", "this", "that", "these", "those", "some",
    "any", "me", "him", "us", "them", "it", "school", "bed", "church", "town", "work",
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum PatternToken {
    Word(String),
    VerbStart,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct AuxPattern {
    anchored: bool,
    tokens: Vec<PatternToken>,
    label: TamCategory,
}

#[derive(Debug, Clone)]
struct Word {
    text: String,
    capitalized: bool,
}

/// Ordered auxiliary patterns plus verb-form word lists.
#[derive(Debug, Clone)]
pub struct RuleSet {
    auxiliaries: Vec<AuxPattern>,
    base_verbs: HashSet<String>,
    past_forms: HashSet<String>,
    participles: HashSet<String>,
    ed_exceptions: HashSet<String>,
    ing_exceptions: HashSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tense {
    Present,
    Past,
}

impl Tense {
    fn simple(self) -> TamCategory {
        match self {
            Tense::Present => TamCategory::Present,
            Tense::Past => TamCategory::Past,
        }
    }

    fn progressive(self) -> TamCategory {
        match self {
            Tense::Present => TamCategory::PresentProgressive,
            Tense::Past => TamCategory::PastProgressive,
        }
    }

    fn perfect(self) -> TamCategory {
        match self {
            Tense::Present => TamCategory::PresentPerfect,
            Tense::Past => TamCategory::PastPerfect,
        }
    }

    fn perfect_progressive(self) -> TamCategory {
        match self {
            Tense::Present => TamCategory::PresentPerfectProgressive,
            Tense::Past => TamCategory::PastPerfectProgressive,
        }
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn word_set(text: &str) -> HashSet<String> {
    data_lines(text).map(|(_, l)| l.to_lowercase()).collect()
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet::from_sources(
            DEFAULT_AUXILIARIES,
            DEFAULT_IRREGULAR,
            DEFAULT_BASE_VERBS,
            DEFAULT_ED_EXCEPTIONS,
            DEFAULT_ING_EXCEPTIONS,
        )
        .expect("bundled labeler data is valid")
    }
}

impl RuleSet {
    pub fn from_sources(
        auxiliaries: &str,
        irregular: &str,
        base_verbs: &str,
        ed_exceptions: &str,
        ing_exceptions: &str,
    ) -> Result<Self> {
        let mut patterns = Vec::new();
        for (line, l) in data_lines(auxiliaries) {
            let (pattern, label) = l
                .split_once('\t')
                .ok_or_else(|| TamError::format(line, "expected pattern<TAB>label"))?;
            let label = TamCategory::parse_label(label.trim()).map_err(|e| TamError::format(line, e.to_string()))?;
            let (anchored, pattern) = match pattern.strip_prefix('^') {
                Some(rest) => (true, rest),
                None => (false, pattern),
            };
            let tokens: Vec<PatternToken> = pattern
                .split_whitespace()
                .map(|t| match t {
                    "<v>" => PatternToken::VerbStart,
                    w => PatternToken::Word(w.to_lowercase()),
                })
                .collect();
            if !matches!(tokens.first(), Some(PatternToken::Word(_))) {
                return Err(TamError::format(line, "pattern must start with a word"));
            }
            patterns.push(AuxPattern {
                anchored,
                tokens,
                label,
            });
        }

        let mut bases = word_set(base_verbs);
        let mut past = HashSet::new();
        let mut participles = HashSet::new();
        for (line, l) in data_lines(irregular) {
            let cols: Vec<&str> = l.split_whitespace().collect();
            if cols.len() != 3 {
                return Err(TamError::format(line, "expected: base past participle"));
            }
            bases.insert(cols[0].to_lowercase());
            past.extend(cols[1].split('/').map(str::to_lowercase));
            participles.extend(cols[2].split('/').map(str::to_lowercase));
        }
        // forms identical to a base form (put, read, lay) say nothing about tense
        past.retain(|w| !bases.contains(w));

        Ok(RuleSet {
            auxiliaries: patterns,
            base_verbs: bases,
            past_forms: past,
            participles,
            ed_exceptions: word_set(ed_exceptions),
            ing_exceptions: word_set(ing_exceptions),
        })
    }

    /// Reads `auxiliaries.txt`, `irregular_verbs.txt`, `base_verbs.txt`,
    /// `ed_exceptions.txt` and `ing_exceptions.txt` from `dir`.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let read = |name: &str| {
            let p = dir.join(name);
            std::fs::read_to_string(&p).map_err(|e| TamError::io(p, e))
        };
        RuleSet::from_sources(
            &read("auxiliaries.txt")?,
            &read("irregular_verbs.txt")?,
            &read("base_verbs.txt")?,
            &read("ed_exceptions.txt")?,
            &read("ing_exceptions.txt")?,
        )
    }

    pub fn label(&self, sentence: &str) -> Result<TamCategory> {
        let words = tokenize(sentence);
        if words.is_empty() {
            return Err(TamError::Unlabelable(sentence.to_string()));
        }
        if let Some(c) = self.auxiliary(&words) {
            return Ok(c);
        }
        if self.is_imperative(&words) {
            return Ok(TamCategory::Imperative);
        }
        if let Some(c) = self.finite_group(&words) {
            return Ok(c);
        }
        let has_subject_and_verb = words.windows(2).any(|w| SUBJECTS.contains(&w[0].text.as_str()));
        if has_subject_and_verb {
            Ok(TamCategory::Present)
        } else {
            Err(TamError::Unlabelable(sentence.to_string()))
        }
    }

    fn auxiliary(&self, words: &[Word]) -> Option<TamCategory> {
        for i in 0..words.len() {
            // auxiliaries are lowercase in running text ("in May")
            if i > 0 && words[i].capitalized {
                continue;
            }
            if let Some(p) = self.auxiliaries.iter().find(|p| self.pattern_matches(p, words, i)) {
                return Some(p.label);
            }
            if words[i].text == "'d" {
                let j = skip_adverbs(words, i + 1);
                match words.get(j).map(|w| w.text.as_str()) {
                    Some("better") | None => {}
                    Some(w) if self.is_participle_only(w) => {}
                    Some(_) => return Some(TamCategory::Would),
                }
            }
        }
        None
    }

    fn pattern_matches(&self, p: &AuxPattern, words: &[Word], at: usize) -> bool {
        if p.anchored && at != 0 {
            return false;
        }
        if at + p.tokens.len() > words.len() {
            return false;
        }
        p.tokens.iter().zip(&words[at..]).all(|(t, w)| match t {
            PatternToken::Word(s) => *s == w.text,
            PatternToken::VerbStart => {
                w.text.chars().all(|c| c.is_alphabetic()) && !NOT_VERB_START.contains(&w.text.as_str())
            }
        })
    }

    fn is_imperative(&self, words: &[Word]) -> bool {
        let mut i = 0;
        if words[i].text == "please" {
            i += 1;
        }
        let Some(first) = words.get(i) else {
            return false;
        };
        if first.text == "do" && words.get(i + 1).is_some_and(|w| w.text == "not") {
            return true;
        }
        if matches!(first.text.as_str(), "never" | "always" | "just") {
            i += 1;
        }
        let Some(verb) = words.get(i).map(|w| w.text.as_str()) else {
            return false;
        };
        if SUBJECTS.contains(&verb) || !(verb == "be" || self.base_verbs.contains(verb)) {
            return false;
        }
        let next = words.get(i + 1).map(|w| w.text.as_str());
        let is_aux = matches!(verb, "do" | "have" | "be");
        if is_aux && next.is_some_and(|n| SUBJECTS.contains(&n)) {
            return false;
        }
        !matches!(
            next,
            Some("is" | "are" | "was" | "were" | "has" | "have" | "'s" | "will" | "can")
        )
    }

    fn finite_group(&self, words: &[Word]) -> Option<TamCategory> {
        for (i, word) in words.iter().enumerate() {
            let w = word.text.as_str();
            let have_tense = match w {
                "have" | "has" => Some(Tense::Present),
                "had" | "'d" => Some(Tense::Past),
                "'s" => {
                    let j = skip_adverbs(words, i + 1);
                    words
                        .get(j)
                        .filter(|n| n.text == "been" || self.is_participle_only(&n.text))
                        .map(|_| Tense::Present)
                }
                _ => None,
            };
            if let Some(tense) = have_tense {
                let j = skip_adverbs(words, i + 1);
                return Some(match words.get(j).map(|w| w.text.as_str()) {
                    Some("been") => {
                        let k = skip_adverbs(words, j + 1);
                        if words.get(k).is_some_and(|w| self.is_progressive(&w.text)) {
                            tense.perfect_progressive()
                        } else {
                            tense.perfect()
                        }
                    }
                    Some(next) if self.is_participle(next) => tense.perfect(),
                    _ => tense.simple(),
                });
            }
            let be_tense = match w {
                "am" | "is" | "are" | "'m" | "'re" | "'s" => Some(Tense::Present),
                "was" | "were" => Some(Tense::Past),
                _ => None,
            };
            if let Some(tense) = be_tense {
                let j = skip_adverbs(words, i + 1);
                return Some(if words.get(j).is_some_and(|w| self.is_progressive(&w.text)) {
                    tense.progressive()
                } else {
                    tense.simple()
                });
            }
            match w {
                "do" | "does" => return Some(TamCategory::Present),
                "did" => return Some(TamCategory::Past),
                _ => {}
            }
            if self.past_forms.contains(w) || self.is_regular_past(w) {
                return Some(TamCategory::Past);
            }
            let prev = i.checked_sub(1).map(|p| words[p].text.as_str());
            let after_marker = prev.is_some_and(|p| p == "to" || NOT_VERB_START.contains(&p));
            if i > 0 && !after_marker && self.is_present_form(w) {
                return Some(TamCategory::Present);
            }
        }
        None
    }

    fn is_regular_past(&self, w: &str) -> bool {
        w.len() >= 4
            && w.ends_with("ed")
            && !w.contains('-')
            && !self.ed_exceptions.contains(w)
            && !self.base_verbs.contains(w)
    }

    fn is_participle(&self, w: &str) -> bool {
        self.participles.contains(w) || self.is_regular_past(w)
    }

    /// A participle that cannot also be read as a base form.
    fn is_participle_only(&self, w: &str) -> bool {
        self.is_participle(w) && !self.base_verbs.contains(w)
    }

    fn is_progressive(&self, w: &str) -> bool {
        w.len() >= 5 && w.ends_with("ing") && !w.contains('-') && !self.ing_exceptions.contains(w)
    }

    fn is_present_form(&self, w: &str) -> bool {
        let known = |s: &str| self.base_verbs.contains(s);
        known(w)
            || w.strip_suffix('s').is_some_and(known)
            || w.strip_suffix("es").is_some_and(known)
            || w.strip_suffix("ies").is_some_and(|s| known(&format!("{s}y")))
    }
}

fn skip_adverbs(words: &[Word], mut i: usize) -> usize {
    while words.get(i).is_some_and(|w| ADVERBS.contains(&w.text.as_str())) {
        i += 1;
    }
    i
}

fn tokenize(sentence: &str) -> Vec<Word> {
    let normalized = sentence.replace(['\u{2019}', '\u{2018}'], "'");
    let mut out = Vec::new();
    for raw in normalized.split(|c: char| !(c.is_alphanumeric() || c == '\'' || c == '-')) {
        let raw = raw.trim_matches(|c| c == '\'' || c == '-');
        if raw.is_empty() {
            continue;
        }
        let capitalized = raw.chars().next().is_some_and(char::is_uppercase);
        let lower = raw.to_lowercase();
        let mut push = |text: &str, capitalized: bool| {
            out.push(Word {
                text: text.to_string(),
                capitalized,
            })
        };
        if let Some(stem) = lower.strip_suffix("n't") {
            let aux = match stem {
                "ca" => "can",
                "wo" => "will",
                "sha" => "shall",
                s => s,
            };
            push(aux, capitalized);
            push("not", false);
            continue;
        }
        match lower.split_once('\'') {
            Some(("let", "s")) => {
                push("let", capitalized);
                push("us", false);
            }
            Some((head, tail)) => {
                push(head, capitalized);
                match tail {
                    "ve" => push("have", false),
                    "ll" => push("will", false),
                    "m" => push("am", false),
                    "re" => push("are", false),
                    "d" => push("'d", false),
                    "s" => push("'s", false),
                    _ => {}
                }
            }
            None => push(&lower, capitalized),
        }
    }
    out
}
