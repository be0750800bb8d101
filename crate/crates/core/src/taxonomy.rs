//! The closed set of tense/aspect/modality categories.
//!
//! Labels follow the English surface expression strictly: `Must` and
//! `HaveTo` are different categories, as are `Can` and `BeAbleToPresent`.
//! The canonical spelling of each label is listed in `docs/labels.md`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::TamError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TamCategory {
    Present,
    Past,
    PresentProgressive,
    PastProgressive,
    PresentPerfect,
    PastPerfect,
    PresentPerfectProgressive,
    PastPerfectProgressive,
    Imperative,
    BeAbleToPresent,
    BeAbleToPast,
    BeGoingToPresent,
    BeGoingToPast,
    Can,
    Could,
    HaveTo,
    HadTo,
    Let,
    May,
    Might,
    Must,
    Need,
    Ought,
    Shall,
    Should,
    Will,
    Would,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EvalGroup {
    Present,
    Past,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CategoryKind {
    TenseAspect,
    Imperative,
    Auxiliary,
}

use TamCategory::*;

impl TamCategory {
    pub const ALL: [TamCategory; 27] = [
        Present,
        Past,
        PresentProgressive,
        PastProgressive,
        PresentPerfect,
        PastPerfect,
        PresentPerfectProgressive,
        PastPerfectProgressive,
        Imperative,
        BeAbleToPresent,
        BeAbleToPast,
        BeGoingToPresent,
        BeGoingToPast,
        Can,
        Could,
        HaveTo,
        HadTo,
        Let,
        May,
        Might,
        Must,
        Need,
        Ought,
        Shall,
        Should,
        Will,
        Would,
    ];

    pub fn canonical(self) -> &'static str {
        match self {
            Present => "Present",
            Past => "Past",
            PresentProgressive => "Present progressive",
            PastProgressive => "Past progressive",
            PresentPerfect => "Present perfect",
            PastPerfect => "Past perfect",
            PresentPerfectProgressive => "Present perfect progressive",
            PastPerfectProgressive => "Past perfect progressive",
            Imperative => "Imperative",
            BeAbleToPresent => "be able to (Present)",
            BeAbleToPast => "be able to (Past)",
            BeGoingToPresent => "be going to (Present)",
            BeGoingToPast => "be going to (Past)",
            Can => "can",
            Could => "could",
            HaveTo => "have to",
            HadTo => "had to",
            Let => "let",
            May => "may",
            Might => "might",
            Must => "must",
            Need => "need",
            Ought => "ought",
            Shall => "shall",
            Should => "should",
            Will => "will",
            Would => "would",
        }
    }

    /// Rust-style identifier, also accepted by [`TamCategory::parse_label`].
    pub fn identifier(self) -> &'static str {
        match self {
            Present => "Present",
            Past => "Past",
            PresentProgressive => "PresentProgressive",
            PastProgressive => "PastProgressive",
            PresentPerfect => "PresentPerfect",
            PastPerfect => "PastPerfect",
            PresentPerfectProgressive => "PresentPerfectProgressive",
            PastPerfectProgressive => "PastPerfectProgressive",
            Imperative => "Imperative",
            BeAbleToPresent => "BeAbleToPresent",
            BeAbleToPast => "BeAbleToPast",
            BeGoingToPresent => "BeGoingToPresent",
            BeGoingToPast => "BeGoingToPast",
            Can => "Can",
            Could => "Could",
            HaveTo => "HaveTo",
            HadTo => "HadTo",
            Let => "Let",
            May => "May",
            Might => "Might",
            Must => "Must",
            Need => "Need",
            Ought => "Ought",
            Shall => "Shall",
            Should => "Should",
            Will => "Will",
            Would => "Would",
        }
    }

    /// Abbreviation used in per-category accuracy tables
    /// (Pr. = Present, P. = Past, -ing = progressive, Perf. = perfect,
    /// Imp. = imperative).
    pub fn short_name(self) -> &'static str {
        match self {
            Present => "Pr.",
            Past => "P.",
            PresentProgressive => "Pr.-ing",
            PastProgressive => "P.-ing",
            PresentPerfect => "Pr.Perf.",
            PastPerfect => "P.Perf.",
            PresentPerfectProgressive => "Pr.Perf.-ing",
            PastPerfectProgressive => "P.Perf.-ing",
            Imperative => "Imp.",
            BeAbleToPresent => "Pr.able",
            BeAbleToPast => "P.able",
            BeGoingToPresent => "Pr.going",
            BeGoingToPast => "P.going",
            other => other.canonical(),
        }
    }

    pub fn kind(self) -> CategoryKind {
        match self {
            Present
            | Past
            | PresentProgressive
            | PastProgressive
            | PresentPerfect
            | PastPerfect
            | PresentPerfectProgressive
            | PastPerfectProgressive => CategoryKind::TenseAspect,
            Imperative => CategoryKind::Imperative,
            _ => CategoryKind::Auxiliary,
        }
    }

    pub fn eval_group(self) -> EvalGroup {
        match self {
            Present => EvalGroup::Present,
            Past => EvalGroup::Past,
            _ => EvalGroup::Other,
        }
    }

    /// Case-insensitive lookup against canonical spellings and identifiers.
    /// Internal whitespace runs are collapsed before comparison.
    pub fn parse_label(text: &str) -> Result<TamCategory, TamError> {
        let normalized = normalize(text);
        TamCategory::ALL
            .iter()
            .copied()
            .find(|c| normalize(c.canonical()) == normalized || normalize(c.identifier()) == normalized)
            .ok_or_else(|| TamError::UnknownLabel(text.to_string()))
    }
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

impl fmt::Display for TamCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.canonical())
    }
}

impl FromStr for TamCategory {
    type Err = TamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TamCategory::parse_label(s)
    }
}

impl Serialize for TamCategory {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.canonical())
    }
}

impl<'de> Deserialize<'de> for TamCategory {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        TamCategory::parse_label(&s).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for EvalGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalGroup::Present => "Present",
            EvalGroup::Past => "Past",
            EvalGroup::Other => "Other",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn parses_table_spellings() {
        assert_eq!(TamCategory::parse_label("Present perfect").unwrap(), PresentPerfect);
        assert_eq!(TamCategory::parse_label("Present").unwrap(), Present);
        assert_eq!(TamCategory::parse_label("present  PERFECT").unwrap(), PresentPerfect);
        assert_eq!(TamCategory::parse_label("HaveTo").unwrap(), HaveTo);
        assert_eq!(TamCategory::parse_label("be able to (past)").unwrap(), BeAbleToPast);
    }

    #[test]
    fn rejects_unknown_labels() {
        assert!(matches!(
            TamCategory::parse_label("Pluperfect subjunctive"),
            Err(TamError::UnknownLabel(s)) if s == "Pluperfect subjunctive"
        ));
        assert!(TamCategory::parse_label("").is_err());
    }

    #[test]
    fn label_set_is_closed_and_round_trips() {
        let set: HashSet<_> = TamCategory::ALL.iter().collect();
        assert_eq!(set.len(), 27);
        let spellings: HashSet<_> = TamCategory::ALL.iter().map(|c| c.canonical()).collect();
        assert_eq!(spellings.len(), 27);
        for c in TamCategory::ALL {
            assert_eq!(c.canonical().parse::<TamCategory>().unwrap(), c);
            assert_eq!(c.identifier().parse::<TamCategory>().unwrap(), c);
            assert_eq!(c.to_string().parse::<TamCategory>().unwrap(), c);
        }
    }

    #[test]
    fn kinds_partition_the_set() {
        let count = |k| TamCategory::ALL.iter().filter(|c| c.kind() == k).count();
        assert_eq!(count(CategoryKind::TenseAspect), 8);
        assert_eq!(count(CategoryKind::Imperative), 1);
        assert_eq!(count(CategoryKind::Auxiliary), 18);
    }

    #[test]
    fn near_synonyms_stay_distinct() {
        assert_ne!(Must, HaveTo);
        assert_ne!(Can, BeAbleToPresent);
        assert_ne!(Must.canonical(), HaveTo.canonical());
    }

    #[test]
    fn eval_groups() {
        assert_eq!(Present.eval_group(), EvalGroup::Present);
        assert_eq!(Past.eval_group(), EvalGroup::Past);
        assert_eq!(PresentPerfect.eval_group(), EvalGroup::Other);
        let outside = TamCategory::ALL
            .iter()
            .filter(|c| c.eval_group() != EvalGroup::Other)
            .count();
        assert_eq!(outside, 2);
    }

    #[test]
    fn serde_uses_canonical_spelling() {
        let json = serde_json::to_string(&BeGoingToPast).unwrap();
        assert_eq!(json, "\"be going to (Past)\"");
        let back: TamCategory = serde_json::from_str(&json).unwrap();
        assert_eq!(back, BeGoingToPast);
    }
}
