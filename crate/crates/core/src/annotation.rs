//! Turning sentences into comparison units.
//!
//! The raw method compares characters. The annotated method splits the
//! sentence into morphemes and spells out, for each morpheme, its surface
//! characters, its thesaurus category and its inflectional form, so that a
//! match counted from the end of the sentence checks the inflection first,
//! then the category from its coarsest level down, then the surface string.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::strip_terminal_punctuation;
use crate::error::{Result, TamError};

/// Which unit encoding a sequence (or an index) was built with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Plain characters.
    Raw,
    /// Morphemes with thesaurus category and inflectional form.
    Annotated,
}

impl Method {
    pub fn number(self) -> u8 {
        match self {
            Method::Raw => 1,
            Method::Annotated => 2,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Raw => "raw",
            Method::Annotated => "annotated",
        })
    }
}

impl FromStr for Method {
    type Err = TamError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "string" | "raw" => Ok(Method::Raw),
            "2" | "analysis" | "annotated" => Ok(Method::Annotated),
            _ => Err(TamError::InvalidArgument(format!(
                "unknown method {s:?} (expected 1, 2, string or analysis)"
            ))),
        }
    }
}

/// A 10-digit thesaurus category number.
///
/// Digits 1-5 encode the top five levels of the hierarchy, digits 6-7 the
/// sixth level and digits 8-10 the leaf level. The leaf digits are kept but
/// never take part in matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CategoryCode([u8; 10]);

impl CategoryCode {
    pub fn digits(&self) -> &[u8; 10] {
        &self.0
    }

    pub fn top_levels(&self) -> &[u8] {
        &self.0[..5]
    }

    /// Digits 6 and 7 read as one two-digit number.
    pub fn sixth_level(&self) -> u8 {
        self.0[5] * 10 + self.0[6]
    }
}

impl FromStr for CategoryCode {
    type Err = TamError;

    fn from_str(s: &str) -> Result<Self> {
        let bytes = s.as_bytes();
        if bytes.len() != 10 || !bytes.iter().all(u8::is_ascii_digit) {
            return Err(TamError::InvalidArgument(format!(
                "category code must be exactly 10 decimal digits, got {s:?}"
            )));
        }
        let mut digits = [0u8; 10];
        for (d, b) in digits.iter_mut().zip(bytes) {
            *d = b - b'0';
        }
        Ok(CategoryCode(digits))
    }
}

impl fmt::Display for CategoryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl Serialize for CategoryCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CategoryCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Morpheme {
    surface: String,
    category: Option<CategoryCode>,
    inflection: Option<String>,
}

impl Morpheme {
    pub fn new(surface: impl Into<String>, category: Option<CategoryCode>, inflection: Option<String>) -> Result<Self> {
        let surface = surface.into();
        if surface.is_empty() {
            return Err(TamError::InvalidArgument("morpheme surface is empty".into()));
        }
        let inflection = inflection.filter(|s| !s.is_empty());
        Ok(Morpheme {
            surface,
            category,
            inflection,
        })
    }

    /// A morpheme with neither category nor inflection.
    pub fn bare(surface: impl Into<String>) -> Result<Self> {
        Morpheme::new(surface, None, None)
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn category(&self) -> Option<&CategoryCode> {
        self.category.as_ref()
    }

    pub fn inflection(&self) -> Option<&str> {
        self.inflection.as_deref()
    }
}

/// One comparison unit.
///
/// Two units are equal only if both kind and payload agree, so a surface
/// character never matches an identical character of an inflection label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value")]
pub enum Unit {
    SurfaceChar(char),
    /// Sixth-level category digits, 0..=99.
    CategoryPair(u8),
    /// One top-level category digit, 0..=9.
    CategoryDigit(u8),
    InflectionChar(char),
    Delimiter,
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Unit::SurfaceChar(c) | Unit::InflectionChar(c) => write!(f, "{c}"),
            Unit::CategoryPair(n) => write!(f, "{n:02}"),
            // full-width digits, as in the printed encodings
            Unit::CategoryDigit(d) => {
                write!(f, "{}", char::from_u32(0xFF10 + d as u32).unwrap_or('?'))
            }
            Unit::Delimiter => f.write_str("："),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnitSequence {
    method: Method,
    units: Vec<Unit>,
}

impl UnitSequence {
    pub fn new(method: Method, units: Vec<Unit>) -> Self {
        UnitSequence { method, units }
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }
}

impl fmt::Display for UnitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for u in &self.units {
            write!(f, "{u}")?;
        }
        Ok(())
    }
}

/// One character per unit. The sentence is expected to be
/// punctuation-stripped already.
pub fn raw_units(sentence: &str) -> Result<UnitSequence> {
    if sentence.is_empty() {
        return Err(TamError::EmptySentence);
    }
    Ok(UnitSequence::new(
        Method::Raw,
        sentence.chars().map(Unit::SurfaceChar).collect(),
    ))
}

/// Units for a single morpheme: surface characters, then the sixth-level
/// pair followed by the top five digits in reverse, then the inflection
/// label, then a delimiter. Leaf digits 8-10 are dropped.
pub fn annotate_morpheme(m: &Morpheme) -> Vec<Unit> {
    let mut units = Vec::with_capacity(m.surface.chars().count() + 8);
    units.extend(m.surface.chars().map(Unit::SurfaceChar));
    if let Some(code) = &m.category {
        units.push(Unit::CategoryPair(code.sixth_level()));
        units.extend(code.top_levels().iter().rev().map(|&d| Unit::CategoryDigit(d)));
    }
    if let Some(inflection) = &m.inflection {
        units.extend(inflection.chars().map(Unit::InflectionChar));
    }
    units.push(Unit::Delimiter);
    units
}

/// Joins the morpheme blocks of a sentence. Delimiters separate blocks, so
/// the sentence-final block carries none and a match anchored at the end of
/// the sentence starts on the last inflection or surface unit.
pub fn encode_sentence(morphemes: &[Morpheme]) -> Result<UnitSequence> {
    if morphemes.is_empty() {
        return Err(TamError::EmptySentence);
    }
    let mut units: Vec<Unit> = morphemes.iter().flat_map(annotate_morpheme).collect();
    debug_assert_eq!(units.last(), Some(&Unit::Delimiter));
    units.pop();
    Ok(UnitSequence::new(Method::Annotated, units))
}

/// Splits a sentence into morphemes. Implementations must preserve the
/// text: concatenating the surfaces gives back the input.
pub trait Tokenizer: Sync {
    fn tokenize(&self, sentence: &str) -> Vec<Morpheme>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub category: Option<CategoryCode>,
    pub inflection: Option<String>,
}

/// Surface forms with their category and inflection, used by the built-in
/// greedy longest-match tokenizer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: HashMap<String, LexiconEntry>,
    longest: usize,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, surface: impl Into<String>, entry: LexiconEntry) -> Result<()> {
        let surface = surface.into();
        if surface.is_empty() {
            return Err(TamError::InvalidArgument("lexicon surface is empty".into()));
        }
        self.longest = self.longest.max(surface.chars().count());
        self.entries.insert(surface, entry);
        Ok(())
    }

    pub fn get(&self, surface: &str) -> Option<&LexiconEntry> {
        self.entries.get(surface)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn longest_entry(&self) -> usize {
        self.longest
    }

    /// Parses `surface<TAB>category<TAB>inflection` lines, where `-` marks an
    /// absent field. Blank lines and lines starting with `#` are skipped.
    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut lex = Lexicon::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(TamError::format(
                    line_no,
                    format!("expected 3 tab-separated fields, found {}", fields.len()),
                ));
            }
            let surface = fields[0];
            if surface.is_empty() {
                return Err(TamError::format(line_no, "empty surface"));
            }
            let category = match fields[1].trim() {
                "-" | "" => None,
                code => Some(
                    code.parse::<CategoryCode>()
                        .map_err(|e| TamError::format(line_no, e.to_string()))?,
                ),
            };
            let inflection = match fields[2].trim() {
                "-" | "" => None,
                label => Some(label.to_string()),
            };
            if lex.entries.contains_key(surface) {
                return Err(TamError::format(line_no, format!("duplicate entry for {surface:?}")));
            }
            lex.insert(surface, LexiconEntry { category, inflection })?;
        }
        Ok(lex)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| TamError::io(path, e))?;
        Lexicon::from_tsv(&text)
    }
}

impl Tokenizer for Lexicon {
    fn tokenize(&self, sentence: &str) -> Vec<Morpheme> {
        let chars: Vec<(usize, char)> = sentence.char_indices().collect();
        let byte_at = |i: usize| chars.get(i).map_or(sentence.len(), |&(b, _)| b);
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let max = self.longest.min(chars.len() - i);
            let hit = (1..=max).rev().find_map(|n| {
                let piece = &sentence[byte_at(i)..byte_at(i + n)];
                self.entries.get(piece).map(|e| (n, piece, e))
            });
            match hit {
                Some((n, piece, entry)) => {
                    out.push(Morpheme {
                        surface: piece.to_string(),
                        category: entry.category,
                        inflection: entry.inflection.clone(),
                    });
                    i += n;
                }
                None => {
                    out.push(Morpheme {
                        surface: sentence[byte_at(i)..byte_at(i + 1)].to_string(),
                        category: None,
                        inflection: None,
                    });
                    i += 1;
                }
            }
        }
        out
    }
}

/// Sentence-to-units encoder for one method.
#[derive(Clone, Copy)]
pub enum Encoder<'a> {
    Raw,
    Annotated(&'a dyn Tokenizer),
}

impl<'a> Encoder<'a> {
    pub fn new(method: Method, tokenizer: Option<&'a dyn Tokenizer>) -> Result<Self> {
        match (method, tokenizer) {
            (Method::Raw, _) => Ok(Encoder::Raw),
            (Method::Annotated, Some(t)) => Ok(Encoder::Annotated(t)),
            (Method::Annotated, None) => Err(TamError::MissingLexicon),
        }
    }

    pub fn method(&self) -> Method {
        match self {
            Encoder::Raw => Method::Raw,
            Encoder::Annotated(_) => Method::Annotated,
        }
    }

    /// Strips terminal punctuation and encodes.
    pub fn encode(&self, sentence: &str) -> Result<UnitSequence> {
        let sentence = strip_terminal_punctuation(sentence);
        if sentence.is_empty() {
            return Err(TamError::EmptySentence);
        }
        match self {
            Encoder::Raw => raw_units(sentence),
            Encoder::Annotated(t) => encode_sentence(&t.tokenize(sentence)),
        }
    }
}

impl fmt::Debug for Encoder<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Encoder({})", self.method())
    }
}
