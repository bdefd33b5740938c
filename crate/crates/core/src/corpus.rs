//! Data model and TSV I/O for inflection triples.
//!
//! A corpus is an ordered list of (lemma, feature bundle, surface form,
//! frequency) entries. Order is significant: frequency rank is positional,
//! so parsing and serialization must never reorder entries. The same
//! (lemma, bundle) pair may map to several distinct forms; free variation
//! in natural data is kept, not collapsed.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

/// Separator between tags in the serialized form of a bundle.
pub const TAG_SEPARATOR: char = ';';

/// Tag marking a verb as middle (invariant valency-reducing prefix).
pub const MIDDLE_TAG: &str = "M";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BundleError {
    #[error("feature bundle must contain at least one tag")]
    Empty,
    #[error("invalid tag {0:?}: tags must be non-empty, without ';' or whitespace")]
    BadTag(String),
}

/// An unordered set of morphosyntactic tags identifying a paradigm cell.
///
/// Canonical serialization joins the tags with `;` in lexicographic order,
/// so bundle equality coincides with equality of serializations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureBundle {
    tags: BTreeSet<String>,
}

impl FeatureBundle {
    pub fn new<I, S>(tags: I) -> Result<Self, BundleError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = BTreeSet::new();
        for tag in tags {
            let tag: String = tag.into().nfc().collect();
            if tag.is_empty()
                || tag.contains(TAG_SEPARATOR)
                || tag.chars().any(char::is_whitespace)
            {
                return Err(BundleError::BadTag(tag));
            }
            set.insert(tag);
        }
        if set.is_empty() {
            return Err(BundleError::Empty);
        }
        Ok(FeatureBundle { tags: set })
    }

    /// Canonical `;`-joined serialization, usable as a map key.
    pub fn key(&self) -> String {
        let mut out = String::new();
        for (i, tag) in self.tags.iter().enumerate() {
            if i > 0 {
                out.push(TAG_SEPARATOR);
            }
            out.push_str(tag);
        }
        out
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.tags.contains(tag)
    }

    pub fn contains_all<'a, I: IntoIterator<Item = &'a str>>(&self, tags: I) -> bool {
        tags.into_iter().all(|t| self.contains(t))
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tags.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    /// A copy of the bundle with `from` replaced by `to`.
    ///
    /// Returns `None` when `from` is not present or `to` is not a valid tag.
    pub fn swapped(&self, from: &str, to: &str) -> Option<FeatureBundle> {
        if !self.contains(from) {
            return None;
        }
        let tags = self
            .tags
            .iter()
            .map(|t| if t == from { to } else { t.as_str() });
        FeatureBundle::new(tags).ok()
    }
}

impl fmt::Display for FeatureBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

impl FromStr for FeatureBundle {
    type Err = BundleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureBundle::new(s.split(TAG_SEPARATOR))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TripleError {
    #[error("lemma must be non-empty")]
    EmptyLemma,
    #[error("form must be non-empty")]
    EmptyForm,
}

/// One unit of training or evaluation data.
///
/// `lemma` and `form` are NFC-normalized on construction; comparisons are
/// code-point-wise thereafter. A frequency of 0 marks synthetic entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub lemma: String,
    pub bundle: FeatureBundle,
    pub form: String,
    pub frequency: u64,
}

impl Triple {
    pub fn new(
        lemma: impl AsRef<str>,
        bundle: FeatureBundle,
        form: impl AsRef<str>,
        frequency: u64,
    ) -> Result<Self, TripleError> {
        let lemma: String = lemma.as_ref().nfc().collect();
        let form: String = form.as_ref().nfc().collect();
        if lemma.is_empty() {
            return Err(TripleError::EmptyLemma);
        }
        if form.is_empty() {
            return Err(TripleError::EmptyForm);
        }
        Ok(Triple {
            lemma,
            bundle,
            form,
            frequency,
        })
    }
}

/// The three verb categories of the target language family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VerbClass {
    Ambifixing,
    Middle,
    Prefixing,
}

impl VerbClass {
    pub const ALL: [VerbClass; 3] = [
        VerbClass::Ambifixing,
        VerbClass::Middle,
        VerbClass::Prefixing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VerbClass::Ambifixing => "ambifixing",
            VerbClass::Middle => "middle",
            VerbClass::Prefixing => "prefixing",
        }
    }
}

impl fmt::Display for VerbClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VerbClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ambifixing" | "a" => Ok(VerbClass::Ambifixing),
            "middle" | "m" => Ok(VerbClass::Middle),
            "prefixing" | "p" => Ok(VerbClass::Prefixing),
            other => Err(format!("unknown verb class {other:?}")),
        }
    }
}

/// Classifies a triple into a verb class.
///
/// The `M` tag takes precedence over membership in the closed list of
/// prefixing lexemes; everything else is ambifixing.
pub fn classify_verb(triple: &Triple, prefixing_lexemes: &HashSet<String>) -> VerbClass {
    if triple.bundle.contains(MIDDLE_TAG) {
        VerbClass::Middle
    } else if prefixing_lexemes.contains(&triple.lemma) {
        VerbClass::Prefixing
    } else {
        VerbClass::Ambifixing
    }
}

/// An ordered sequence of triples. Position is the frequency rank when the
/// source was rank-sorted, so order is preserved exactly as loaded.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pub entries: Vec<Triple>,
    pub provenance: String,
}

impl Corpus {
    pub fn new(entries: Vec<Triple>, provenance: impl Into<String>) -> Self {
        Corpus {
            entries,
            provenance: provenance.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries whose bundles do not contain all of `tags`.
    pub fn without_cells(&self, tags: &[&str]) -> Corpus {
        let entries = self
            .entries
            .iter()
            .filter(|t| !t.bundle.contains_all(tags.iter().copied()))
            .cloned()
            .collect();
        Corpus::new(entries, self.provenance.clone())
    }

    /// True when some bundle contains all of `tags`.
    pub fn has_cell(&self, tags: &[&str]) -> bool {
        self.entries
            .iter()
            .any(|t| t.bundle.contains_all(tags.iter().copied()))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected {expected} tab-separated fields, found {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: empty {field} field")]
    EmptyField { line: usize, field: &'static str },
    #[error("line {line}: invalid frequency {value:?}")]
    BadFrequency { line: usize, value: String },
    #[error("line {line}: {source}")]
    BadBundle {
        line: usize,
        #[source]
        source: BundleError,
    },
}

/// Parses TSV corpus text: `lemma TAB form TAB tags` with an optional
/// fourth integer frequency column when `has_frequency` is set.
///
/// Tags are `;`-separated. Blank lines and lines starting with `#` are
/// skipped. A missing frequency column defaults every entry to 1.
pub fn parse_corpus(text: &str, has_frequency: bool) -> Result<Corpus, ParseError> {
    let expected = if has_frequency { 4 } else { 3 };
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != expected {
            return Err(ParseError::FieldCount {
                line,
                expected,
                found: fields.len(),
            });
        }
        let (lemma, form, tags) = (fields[0], fields[1], fields[2]);
        if lemma.is_empty() {
            return Err(ParseError::EmptyField {
                line,
                field: "lemma",
            });
        }
        if form.is_empty() {
            return Err(ParseError::EmptyField { line, field: "form" });
        }
        if tags.is_empty() {
            return Err(ParseError::EmptyField { line, field: "tags" });
        }
        let bundle = tags
            .parse::<FeatureBundle>()
            .map_err(|source| ParseError::BadBundle { line, source })?;
        let frequency = if has_frequency {
            let raw_freq = fields[3];
            if raw_freq.is_empty() {
                return Err(ParseError::EmptyField {
                    line,
                    field: "frequency",
                });
            }
            raw_freq
                .parse::<u64>()
                .map_err(|_| ParseError::BadFrequency {
                    line,
                    value: raw_freq.to_string(),
                })?
        } else {
            1
        };
        // Triple::new only re-normalizes; emptiness was checked above.
        let triple = Triple::new(lemma, bundle, form, frequency).expect("fields checked non-empty");
        entries.push(triple);
    }
    Ok(Corpus::new(entries, ""))
}

/// Serializes a corpus back to TSV; the inverse of [`parse_corpus`].
pub fn serialize_corpus(corpus: &Corpus, with_frequency: bool) -> String {
    let mut out = String::new();
    for t in &corpus.entries {
        out.push_str(&t.lemma);
        out.push('\t');
        out.push_str(&t.form);
        out.push('\t');
        out.push_str(&t.bundle.key());
        if with_frequency {
            out.push('\t');
            out.push_str(&t.frequency.to_string());
        }
        out.push('\n');
    }
    out
}
