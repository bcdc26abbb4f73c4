//! Document collections: dump parsing, cross-language pairing, and sentence
//! segmentation.

mod directory;
mod dump;
mod markup;
mod pairing;
mod segment;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub use directory::{
    read_language_dir, read_paired_directory, write_pair_manifest, write_paired_directory,
    DirectoryPairing,
};
pub use dump::{parse_dump, DumpReader};
pub use markup::{strip_markup, StrippedText};
pub use pairing::{pair_documents, PairingOutcome};
pub use segment::{detokenize, tokenize, Segmenter, DEFAULT_ABBREVIATIONS};

/// One article of a monolingual collection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub doc_id: String,
    pub lang: String,
    pub title: String,
    pub body: String,
    /// `(lang, foreign title)` pairs taken from interwiki links.
    pub cross_links: Vec<(String, String)>,
}

impl RawDocument {
    pub fn new(doc_id: impl Into<String>, lang: impl Into<String>, title: impl Into<String>, body: impl Into<String>) -> Self {
        RawDocument {
            doc_id: doc_id.into(),
            lang: lang.into(),
            title: title.into(),
            body: body.into(),
            cross_links: Vec::new(),
        }
    }

    pub fn with_links(mut self, links: Vec<(String, String)>) -> Self {
        self.cross_links = links;
        self
    }

    pub fn is_blank(&self) -> bool {
        self.body.trim().is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkSource {
    Interwiki,
    ArchiveId,
    Manual,
}

impl LinkSource {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkSource::Interwiki => "interwiki",
            LinkSource::ArchiveId => "archive-id",
            LinkSource::Manual => "manual",
        }
    }
}

impl fmt::Display for LinkSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A topic-aligned source/target document pair; the unit of mining.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparableDocPair {
    pub src: RawDocument,
    pub tgt: RawDocument,
    pub link_source: LinkSource,
}

impl ComparableDocPair {
    pub fn new(src: RawDocument, tgt: RawDocument, link_source: LinkSource) -> Result<Self> {
        if src.lang.is_empty() || tgt.lang.is_empty() {
            return Err(Error::invalid("document language must not be empty"));
        }
        if src.lang == tgt.lang {
            return Err(Error::invalid(format!(
                "both documents of a pair are in {}",
                src.lang
            )));
        }
        if src.is_blank() || tgt.is_blank() {
            return Err(Error::EmptyDocument);
        }
        Ok(ComparableDocPair { src, tgt, link_source })
    }

    /// Stable identifier, used to canonicalise output order.
    pub fn id(&self) -> String {
        format!(
            "{}:{}|{}:{}",
            self.src.lang, self.src.doc_id, self.tgt.lang, self.tgt.doc_id
        )
    }
}

/// A tokenised sentence with its per-character occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceRecord {
    raw: String,
    tokens: Vec<String>,
    char_counts: BTreeMap<char, u32>,
}

impl SentenceRecord {
    /// Tokenises `raw` as a single sentence (no boundary detection).
    pub fn new(raw: impl Into<String>) -> Self {
        let raw = raw.into();
        let tokens = tokenize(&raw);
        let char_counts = count_chars(&raw);
        SentenceRecord {
            raw,
            tokens,
            char_counts,
        }
    }

    /// Builds a record from already tokenised text; `raw` is the
    /// detokenised form.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Self {
        let tokens: Vec<String> = tokens.iter().map(|t| t.as_ref().to_string()).collect();
        let raw = detokenize(&tokens);
        let char_counts = count_chars(&raw);
        SentenceRecord {
            raw,
            tokens,
            char_counts,
        }
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Occurrence counts of every non-whitespace character of `raw`.
    pub fn char_counts(&self) -> &BTreeMap<char, u32> {
        &self.char_counts
    }

    pub fn char_count(&self, c: char) -> u32 {
        self.char_counts.get(&c).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

pub(crate) fn count_chars(text: &str) -> BTreeMap<char, u32> {
    let mut counts = BTreeMap::new();
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        *counts.entry(c).or_insert(0) += 1;
    }
    counts
}
