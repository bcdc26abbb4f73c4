//! Probabilistic word-translation table.
//!
//! File format: one `src TAB tgt TAB prob` entry per line, UTF-8.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub const DEFAULT_PRUNE_FLOOR: f64 = 1e-4;
const RENORMALIZE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct LexiconOptions {
    pub prune_floor: f64,
}

impl Default for LexiconOptions {
    fn default() -> Self {
        LexiconOptions {
            prune_floor: DEFAULT_PRUNE_FLOOR,
        }
    }
}

/// What loading changed relative to the file.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct LoadReport {
    /// Source words whose probabilities summed above one and were rescaled.
    pub renormalized: Vec<String>,
    pub pruned: usize,
}

/// Ranked translations per source word. Lists are sorted by descending
/// probability, ties by target word.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TranslationLexicon {
    src_lang: String,
    tgt_lang: String,
    entries: HashMap<String, Vec<(String, f64)>>,
}

fn rank(list: &mut [(String, f64)]) {
    list.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
}

impl TranslationLexicon {
    pub fn new(src_lang: impl Into<String>, tgt_lang: impl Into<String>) -> Self {
        TranslationLexicon {
            src_lang: src_lang.into(),
            tgt_lang: tgt_lang.into(),
            entries: HashMap::new(),
        }
    }

    /// Builds a lexicon from `(src, tgt, prob)` triples with the same
    /// validation as [`load_lexicon`].
    pub fn from_entries<I, S, T>(src_lang: &str, tgt_lang: &str, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T, f64)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut raw: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
        for (i, (s, t, p)) in entries.into_iter().enumerate() {
            insert_checked(&mut raw, s.into(), t.into(), p, "entries", i + 1)?;
        }
        Ok(finish(src_lang, tgt_lang, raw, LexiconOptions { prune_floor: 0.0 }).0)
    }

    pub fn src_lang(&self) -> &str {
        &self.src_lang
    }

    pub fn tgt_lang(&self) -> &str {
        &self.tgt_lang
    }

    /// Number of source words.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry_count(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    /// Ranked translations of `word`. An exact match wins; otherwise the
    /// lowercased form is tried. Unknown words yield an empty slice.
    pub fn lookup(&self, word: &str) -> &[(String, f64)] {
        if let Some(list) = self.entries.get(word) {
            return list;
        }
        let lower = word.to_lowercase();
        if lower != word {
            if let Some(list) = self.entries.get(&lower) {
                return list;
            }
        }
        &[]
    }

    /// Highest-probability translation (ties broken lexicographically).
    pub fn best_translation(&self, word: &str) -> Option<(&str, f64)> {
        self.lookup(word).first().map(|(t, p)| (t.as_str(), *p))
    }

    /// The same table read in the opposite direction: every `(s, t, p)`
    /// becomes `(t, s, p)`.
    pub fn reversed(&self) -> TranslationLexicon {
        let mut entries: HashMap<String, Vec<(String, f64)>> = HashMap::new();
        for (src, list) in &self.entries {
            for (tgt, p) in list {
                entries.entry(tgt.clone()).or_default().push((src.clone(), *p));
            }
        }
        entries.values_mut().for_each(|l| rank(l));
        TranslationLexicon {
            src_lang: self.tgt_lang.clone(),
            tgt_lang: self.src_lang.clone(),
            entries,
        }
    }

    /// Every entry in canonical order: source word, then rank.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        let mut keys: Vec<&String> = self.entries.keys().collect();
        keys.sort();
        keys.into_iter().flat_map(move |k| {
            self.entries[k]
                .iter()
                .map(move |(t, p)| (k.as_str(), t.as_str(), *p))
        })
    }

    /// Writes the table in the format read by [`load_lexicon`].
    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        for (s, t, p) in self.iter() {
            writeln!(w, "{s}\t{t}\t{p}")?;
        }
        Ok(())
    }
}

fn insert_checked(
    raw: &mut BTreeMap<String, Vec<(String, f64)>>,
    src: String,
    tgt: String,
    p: f64,
    context: &str,
    line: usize,
) -> Result<()> {
    if src.is_empty() || tgt.is_empty() {
        return Err(Error::parse(context, line, "empty word"));
    }
    if !(p.is_finite() && p > 0.0 && p <= 1.0) {
        return Err(Error::parse(context, line, format!("probability {p} outside (0, 1]")));
    }
    let list = raw.entry(src).or_default();
    if list.iter().any(|(t, _)| *t == tgt) {
        return Err(Error::parse(context, line, format!("duplicate entry for target {tgt:?}")));
    }
    list.push((tgt, p));
    Ok(())
}

fn finish(
    src_lang: &str,
    tgt_lang: &str,
    raw: BTreeMap<String, Vec<(String, f64)>>,
    opts: LexiconOptions,
) -> (TranslationLexicon, LoadReport) {
    let mut report = LoadReport::default();
    let mut entries = HashMap::with_capacity(raw.len());
    for (src, mut list) in raw {
        let total: f64 = list.iter().map(|(_, p)| p).sum();
        if total > 1.0 + RENORMALIZE_SLACK {
            log::warn!("translations of {src:?} sum to {total}; renormalized");
            list.iter_mut().for_each(|(_, p)| *p /= total);
            report.renormalized.push(src.clone());
        }
        let before = list.len();
        list.retain(|(_, p)| *p >= opts.prune_floor);
        report.pruned += before - list.len();
        if list.is_empty() {
            continue;
        }
        rank(&mut list);
        entries.insert(src, list);
    }
    (
        TranslationLexicon {
            src_lang: src_lang.to_string(),
            tgt_lang: tgt_lang.to_string(),
            entries,
        },
        report,
    )
}

/// Reads a lexical table. Blank lines are ignored.
pub fn load_lexicon<R: BufRead>(
    reader: R,
    src_lang: &str,
    tgt_lang: &str,
    opts: LexiconOptions,
) -> Result<(TranslationLexicon, LoadReport)> {
    const CONTEXT: &str = "lexicon";
    let mut raw: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [src, tgt, prob] = fields[..] else {
            return Err(Error::parse(CONTEXT, i + 1, format!("expected 3 tab-separated fields, found {}", fields.len())));
        };
        let p: f64 = prob
            .trim()
            .parse()
            .map_err(|_| Error::parse(CONTEXT, i + 1, format!("non-numeric probability {prob:?}")))?;
        insert_checked(&mut raw, src.to_string(), tgt.to_string(), p, CONTEXT, i + 1)?;
    }
    Ok(finish(src_lang, tgt_lang, raw, opts))
}
