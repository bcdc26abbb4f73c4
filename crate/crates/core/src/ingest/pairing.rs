use std::collections::{HashMap, HashSet};

use unicode_normalization::UnicodeNormalization;

use super::{ComparableDocPair, LinkSource, RawDocument};
use crate::error::{Error, Result};

#[derive(Debug, Default)]
pub struct PairingOutcome {
    pub pairs: Vec<ComparableDocPair>,
    /// Links naming a title absent from the target collection.
    pub missing_links: usize,
    /// Links to a target document already claimed by an earlier source.
    pub conflicts: usize,
    /// Linked pairs dropped because one side has an empty body.
    pub blank_skipped: usize,
}

fn nfc(s: &str) -> String {
    s.trim().nfc().collect()
}

fn collection_lang(docs: &[RawDocument]) -> Result<Option<String>> {
    let Some(first) = docs.first() else {
        return Ok(None);
    };
    if first.lang.is_empty() {
        return Err(Error::invalid(format!("document {} has no language", first.doc_id)));
    }
    if let Some(other) = docs.iter().find(|d| d.lang != first.lang) {
        return Err(Error::MixedLanguages {
            expected: first.lang.clone(),
            found: other.lang.clone(),
        });
    }
    Ok(Some(first.lang.clone()))
}

/// Pairs source documents with the target documents their interwiki links
/// name.
///
/// `src_docs` is the driving side: the links are read from it, so pass the
/// smaller, non-English collection there. Sources are visited in `doc_id`
/// order and each target is claimed by the first source that links to it.
pub fn pair_documents(src_docs: Vec<RawDocument>, tgt_docs: Vec<RawDocument>) -> Result<PairingOutcome> {
    let src_lang = collection_lang(&src_docs)?;
    let tgt_lang = collection_lang(&tgt_docs)?;
    let (Some(src_lang), Some(tgt_lang)) = (src_lang, tgt_lang) else {
        return Ok(PairingOutcome::default());
    };
    if src_lang == tgt_lang {
        return Err(Error::invalid(format!(
            "source and target collections are both {src_lang}"
        )));
    }

    let mut by_title: HashMap<String, usize> = HashMap::with_capacity(tgt_docs.len());
    for (idx, doc) in tgt_docs.iter().enumerate() {
        if by_title.insert(nfc(&doc.title), idx).is_some() {
            return Err(Error::DuplicateTitle {
                lang: tgt_lang,
                title: doc.title.clone(),
            });
        }
    }

    let mut src_docs = src_docs;
    src_docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));

    let mut outcome = PairingOutcome::default();
    let mut claimed: HashSet<usize> = HashSet::new();
    let mut tgt_slots: Vec<Option<RawDocument>> = tgt_docs.into_iter().map(Some).collect();
    for src in src_docs {
        let Some((_, foreign)) = src.cross_links.iter().find(|(lang, _)| *lang == tgt_lang) else {
            continue;
        };
        let Some(&idx) = by_title.get(&nfc(foreign)) else {
            outcome.missing_links += 1;
            continue;
        };
        if !claimed.insert(idx) {
            outcome.conflicts += 1;
            continue;
        }
        let tgt = tgt_slots[idx].take().expect("unclaimed target present");
        match ComparableDocPair::new(src, tgt, LinkSource::Interwiki) {
            Ok(pair) => outcome.pairs.push(pair),
            Err(Error::EmptyDocument) => outcome.blank_skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(outcome)
}
