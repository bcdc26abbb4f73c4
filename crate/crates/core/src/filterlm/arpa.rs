//! Textual back-off n-gram format.
//!
//! A listed n-gram carries the model's full probability. An unlisted one
//! backs off: `p(w | h) = bow(h) * p(w | h')`, with
//! `bow(h) = kV / (c(h) + kV)`, which reproduces the interpolated model
//! exactly.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use super::ngram::{LanguageModel, NGramLM, BOS};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// log10 probability written for `<s>`, which is never predicted.
const NEVER: f64 = -99.0;

pub fn write_arpa<F: Real, W: Write>(lm: &NGramLM<F>, mut w: W) -> Result<()> {
    let mut blocks: Vec<Vec<Vec<u32>>> = Vec::with_capacity(lm.order());
    for m in 1..=lm.order() {
        let mut grams: Vec<Vec<u32>> = if m == 1 {
            (0..=lm.vocabulary().len() as u32).map(|id| vec![id]).collect()
        } else {
            lm.ngrams_of_order(m).keys().cloned().collect()
        };
        grams.sort_by(|a, b| {
            let wa: Vec<&str> = a.iter().map(|&i| lm.word(i)).collect();
            let wb: Vec<&str> = b.iter().map(|&i| lm.word(i)).collect();
            wa.cmp(&wb)
        });
        blocks.push(grams);
    }
    writeln!(w, "\\data\\")?;
    for (m, grams) in blocks.iter().enumerate() {
        writeln!(w, "ngram {}={}", m + 1, grams.len())?;
    }
    for (m, grams) in blocks.iter().enumerate() {
        writeln!(w)?;
        writeln!(w, "\\{}-grams:", m + 1)?;
        for gram in grams {
            let words: Vec<&str> = gram.iter().map(|&i| lm.word(i)).collect();
            let is_bos = words == [BOS];
            let logp = if is_bos {
                NEVER
            } else {
                lm.prob_ids(&gram[..gram.len() - 1], gram[gram.len() - 1]).log10().as_f64()
            };
            if m + 1 < lm.order() {
                let bow = lm.backoff_weight(gram).log10().as_f64();
                writeln!(w, "{logp}\t{}\t{bow}", words.join(" "))?;
            } else {
                writeln!(w, "{logp}\t{}", words.join(" "))?;
            }
        }
    }
    writeln!(w)?;
    writeln!(w, "\\end\\")?;
    Ok(())
}

/// A back-off model read from the textual format.
#[derive(Debug, Clone, Default)]
pub struct ArpaModel {
    pub order: usize,
    /// n-gram to `(log10 p, log10 bow)`.
    entries: HashMap<Vec<String>, (f64, f64)>,
}

impl ArpaModel {
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        const CONTEXT: &str = "ARPA model";
        let mut model = ArpaModel::default();
        let mut declared: Vec<usize> = Vec::new();
        let mut section: Option<usize> = None;
        let mut seen_end = false;
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end();
            if line.is_empty() || line == "\\data\\" {
                continue;
            }
            if line == "\\end\\" {
                seen_end = true;
                break;
            }
            if let Some(rest) = line.strip_prefix("ngram ") {
                let count = rest
                    .split_once('=')
                    .and_then(|(_, c)| c.trim().parse().ok())
                    .ok_or_else(|| Error::parse(CONTEXT, n + 1, "bad ngram count"))?;
                declared.push(count);
                continue;
            }
            if let Some(m) = line.strip_prefix('\\').and_then(|s| s.strip_suffix("-grams:")) {
                section = Some(m.parse().map_err(|_| Error::parse(CONTEXT, n + 1, "bad section header"))?);
                continue;
            }
            let m = section.ok_or_else(|| Error::parse(CONTEXT, n + 1, "entry outside a section"))?;
            let fields: Vec<&str> = line.split('\t').collect();
            let parse = |s: &str| s.parse::<f64>().map_err(|_| Error::parse(CONTEXT, n + 1, format!("bad number {s:?}")));
            let (logp, words, bow) = match fields[..] {
                [p, words] => (parse(p)?, words, 0.0),
                [p, words, b] => (parse(p)?, words, parse(b)?),
                _ => return Err(Error::parse(CONTEXT, n + 1, "expected 2 or 3 fields")),
            };
            let gram: Vec<String> = words.split(' ').map(str::to_string).collect();
            if gram.len() != m {
                return Err(Error::parse(CONTEXT, n + 1, format!("expected a {m}-gram")));
            }
            model.entries.insert(gram, (logp, bow));
        }
        if !seen_end {
            return Err(Error::parse(CONTEXT, 0, "missing \\end\\ marker"));
        }
        model.order = declared.len();
        for (m, count) in declared.iter().enumerate() {
            let found = model.entries.keys().filter(|g| g.len() == m + 1).count();
            if found != *count {
                return Err(Error::parse(CONTEXT, 0, format!("{} {}-grams declared, {found} found", count, m + 1)));
            }
        }
        Ok(model)
    }

    /// log10 `p(word | history)` by back-off, with the history clipped to
    /// `order - 1` words. Unlisted words read as `<unk>`.
    pub fn log10_prob<S: AsRef<str>>(&self, history: &[S], word: &str) -> f64 {
        let word = if self.entries.contains_key(&vec![word.to_string()]) { word } else { "<unk>" };
        let keep = history.len().min(self.order.saturating_sub(1));
        let mut context: Vec<String> = history[history.len() - keep..]
            .iter()
            .map(|w| {
                let w = w.as_ref();
                if self.entries.contains_key(&vec![w.to_string()]) { w.to_string() } else { "<unk>".to_string() }
            })
            .collect();
        let mut penalty = 0.0;
        loop {
            let mut gram = context.clone();
            gram.push(word.to_string());
            if let Some((p, _)) = self.entries.get(&gram) {
                return penalty + p;
            }
            if context.is_empty() {
                return f64::NEG_INFINITY;
            }
            penalty += self.entries.get(&context).map_or(0.0, |(_, b)| *b);
            context.remove(0);
        }
    }
}
