//! Interpolated add-k n-gram model.
//!
//! `p_m(w | h) = (c(h w) + kV * p_{m-1}(w | h')) / (c(h) + kV)` where `h'`
//! drops the oldest word of `h`, `V` is the predicted vocabulary size and
//! `p_0` is uniform. Every sentence is predicted from a single `<s>` to its
//! `</s>`; histories never reach back past `<s>`.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";
pub const MAX_ORDER: usize = 5;
pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_ADD_K: f64 = 0.1;

/// Anything that assigns conditional word probabilities.
pub trait LanguageModel<F: Real>: Sync {
    /// Words that can be predicted, including `</s>` and `<unk>`.
    fn vocabulary(&self) -> &[String];

    /// Natural-log probabilities of each token of `sentence` and of the
    /// closing `</s>`.
    fn token_log_probs(&self, sentence: &[String]) -> Vec<F>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmOptions {
    pub order: usize,
    pub add_k: f64,
    /// Closed vocabulary; words outside it are read as `<unk>`. Defaults to
    /// the training words.
    pub vocabulary: Option<BTreeSet<String>>,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            order: DEFAULT_ORDER,
            add_k: DEFAULT_ADD_K,
            vocabulary: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NGramLM<F> {
    order: usize,
    add_k: F,
    /// Predicted words, sorted.
    vocab: Vec<String>,
    /// Ids of `vocab` entries plus `<s>`, which gets id `vocab.len()`.
    ids: HashMap<String, u32>,
    /// `ngrams[m - 1]` counts n-grams of length `m`.
    ngrams: Vec<HashMap<Vec<u32>, u64>>,
    /// Times each history was followed by a predicted word.
    histories: HashMap<Vec<u32>, u64>,
}

impl<F: Real> NGramLM<F> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn add_k(&self) -> F {
        self.add_k
    }

    fn bos(&self) -> u32 {
        self.vocab.len() as u32
    }

    fn id(&self, word: &str) -> u32 {
        match self.ids.get(word) {
            Some(&id) if word != BOS => id,
            _ => self.ids[UNK],
        }
    }

    pub(crate) fn word(&self, id: u32) -> &str {
        self.vocab.get(id as usize).map_or(BOS, String::as_str)
    }

    /// `<s>` followed by the ids of `sentence` and `</s>`.
    pub(crate) fn encode(&self, sentence: &[String]) -> Vec<u32> {
        std::iter::once(self.bos())
            .chain(sentence.iter().map(|w| self.id(w)))
            .chain(std::iter::once(self.ids[EOS]))
            .collect()
    }

    pub(crate) fn ngram_count(&self, gram: &[u32]) -> u64 {
        self.ngrams
            .get(gram.len().wrapping_sub(1))
            .and_then(|m| m.get(gram))
            .copied()
            .unwrap_or(0)
    }

    pub(crate) fn history_count(&self, history: &[u32]) -> u64 {
        self.histories.get(history).copied().unwrap_or(0)
    }

    pub(crate) fn ngrams_of_order(&self, m: usize) -> &HashMap<Vec<u32>, u64> {
        &self.ngrams[m - 1]
    }

    /// Mass given to the lower-order estimate after history `h`.
    pub(crate) fn backoff_weight(&self, history: &[u32]) -> F {
        let kv = self.add_k * F::of_usize(self.vocab.len());
        kv / (F::of(self.history_count(history) as f64) + kv)
    }

    /// `p(w | history)` for ids; `history` holds at most `order - 1` ids.
    pub(crate) fn prob_ids(&self, history: &[u32], w: u32) -> F {
        let kv = self.add_k * F::of_usize(self.vocab.len());
        let mut p = F::one() / F::of_usize(self.vocab.len());
        let mut gram: Vec<u32> = Vec::with_capacity(history.len() + 1);
        for start in (0..=history.len()).rev() {
            let h = &history[start..];
            gram.clear();
            gram.extend_from_slice(h);
            gram.push(w);
            let c_hw = F::of(self.ngram_count(&gram) as f64);
            let c_h = F::of(self.history_count(h) as f64);
            p = (c_hw + kv * p) / (c_h + kv);
        }
        p
    }

    /// `p(word | history)`, with the history truncated to `order - 1`
    /// words. Unknown words map to `<unk>`.
    pub fn prob<S: AsRef<str>>(&self, history: &[S], word: &str) -> F {
        let keep = history.len().min(self.order - 1);
        let ids: Vec<u32> = history[history.len() - keep..]
            .iter()
            .map(|w| if w.as_ref() == BOS { self.bos() } else { self.id(w.as_ref()) })
            .collect();
        let start = ids.iter().rposition(|&i| i == self.bos()).unwrap_or(0);
        let w = if word == BOS { self.ids[UNK] } else { self.id(word) };
        self.prob_ids(&ids[start..], w)
    }
}

impl<F: Real> LanguageModel<F> for NGramLM<F> {
    fn vocabulary(&self) -> &[String] {
        &self.vocab
    }

    fn token_log_probs(&self, sentence: &[String]) -> Vec<F> {
        let ids = self.encode(sentence);
        (1..ids.len())
            .map(|i| {
                let start = i.saturating_sub(self.order - 1);
                self.prob_ids(&ids[start..i], ids[i]).ln()
            })
            .collect()
    }
}

/// Counts n-grams of `corpus` up to `opts.order`.
pub fn train_ngram_lm<F: Real, S: AsRef<[String]>>(corpus: &[S], opts: &LmOptions) -> Result<NGramLM<F>> {
    if corpus.is_empty() {
        return Err(Error::NotEnoughData("language model corpus is empty".into()));
    }
    if !(1..=MAX_ORDER).contains(&opts.order) {
        return Err(Error::invalid(format!("order must be in 1..={MAX_ORDER}, got {}", opts.order)));
    }
    if !(opts.add_k > 0.0 && opts.add_k.is_finite()) {
        return Err(Error::invalid("add-k constant must be positive"));
    }
    let words: BTreeSet<String> = match &opts.vocabulary {
        Some(v) => v.clone(),
        None => corpus.iter().flat_map(|s| s.as_ref().iter().cloned()).collect(),
    };
    let mut vocab: Vec<String> = words.into_iter().filter(|w| w != BOS && w != EOS && w != UNK).collect();
    vocab.extend([EOS.to_string(), UNK.to_string()]);
    vocab.sort();
    let mut ids: HashMap<String, u32> = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
    ids.insert(BOS.to_string(), vocab.len() as u32);

    let mut lm = NGramLM {
        order: opts.order,
        add_k: F::of(opts.add_k),
        vocab,
        ids,
        ngrams: vec![HashMap::new(); opts.order],
        histories: HashMap::new(),
    };
    for sentence in corpus {
        let ids = lm.encode(sentence.as_ref());
        for i in 1..ids.len() {
            for m in 1..=opts.order.min(i + 1) {
                let gram = &ids[i + 1 - m..=i];
                *lm.ngrams[m - 1].entry(gram.to_vec()).or_default() += 1;
                *lm.histories.entry(gram[..m - 1].to_vec()).or_default() += 1;
            }
        }
    }
    Ok(lm)
}

/// Model giving every predicted word the same probability.
pub fn uniform_lm<F: Real>(words: impl IntoIterator<Item = String>, order: usize) -> Result<NGramLM<F>> {
    let vocabulary: BTreeSet<String> = words.into_iter().collect();
    let mut lm: NGramLM<F> = train_ngram_lm(
        &[Vec::<String>::new()],
        &LmOptions {
            order,
            add_k: 1.0,
            vocabulary: Some(vocabulary),
        },
    )?;
    lm.ngrams.iter_mut().for_each(HashMap::clear);
    lm.histories.clear();
    Ok(lm)
}
