use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::lexicon::TranslationLexicon;
use crate::scalar::Real;

pub const FEATURE_NAMES: [&str; 7] = [
    "len_ratio",
    "src_coverage",
    "tgt_coverage",
    "avg_translation_prob",
    "number_overlap",
    "punct_overlap",
    "bias",
];

pub const BIAS_INDEX: usize = 6;

/// Fixed-order feature values for one sentence pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<F> {
    values: Vec<F>,
}

impl<F: Real> FeatureVector<F> {
    pub fn new(values: Vec<F>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("feature values must be finite"));
        }
        Ok(FeatureVector { values })
    }

    pub fn as_slice(&self) -> &[F] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of a named feature from [`FEATURE_NAMES`].
    pub fn get(&self, name: &str) -> Option<F> {
        let idx = FEATURE_NAMES.iter().position(|n| *n == name)?;
        self.values.get(idx).copied()
    }

    pub fn dot(&self, weights: &[F]) -> F {
        self.values
            .iter()
            .zip(weights)
            .fold(F::zero(), |acc, (x, w)| acc + *x * *w)
    }
}

fn is_punct(token: &str) -> bool {
    token.chars().all(|c| !c.is_alphanumeric() && !c.is_whitespace())
}

fn is_number(token: &str) -> bool {
    token.chars().any(|c| c.is_ascii_digit())
}

/// Jaccard overlap; two empty sets count as full agreement.
fn jaccard(a: &HashSet<String>, b: &HashSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

/// A sentence with everything feature extraction needs precomputed, so a
/// similarity matrix costs one preparation per sentence instead of one per
/// cell.
#[derive(Debug, Clone)]
pub struct PreparedSentence {
    len: usize,
    lower: HashSet<String>,
    /// Lowercased translations of each token, best first.
    translations: Vec<Vec<(String, f64)>>,
    numbers: HashSet<String>,
    puncts: HashSet<String>,
}

impl PreparedSentence {
    pub fn new(tokens: &[String], lexicon: &TranslationLexicon) -> Self {
        let translations = tokens
            .iter()
            .map(|t| {
                lexicon
                    .lookup(t)
                    .iter()
                    .map(|(w, p)| (w.to_lowercase(), *p))
                    .collect()
            })
            .collect();
        PreparedSentence {
            len: tokens.len(),
            lower: tokens.iter().map(|t| t.to_lowercase()).collect(),
            translations,
            numbers: tokens.iter().filter(|t| is_number(t)).map(|t| t.to_lowercase()).collect(),
            puncts: tokens.iter().filter(|t| is_punct(t)).cloned().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Fraction of tokens with a translation present in `other`, and the
    /// mean best matched probability over those tokens.
    fn coverage(&self, other: &PreparedSentence) -> (f64, f64) {
        let mut covered = 0usize;
        let mut prob_sum = 0.0;
        for options in &self.translations {
            let best = options
                .iter()
                .filter(|(w, _)| other.lower.contains(w))
                .map(|(_, p)| *p)
                .fold(None, |acc: Option<f64>, p| Some(acc.map_or(p, |a| a.max(p))));
            if let Some(p) = best {
                covered += 1;
                prob_sum += p;
            }
        }
        let coverage = covered as f64 / self.len as f64;
        let avg = if covered == 0 { 0.0 } else { prob_sum / covered as f64 };
        (coverage, avg)
    }
}

/// Computes sentence-pair features against one lexicon and its reverse.
#[derive(Debug, Clone)]
pub struct FeatureExtractor<'a> {
    lexicon: &'a TranslationLexicon,
    reverse: TranslationLexicon,
}

impl<'a> FeatureExtractor<'a> {
    pub fn new(lexicon: &'a TranslationLexicon) -> Self {
        FeatureExtractor {
            lexicon,
            reverse: lexicon.reversed(),
        }
    }

    pub fn prepare_src(&self, tokens: &[String]) -> PreparedSentence {
        PreparedSentence::new(tokens, self.lexicon)
    }

    pub fn prepare_tgt(&self, tokens: &[String]) -> PreparedSentence {
        PreparedSentence::new(tokens, &self.reverse)
    }

    pub fn extract<F: Real>(&self, src: &[String], tgt: &[String]) -> Result<FeatureVector<F>> {
        if src.is_empty() || tgt.is_empty() {
            return Err(Error::EmptySentence);
        }
        Ok(self.extract_prepared(&self.prepare_src(src), &self.prepare_tgt(tgt)))
    }

    /// Both sentences must be non-empty.
    pub fn extract_prepared<F: Real>(&self, src: &PreparedSentence, tgt: &PreparedSentence) -> FeatureVector<F> {
        debug_assert!(!src.is_empty() && !tgt.is_empty());
        let (short, long) = if src.len <= tgt.len { (src.len, tgt.len) } else { (tgt.len, src.len) };
        let (src_cov, avg_prob) = src.coverage(tgt);
        let (tgt_cov, _) = tgt.coverage(src);
        let values = [
            short as f64 / long as f64,
            src_cov,
            tgt_cov,
            avg_prob,
            jaccard(&src.numbers, &tgt.numbers),
            jaccard(&src.puncts, &tgt.puncts),
            1.0,
        ];
        FeatureVector {
            values: values.iter().map(|v| F::of(*v)).collect(),
        }
    }
}

/// One-off feature extraction. Prefer [`FeatureExtractor`] when scoring
/// many pairs against the same lexicon.
pub fn extract_features<F: Real>(src: &[String], tgt: &[String], lexicon: &TranslationLexicon) -> Result<FeatureVector<F>> {
    FeatureExtractor::new(lexicon).extract(src, tgt)
}
