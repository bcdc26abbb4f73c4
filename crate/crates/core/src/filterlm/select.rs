use rayon::prelude::*;

use super::ngram::{LanguageModel, NGramLM};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_KEEP_FRACTION: f64 = 0.5;
pub const DEFAULT_EM_TOLERANCE: f64 = 1e-4;
pub const DEFAULT_EM_MAX_ITERATIONS: usize = 200;

/// `exp` of the mean negative log-probability per token, `</s>` included.
pub fn perplexity<F: Real, M: LanguageModel<F>, S: AsRef<[String]> + Sync>(lm: &M, sentences: &[S]) -> Result<F> {
    if sentences.is_empty() {
        return Err(Error::NotEnoughData("no tokens to score".into()));
    }
    let per_sentence: Vec<(F, usize)> = sentences
        .par_iter()
        .map(|s| {
            let lp = lm.token_log_probs(s.as_ref());
            (lp.iter().copied().sum::<F>(), lp.len())
        })
        .collect();
    let (total, count) = per_sentence.into_iter().fold((F::zero(), 0), |(a, n), (b, m)| (a + b, n + m));
    Ok((-total / F::of_usize(count)).exp())
}

/// Mean negative natural-log probability per token of one sentence.
pub fn cross_entropy<F: Real, M: LanguageModel<F>>(lm: &M, sentence: &[String]) -> F {
    let lp = lm.token_log_probs(sentence);
    -lp.iter().copied().sum::<F>() / F::of_usize(lp.len())
}

/// `H_in(s) - H_out(s)`; lower means closer to the in-domain model.
pub fn moore_lewis_score<F: Real, A: LanguageModel<F>, B: LanguageModel<F>>(in_lm: &A, out_lm: &B, sentence: &[String]) -> F {
    cross_entropy(in_lm, sentence) - cross_entropy(out_lm, sentence)
}

/// In-domain and out-of-domain models for one language.
#[derive(Debug, Clone)]
pub struct DomainModels<M> {
    pub in_domain: M,
    pub out_domain: M,
}

/// Sum of the source-side and target-side scores of a sentence pair.
pub fn bilingual_moore_lewis_score<F: Real, M: LanguageModel<F>>(
    src: &DomainModels<M>,
    tgt: &DomainModels<M>,
    src_sentence: &[String],
    tgt_sentence: &[String],
) -> F {
    moore_lewis_score(&src.in_domain, &src.out_domain, src_sentence) + moore_lewis_score(&tgt.in_domain, &tgt.out_domain, tgt_sentence)
}

/// Bilingual scores of many pairs, in input order.
pub fn score_pairs<F: Real, M: LanguageModel<F>, S: AsRef<[String]> + Sync>(
    src: &DomainModels<M>,
    tgt: &DomainModels<M>,
    pairs: &[(S, S)],
) -> Vec<F>
where
    M: Sync,
{
    pairs
        .par_iter()
        .map(|(s, t)| bilingual_moore_lewis_score(src, tgt, s.as_ref(), t.as_ref()))
        .collect()
}

/// Keeps the `ceil(fraction * N)` lowest-scoring items, in input order.
/// Ties at the cut keep the earlier item.
pub fn filter_top<T, F: Real>(items: Vec<(T, F)>, fraction: f64) -> Result<Vec<(T, F)>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid(format!("keep fraction must lie in (0, 1], got {fraction}")));
    }
    let keep = (fraction * items.len() as f64 - 1e-9).ceil().max(0.0) as usize;
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| items[a].1.as_f64().total_cmp(&items[b].1.as_f64()).then(a.cmp(&b)));
    let mut chosen = vec![false; items.len()];
    for &i in order.iter().take(keep) {
        chosen[i] = true;
    }
    Ok(items.into_iter().zip(chosen).filter(|(_, c)| *c).map(|(x, _)| x).collect())
}

/// Convex mixture of models sharing one vocabulary.
#[derive(Debug, Clone)]
pub struct InterpolatedLM<F> {
    pub components: Vec<NGramLM<F>>,
    pub weights: Vec<F>,
    /// Dev log-likelihood before the first and after each EM iteration.
    pub log_likelihood_trace: Vec<F>,
    pub weight_trace: Vec<Vec<F>>,
    pub converged: bool,
}

impl<F: Real> InterpolatedLM<F> {
    pub fn prob<S: AsRef<str>>(&self, history: &[S], word: &str) -> F {
        self.components
            .iter()
            .zip(&self.weights)
            .fold(F::zero(), |acc, (lm, w)| acc + *w * lm.prob(history, word))
    }
}

impl<F: Real> LanguageModel<F> for InterpolatedLM<F> {
    fn vocabulary(&self) -> &[String] {
        self.components[0].vocabulary()
    }

    fn token_log_probs(&self, sentence: &[String]) -> Vec<F> {
        let per_model: Vec<Vec<F>> = self.components.iter().map(|lm| lm.token_log_probs(sentence)).collect();
        (0..per_model[0].len())
            .map(|t| {
                per_model
                    .iter()
                    .zip(&self.weights)
                    .fold(F::zero(), |acc, (lp, w)| acc + *w * lp[t].exp())
                    .ln()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for EmOptions {
    fn default() -> Self {
        EmOptions {
            tolerance: DEFAULT_EM_TOLERANCE,
            max_iterations: DEFAULT_EM_MAX_ITERATIONS,
        }
    }
}

/// Fits mixture weights maximising dev log-likelihood by EM, starting
/// from uniform weights. Stops once no weight moves by `tolerance`; if
/// that never happens the last weights are kept and `converged` is false.
pub fn interpolate_lms<F: Real, S: AsRef<[String]> + Sync>(lms: Vec<NGramLM<F>>, dev: &[S], opts: &EmOptions) -> Result<InterpolatedLM<F>> {
    if lms.len() < 2 {
        return Err(Error::invalid("interpolation needs at least 2 models"));
    }
    if dev.is_empty() {
        return Err(Error::NotEnoughData("development corpus is empty".into()));
    }
    let first = &lms[0];
    if let Some(bad) = lms.iter().find(|lm| lm.order() != first.order()) {
        return Err(Error::invalid(format!("model orders differ: {} and {}", first.order(), bad.order())));
    }
    if lms.iter().any(|lm| lm.vocabulary() != first.vocabulary()) {
        return Err(Error::invalid("models must share one vocabulary"));
    }
    // probs[i][t]: probability of dev token t under model i
    let probs: Vec<Vec<F>> = lms
        .iter()
        .map(|lm| {
            dev.par_iter()
                .map(|s| lm.token_log_probs(s.as_ref()))
                .collect::<Vec<_>>()
                .into_iter()
                .flatten()
                .map(F::exp)
                .collect()
        })
        .collect();
    let tokens = probs[0].len();
    let k = lms.len();
    let loglik = |w: &[F]| -> F {
        (0..tokens)
            .map(|t| (0..k).fold(F::zero(), |acc, i| acc + w[i] * probs[i][t]).ln())
            .sum()
    };

    let mut weights = vec![F::one() / F::of_usize(k); k];
    let mut log_likelihood_trace = vec![loglik(&weights)];
    let mut weight_trace = vec![weights.clone()];
    let mut converged = false;
    for _ in 0..opts.max_iterations {
        let mut resp = vec![F::zero(); k];
        for t in 0..tokens {
            let mix = (0..k).fold(F::zero(), |acc, i| acc + weights[i] * probs[i][t]);
            for i in 0..k {
                resp[i] = resp[i] + weights[i] * probs[i][t] / mix;
            }
        }
        let total: F = resp.iter().copied().sum();
        let next: Vec<F> = resp.iter().map(|r| *r / total).collect();
        let change = next
            .iter()
            .zip(&weights)
            .map(|(a, b)| (*a - *b).abs().as_f64())
            .fold(0.0, f64::max);
        weights = next;
        log_likelihood_trace.push(loglik(&weights));
        weight_trace.push(weights.clone());
        if change < opts.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("interpolation weights did not converge after {} iterations", opts.max_iterations);
    }
    Ok(InterpolatedLM {
        components: lms,
        weights,
        log_likelihood_trace,
        weight_trace,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::super::ngram::{train_ngram_lm, uniform_lm, LmOptions};
    use super::*;
    use std::collections::BTreeSet;

    fn toks(lines: &[&str]) -> Vec<Vec<String>> {
        lines.iter().map(|l| l.split_whitespace().map(str::to_string).collect()).collect()
    }

    fn shared_opts(corpora: &[&[Vec<String>]]) -> LmOptions {
        let vocab: BTreeSet<String> = corpora.iter().flat_map(|c| c.iter().flatten().cloned()).collect();
        LmOptions {
            vocabulary: Some(vocab),
            ..LmOptions::default()
        }
    }

    #[test]
    fn uniform_perplexity_is_vocab_size() {
        let lm: NGramLM<f64> = uniform_lm(["a", "b", "c"].map(String::from), 3).unwrap();
        let v = lm.vocabulary().len() as f64;
        let ppl = perplexity(&lm, &toks(&["a b c", "c c"])).unwrap();
        assert!((ppl - v).abs() < 1e-9);
    }

    #[test]
    fn training_text_beats_shuffled_vocabulary() {
        let train = toks(&["the cat sat on the mat", "the dog sat on the rug", "a cat and a dog"]);
        let lm: NGramLM<f64> = train_ngram_lm(&train, &LmOptions::default()).unwrap();
        let held = toks(&["mat the on sat cat the", "rug a and dog on a"]);
        assert!(perplexity(&lm, &train).unwrap() <= perplexity(&lm, &held).unwrap());
    }

    #[test]
    fn empty_input_flagged() {
        let lm: NGramLM<f64> = uniform_lm(["a".to_string()], 1).unwrap();
        assert!(matches!(perplexity::<f64, _, Vec<String>>(&lm, &[]), Err(Error::NotEnoughData(_))));
    }

    #[test]
    fn moore_lewis_signs_and_additivity() {
        let inside = toks(&["red green blue", "green blue red"]);
        let outside = toks(&["one two three", "three two one"]);
        let o = shared_opts(&[&inside, &outside]);
        let lm_in: NGramLM<f64> = train_ngram_lm(&inside, &o).unwrap();
        let lm_out: NGramLM<f64> = train_ngram_lm(&outside, &o).unwrap();
        assert_eq!(moore_lewis_score(&lm_in, &lm_in, &inside[0]), 0.0);
        assert!(moore_lewis_score(&lm_in, &lm_out, &inside[0]) < 0.0);
        assert!(moore_lewis_score(&lm_in, &lm_out, &outside[0]) > 0.0);
        let m = DomainModels { in_domain: lm_in.clone(), out_domain: lm_out.clone() };
        let both = bilingual_moore_lewis_score(&m, &m, &inside[0], &outside[1]);
        let parts = moore_lewis_score(&lm_in, &lm_out, &inside[0]) + moore_lewis_score(&lm_in, &lm_out, &outside[1]);
        assert!((both - parts).abs() < 1e-9);
        assert_eq!(score_pairs(&m, &m, &[(inside[0].clone(), outside[1].clone())]), vec![both]);
    }

    #[test]
    fn filter_top_rules() {
        let items = vec![("a", 0.4), ("b", -1.0), ("c", 0.1), ("d", 2.0)];
        assert_eq!(filter_top(items.clone(), 1.0).unwrap(), items);
        assert_eq!(filter_top(items.clone(), 0.5).unwrap(), vec![("b", -1.0), ("c", 0.1)]);
        let ties = vec![("x", 1.0), ("y", 0.0), ("z", 1.0)];
        assert_eq!(filter_top(ties, 0.6).unwrap(), vec![("x", 1.0), ("y", 0.0)]);
        assert!(filter_top(items, 0.0).is_err());
        assert_eq!(filter_top::<&str, f64>(vec![("a", 1.0)], 0.1).unwrap().len(), 1);
    }

    #[test]
    fn em_prefers_matching_domain() {
        let inside = toks(&["red green blue", "green blue red", "blue red green red"]);
        let outside = toks(&["one two three", "three two one", "two two one"]);
        let o = shared_opts(&[&inside, &outside]);
        let lms = vec![train_ngram_lm::<f64, _>(&inside, &o).unwrap(), train_ngram_lm(&outside, &o).unwrap()];
        let mix = interpolate_lms(lms, &inside, &EmOptions::default()).unwrap();
        assert!(mix.converged);
        assert!(mix.weights[0] >= 0.9, "{:?}", mix.weights);
        for w in &mix.weight_trace {
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(w.iter().all(|x| *x >= 0.0));
        }
        for pair in mix.log_likelihood_trace.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-9);
        }
        let total: f64 = mix.vocabulary().iter().map(|w| mix.prob(&["red"], w)).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn identical_components_keep_perplexity() {
        let c = toks(&["a b", "b a c"]);
        let lm: NGramLM<f64> = train_ngram_lm(&c, &LmOptions::default()).unwrap();
        let mix = interpolate_lms(vec![lm.clone(), lm.clone()], &c, &EmOptions::default()).unwrap();
        let (p1, p2) = (perplexity(&lm, &c).unwrap(), perplexity(&mix, &c).unwrap());
        assert!((p1 - p2).abs() < 1e-9);
    }

    #[test]
    fn interpolation_preconditions() {
        let a: NGramLM<f64> = train_ngram_lm(&toks(&["a"]), &LmOptions::default()).unwrap();
        let b: NGramLM<f64> = train_ngram_lm(&toks(&["b"]), &LmOptions::default()).unwrap();
        assert!(interpolate_lms(vec![a.clone()], &toks(&["a"]), &EmOptions::default()).is_err());
        assert!(interpolate_lms(vec![a.clone(), b], &toks(&["a"]), &EmOptions::default()).is_err());
        assert!(interpolate_lms::<f64, Vec<String>>(vec![a.clone(), a], &[], &EmOptions::default()).is_err());
    }
}
