use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::features::{FeatureExtractor, FeatureVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Half-width of the neighbourhood hard negatives are drawn from.
pub const NEGATIVE_WINDOW: usize = 5;
pub const DEFAULT_NEGATIVES_PER_POSITIVE: usize = 3;

/// Index pairs `(src, tgt)` into a parallel corpus.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TrainingSet {
    pub positives: Vec<(usize, usize)>,
    pub negatives: Vec<(usize, usize)>,
}

/// Builds positives from the corpus and `k` negatives per positive.
///
/// Draws alternate between a target within `NEGATIVE_WINDOW` sentences of
/// the source and a target from anywhere in the corpus. A negative never
/// repeats and never has the same text as a given pair. When a sentence
/// has fewer than `k` admissible partners it gets as many as exist.
pub fn generate_training_set<S: AsRef<[String]>>(corpus: &[(S, S)], k: usize, seed: u64) -> Result<TrainingSet> {
    let n = corpus.len();
    if k > 0 && n < 2 {
        return Err(Error::NotEnoughData("negative sampling needs at least 2 pairs".into()));
    }
    let texts: Vec<(&[String], &[String])> = corpus.iter().map(|(s, t)| (s.as_ref(), t.as_ref())).collect();
    let positive_texts: HashSet<(&[String], &[String])> = texts.iter().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = TrainingSet {
        positives: (0..n).map(|i| (i, i)).collect(),
        negatives: Vec::with_capacity(n * k),
    };
    if k == 0 {
        return Ok(set);
    }

    for i in 0..n {
        let admissible = |j: usize| j != i && !positive_texts.contains(&(texts[i].0, texts[j].1));
        let mut chosen: Vec<usize> = Vec::with_capacity(k);
        let lo = i.saturating_sub(NEGATIVE_WINDOW);
        let hi = (i + NEGATIVE_WINDOW).min(n - 1);
        let budget = 20 * k + 20;
        let mut draw = 0;
        while chosen.len() < k && draw < budget {
            let j = if draw % 2 == 0 { rng.gen_range(lo..=hi) } else { rng.gen_range(0..n) };
            draw += 1;
            if admissible(j) && !chosen.contains(&j) {
                chosen.push(j);
            }
        }
        if chosen.len() < k {
            let mut rest: Vec<usize> = (0..n).filter(|&j| admissible(j) && !chosen.contains(&j)).collect();
            rest.sort_by_key(|&j| (j.abs_diff(i), j));
            chosen.extend(rest.into_iter().take(k - chosen.len()));
        }
        set.negatives.extend(chosen.into_iter().map(|j| (i, j)));
    }
    Ok(set)
}

/// Feature vectors for every positive and negative of `set`.
pub fn training_features<F: Real, S: AsRef<[String]>>(
    corpus: &[(S, S)],
    set: &TrainingSet,
    extractor: &FeatureExtractor<'_>,
) -> Result<(Vec<FeatureVector<F>>, Vec<FeatureVector<F>>)> {
    let src: Vec<_> = corpus.iter().map(|(s, _)| extractor.prepare_src(s.as_ref())).collect();
    let tgt: Vec<_> = corpus.iter().map(|(_, t)| extractor.prepare_tgt(t.as_ref())).collect();
    let build = |pairs: &[(usize, usize)]| -> Result<Vec<FeatureVector<F>>> {
        pairs
            .iter()
            .map(|&(i, j)| {
                let (s, t) = (src.get(i), tgt.get(j));
                match (s, t) {
                    (Some(s), Some(t)) if !s.is_empty() && !t.is_empty() => Ok(extractor.extract_prepared(s, t)),
                    (Some(_), Some(_)) => Err(Error::EmptySentence),
                    _ => Err(Error::invalid(format!("pair ({i}, {j}) is outside the corpus"))),
                }
            })
            .collect()
    };
    Ok((build(&set.positives)?, build(&set.negatives)?))
}
