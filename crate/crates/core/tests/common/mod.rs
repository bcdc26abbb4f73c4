//! Synthetic corpora shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use bitext_core::classifier::{
    generate_training_set, train_classifier, training_features, FeatureExtractor, Hyperparams, MaxMarginModel,
};
use bitext_core::ingest::{ComparableDocPair, LinkSource, RawDocument, SentenceRecord};
use bitext_core::lexicon::TranslationLexicon;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Letter-only pseudo-word for index `i`.
pub fn word(prefix: &str, mut i: usize) -> String {
    let mut s = String::from(prefix);
    loop {
        s.push((b'a' + (i % 26) as u8) as char);
        i /= 26;
        if i == 0 {
            break;
        }
    }
    s
}

/// Word-for-word toy language pair.
pub struct ToyLanguage {
    pub src_words: Vec<String>,
    pub tgt_words: Vec<String>,
    pub lexicon: TranslationLexicon,
}

impl ToyLanguage {
    pub fn new(size: usize, rng: &mut ChaCha8Rng) -> Self {
        let src_words: Vec<String> = (0..size).map(|i| word("po", i)).collect();
        let tgt_words: Vec<String> = (0..size).map(|i| word("en", i)).collect();
        let mut entries = Vec::new();
        for i in 0..size {
            entries.push((src_words[i].clone(), tgt_words[i].clone(), 0.8));
            let mut alt = rng.gen_range(0..size);
            if alt == i {
                alt = (alt + 1) % size;
            }
            entries.push((src_words[i].clone(), tgt_words[alt].clone(), 0.2));
        }
        let lexicon = TranslationLexicon::from_entries("pl", "en", entries).unwrap();
        ToyLanguage {
            src_words,
            tgt_words,
            lexicon,
        }
    }

    pub fn src_sentence(&self, rng: &mut ChaCha8Rng) -> Vec<String> {
        let len = rng.gen_range(5..=12);
        let mut s: Vec<String> = (0..len).map(|_| self.src_words.choose(rng).unwrap().clone()).collect();
        s.push(".".into());
        s
    }

    pub fn tgt_sentence(&self, rng: &mut ChaCha8Rng) -> Vec<String> {
        let len = rng.gen_range(5..=12);
        let mut s: Vec<String> = (0..len).map(|_| self.tgt_words.choose(rng).unwrap().clone()).collect();
        s.push(".".into());
        s
    }

    /// Noisy translation: most words map to their primary translation,
    /// some are replaced, dropped or joined by an extra word.
    pub fn translate(&self, src: &[String], rng: &mut ChaCha8Rng) -> Vec<String> {
        let mut out = Vec::new();
        for w in src {
            if w == "." {
                out.push(w.clone());
                continue;
            }
            let roll: f64 = rng.gen();
            if roll < 0.05 {
                continue;
            }
            if roll < 0.15 {
                out.push(self.tgt_words.choose(rng).unwrap().clone());
            } else {
                let i = self.src_words.iter().position(|x| x == w).unwrap();
                out.push(self.tgt_words[i].clone());
            }
            if rng.gen_bool(0.05) {
                out.push(self.tgt_words.choose(rng).unwrap().clone());
            }
        }
        out
    }
}

pub fn train_toy_classifier(lang: &ToyLanguage, seed_pairs: usize, rng: &mut ChaCha8Rng) -> MaxMarginModel<f64> {
    let seed: Vec<(Vec<String>, Vec<String>)> = (0..seed_pairs)
        .map(|_| {
            let s = lang.src_sentence(rng);
            let t = lang.translate(&s, rng);
            (s, t)
        })
        .collect();
    let set = generate_training_set(&seed, 3, 11).unwrap();
    let extractor = FeatureExtractor::new(&lang.lexicon);
    let (pos, neg) = training_features::<f64, _>(&seed, &set, &extractor).unwrap();
    train_classifier(&pos, &neg, &Hyperparams::default()).unwrap().model
}

/// Source positions of the planted translations and their target
/// positions, each within one sentence of its source position and in the
/// same order, as in articles that share a structure.
fn planted_positions(n: usize, k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    loop {
        let mut src: Vec<usize> = rand::seq::index::sample(rng, n, k).into_vec();
        src.sort_unstable();
        let tgt: Vec<usize> = src
            .iter()
            .map(|&i| (i as i64 + rng.gen_range(-1..=1)).clamp(0, n as i64 - 1) as usize)
            .collect();
        if tgt.windows(2).all(|w| w[0] < w[1]) {
            return (src, tgt);
        }
    }
}

/// A comparable collection with translations planted at known positions.
pub struct PlantedCollection {
    pub pairs: Vec<ComparableDocPair>,
    /// `(doc pair id, src index, tgt index)` of every planted translation.
    pub planted: BTreeSet<(String, usize, usize)>,
}

pub fn planted_collection(
    lang: &ToyLanguage,
    docs: usize,
    sentences_per_side: usize,
    planted_per_doc: usize,
    rng: &mut ChaCha8Rng,
) -> PlantedCollection {
    let mut pairs = Vec::new();
    let mut planted = BTreeSet::new();
    for d in 0..docs {
        let src: Vec<Vec<String>> = (0..sentences_per_side).map(|_| lang.src_sentence(rng)).collect();
        let mut tgt: Vec<Vec<String>> = (0..sentences_per_side).map(|_| lang.tgt_sentence(rng)).collect();
        let (src_pos, tgt_pos) = planted_positions(sentences_per_side, planted_per_doc, rng);
        let id = format!("d{d:04}");
        for (&i, &j) in src_pos.iter().zip(&tgt_pos) {
            tgt[j] = lang.translate(&src[i], rng);
            planted.insert((format!("pl:{id}|en:{id}"), i, j));
        }
        let body = |side: &[Vec<String>]| side.iter().map(|s| s.join(" ")).collect::<Vec<_>>().join("\n");
        let pair = ComparableDocPair::new(
            RawDocument::new(&id, "pl", &id, body(&src)),
            RawDocument::new(&id, "en", &id, body(&tgt)),
            LinkSource::Manual,
        )
        .unwrap();
        pairs.push(pair);
    }
    PlantedCollection { pairs, planted }
}

/// Seed corpus holding the analogy
/// `Poproszę koc i poduszkę . : … teraz . :: Poproszę kawę . : … teraz .`
pub fn request_analogy_seed() -> Vec<(SentenceRecord, SentenceRecord)> {
    [
        ("Poproszę koc i poduszkę.", "A blanket and a pillow, please."),
        ("Poproszę koc i poduszkę teraz.", "A blanket and a pillow now, please."),
        ("Poproszę kawę.", "A coffee, please."),
        ("Poproszę kawę teraz.", "A coffee now, please."),
        ("Czy mogę poprosić o śmietankę i cukier?", "Can I have cream and sugar?"),
    ]
    .iter()
    .map(|(s, t)| (SentenceRecord::new(*s), SentenceRecord::new(*t)))
    .collect()
}
