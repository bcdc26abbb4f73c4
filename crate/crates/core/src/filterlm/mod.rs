//! n-gram language models and cross-entropy data selection.

mod arpa;
mod ngram;
mod select;

pub use arpa::{write_arpa, ArpaModel};
pub use ngram::{train_ngram_lm, uniform_lm, LanguageModel, LmOptions, NGramLM, BOS, DEFAULT_ADD_K, DEFAULT_ORDER, EOS, MAX_ORDER, UNK};
pub use select::{
    bilingual_moore_lewis_score, cross_entropy, filter_top, interpolate_lms, moore_lewis_score, perplexity, score_pairs, DomainModels,
    EmOptions, InterpolatedLM, DEFAULT_EM_MAX_ITERATIONS, DEFAULT_EM_TOLERANCE, DEFAULT_KEEP_FRACTION,
};
