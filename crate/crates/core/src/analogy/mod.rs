//! Proportional analogies `A : B :: C : D` in a seed bitext, and the
//! rewriting models they yield.

mod detect;
mod rewrite;
mod symbols;

pub use detect::{char_profile_holds, cluster_analogies, detect_analogies, AnalogyCluster, AnalogyQuadruple};
pub use rewrite::{
    apply_rewriting_model, extract_models, extract_rewriting_model, generate_pairs, mine_quasi_parallel, read_models,
    validate_pair_with_model, write_models, Application, GeneratedPair, Generation, RewritingModel, UNKNOWN_TOKEN,
};
pub use symbols::{word_levenshtein, SymbolCodedSentence, SymbolTable};
