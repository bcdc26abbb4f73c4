//! Sentence alignment of comparable document pairs.

mod matrix;
mod mining;
mod nw;

pub use matrix::{build_similarity_matrix, MatrixLimits, SimilarityMatrix, DEFAULT_MAX_SENTENCES};
pub use mining::{
    extract_mined_pairs, mine_collection, write_bitext, write_report, write_scores, MinedCorpus, MinedPair, MiningOptions,
    MiningReport, PairReport, ScoredMatch, SideTotals, DEFAULT_THRESHOLD,
};
pub use nw::{nw_align, nw_align_wavefront, AlignmentPath, Step, DEFAULT_GAP_PENALTY};
