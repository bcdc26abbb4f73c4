//! Mining parallel sentences from comparable bilingual corpora.
//!
//! Numeric code is generic over the scalar type; the aliases below fix it
//! to `f64`, or to exact rationals for alignment.

pub mod aligner;
pub mod analogy;
pub mod classifier;
pub mod error;
pub mod evalmetrics;
pub mod filterlm;
pub mod ingest;
pub mod lexicon;
pub mod scalar;

pub use error::{Error, Result};
pub use num_rational::Rational64;

pub type FeatureVector = classifier::FeatureVector<f64>;
pub type MaxMarginModel = classifier::MaxMarginModel<f64>;
pub type SimilarityMatrix = aligner::SimilarityMatrix<f64>;
pub type AlignmentPath = aligner::AlignmentPath<f64>;
pub type MinedPair = aligner::MinedPair<f64>;
pub type NGramLM = filterlm::NGramLM<f64>;
pub type InterpolatedLM = filterlm::InterpolatedLM<f64>;

pub type ExactSimilarityMatrix = aligner::SimilarityMatrix<Rational64>;
pub type ExactAlignmentPath = aligner::AlignmentPath<Rational64>;
