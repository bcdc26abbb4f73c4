//! Max-margin classifier deciding whether two sentences translate each
//! other.

mod features;
mod model;
mod sampling;
mod training;

pub use features::{extract_features, FeatureExtractor, FeatureVector, PreparedSentence, BIAS_INDEX, FEATURE_NAMES};
pub use model::{score_pair, MaxMarginModel};
pub use sampling::{generate_training_set, training_features, TrainingSet, DEFAULT_NEGATIVES_PER_POSITIVE, NEGATIVE_WINDOW};
pub use training::{fit_platt, hinge_objective, train_classifier, Hyperparams, LearningRate, TrainedClassifier, MIN_CALIBRATION_SLOPE};
