use std::io::{BufRead, Write};

use super::features::{FeatureVector, FEATURE_NAMES};
use crate::error::{Error, Result};
use crate::scalar::{sigmoid, Real};

const FORMAT_TAG: &str = "bitext-max-margin";
const FORMAT_VERSION: u32 = 1;

/// Linear max-margin classifier with a sigmoid calibration of its margin.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxMarginModel<F> {
    feature_names: Vec<String>,
    weights: Vec<F>,
    /// `(slope, intercept)`; score = sigmoid(slope * margin + intercept).
    calibration: (F, F),
    threshold: F,
}

impl<F: Real> MaxMarginModel<F> {
    pub fn new(feature_names: Vec<String>, weights: Vec<F>, calibration: (F, F), threshold: F) -> Result<Self> {
        if feature_names.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: feature_names.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("model weights must be finite"));
        }
        let (a, b) = calibration;
        if !(a.is_finite() && b.is_finite() && a > F::zero()) {
            return Err(Error::invalid("calibration slope must be positive and finite"));
        }
        if !(threshold >= F::zero() && threshold <= F::one()) {
            return Err(Error::invalid("threshold must lie in [0, 1]"));
        }
        Ok(MaxMarginModel {
            feature_names,
            weights,
            calibration,
            threshold,
        })
    }

    /// Uncalibrated model over the standard feature set.
    pub fn with_weights(weights: Vec<F>) -> Result<Self> {
        Self::new(
            FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            weights,
            (F::one(), F::zero()),
            F::of(0.5),
        )
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn calibration(&self) -> (F, F) {
        self.calibration
    }

    pub fn threshold(&self) -> F {
        self.threshold
    }

    pub fn with_threshold(mut self, threshold: F) -> Result<Self> {
        if !(threshold >= F::zero() && threshold <= F::one()) {
            return Err(Error::invalid("threshold must lie in [0, 1]"));
        }
        self.threshold = threshold;
        Ok(self)
    }

    pub fn with_calibration(self, slope: F, intercept: F) -> Result<Self> {
        Self::new(self.feature_names, self.weights, (slope, intercept), self.threshold)
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn margin(&self, features: &FeatureVector<F>) -> Result<F> {
        if features.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: features.len(),
            });
        }
        Ok(features.dot(&self.weights))
    }

    /// Maps a raw margin to a probability in (0, 1).
    pub fn calibrate(&self, margin: F) -> F {
        let (a, b) = self.calibration;
        sigmoid(a * margin + b)
    }

    /// Calibrated probability that the pair is a mutual translation.
    pub fn score(&self, features: &FeatureVector<F>) -> Result<F> {
        Ok(self.calibrate(self.margin(features)?))
    }

    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        let join = |v: &[F]| v.iter().map(|x| x.as_f64().to_string()).collect::<Vec<_>>().join("\t");
        writeln!(w, "{FORMAT_TAG}\tv{FORMAT_VERSION}")?;
        writeln!(w, "features\t{}", self.feature_names.join("\t"))?;
        writeln!(w, "weights\t{}", join(&self.weights))?;
        writeln!(w, "calibration\t{}", join(&[self.calibration.0, self.calibration.1]))?;
        writeln!(w, "threshold\t{}", self.threshold.as_f64())?;
        Ok(())
    }

    pub fn load<R: BufRead>(reader: R) -> Result<Self> {
        const CONTEXT: &str = "model";
        let lines: Vec<String> = reader.lines().collect::<std::io::Result<_>>()?;
        let field = |idx: usize, key: &str| -> Result<Vec<String>> {
            let line = lines
                .get(idx)
                .ok_or_else(|| Error::parse(CONTEXT, idx + 1, format!("missing {key} line")))?;
            let mut parts = line.split('\t');
            if parts.next() != Some(key) {
                return Err(Error::parse(CONTEXT, idx + 1, format!("expected {key}")));
            }
            Ok(parts.map(str::to_string).collect())
        };
        let numbers = |idx: usize, key: &str| -> Result<Vec<F>> {
            field(idx, key)?
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map(F::of)
                        .map_err(|_| Error::parse(CONTEXT, idx + 1, format!("bad number {s:?}")))
                })
                .collect()
        };
        let header = field(0, FORMAT_TAG)?;
        if header != [format!("v{FORMAT_VERSION}")] {
            return Err(Error::parse(CONTEXT, 1, format!("unsupported version {header:?}")));
        }
        let names = field(1, "features")?;
        let weights = numbers(2, "weights")?;
        let calibration = numbers(3, "calibration")?;
        let threshold = numbers(4, "threshold")?;
        let ([a, b], [t]) = (calibration.as_slice(), threshold.as_slice()) else {
            return Err(Error::parse(CONTEXT, 4, "calibration needs 2 values and threshold 1"));
        };
        MaxMarginModel::new(names, weights, (*a, *b), *t)
    }
}

/// Calibrated score of a feature vector under `model`.
pub fn score_pair<F: Real>(model: &MaxMarginModel<F>, features: &FeatureVector<F>) -> Result<F> {
    model.score(features)
}
