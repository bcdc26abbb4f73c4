//! Hinge-loss training by stochastic subgradient descent, followed by a
//! Platt-style sigmoid fit on a held-out split.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::features::{FeatureVector, BIAS_INDEX, FEATURE_NAMES};
use super::model::MaxMarginModel;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smallest calibration slope; keeps the score strictly increasing in the
/// margin even when the held-out fit is flat or inverted.
pub const MIN_CALIBRATION_SLOPE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LearningRate {
    /// `1 / (lambda * t)`
    Pegasos,
    /// `eta0 / (1 + lambda * eta0 * t)`
    InverseScaling { eta0: f64 },
    Constant { eta: f64 },
}

impl LearningRate {
    fn at(self, lambda: f64, t: usize) -> f64 {
        let t = t as f64;
        match self {
            LearningRate::Pegasos => 1.0 / (lambda * t),
            LearningRate::InverseScaling { eta0 } => eta0 / (1.0 + lambda * eta0 * t),
            LearningRate::Constant { eta } => eta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    /// L2 regularisation strength.
    pub lambda: f64,
    pub epochs: usize,
    pub learning_rate: LearningRate,
    pub seed: u64,
    /// Share of each class held out for calibration.
    pub holdout_fraction: f64,
    /// Mining threshold stored with the model.
    pub threshold: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            lambda: 1e-3,
            epochs: 30,
            learning_rate: LearningRate::InverseScaling { eta0: 0.5 },
            seed: 42,
            holdout_fraction: 0.1,
            threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainedClassifier<F> {
    pub model: MaxMarginModel<F>,
    /// Regularised hinge objective of the averaged weights after each epoch,
    /// measured on the training split.
    pub loss_trace: Vec<F>,
    pub train_size: usize,
    pub holdout_size: usize,
}

#[derive(Clone)]
struct Example<F> {
    x: Vec<F>,
    y: F,
}

fn cmp_examples<F: Real>(a: &Example<F>, b: &Example<F>) -> Ordering {
    b.y.as_f64()
        .total_cmp(&a.y.as_f64())
        .then_with(|| {
            a.x.iter()
                .zip(&b.x)
                .map(|(p, q)| p.as_f64().total_cmp(&q.as_f64()))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
}

fn dot<F: Real>(w: &[F], x: &[F]) -> F {
    w.iter().zip(x).fold(F::zero(), |acc, (a, b)| acc + *a * *b)
}

fn regularizer<F: Real>(w: &[F], lambda: F) -> F {
    let sq = w
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != BIAS_INDEX)
        .fold(F::zero(), |acc, (_, v)| acc + *v * *v);
    lambda * sq / F::of(2.0)
}

/// `lambda/2 * |w|^2 + mean(max(0, 1 - y w.x))`; the bias weight is not
/// regularised.
pub fn hinge_objective<F: Real>(weights: &[F], positives: &[FeatureVector<F>], negatives: &[FeatureVector<F>], lambda: F) -> F {
    let examples: Vec<Example<F>> = label(positives, negatives);
    objective(weights, &examples, lambda)
}

fn objective<F: Real>(w: &[F], data: &[Example<F>], lambda: F) -> F {
    if data.is_empty() {
        return regularizer(w, lambda);
    }
    let hinge = data
        .iter()
        .map(|e| (F::one() - e.y * dot(w, &e.x)).max(F::zero()))
        .fold(F::zero(), |a, b| a + b);
    regularizer(w, lambda) + hinge / F::of_usize(data.len())
}

fn label<F: Real>(positives: &[FeatureVector<F>], negatives: &[FeatureVector<F>]) -> Vec<Example<F>> {
    positives
        .iter()
        .map(|f| Example { x: f.as_slice().to_vec(), y: F::one() })
        .chain(negatives.iter().map(|f| Example { x: f.as_slice().to_vec(), y: -F::one() }))
        .collect()
}

/// Trains on `positives` and `negatives`.
///
/// Examples are sorted into a canonical order before the seeded shuffle,
/// so the model does not depend on the order of the inputs. Training on a
/// single class is allowed; the calibration then reflects only that class.
pub fn train_classifier<F: Real>(
    positives: &[FeatureVector<F>],
    negatives: &[FeatureVector<F>],
    hp: &Hyperparams,
) -> Result<TrainedClassifier<F>> {
    if positives.is_empty() && negatives.is_empty() {
        return Err(Error::NotEnoughData("no training examples".into()));
    }
    if !(hp.lambda > 0.0 && hp.lambda.is_finite()) {
        return Err(Error::invalid("lambda must be positive"));
    }
    if hp.epochs == 0 {
        return Err(Error::invalid("epochs must be at least 1"));
    }
    if !(0.0..1.0).contains(&hp.holdout_fraction) {
        return Err(Error::invalid("holdout fraction must lie in [0, 1)"));
    }
    let dim = FEATURE_NAMES.len();
    if let Some(bad) = positives.iter().chain(negatives).find(|f| f.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut data = label(positives, negatives);
    data.sort_by(cmp_examples);
    data.shuffle(&mut rng);

    let (mut train, mut holdout) = (Vec::new(), Vec::new());
    for class in [F::one(), -F::one()] {
        let members: Vec<&Example<F>> = data.iter().filter(|e| e.y == class).collect();
        let held = (members.len() as f64 * hp.holdout_fraction).floor() as usize;
        holdout.extend(members[..held].iter().map(|e| (*e).clone()));
        train.extend(members[held..].iter().map(|e| (*e).clone()));
    }
    train.shuffle(&mut rng);

    let lambda = F::of(hp.lambda);
    let mut w = vec![F::zero(); dim];
    let mut avg = vec![F::zero(); dim];
    let mut loss_trace = Vec::with_capacity(hp.epochs);
    let mut t = 0usize;
    let mut order: Vec<usize> = (0..train.len()).collect();
    for epoch in 1..=hp.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = F::of(hp.learning_rate.at(hp.lambda, t));
            let ex = &train[i];
            let violated = ex.y * dot(&w, &ex.x) < F::one();
            for (k, wk) in w.iter_mut().enumerate() {
                let reg = if k == BIAS_INDEX { F::zero() } else { lambda * *wk };
                let hinge = if violated { ex.y * ex.x[k] } else { F::zero() };
                *wk = *wk - eta * (reg - hinge);
            }
            let step = F::one() / F::of_usize(t);
            for (a, wk) in avg.iter_mut().zip(&w) {
                *a = *a + (*wk - *a) * step;
            }
        }
        let loss = objective(&avg, &train, lambda);
        if !loss.is_finite() || avg.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteLoss { epoch });
        }
        loss_trace.push(loss);
    }

    let calibration_set = if holdout.is_empty() { &train } else { &holdout };
    let margins: Vec<(f64, bool)> = calibration_set
        .iter()
        .map(|e| (dot(&avg, &e.x).as_f64(), e.y > F::zero()))
        .collect();
    let (a, b) = fit_platt(&margins);
    let model = MaxMarginModel::new(
        FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        avg,
        (F::of(a.max(MIN_CALIBRATION_SLOPE)), F::of(b)),
        F::of(hp.threshold),
    )?;
    Ok(TrainedClassifier {
        model,
        loss_trace,
        train_size: train.len(),
        holdout_size: holdout.len(),
    })
}

/// Fits `p = sigmoid(a * margin + b)` by damped Newton iterations on the
/// cross-entropy with Platt's smoothed targets.
pub fn fit_platt(margins: &[(f64, bool)]) -> (f64, f64) {
    let n_pos = margins.iter().filter(|(_, y)| *y).count() as f64;
    let n_neg = margins.len() as f64 - n_pos;
    let hi = (n_pos + 1.0) / (n_pos + 2.0);
    let lo = 1.0 / (n_neg + 2.0);
    let targets: Vec<f64> = margins.iter().map(|(_, y)| if *y { hi } else { lo }).collect();

    let nll = |a: f64, b: f64| -> f64 {
        margins
            .iter()
            .zip(&targets)
            .map(|((m, _), t)| {
                let z = a * m + b;
                // log(1 + e^z) - t z, computed stably
                let softplus = if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
                softplus - t * z
            })
            .sum()
    };

    let (mut a, mut b) = (0.0, ((n_pos + 1.0) / (n_neg + 1.0)).ln());
    let mut f = nll(a, b);
    for _ in 0..100 {
        let (mut g1, mut g2, mut h11, mut h22, mut h21) = (0.0, 0.0, 1e-12, 1e-12, 0.0);
        for ((m, _), t) in margins.iter().zip(&targets) {
            let p = 1.0 / (1.0 + (-(a * m + b)).exp());
            let d = p - t;
            let s = p * (1.0 - p);
            g1 += d * m;
            g2 += d;
            h11 += s * m * m;
            h22 += s;
            h21 += s * m;
        }
        if g1.abs() < 1e-9 && g2.abs() < 1e-9 {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let (da, db) = (-(h22 * g1 - h21 * g2) / det, -(-h21 * g1 + h11 * g2) / det);
        let slope = g1 * da + g2 * db;
        let mut step = 1.0;
        let mut improved = false;
        while step >= 1e-10 {
            let (na, nb) = (a + step * da, b + step * db);
            let nf = nll(na, nb);
            if nf < f + 1e-4 * step * slope {
                a = na;
                b = nb;
                f = nf;
                improved = true;
                break;
            }
            step /= 2.0;
        }
        if !improved {
            break;
        }
    }
    (a, b)
}
