//! Single-hidden-layer sigmoid classifier.
//!
//! Architecture: input → sigmoid hidden layer → sigmoid output, trained by
//! full-batch gradient descent on mean cross-entropy. Deliberately plain —
//! the point of the replication is the evaluation protocol around the model,
//! not the model itself. The positive class (output → 1) is
//! [`Label::Deception`](super::Label::Deception).
//!
//! Training is deterministic given the seed and single-threaded; protocol
//! code parallelizes across folds, never inside a fold.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Label, ReplicaError, SegmentVector};
use crate::seeding::rng_for;

/// Stream id for weight initialization (see [`crate::seeding::streams`]).
const MODEL_INIT_STREAM: u64 = 5 << 32;

/// Training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    pub hidden_width: usize,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            hidden_width: 16,
            learning_rate: 1.0,
            epochs: 300,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), ReplicaError> {
        if self.hidden_width == 0 {
            return Err(ReplicaError::InvalidSpec(
                "hidden_width must be at least 1".into(),
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(ReplicaError::InvalidSpec(format!(
                "learning_rate must be finite and positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// Trained network. Weight layout: `w1` is hidden_width × input_dim
/// (row-major), `b1` per hidden unit, `w2` per hidden unit, `b2` scalar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifierModel {
    pub input_dim: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
    /// Hyperparameters and seed the model was trained with.
    pub hyperparams: Hyperparams,
    pub seed: u64,
    /// Mean cross-entropy at the final gradient evaluation.
    pub final_loss: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^z), evaluated without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl ClassifierModel {
    fn hidden_width(&self) -> usize {
        self.b1.len()
    }

    /// Untrained model with Xavier-uniform weights drawn from `seed`.
    fn init(input_dim: usize, hyperparams: Hyperparams, seed: u64) -> Self {
        let h = hyperparams.hidden_width;
        let mut rng = rng_for(seed, MODEL_INIT_STREAM);
        let r1 = (6.0 / (input_dim + h) as f64).sqrt();
        let r2 = (6.0 / (h + 1) as f64).sqrt();
        ClassifierModel {
            input_dim,
            w1: (0..h * input_dim).map(|_| rng.random_range(-r1..r1)).collect(),
            b1: vec![0.0; h],
            w2: (0..h).map(|_| rng.random_range(-r2..r2)).collect(),
            b2: 0.0,
            hyperparams,
            seed,
            final_loss: f64::NAN,
        }
    }

    /// Pre-sigmoid output. Panics if `features` has the wrong arity.
    #[must_use]
    pub fn logit(&self, features: &[f64]) -> f64 {
        assert_eq!(features.len(), self.input_dim, "feature arity mismatch");
        let mut z = self.b2;
        for (k, (&w2k, &b1k)) in self.w2.iter().zip(&self.b1).enumerate() {
            let row = &self.w1[k * self.input_dim..(k + 1) * self.input_dim];
            z += w2k * sigmoid(dot(row, features) + b1k);
        }
        z
    }

    /// Segment score in (0, 1); values toward 1 indicate the positive class.
    #[must_use]
    pub fn predict(&self, features: &[f64]) -> f64 {
        sigmoid(self.logit(features))
    }

    /// All parameters flattened as `w1 ++ b1 ++ w2 ++ b2`.
    #[must_use]
    pub fn params(&self) -> Vec<f64> {
        let mut p = self.w1.clone();
        p.extend_from_slice(&self.b1);
        p.extend_from_slice(&self.w2);
        p.push(self.b2);
        p
    }

    pub fn set_params(&mut self, params: &[f64]) {
        let (h, d) = (self.hidden_width(), self.input_dim);
        assert_eq!(params.len(), h * d + h + h + 1, "parameter arity mismatch");
        self.w1.copy_from_slice(&params[..h * d]);
        self.b1.copy_from_slice(&params[h * d..h * d + h]);
        self.w2.copy_from_slice(&params[h * d + h..h * d + 2 * h]);
        self.b2 = params[h * d + 2 * h];
    }

    /// Mean cross-entropy of the batch.
    #[must_use]
    pub fn loss(&self, xs: &[&[f64]], ys: &[f64]) -> f64 {
        assert_eq!(xs.len(), ys.len());
        let n = xs.len() as f64;
        xs.iter()
            .zip(ys)
            .map(|(x, &y)| {
                let z = self.logit(x);
                softplus(z) - y * z
            })
            .sum::<f64>()
            / n
    }

    /// Mean cross-entropy and its gradient, flattened like [`params`](Self::params).
    #[must_use]
    pub fn loss_and_gradient(&self, xs: &[&[f64]], ys: &[f64]) -> (f64, Vec<f64>) {
        assert_eq!(xs.len(), ys.len());
        assert!(!xs.is_empty());
        let (h, d) = (self.hidden_width(), self.input_dim);
        let n = xs.len() as f64;

        let mut loss = 0.0;
        let mut gw1 = vec![0.0; h * d];
        let mut gb1 = vec![0.0; h];
        let mut gw2 = vec![0.0; h];
        let mut gb2 = 0.0;
        let mut hidden = vec![0.0; h];

        for (x, &y) in xs.iter().zip(ys) {
            assert_eq!(x.len(), d, "feature arity mismatch");
            let mut z = self.b2;
            for (k, slot) in hidden.iter_mut().enumerate() {
                let row = &self.w1[k * d..(k + 1) * d];
                let a = sigmoid(dot(row, x) + self.b1[k]);
                *slot = a;
                z += self.w2[k] * a;
            }
            loss += softplus(z) - y * z;

            // d(mean CE)/dz for this sample; sigmoid-with-logits form.
            let dz = (sigmoid(z) - y) / n;
            gb2 += dz;
            for k in 0..h {
                let a = hidden[k];
                gw2[k] += dz * a;
                let da = dz * self.w2[k] * a * (1.0 - a);
                gb1[k] += da;
                let grow = &mut gw1[k * d..(k + 1) * d];
                for (g, &xj) in grow.iter_mut().zip(*x) {
                    *g += da * xj;
                }
            }
        }

        let mut grad = gw1;
        grad.extend_from_slice(&gb1);
        grad.extend_from_slice(&gw2);
        grad.push(gb2);
        (loss / n, grad)
    }
}

/// Train on the given segments. Fails with [`ReplicaError::DegenerateTraining`]
/// unless both classes are present.
pub fn train_classifier(
    train: &[&SegmentVector],
    hyperparams: &Hyperparams,
    seed: u64,
) -> Result<ClassifierModel, ReplicaError> {
    hyperparams.validate()?;
    let has_truth = train.iter().any(|s| s.label == Label::Truth);
    let has_deception = train.iter().any(|s| s.label == Label::Deception);
    if !(has_truth && has_deception) {
        return Err(ReplicaError::DegenerateTraining);
    }

    let xs: Vec<&[f64]> = train.iter().map(|s| s.features.as_slice()).collect();
    let ys: Vec<f64> = train
        .iter()
        .map(|s| match s.label {
            Label::Deception => 1.0,
            Label::Truth => 0.0,
        })
        .collect();

    let mut model = ClassifierModel::init(xs[0].len(), *hyperparams, seed);
    let lr = hyperparams.learning_rate;
    let mut params = model.params();
    for _ in 0..hyperparams.epochs {
        let (loss, grad) = model.loss_and_gradient(&xs, &ys);
        model.final_loss = loss;
        for (p, g) in params.iter_mut().zip(&grad) {
            *p -= lr * g;
        }
        model.set_params(&params);
    }
    if hyperparams.epochs == 0 {
        model.final_loss = model.loss(&xs, &ys);
    }
    Ok(model)
}
