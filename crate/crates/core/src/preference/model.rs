//! Latent-factor rating model.
//!
//! A rating is predicted as the dot product of a user vector and an item
//! vector. Parameters are fit by minimizing
//!
//! ```text
//! L(γ) = (1/|τ|) Σ_{(u,i)∈τ} w_ui (r_ui − γ_u·γ_i)²  +  λ (‖γ_U‖² + ‖γ_I‖²)
//! ```
//!
//! with full-batch gradient descent. The data term is reduced sequentially
//! in corpus order, so results are bitwise reproducible for a given seed.

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::corpus::{PlacementItem, RatingsCorpus, Vocab};
use crate::vocab::UserId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("model vocabulary does not match corpus: {0}")]
    VocabularyMismatch(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("latent dimension must be at least 1")]
    ZeroDimension,
    #[error("training diverged at epoch {epoch}: loss {loss}")]
    DivergenceDetected { epoch: usize, loss: f64 },
    #[error("unknown user {0:?}")]
    UnknownUser(String),
    #[error("unknown item {0:?}")]
    UnknownItem(String),
    #[error("unknown object {0:?}")]
    UnknownObject(String),
    #[error("unknown room {0:?}")]
    UnknownRoom(String),
    #[error("unknown receptacle {0:?}")]
    UnknownReceptacle(String),
}

/// Training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub dim: usize,
    pub lambda: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Factors are drawn from `uniform(-init_scale, init_scale)`.
    pub init_scale: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            dim: 16,
            lambda: 1e-5,
            learning_rate: 20.0,
            epochs: 2000,
            seed: 0,
            init_scale: 0.1,
        }
    }
}

/// Row-major `rows × dim` matrices of user and item factors, plus the
/// vocabularies that name each row.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    dim: usize,
    lambda: f64,
    scale: (f64, f64),
    users: Vocab<UserId>,
    items: Vocab<PlacementItem>,
    user_factors: Vec<f64>,
    item_factors: Vec<f64>,
}

/// Gradient of the loss, shaped like the model's factor matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorGradient {
    pub user: Vec<f64>,
    pub item: Vec<f64>,
}

impl FactorModel {
    /// All-zero factors over the given vocabularies.
    pub fn zeros(users: Vocab<UserId>, items: Vocab<PlacementItem>, dim: usize, lambda: f64) -> Result<Self, ModelError> {
        if dim == 0 {
            return Err(ModelError::ZeroDimension);
        }
        Ok(FactorModel {
            dim,
            lambda,
            scale: (0.0, 1.0),
            user_factors: vec![0.0; users.len() * dim],
            item_factors: vec![0.0; items.len() * dim],
            users,
            items,
        })
    }

    /// Zero model over a corpus's vocabularies.
    pub fn zeros_for(corpus: &RatingsCorpus, dim: usize, lambda: f64) -> Result<Self, ModelError> {
        let mut m = Self::zeros(corpus.users().clone(), corpus.items().clone(), dim, lambda)?;
        m.scale = corpus.scale();
        Ok(m)
    }

    pub(crate) fn from_raw(
        dim: usize,
        lambda: f64,
        scale: (f64, f64),
        users: Vocab<UserId>,
        items: Vocab<PlacementItem>,
        user_factors: Vec<f64>,
        item_factors: Vec<f64>,
    ) -> Result<Self, ModelError> {
        if dim == 0 {
            return Err(ModelError::ZeroDimension);
        }
        if user_factors.len() != users.len() * dim || item_factors.len() != items.len() * dim {
            return Err(ModelError::VocabularyMismatch("factor matrix shape".into()));
        }
        Ok(FactorModel {
            dim,
            lambda,
            scale,
            users,
            items,
            user_factors,
            item_factors,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn set_lambda(&mut self, lambda: f64) {
        self.lambda = lambda;
    }

    pub fn scale(&self) -> (f64, f64) {
        self.scale
    }

    pub fn users(&self) -> &Vocab<UserId> {
        &self.users
    }

    pub fn items(&self) -> &Vocab<PlacementItem> {
        &self.items
    }

    pub fn user_factors(&self) -> &[f64] {
        &self.user_factors
    }

    pub fn item_factors(&self) -> &[f64] {
        &self.item_factors
    }

    pub fn user_factors_mut(&mut self) -> &mut [f64] {
        &mut self.user_factors
    }

    pub fn item_factors_mut(&mut self) -> &mut [f64] {
        &mut self.item_factors
    }

    pub fn user_vector(&self, u: usize) -> &[f64] {
        &self.user_factors[u * self.dim..(u + 1) * self.dim]
    }

    pub fn item_vector(&self, i: usize) -> &[f64] {
        &self.item_factors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn user_index(&self, user: &UserId) -> Result<usize, ModelError> {
        self.users
            .get(user)
            .ok_or_else(|| ModelError::UnknownUser(user.to_string()))
    }

    /// Dot product of user `u` and item `i` factor rows.
    pub fn score(&self, u: usize, i: usize) -> f64 {
        dot(self.user_vector(u), self.item_vector(i))
    }

    fn check_vocab(&self, corpus: &RatingsCorpus) -> Result<(), ModelError> {
        if self.users.values() != corpus.users().values() {
            return Err(ModelError::VocabularyMismatch("users differ".into()));
        }
        if self.items.values() != corpus.items().values() {
            return Err(ModelError::VocabularyMismatch("items differ".into()));
        }
        Ok(())
    }

    fn regularizer(&self) -> f64 {
        self.user_factors.iter().chain(&self.item_factors).map(|x| x * x).sum()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `f(u,i) = γ_u · γ_i`.
pub fn predict_rating(model: &FactorModel, user: &UserId, item: &PlacementItem) -> Result<f64, ModelError> {
    let u = model.user_index(user)?;
    let i = model
        .items
        .get(item)
        .ok_or_else(|| ModelError::UnknownItem(item.to_string()))?;
    Ok(model.score(u, i))
}

/// Regularized weighted mean squared error over the corpus.
pub fn loss(model: &FactorModel, corpus: &RatingsCorpus) -> Result<f64, ModelError> {
    model.check_vocab(corpus)?;
    Ok(loss_unchecked(model, corpus))
}

fn loss_unchecked(model: &FactorModel, corpus: &RatingsCorpus) -> f64 {
    let n = corpus.len();
    let data = if n == 0 {
        0.0
    } else {
        corpus
            .entries()
            .iter()
            .map(|e| {
                let err = e.rating - model.score(e.user, e.item);
                e.weight * err * err
            })
            .sum::<f64>()
            / n as f64
    };
    data + model.lambda * model.regularizer()
}

/// Exact gradient of [`loss`] with respect to every factor entry.
pub fn gradient(model: &FactorModel, corpus: &RatingsCorpus) -> Result<FactorGradient, ModelError> {
    model.check_vocab(corpus)?;
    let mut g = FactorGradient {
        user: vec![0.0; model.user_factors.len()],
        item: vec![0.0; model.item_factors.len()],
    };
    gradient_into(model, corpus, &mut g);
    Ok(g)
}

fn gradient_into(model: &FactorModel, corpus: &RatingsCorpus, g: &mut FactorGradient) {
    let d = model.dim;
    let two_lambda = 2.0 * model.lambda;
    for (gv, x) in g.user.iter_mut().zip(&model.user_factors) {
        *gv = two_lambda * x;
    }
    for (gv, x) in g.item.iter_mut().zip(&model.item_factors) {
        *gv = two_lambda * x;
    }
    let n = corpus.len();
    if n == 0 {
        return;
    }
    let scale = -2.0 / n as f64;
    for e in corpus.entries() {
        let pu = model.user_vector(e.user);
        let qi = model.item_vector(e.item);
        let coef = scale * e.weight * (e.rating - dot(pu, qi));
        let gu = &mut g.user[e.user * d..(e.user + 1) * d];
        for (gk, qk) in gu.iter_mut().zip(qi) {
            *gk += coef * qk;
        }
        let gi = &mut g.item[e.item * d..(e.item + 1) * d];
        for (gk, pk) in gi.iter_mut().zip(pu) {
            *gk += coef * pk;
        }
    }
}

/// Outcome of [`train_with_history`].
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub model: FactorModel,
    /// Loss before the first update followed by the loss after each epoch.
    pub history: Vec<f64>,
}

impl TrainReport {
    pub fn initial_loss(&self) -> f64 {
        self.history[0]
    }

    pub fn final_loss(&self) -> f64 {
        *self.history.last().expect("history is never empty")
    }
}

/// Fits a model to `corpus` with full-batch gradient descent.
pub fn train(corpus: &RatingsCorpus, hyper: &Hyperparameters) -> Result<FactorModel, ModelError> {
    train_with_history(corpus, hyper).map(|r| r.model)
}

pub fn train_with_history(corpus: &RatingsCorpus, hyper: &Hyperparameters) -> Result<TrainReport, ModelError> {
    if corpus.is_empty() {
        return Err(ModelError::EmptyCorpus);
    }
    let mut model = FactorModel::zeros_for(corpus, hyper.dim, hyper.lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    if hyper.init_scale > 0.0 {
        let dist = Uniform::new(-hyper.init_scale, hyper.init_scale).expect("valid init range");
        for x in model.user_factors.iter_mut().chain(model.item_factors.iter_mut()) {
            *x = dist.sample(&mut rng);
        }
    }

    let mut history = Vec::with_capacity(hyper.epochs + 1);
    let initial = loss_unchecked(&model, corpus);
    if !initial.is_finite() {
        return Err(ModelError::DivergenceDetected { epoch: 0, loss: initial });
    }
    history.push(initial);

    let mut g = FactorGradient {
        user: vec![0.0; model.user_factors.len()],
        item: vec![0.0; model.item_factors.len()],
    };
    for epoch in 1..=hyper.epochs {
        gradient_into(&model, corpus, &mut g);
        for (x, gx) in model.user_factors.iter_mut().zip(&g.user) {
            *x -= hyper.learning_rate * gx;
        }
        for (x, gx) in model.item_factors.iter_mut().zip(&g.item) {
            *x -= hyper.learning_rate * gx;
        }
        let l = loss_unchecked(&model, corpus);
        if !l.is_finite() {
            return Err(ModelError::DivergenceDetected { epoch, loss: l });
        }
        history.push(l);
    }
    let last = *history.last().unwrap_or(&initial);
    if last > initial {
        return Err(ModelError::DivergenceDetected {
            epoch: hyper.epochs,
            loss: last,
        });
    }
    tracing::debug!(initial, last, epochs = hyper.epochs, "trained factor model");
    Ok(TrainReport { model, history })
}

/// Root mean squared error of predictions over `corpus` entries (unweighted).
pub fn rmse(model: &FactorModel, corpus: &RatingsCorpus) -> Result<f64, ModelError> {
    model.check_vocab(corpus)?;
    if corpus.is_empty() {
        return Ok(0.0);
    }
    let sse: f64 = corpus
        .entries()
        .iter()
        .map(|e| (e.rating - model.score(e.user, e.item)).powi(2))
        .sum();
    Ok((sse / corpus.len() as f64).sqrt())
}
