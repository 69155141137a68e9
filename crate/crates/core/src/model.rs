//! Forward pass, loss, gradient and the training loop.
//!
//! The photon state `a` is sent through `U = expm(A(W))`; class `c` is
//! detected with probability `sum_s |(U a)_{c S + s}|^2`. Training minimizes
//! the mean of `-ln p(label)` over mini-batches.

use std::fs;
use std::path::Path;

use faer::Mat;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{to_amplitudes, AmplitudeState, ClassStyleLayout, ExampleImage};
use crate::formats;
use crate::linalg::{
    build_generator, expm, expm_forward, expm_vjp, mul, mul_adj_rhs_acc, weight_gradient, CMat, ExpmConfig,
    UnitaryTransform, WeightMatrix,
};
use crate::{Error, Result};

/// Tolerance on `sum_c p(c) = 1`.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassProbabilities {
    pub probs: Vec<f64>,
    /// `classes x styles`, row-major, when requested.
    pub style_mass: Option<Vec<f64>>,
}

impl ClassProbabilities {
    /// Sum detector masses over each class block.
    pub fn from_output(out: &[Complex64], layout: &ClassStyleLayout, keep_styles: bool) -> Self {
        let mass: Vec<f64> = out.iter().map(|z| z.norm_sqr()).collect();
        let probs = (0..layout.classes())
            .map(|c| mass[layout.class_range(c)].iter().sum())
            .collect();
        Self {
            probs,
            style_mass: keep_styles.then_some(mass),
        }
    }

    /// Most likely class, lowest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (c, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = c;
            }
        }
        best
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

fn check_dims(u: &UnitaryTransform, state: &AmplitudeState, layout: &ClassStyleLayout) -> Result<()> {
    if u.dim() != layout.dim() || state.len() != layout.dim() {
        return Err(Error::Argument(format!(
            "dimension mismatch: unitary {}, state {}, layout {}",
            u.dim(),
            state.len(),
            layout.dim()
        )));
    }
    Ok(())
}

pub fn forward(u: &UnitaryTransform, state: &AmplitudeState, layout: &ClassStyleLayout) -> Result<ClassProbabilities> {
    check_dims(u, state, layout)?;
    Ok(ClassProbabilities::from_output(&u.apply(state.amplitudes()), layout, true))
}

/// `-ln(max(p_label, log_eps))`
pub fn loss(probs: &ClassProbabilities, label: usize, log_eps: f64) -> Result<f64> {
    let p = probs.probs.get(label).ok_or_else(|| {
        Error::Argument(format!("label {label} out of range for {} classes", probs.probs.len()))
    })?;
    Ok(-p.max(log_eps).ln())
}

/// Stack states as columns.
fn state_matrix(batch: &[(&AmplitudeState, usize)], dim: usize) -> Result<CMat> {
    if let Some((s, _)) = batch.iter().find(|(s, _)| s.len() != dim) {
        return Err(Error::Argument(format!("state of length {} for dimension {dim}", s.len())));
    }
    Ok(CMat::from_fn(dim, batch.len(), |j, b| batch[b].0.amplitudes()[j]))
}

/// Per-batch statistics from [`batch_gradient`].
#[derive(Debug, Clone)]
pub struct BatchGradient {
    pub mean_loss: f64,
    /// Per-example losses in batch order.
    pub losses: Vec<f64>,
    /// Per-example probability of the true label.
    pub label_probs: Vec<f64>,
    pub grad: Mat<f64>,
}

/// Mean loss over the batch and its exact gradient with respect to `W`,
/// differentiating the truncated expm that `cfg` describes.
pub fn batch_gradient(
    w: &WeightMatrix,
    batch: &[(&AmplitudeState, usize)],
    layout: &ClassStyleLayout,
    cfg: &ExpmConfig,
    log_eps: f64,
) -> Result<BatchGradient> {
    if batch.is_empty() {
        return Err(Error::Argument("empty batch".into()));
    }
    let m = layout.dim();
    if w.dim() != m {
        return Err(Error::Argument(format!(
            "weights are {}x{} but the layout has dimension {m}",
            w.dim(),
            w.dim()
        )));
    }
    if let Some((_, y)) = batch.iter().find(|(_, y)| *y >= layout.classes()) {
        return Err(Error::Argument(format!("label {y} out of range for {} classes", layout.classes())));
    }
    let states = state_matrix(batch, m)?;
    let a = build_generator(w)?;
    let (u, tape) = expm_forward(&a, cfg)?;
    let out = mul(u.matrix().as_ref(), states.as_ref());

    let nb = batch.len();
    let inv = 1.0 / nb as f64;
    let mut g_out = CMat::zeros(m, nb);
    let mut losses = Vec::with_capacity(nb);
    let mut label_probs = Vec::with_capacity(nb);
    for (b, &(_, y)) in batch.iter().enumerate() {
        let col = out.col_as_slice(b);
        let total: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::Numerical(format!(
                "class probabilities sum to {total}, not 1; is every state normalized?"
            )));
        }
        let range = layout.class_range(y);
        let p: f64 = col[range.clone()].iter().map(|z| z.norm_sqr()).sum();
        losses.push(-p.max(log_eps).ln());
        label_probs.push(p);
        if p > log_eps {
            // d(-ln p)/d out_j = -(1/p) 2 out_j for j in the label block
            let scale = -2.0 * inv / p;
            let g = g_out.col_as_slice_mut(b);
            for j in range {
                g[j] = col[j] * scale;
            }
        }
    }
    let mean_loss = losses.iter().sum::<f64>() * inv;

    // out = U S  =>  G_U = G_out S^H
    let mut g_u = CMat::zeros(m, m);
    mul_adj_rhs_acc(&mut g_u, g_out.as_ref(), states.as_ref());
    let g_a = expm_vjp(&tape, cfg, g_u.as_ref())?;
    Ok(BatchGradient {
        mean_loss,
        losses,
        label_probs,
        grad: weight_gradient(g_a.as_ref()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Optimizer {
    Sgd,
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
}

impl Optimizer {
    pub fn adam() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Learning-rate schedule over the total number of steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    Constant,
    /// `lr * (1 + cos(pi t / T)) / 2`
    Cosine,
}

impl Schedule {
    pub fn rate(&self, base: f64, step: usize, total: usize) -> f64 {
        match self {
            Schedule::Constant => base,
            Schedule::Cosine => {
                let t = step as f64 / total.max(1) as f64;
                base * 0.5 * (1.0 + (std::f64::consts::PI * t).cos())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub init_scale: f64,
    pub log_eps: f64,
    pub expm: ExpmConfig,
    pub optimizer: Optimizer,
    pub schedule: Schedule,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            batch_size: 128,
            epochs: 10,
            seed: 0,
            init_scale: 1e-3,
            log_eps: 1e-12,
            expm: ExpmConfig::default(),
            optimizer: Optimizer::adam(),
            schedule: Schedule::Constant,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Argument(what.to_string()));
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be finite and non-negative");
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return bad("init scale must be finite and non-negative");
        }
        if !(self.log_eps > 0.0 && self.log_eps <= 1e-8) {
            return bad("log_eps must lie in (0, 1e-8]");
        }
        if let Optimizer::Adam { beta1, beta2, epsilon } = self.optimizer {
            if !((0.0..1.0).contains(&beta1) && (0.0..1.0).contains(&beta2) && epsilon > 0.0) {
                return bad("adam constants need beta1, beta2 in [0, 1) and epsilon > 0");
            }
        }
        self.expm.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub step: usize,
    /// Mean loss over the epoch's examples, each evaluated with the weights
    /// in force when its batch was processed.
    pub mean_loss: f64,
    /// Mean probability of the true label, same convention.
    pub expected_accuracy: f64,
    pub learning_rate: f64,
}

/// Weights plus enough context to resume or evaluate.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub weights: WeightMatrix,
    pub layout: ClassStyleLayout,
    pub step: usize,
    pub metrics: Option<EpochMetrics>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointMeta {
    layout: ClassStyleLayout,
    step: usize,
    metrics: Option<EpochMetrics>,
    weights_file: String,
}

pub const WEIGHTS_FILE: &str = "weights.bin";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";

impl Checkpoint {
    pub fn new(weights: WeightMatrix, layout: ClassStyleLayout, step: usize, metrics: Option<EpochMetrics>) -> Result<Self> {
        if weights.dim() != layout.dim() {
            return Err(Error::Consistency(format!(
                "weights are {0}x{0} but the layout has dimension {1}",
                weights.dim(),
                layout.dim()
            )));
        }
        if !weights.is_finite() {
            return Err(Error::Argument("checkpoint weights must be finite".into()));
        }
        Ok(Self {
            weights,
            layout,
            step,
            metrics,
        })
    }

    pub fn unitary(&self, cfg: &ExpmConfig) -> Result<UnitaryTransform> {
        expm(&build_generator(&self.weights)?, cfg)
    }

    /// Write `weights.bin` and `checkpoint.json` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        formats::write_weights(dir.join(WEIGHTS_FILE), &self.weights)?;
        let meta = CheckpointMeta {
            layout: self.layout,
            step: self.step,
            metrics: self.metrics.clone(),
            weights_file: WEIGHTS_FILE.into(),
        };
        let path = dir.join(CHECKPOINT_FILE);
        fs::write(&path, serde_json::to_string_pretty(&meta)?).map_err(|e| Error::io(&path, e))
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let path = dir.join(CHECKPOINT_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let meta: CheckpointMeta = serde_json::from_str(&text)?;
        let weights = formats::read_weights(dir.join(&meta.weights_file))?;
        Self::new(weights, meta.layout, meta.step, meta.metrics)
    }
}

#[derive(Debug, Clone)]
pub struct TrainingRun {
    pub checkpoint: Checkpoint,
    pub history: Vec<EpochMetrics>,
}

enum OptState {
    Sgd,
    Adam { m: Mat<f64>, v: Mat<f64>, t: i32 },
}

impl OptState {
    fn new(opt: &Optimizer, dim: usize) -> Self {
        match opt {
            Optimizer::Sgd => OptState::Sgd,
            Optimizer::Adam { .. } => OptState::Adam {
                m: Mat::zeros(dim, dim),
                v: Mat::zeros(dim, dim),
                t: 0,
            },
        }
    }

    fn step(&mut self, opt: &Optimizer, w: &mut Mat<f64>, g: &Mat<f64>, lr: f64) {
        let n = w.nrows();
        match (self, opt) {
            (OptState::Sgd, _) => {
                for j in 0..n {
                    for i in 0..n {
                        w[(i, j)] -= lr * g[(i, j)];
                    }
                }
            }
            (OptState::Adam { m, v, t }, Optimizer::Adam { beta1, beta2, epsilon }) => {
                *t += 1;
                let c1 = 1.0 - beta1.powi(*t);
                let c2 = 1.0 - beta2.powi(*t);
                for j in 0..n {
                    for i in 0..n {
                        let gi = g[(i, j)];
                        m[(i, j)] = beta1 * m[(i, j)] + (1.0 - beta1) * gi;
                        v[(i, j)] = beta2 * v[(i, j)] + (1.0 - beta2) * gi * gi;
                        let mh = m[(i, j)] / c1;
                        let vh = v[(i, j)] / c2;
                        w[(i, j)] -= lr * mh / (vh.sqrt() + epsilon);
                    }
                }
            }
            _ => unreachable!("optimizer state built from a different optimizer"),
        }
    }
}

/// Encode images, refusing dark ones.
pub fn encode_all(images: &[ExampleImage], layout: &ClassStyleLayout) -> Result<Vec<(AmplitudeState, usize)>> {
    images
        .iter()
        .map(|im| {
            if im.label() >= layout.classes() {
                return Err(Error::Argument(format!(
                    "label {} out of range for {} classes",
                    im.label(),
                    layout.classes()
                )));
            }
            Ok((to_amplitudes(im, layout)?, im.label()))
        })
        .collect()
}

pub fn train(train_set: &[ExampleImage], cfg: &TrainingConfig, layout: &ClassStyleLayout) -> Result<TrainingRun> {
    train_with(train_set, cfg, layout, |_, _| Ok(()))
}

/// [`train`] with a hook called after every epoch.
pub fn train_with(
    train_set: &[ExampleImage],
    cfg: &TrainingConfig,
    layout: &ClassStyleLayout,
    mut on_epoch: impl FnMut(&EpochMetrics, &WeightMatrix) -> Result<()>,
) -> Result<TrainingRun> {
    cfg.validate()?;
    if train_set.is_empty() {
        return Err(Error::Argument("empty training set".into()));
    }
    let examples = encode_all(train_set, layout)?;
    let n = examples.len();
    let dim = layout.dim();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut weights = WeightMatrix::random_normal(dim, cfg.init_scale, &mut rng);
    let mut opt = OptState::new(&cfg.optimizer, dim);
    let batch_size = cfg.batch_size.min(n);
    let steps_per_epoch = n.div_ceil(batch_size);
    let total_steps = steps_per_epoch * cfg.epochs;

    let mut order: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut step = 0;
    let mut last_metrics = None;
    let mut losses = vec![0.0; n];
    let mut label_probs = vec![0.0; n];
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut lr = cfg.learning_rate;
        for chunk in order.chunks(batch_size) {
            let batch: Vec<(&AmplitudeState, usize)> = chunk.iter().map(|&i| (&examples[i].0, examples[i].1)).collect();
            let bg = batch_gradient(&weights, &batch, layout, &cfg.expm, cfg.log_eps)?;
            if !bg.mean_loss.is_finite() || !bg.grad.col_iter().all(|c| c.iter().all(|v| v.is_finite())) {
                return Err(Error::Diverged {
                    step,
                    loss: bg.mean_loss,
                    checkpoint: Box::new(Checkpoint {
                        weights,
                        layout: *layout,
                        step,
                        metrics: last_metrics,
                    }),
                });
            }
            for (k, &i) in chunk.iter().enumerate() {
                losses[i] = bg.losses[k];
                label_probs[i] = bg.label_probs[k];
            }
            lr = cfg.schedule.rate(cfg.learning_rate, step, total_steps);
            let mut w = weights.as_mat().clone();
            opt.step(&cfg.optimizer, &mut w, &bg.grad, lr);
            weights = WeightMatrix::new(w)?;
            step += 1;
        }
        // summed in example order so the figures do not depend on the shuffle
        let metrics = EpochMetrics {
            epoch: epoch + 1,
            step,
            mean_loss: losses.iter().sum::<f64>() / n as f64,
            expected_accuracy: label_probs.iter().sum::<f64>() / n as f64,
            learning_rate: lr,
        };
        on_epoch(&metrics, &weights)?;
        history.push(metrics.clone());
        last_metrics = Some(metrics);
    }
    Ok(TrainingRun {
        checkpoint: Checkpoint::new(weights, *layout, step, last_metrics)?,
        history,
    })
}
