//! Optimal accuracy without interference.
//!
//! If the detector cell that sees the photon is the pixel it passed through,
//! the only thing a classifier can do is map the cell index `k` to a class
//! distribution `K_kc`. Its accuracy is `sum_kc P(k) R_kc K_kc`, with
//! `R_kc = P(c | k)`, which is maximized row by row by a one-hot `K` on
//! `argmax_c R_kc`.

use crate::dataset::ExampleImage;
use crate::info;
use crate::{Error, Result};

/// Marks a cell that is dark in every example.
pub const NEVER_LIT: usize = usize::MAX;

/// `P(gamma_k)`, `R_kc = P(c | gamma_k)` and the class prior of one image set.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassPosteriorTable {
    gamma: Vec<f64>,
    posterior: Vec<f64>,
    class_prior: Vec<f64>,
    classes: usize,
}

impl ClassPosteriorTable {
    /// Build from a joint `P(k, c)` table (row-major, `cells x classes`).
    ///
    /// The class prior is the column sum of the joint.
    pub fn from_joint(joint: &[f64], classes: usize) -> Result<Self> {
        if classes == 0 || joint.is_empty() || joint.len() % classes != 0 {
            return Err(Error::Argument(format!(
                "joint of length {} is not a cells x {classes} table",
                joint.len()
            )));
        }
        if joint.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Argument("joint entries must be finite and non-negative".into()));
        }
        let total: f64 = joint.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Argument(format!("joint sums to {total}, not 1")));
        }
        let cells = joint.len() / classes;
        let mut gamma = vec![0.0; cells];
        let mut posterior = vec![0.0; joint.len()];
        let mut class_prior = vec![0.0; classes];
        for k in 0..cells {
            let row = &joint[k * classes..(k + 1) * classes];
            let g: f64 = row.iter().sum();
            gamma[k] = g;
            for (c, &v) in row.iter().enumerate() {
                class_prior[c] += v;
                if g > 0.0 {
                    posterior[k * classes + c] = v / g;
                }
            }
        }
        Ok(Self {
            gamma,
            posterior,
            class_prior,
            classes,
        })
    }

    pub fn cells(&self) -> usize {
        self.gamma.len()
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// Row-major `cells x classes`.
    pub fn posterior(&self) -> &[f64] {
        &self.posterior
    }

    pub fn posterior_row(&self, k: usize) -> &[f64] {
        &self.posterior[k * self.classes..(k + 1) * self.classes]
    }

    pub fn class_prior(&self) -> &[f64] {
        &self.class_prior
    }

    pub fn class_entropy_bits(&self) -> f64 {
        info::entropy_bits(&self.class_prior)
    }

    /// `P(k, c)` recovered as `gamma_k * R_kc`.
    pub fn joint(&self) -> Vec<f64> {
        (0..self.posterior.len())
            .map(|i| self.gamma[i / self.classes] * self.posterior[i])
            .collect()
    }

    /// Accuracy of an arbitrary classifier matrix `K` (row-major
    /// `cells x classes`, rows on the probability simplex).
    pub fn accuracy_of(&self, classifier: &[f64]) -> Result<f64> {
        if classifier.len() != self.posterior.len() {
            return Err(Error::Argument("classifier matrix has the wrong shape".into()));
        }
        Ok(self
            .posterior
            .iter()
            .zip(classifier)
            .enumerate()
            .map(|(i, (r, k))| self.gamma[i / self.classes] * r * k)
            .sum())
    }
}

/// Tabulate `P(gamma_k)` and `R_kc` over `examples`, each drawn with
/// probability `1/|examples|`.
pub fn posterior_table(examples: &[ExampleImage], classes: usize) -> Result<ClassPosteriorTable> {
    let first = examples
        .first()
        .ok_or_else(|| Error::Argument("empty example list".into()))?;
    if classes == 0 {
        return Err(Error::Argument("classes must be positive".into()));
    }
    let cells = first.pixels().len();
    let weight = 1.0 / examples.len() as f64;
    let mut joint = vec![0.0; cells * classes];
    for (i, ex) in examples.iter().enumerate() {
        if ex.rows() != first.rows() || ex.cols() != first.cols() {
            return Err(Error::Argument(format!(
                "example {i} is {}x{}, expected {}x{}",
                ex.rows(),
                ex.cols(),
                first.rows(),
                first.cols()
            )));
        }
        if ex.label() >= classes {
            return Err(Error::Argument(format!(
                "example {i} has label {} but there are only {classes} classes",
                ex.label()
            )));
        }
        let total = ex.total_brightness();
        if total <= 0.0 {
            return Err(Error::DegenerateInput(format!("example {i} is all dark")));
        }
        let scale = weight / total;
        let c = ex.label();
        for (k, &b) in ex.pixels().iter().enumerate() {
            joint[k * classes + c] += b * scale;
        }
    }
    // renormalize away the rounding in the accumulation
    let total: f64 = joint.iter().sum();
    joint.iter_mut().for_each(|v| *v /= total);
    ClassPosteriorTable::from_joint(&joint, classes)
}

/// `sum_k P(gamma_k) max_c R_kc`: the best accuracy of any classifier that
/// sees only the index of the lit cell.
pub fn optimal_accuracy(table: &ClassPosteriorTable) -> f64 {
    (0..table.cells())
        .map(|k| {
            let best = table
                .posterior_row(k)
                .iter()
                .fold(0.0f64, |m, &v| m.max(v));
            table.gamma[k] * best
        })
        .sum()
}

/// Most likely class per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelClassMap {
    /// [`NEVER_LIT`] where `gamma_k = 0`.
    pub argmax_class: Vec<usize>,
    pub max_posterior: Vec<f64>,
}

impl PixelClassMap {
    /// Accuracy of the lookup classifier defined by this map.
    pub fn lookup_accuracy(&self, table: &ClassPosteriorTable) -> f64 {
        self.argmax_class
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != NEVER_LIT)
            .map(|(k, &c)| table.gamma[k] * table.posterior_row(k)[c])
            .sum()
    }
}

/// Per-cell argmax; ties go to the lowest class index.
pub fn class_map(table: &ClassPosteriorTable) -> PixelClassMap {
    let mut argmax_class = Vec::with_capacity(table.cells());
    let mut max_posterior = Vec::with_capacity(table.cells());
    for k in 0..table.cells() {
        if table.gamma[k] == 0.0 {
            argmax_class.push(NEVER_LIT);
            max_posterior.push(0.0);
            continue;
        }
        let row = table.posterior_row(k);
        let mut best = 0;
        for c in 1..row.len() {
            if row[c] > row[best] {
                best = c;
            }
        }
        argmax_class.push(best);
        max_posterior.push(row[best]);
    }
    PixelClassMap {
        argmax_class,
        max_posterior,
    }
}

/// `I(C;K) = sum_k P(k) sum_c R_kc log2(R_kc / P(c))`.
pub fn classical_mutual_information(table: &ClassPosteriorTable) -> f64 {
    let mut mi = 0.0;
    for k in 0..table.cells() {
        let g = table.gamma[k];
        if g == 0.0 {
            continue;
        }
        for (c, &r) in table.posterior_row(k).iter().enumerate() {
            if r > 0.0 {
                mi += g * r * (r / table.class_prior[c]).log2();
            }
        }
    }
    mi.max(0.0)
}

/// Summary emitted by the `classical` command.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ClassicalReport {
    pub accuracy_bound: f64,
    /// Standard `I(C;K)` between label and lit cell.
    pub mutual_information_bits: f64,
    pub entropy_bits: f64,
    /// `entropy_bits + log2(accuracy_bound)`.
    pub accuracy_information_bits: f64,
    pub n_examples: usize,
    pub never_lit_cells: usize,
}

pub fn report(table: &ClassPosteriorTable, n_examples: usize) -> ClassicalReport {
    let accuracy_bound = optimal_accuracy(table);
    let entropy_bits = table.class_entropy_bits();
    ClassicalReport {
        accuracy_bound,
        mutual_information_bits: classical_mutual_information(table),
        entropy_bits,
        accuracy_information_bits: info::accuracy_information_bits(entropy_bits, accuracy_bound),
        n_examples,
        never_lit_cells: table.gamma.iter().filter(|&&g| g == 0.0).count(),
    }
}
