//! Analytic evaluation of a trained transform.
//!
//! All figures are exact expectations over the detection statistics, not
//! sampled photon counts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dataset::{to_amplitudes, AmplitudeState, ClassStyleLayout, ExampleImage};
use crate::info::{accuracy_information_bits, entropy_bits, mutual_information_bits};
use crate::linalg::{mul, CMat, UnitaryTransform};
use crate::model::ClassProbabilities;
use crate::reck::OpticalBlueprint;
use crate::{Error, Result};

const CHUNK: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Mean probability of the true label: single-photon accuracy.
    pub expected_accuracy: f64,
    /// Fraction of examples whose most likely class is the true one.
    pub argmax_accuracy: f64,
    /// `I(label; detected class)`, C outcomes.
    pub mutual_information_bits: f64,
    /// `I(label; detector cell)`, M outcomes.
    pub mutual_information_full_bits: f64,
    /// `H(label) + log2(expected_accuracy)`.
    pub accuracy_information_bits: f64,
    pub class_entropy_bits: f64,
    /// Row `c`: mean class distribution over examples labeled `c`. Rows of
    /// classes absent from the set are zero.
    pub confusion: Vec<Vec<f64>>,
    pub class_counts: Vec<usize>,
    pub n_examples: usize,
}

/// Running sums for [`EvalReport`].
#[derive(Debug, Clone)]
pub struct Accumulator {
    layout: ClassStyleLayout,
    joint_class: Vec<f64>,
    joint_cell: Vec<f64>,
    counts: Vec<usize>,
    expected: f64,
    hits: usize,
    n: usize,
}

impl Accumulator {
    pub fn new(layout: ClassStyleLayout) -> Self {
        let c = layout.classes();
        Self {
            layout,
            joint_class: vec![0.0; c * c],
            joint_cell: vec![0.0; c * layout.dim()],
            counts: vec![0; c],
            expected: 0.0,
            hits: 0,
            n: 0,
        }
    }

    /// Add one example given its output amplitudes `U a`.
    pub fn add(&mut self, out: &[Complex64], label: usize) -> Result<()> {
        let c = self.layout.classes();
        let m = self.layout.dim();
        if label >= c {
            return Err(Error::Argument(format!("label {label} out of range for {c} classes")));
        }
        if out.len() != m {
            return Err(Error::Argument(format!("output of length {} for dimension {m}", out.len())));
        }
        for (j, z) in out.iter().enumerate() {
            self.joint_cell[label * m + j] += z.norm_sqr();
        }
        let p = ClassProbabilities::from_output(out, &self.layout, false);
        for (k, &v) in p.probs.iter().enumerate() {
            self.joint_class[label * c + k] += v;
        }
        self.expected += p.probs[label];
        self.hits += usize::from(p.argmax() == label);
        self.counts[label] += 1;
        self.n += 1;
        Ok(())
    }

    pub fn finish(self) -> Result<EvalReport> {
        if self.n == 0 {
            return Err(Error::Argument("cannot evaluate an empty set".into()));
        }
        let c = self.layout.classes();
        let m = self.layout.dim();
        let n = self.n as f64;
        let prior: Vec<f64> = self.counts.iter().map(|&k| k as f64 / n).collect();
        let confusion = (0..c)
            .map(|y| {
                let k = self.counts[y];
                (0..c)
                    .map(|x| if k == 0 { 0.0 } else { self.joint_class[y * c + x] / k as f64 })
                    .collect()
            })
            .collect();
        let joint_class: Vec<f64> = self.joint_class.iter().map(|v| v / n).collect();
        let joint_cell: Vec<f64> = self.joint_cell.iter().map(|v| v / n).collect();
        let class_entropy = entropy_bits(&prior);
        let expected = self.expected / n;
        Ok(EvalReport {
            expected_accuracy: expected,
            argmax_accuracy: self.hits as f64 / n,
            mutual_information_bits: mutual_information_bits(&joint_class, c, c),
            mutual_information_full_bits: mutual_information_bits(&joint_cell, c, m),
            accuracy_information_bits: accuracy_information_bits(class_entropy, expected),
            class_entropy_bits: class_entropy,
            confusion,
            class_counts: self.counts,
            n_examples: self.n,
        })
    }
}

/// Evaluate `U` on already encoded states.
pub fn evaluate_states(u: &UnitaryTransform, states: &[(AmplitudeState, usize)], layout: &ClassStyleLayout) -> Result<EvalReport> {
    if u.dim() != layout.dim() {
        return Err(Error::Consistency(format!(
            "unitary has dimension {} but the layout has {}",
            u.dim(),
            layout.dim()
        )));
    }
    let m = layout.dim();
    let mut acc = Accumulator::new(*layout);
    for chunk in states.chunks(CHUNK) {
        if let Some((s, _)) = chunk.iter().find(|(s, _)| s.len() != m) {
            return Err(Error::Argument(format!("state of length {} for dimension {m}", s.len())));
        }
        let a = CMat::from_fn(m, chunk.len(), |j, b| chunk[b].0.amplitudes()[j]);
        let out = mul(u.matrix().as_ref(), a.as_ref());
        for (b, (_, y)) in chunk.iter().enumerate() {
            acc.add(out.col_as_slice(b), *y)?;
        }
    }
    acc.finish()
}

fn encode(test_set: &[ExampleImage], layout: &ClassStyleLayout) -> Result<Vec<(AmplitudeState, usize)>> {
    test_set
        .iter()
        .map(|im| Ok((to_amplitudes(im, layout)?, im.label())))
        .collect()
}

pub fn evaluate(u: &UnitaryTransform, test_set: &[ExampleImage], layout: &ClassStyleLayout) -> Result<EvalReport> {
    evaluate_states(u, &encode(test_set, layout)?, layout)
}

/// Evaluate by propagating each state element by element through a mesh.
pub fn evaluate_blueprint(bp: &OpticalBlueprint, test_set: &[ExampleImage], layout: &ClassStyleLayout) -> Result<EvalReport> {
    if bp.dim != layout.dim() {
        return Err(Error::Consistency(format!(
            "blueprint has dimension {} but the layout has {}",
            bp.dim,
            layout.dim()
        )));
    }
    let mut acc = Accumulator::new(*layout);
    for im in test_set {
        let s = to_amplitudes(im, layout)?;
        acc.add(&bp.apply(s.amplitudes())?, im.label())?;
    }
    acc.finish()
}

/// Component of an example attributable to one class, in the pixel basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassProjection {
    pub class_index: usize,
    pub amplitudes: Vec<Complex64>,
    pub mass: f64,
}

fn mask_and_return(u: &UnitaryTransform, out: &[Complex64], class: usize, layout: &ClassStyleLayout) -> ClassProjection {
    let range = layout.class_range(class);
    let masked: Vec<Complex64> = out
        .iter()
        .enumerate()
        .map(|(j, &z)| if range.contains(&j) { z } else { Complex64::new(0.0, 0.0) })
        .collect();
    let amplitudes = u.apply_adjoint(&masked);
    let mass = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    ClassProjection {
        class_index: class,
        amplitudes,
        mass,
    }
}

fn check(u: &UnitaryTransform, state: &AmplitudeState, layout: &ClassStyleLayout) -> Result<()> {
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

/// `U^H (block mask of class) U a`
pub fn project_example(u: &UnitaryTransform, state: &AmplitudeState, class: usize, layout: &ClassStyleLayout) -> Result<ClassProjection> {
    check(u, state, layout)?;
    if class >= layout.classes() {
        return Err(Error::Argument(format!("class {class} out of range for {} classes", layout.classes())));
    }
    Ok(mask_and_return(u, &u.apply(state.amplitudes()), class, layout))
}

/// Projections onto every class.
pub fn project_all(u: &UnitaryTransform, state: &AmplitudeState, layout: &ClassStyleLayout) -> Result<Vec<ClassProjection>> {
    check(u, state, layout)?;
    let out = u.apply(state.amplitudes());
    Ok((0..layout.classes()).map(|c| mask_and_return(u, &out, c, layout)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelInterference {
    /// `|a1 + a2|^2`
    pub combined: f64,
    /// `|a1|^2 + |a2|^2`
    pub separate: f64,
    /// `2 Re(a1 conj(a2))`, the difference of the two.
    pub interference: f64,
}

/// How the projections onto two classes interfere at each pixel.
pub fn interference_audit(
    u: &UnitaryTransform,
    state: &AmplitudeState,
    layout: &ClassStyleLayout,
    classes: (usize, usize),
) -> Result<Vec<PixelInterference>> {
    if classes.0 == classes.1 {
        return Err(Error::Argument("interference audit needs two distinct classes".into()));
    }
    let p1 = project_example(u, state, classes.0, layout)?;
    let p2 = project_example(u, state, classes.1, layout)?;
    Ok(pixel_interference(&p1.amplitudes, &p2.amplitudes))
}

pub fn pixel_interference(a1: &[Complex64], a2: &[Complex64]) -> Vec<PixelInterference> {
    a1.iter()
        .zip(a2)
        .map(|(&x, &y)| PixelInterference {
            combined: (x + y).norm_sqr(),
            separate: x.norm_sqr() + y.norm_sqr(),
            interference: 2.0 * (x * y.conj()).re,
        })
        .collect()
}

/// Binary PGM of `|a|` over the first `rows * cols` entries, scaled so the
/// largest magnitude is white.
pub fn magnitude_pgm(amplitudes: &[Complex64], rows: usize, cols: usize) -> Vec<u8> {
    let mags: Vec<f64> = amplitudes[..rows * cols].iter().map(|z| z.norm()).collect();
    let top = mags.iter().cloned().fold(0.0, f64::max);
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    out.extend(mags.iter().map(|&m| if top > 0.0 { (255.0 * m / top).round() as u8 } else { 0 }));
    out
}

/// Binary PPM with hue = phase, value = magnitude (relative to the maximum),
/// full saturation.
pub fn phase_ppm(amplitudes: &[Complex64], rows: usize, cols: usize) -> Vec<u8> {
    let vals = &amplitudes[..rows * cols];
    let top = vals.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut out = format!("P6\n{cols} {rows}\n255\n").into_bytes();
    for z in vals {
        let v = if top > 0.0 { z.norm() / top } else { 0.0 };
        let hue = z.arg().rem_euclid(std::f64::consts::TAU) / std::f64::consts::TAU * 6.0;
        let rgb = hsv_to_rgb(hue, v);
        out.extend(rgb.iter().map(|c| (255.0 * c).round() as u8));
    }
    out
}

/// `hue` in sextants `[0, 6)`, saturation 1.
fn hsv_to_rgb(hue: f64, value: f64) -> [f64; 3] {
    let sector = hue.floor();
    let f = hue - sector;
    let (p, q, t) = (0.0, value * (1.0 - f), value * f);
    match sector as i32 % 6 {
        0 => [value, t, p],
        1 => [q, value, p],
        2 => [p, value, t],
        3 => [p, q, value],
        4 => [t, p, value],
        _ => [value, p, q],
    }
}
