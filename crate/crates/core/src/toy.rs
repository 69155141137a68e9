//! The 2x4 two-shape example.
//!
//! Each shape lights four of eight pixels, so every lit pixel carries
//! amplitude 1/2. The two standard shapes share two pixels, giving
//! `<q1|q2> = 1/2`. Pixel `(y, x)` lives at index `4 y + x`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::dataset::{AmplitudeState, ClassStyleLayout, ExampleImage};
use crate::linalg::{CMat, UnitaryTransform};
use crate::{Error, Result};

pub const ROWS: usize = 2;
pub const COLS: usize = 4;
pub const PIXELS: usize = ROWS * COLS;

/// A 2x4 on/off pattern with exactly four lit pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToyShape {
    grid: [[bool; COLS]; ROWS],
}

impl ToyShape {
    pub fn new(grid: [[bool; COLS]; ROWS]) -> Result<Self> {
        let lit = grid.iter().flatten().filter(|&&b| b).count();
        if lit != 4 {
            return Err(Error::Argument(format!("toy shape needs 4 lit pixels, got {lit}")));
        }
        Ok(Self { grid })
    }

    /// From lit `(row, col)` coordinates.
    pub fn from_pixels(pixels: &[(usize, usize)]) -> Result<Self> {
        let mut grid = [[false; COLS]; ROWS];
        for &(y, x) in pixels {
            if y >= ROWS || x >= COLS {
                return Err(Error::Argument(format!("pixel ({y}, {x}) outside the 2x4 grid")));
            }
            grid[y][x] = true;
        }
        Self::new(grid)
    }

    pub fn grid(&self) -> [[bool; COLS]; ROWS] {
        self.grid
    }

    pub fn is_lit(&self, y: usize, x: usize) -> bool {
        self.grid[y][x]
    }

    /// Real amplitudes: 1/2 on lit pixels.
    pub fn amplitudes(&self) -> [f64; PIXELS] {
        let mut a = [0.0; PIXELS];
        for (k, v) in a.iter_mut().enumerate() {
            if self.grid[k / COLS][k % COLS] {
                *v = 0.5;
            }
        }
        a
    }

    pub fn state(&self) -> AmplitudeState {
        let v = self.amplitudes().iter().map(|&a| Complex64::new(a, 0.0)).collect();
        AmplitudeState::new(v).expect("four pixels of amplitude 1/2 are normalized")
    }

    pub fn to_image(&self, label: usize) -> ExampleImage {
        let pixels = self.amplitudes().iter().map(|&a| if a > 0.0 { 1.0 } else { 0.0 }).collect();
        ExampleImage::new(ROWS, COLS, pixels, label).expect("valid 2x4 image")
    }
}

/// The two "T" shapes: one with the bar on top, one with the bar at the
/// bottom shifted right by one.
pub fn standard_shapes() -> (ToyShape, ToyShape) {
    let top = ToyShape::from_pixels(&[(0, 0), (0, 1), (0, 2), (1, 1)]).unwrap();
    let bottom = ToyShape::from_pixels(&[(0, 2), (1, 1), (1, 2), (1, 3)]).unwrap();
    (top, bottom)
}

/// Class layout for training on the toy problem: two classes, four styles.
pub fn layout() -> ClassStyleLayout {
    ClassStyleLayout::new(2, 4, PIXELS).unwrap()
}

/// Both shapes as images, labeled 0 and 1.
pub fn dataset(shapes: (ToyShape, ToyShape)) -> Vec<ExampleImage> {
    vec![shapes.0.to_image(0), shapes.1.to_image(1)]
}

fn ml_accuracy(p: &[f64; PIXELS], q: &[f64; PIXELS]) -> f64 {
    p.iter().zip(q).map(|(a, b)| 0.5 * a.max(*b)).sum()
}

fn probabilities(a: &[f64; PIXELS]) -> [f64; PIXELS] {
    a.map(|v| v * v)
}

/// Maximum-likelihood accuracy from the detector index alone, equal priors.
pub fn baseline_accuracy(shapes: (ToyShape, ToyShape)) -> f64 {
    ml_accuracy(
        &probabilities(&shapes.0.amplitudes()),
        &probabilities(&shapes.1.amplitudes()),
    )
}

/// Each column `(a, b)` becomes `((a - b) / sqrt 2, (a + b) / sqrt 2)`.
pub fn column_transform(a: &[f64; PIXELS]) -> [f64; PIXELS] {
    let mut out = [0.0; PIXELS];
    for x in 0..COLS {
        let (top, bottom) = (a[x], a[COLS + x]);
        out[x] = (top - bottom) * FRAC_1_SQRT_2;
        out[COLS + x] = (top + bottom) * FRAC_1_SQRT_2;
    }
    out
}

/// Per-pixel detection probabilities after the column transform.
pub fn column_transform_probabilities(shape: &ToyShape) -> [f64; PIXELS] {
    probabilities(&column_transform(&shape.amplitudes()))
}

pub fn column_transform_accuracy(shapes: (ToyShape, ToyShape)) -> f64 {
    ml_accuracy(
        &column_transform_probabilities(&shapes.0),
        &column_transform_probabilities(&shapes.1),
    )
}

/// The column transform as an 8x8 unitary.
pub fn column_transform_unitary() -> UnitaryTransform {
    let mut m = CMat::zeros(PIXELS, PIXELS);
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    for x in 0..COLS {
        m[(x, x)] = h;
        m[(x, COLS + x)] = -h;
        m[(COLS + x, x)] = h;
        m[(COLS + x, COLS + x)] = h;
    }
    UnitaryTransform::new(m).unwrap()
}

/// Best single-shot discrimination of two equiprobable pure states:
/// `cos^2(pi/4 - alpha/2)` with `cos alpha = |<q1|q2>|`.
pub fn optimal_two_state_accuracy(shapes: (ToyShape, ToyShape)) -> f64 {
    let (a, b) = (shapes.0.amplitudes(), shapes.1.amplitudes());
    let overlap: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let alpha = overlap.abs().min(1.0).acos();
    (FRAC_PI_4 - alpha / 2.0).cos().powi(2)
}
