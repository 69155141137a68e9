//! IDX ingestion, resampling and amplitude encoding.
//!
//! An image is turned into the state of a photon that passed the filter: the
//! amplitude of pixel `(y, x)` is `sqrt(b_yx / sum b)`, stored at linear index
//! `y * cols + x`, and the vector is zero-padded up to `M = classes * styles`.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use flate2::read::GzDecoder;
use num_complex::Complex64;

use crate::{Error, Result};

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

/// A labeled brightness grid. Pixels are fractions of full brightness.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleImage {
    rows: usize,
    cols: usize,
    pixels: Vec<f64>,
    label: usize,
}

impl ExampleImage {
    pub fn new(rows: usize, cols: usize, pixels: Vec<f64>, label: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Argument(format!(
                "image dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if pixels.len() != rows * cols {
            return Err(Error::Argument(format!(
                "{rows}x{cols} image needs {} pixels, got {}",
                rows * cols,
                pixels.len()
            )));
        }
        if let Some(bad) = pixels.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::Argument(format!(
                "pixel brightness must be finite and non-negative, got {bad}"
            )));
        }
        Ok(Self {
            rows,
            cols,
            pixels,
            label,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major brightness values.
    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn pixel(&self, y: usize, x: usize) -> f64 {
        self.pixels[y * self.cols + x]
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn total_brightness(&self) -> f64 {
        self.pixels.iter().sum()
    }

    pub fn is_dark(&self) -> bool {
        self.pixels.iter().all(|&p| p == 0.0)
    }

    /// Same image with pixels moved: pixel `k` of the result is pixel
    /// `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.pixels.len() {
            return Err(Error::Argument("permutation length mismatch".into()));
        }
        let pixels = perm.iter().map(|&k| self.pixels[k]).collect();
        Self::new(self.rows, self.cols, pixels, self.label)
    }
}

/// Split images into lit ones and the count of all-dark ones that were dropped.
pub fn drop_dark(images: Vec<ExampleImage>) -> (Vec<ExampleImage>, usize) {
    let before = images.len();
    let kept: Vec<_> = images.into_iter().filter(|im| !im.is_dark()).collect();
    let dropped = before - kept.len();
    (kept, dropped)
}

/// Factorization of the output space into `classes x styles` detector cells.
///
/// Index `j` maps to `(c, s)` with `j = c * styles + s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ClassStyleLayout {
    classes: usize,
    styles: usize,
    pixel_dim: usize,
}

impl ClassStyleLayout {
    pub fn new(classes: usize, styles: usize, pixel_dim: usize) -> Result<Self> {
        if classes == 0 || styles == 0 || pixel_dim == 0 {
            return Err(Error::Argument(format!(
                "layout counts must be positive (classes={classes}, styles={styles}, pixels={pixel_dim})"
            )));
        }
        if classes * styles < pixel_dim {
            return Err(Error::Argument(format!(
                "layout {classes}x{styles}={} is smaller than the {pixel_dim} pixels it must hold",
                classes * styles
            )));
        }
        Ok(Self {
            classes,
            styles,
            pixel_dim,
        })
    }

    /// Smallest layout with `classes` blocks that holds `pixel_dim` pixels:
    /// 784 pixels and 10 classes give 10x79 = 790.
    pub fn minimal(classes: usize, pixel_dim: usize) -> Result<Self> {
        if classes == 0 {
            return Err(Error::Argument("classes must be positive".into()));
        }
        Self::new(classes, pixel_dim.div_ceil(classes), pixel_dim)
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn styles(&self) -> usize {
        self.styles
    }

    pub fn pixel_dim(&self) -> usize {
        self.pixel_dim
    }

    /// Total dimension `M = classes * styles`.
    pub fn dim(&self) -> usize {
        self.classes * self.styles
    }

    pub fn index(&self, class: usize, style: usize) -> usize {
        debug_assert!(class < self.classes && style < self.styles);
        class * self.styles + style
    }

    pub fn split(&self, j: usize) -> (usize, usize) {
        (j / self.styles, j % self.styles)
    }

    pub fn class_of(&self, j: usize) -> usize {
        j / self.styles
    }

    pub fn class_range(&self, class: usize) -> std::ops::Range<usize> {
        class * self.styles..(class + 1) * self.styles
    }
}

/// Unit-norm complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeState {
    amplitudes: Vec<Complex64>,
}

pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

impl AmplitudeState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Argument("empty amplitude vector".into()));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Argument(format!(
                "amplitudes must have unit norm, squared norm is {norm}"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes `amplitudes` first. Fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateInput("zero amplitude vector".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::new(amplitudes)
    }

    /// Basis state `|j>` in dimension `dim`.
    pub fn basis(dim: usize, j: usize) -> Result<Self> {
        if j >= dim {
            return Err(Error::Argument(format!("basis index {j} out of range {dim}")));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[j] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Encode an image as a photon state: `a[y*cols+x] = sqrt(b_yx / sum b)`,
/// zero in the padded positions.
pub fn to_amplitudes(image: &ExampleImage, layout: &ClassStyleLayout) -> Result<AmplitudeState> {
    let n = image.pixels.len();
    if n != layout.pixel_dim() {
        return Err(Error::Argument(format!(
            "image has {n} pixels but layout expects {}",
            layout.pixel_dim()
        )));
    }
    let total = image.total_brightness();
    if total <= 0.0 {
        return Err(Error::DegenerateInput(
            "all-dark image: no photon can pass the filter".into(),
        ));
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); layout.dim()];
    for (a, &b) in amplitudes.iter_mut().zip(&image.pixels) {
        *a = Complex64::new((b / total).sqrt(), 0.0);
    }
    Ok(AmplitudeState { amplitudes })
}

/// Fractional-area box resampling to `target_rows x target_cols`.
///
/// Each target pixel is the brightness integral over its footprint in the
/// source grid divided by the footprint area.
pub fn downsample(
    image: &ExampleImage,
    target_rows: usize,
    target_cols: usize,
) -> Result<ExampleImage> {
    if target_rows == 0 || target_cols == 0 {
        return Err(Error::Argument("target dimensions must be at least 1".into()));
    }
    if target_rows > image.rows || target_cols > image.cols {
        return Err(Error::Argument(format!(
            "cannot downsample {}x{} to the larger {target_rows}x{target_cols}",
            image.rows, image.cols
        )));
    }
    let wr = box_weights(image.rows, target_rows);
    let wc = box_weights(image.cols, target_cols);

    // rows first: (target_rows x cols)
    let mut tmp = vec![0.0; target_rows * image.cols];
    for (i, weights) in wr.iter().enumerate() {
        for &(src, w) in weights {
            let row = &image.pixels[src * image.cols..(src + 1) * image.cols];
            for (t, &v) in tmp[i * image.cols..(i + 1) * image.cols].iter_mut().zip(row) {
                *t += w * v;
            }
        }
    }
    let mut out = vec![0.0; target_rows * target_cols];
    for i in 0..target_rows {
        let row = &tmp[i * image.cols..(i + 1) * image.cols];
        for (k, weights) in wc.iter().enumerate() {
            out[i * target_cols + k] = weights.iter().map(|&(src, w)| w * row[src]).sum();
        }
    }
    ExampleImage::new(target_rows, target_cols, out, image.label)
}

/// For each target cell, the source cells it overlaps and the overlap length
/// divided by the cell width.
fn box_weights(source: usize, target: usize) -> Vec<Vec<(usize, f64)>> {
    let scale = source as f64 / target as f64;
    (0..target)
        .map(|i| {
            let lo = i as f64 * scale;
            let hi = (i + 1) as f64 * scale;
            let first = lo.floor() as usize;
            let last = (hi.ceil() as usize).min(source);
            (first..last)
                .filter_map(|j| {
                    let overlap = (hi.min((j + 1) as f64) - lo.max(j as f64)).max(0.0);
                    (overlap > 0.0).then_some((j, overlap / scale))
                })
                .collect()
        })
        .collect()
}

pub fn downsample_all(
    images: &[ExampleImage],
    target_rows: usize,
    target_cols: usize,
) -> Result<Vec<ExampleImage>> {
    images
        .iter()
        .map(|im| downsample(im, target_rows, target_cols))
        .collect()
}

/// Load an image/label IDX pair. Files ending in `.gz` are decompressed.
pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<Vec<ExampleImage>> {
    let images_path = images_path.as_ref();
    let labels_path = labels_path.as_ref();
    let (rows, cols, pixels) = read_images(open(images_path)?).map_err(|e| e.at(images_path))?;
    let labels = read_labels(open(labels_path)?).map_err(|e| e.at(labels_path))?;
    assemble(rows, cols, pixels, labels)
}

/// Parse in-memory IDX images and labels.
pub fn parse_idx(image_bytes: &[u8], label_bytes: &[u8]) -> Result<Vec<ExampleImage>> {
    let (rows, cols, pixels) = read_images(image_bytes).map_err(|e| e.at("<images>"))?;
    let labels = read_labels(label_bytes).map_err(|e| e.at("<labels>"))?;
    assemble(rows, cols, pixels, labels)
}

/// Serialize raw 8-bit images and labels in IDX layout.
pub fn encode_idx(rows: usize, cols: usize, pixels: &[u8], labels: &[u8]) -> (Vec<u8>, Vec<u8>) {
    assert_eq!(pixels.len(), rows * cols * labels.len());
    let mut images = Vec::with_capacity(16 + pixels.len());
    images.extend_from_slice(&IDX_IMAGES_MAGIC.to_be_bytes());
    images.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    images.extend_from_slice(&(rows as u32).to_be_bytes());
    images.extend_from_slice(&(cols as u32).to_be_bytes());
    images.extend_from_slice(pixels);
    let mut lab = Vec::with_capacity(8 + labels.len());
    lab.extend_from_slice(&IDX_LABELS_MAGIC.to_be_bytes());
    lab.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    lab.extend_from_slice(labels);
    (images, lab)
}

fn open(path: &Path) -> Result<Box<dyn Read>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    if path.extension().is_some_and(|e| e == "gz") {
        Ok(Box::new(GzDecoder::new(reader)))
    } else {
        Ok(Box::new(reader))
    }
}

enum ParseError {
    Io(std::io::Error),
    Format(String),
}

impl From<std::io::Error> for ParseError {
    fn from(e: std::io::Error) -> Self {
        ParseError::Io(e)
    }
}

impl ParseError {
    fn at(self, path: impl AsRef<Path>) -> Error {
        match self {
            ParseError::Io(e) => Error::io(path.as_ref(), e),
            ParseError::Format(msg) => Error::Format(format!("{}: {msg}", path.as_ref().display())),
        }
    }
}

fn read_u32(r: &mut impl Read) -> std::result::Result<u32, ParseError> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_be_bytes(buf))
}

fn read_images(mut r: impl Read) -> std::result::Result<(usize, usize, Vec<u8>), ParseError> {
    let magic = read_u32(&mut r)?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(ParseError::Format(format!(
            "bad image magic 0x{magic:08x}, expected 0x{IDX_IMAGES_MAGIC:08x}"
        )));
    }
    let count = read_u32(&mut r)? as usize;
    let rows = read_u32(&mut r)? as usize;
    let cols = read_u32(&mut r)? as usize;
    let len = count
        .checked_mul(rows)
        .and_then(|v| v.checked_mul(cols))
        .ok_or_else(|| ParseError::Format("image payload size overflows".into()))?;
    let mut pixels = vec![0u8; len];
    r.read_exact(&mut pixels)?;
    Ok((rows, cols, pixels))
}

fn read_labels(mut r: impl Read) -> std::result::Result<Vec<u8>, ParseError> {
    let magic = read_u32(&mut r)?;
    if magic != IDX_LABELS_MAGIC {
        return Err(ParseError::Format(format!(
            "bad label magic 0x{magic:08x}, expected 0x{IDX_LABELS_MAGIC:08x}"
        )));
    }
    let count = read_u32(&mut r)? as usize;
    let mut labels = vec![0u8; count];
    r.read_exact(&mut labels)?;
    Ok(labels)
}

fn assemble(rows: usize, cols: usize, pixels: Vec<u8>, labels: Vec<u8>) -> Result<Vec<ExampleImage>> {
    let per_image = rows * cols;
    let count = pixels.len().checked_div(per_image).unwrap_or(0);
    if count != labels.len() {
        return Err(Error::Consistency(format!(
            "{count} images but {} labels",
            labels.len()
        )));
    }
    if per_image == 0 {
        return Ok(Vec::new());
    }
    pixels
        .chunks_exact(per_image)
        .zip(labels)
        .map(|(raw, label)| {
            let px = raw.iter().map(|&b| f64::from(b) / 255.0).collect();
            ExampleImage::new(rows, cols, px, usize::from(label))
        })
        .collect()
}
