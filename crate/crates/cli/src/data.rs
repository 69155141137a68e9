//! Dataset lookup under `--data-dir`.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use photon_core::dataset::{downsample_all, drop_dark, load_idx, ExampleImage};
use photon_core::{toy, Error, Result};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetName {
    Mnist,
    Fashion,
    /// MNIST box-filtered to 10x10
    Mnist10,
    /// Fashion-MNIST box-filtered to 10x10
    Fashion10,
    /// The two 2x4 shapes
    Toy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    fn prefix(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "t10k",
        }
    }
}

impl DatasetName {
    fn source_dir(self) -> Option<&'static str> {
        match self {
            DatasetName::Mnist | DatasetName::Mnist10 => Some("mnist"),
            DatasetName::Fashion | DatasetName::Fashion10 => Some("fashion"),
            DatasetName::Toy => None,
        }
    }

    fn target(self) -> Option<usize> {
        matches!(self, DatasetName::Mnist10 | DatasetName::Fashion10).then_some(10)
    }
}

pub struct Loaded {
    pub images: Vec<ExampleImage>,
    pub rows: usize,
    pub cols: usize,
    pub dropped_dark: usize,
    /// `(path, sha256 of the file as stored)`
    pub files: Vec<(PathBuf, String)>,
}

/// Prefer the uncompressed file, fall back to `.gz`.
pub fn resolve(dir: &Path, name: &str) -> PathBuf {
    let plain = dir.join(name);
    if plain.exists() {
        return plain;
    }
    let gz = dir.join(format!("{name}.gz"));
    if gz.exists() {
        gz
    } else {
        plain
    }
}

pub fn load(data_dir: &Path, name: DatasetName, split: Split) -> Result<Loaded> {
    let Some(sub) = name.source_dir() else {
        let images = toy::dataset(toy::standard_shapes());
        return Ok(Loaded {
            images,
            rows: toy::ROWS,
            cols: toy::COLS,
            dropped_dark: 0,
            files: vec![],
        });
    };
    let dir = data_dir.join(sub);
    let ip = resolve(&dir, &format!("{}-images-idx3-ubyte", split.prefix()));
    let lp = resolve(&dir, &format!("{}-labels-idx1-ubyte", split.prefix()));
    let mut images = load_idx(&ip, &lp)?;
    if let Some(t) = name.target() {
        images = downsample_all(&images, t, t)?;
    }
    let (images, dropped_dark) = drop_dark(images);
    let (rows, cols) = images
        .first()
        .map(|im| (im.rows(), im.cols()))
        .ok_or_else(|| Error::Argument(format!("{} has no lit images", ip.display())))?;
    let files = vec![(ip.clone(), file_sha256(&ip)?), (lp.clone(), file_sha256(&lp)?)];
    Ok(Loaded {
        images,
        rows,
        cols,
        dropped_dark,
        files,
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn digest_reader(mut r: impl Read, path: &Path) -> Result<String> {
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = r.read(&mut buf).map_err(|e| io_err(path, e))?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex(&h.finalize()))
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

pub fn file_sha256(path: &Path) -> Result<String> {
    digest_reader(File::open(path).map_err(|e| io_err(path, e))?, path)
}

/// Digest of the decompressed IDX payload, comparable with [`EXPECTED`].
pub fn payload_sha256(path: &Path) -> Result<String> {
    let f = File::open(path).map_err(|e| io_err(path, e))?;
    if path.extension().is_some_and(|e| e == "gz") {
        digest_reader(flate2::read::GzDecoder::new(f), path)
    } else {
        digest_reader(f, path)
    }
}

/// SHA-256 of the uncompressed MNIST distribution files.
pub const EXPECTED: &[(&str, &str)] = &[
    ("mnist/train-images-idx3-ubyte", "ba891046e6505d7aadcbbe25680a0738ad16aec93bde7f9b65e87a2fc25776db"),
    ("mnist/train-labels-idx1-ubyte", "65a50cbbf4e906d70832878ad85ccda5333a97f0f4c3dd2ef09a8a9eef7101c5"),
    ("mnist/t10k-images-idx3-ubyte", "0fa7898d509279e482958e8ce81c8e77db3f2f8254e26661ceb7762c4d494ce7"),
    ("mnist/t10k-labels-idx1-ubyte", "ff7bcfd416de33731a308c3f266cc351222c34898ecbeaf847f06e48f7ec33f2"),
];

/// Fashion-MNIST files looked for by the `checksums` command. No digest is
/// pinned for them.
pub const FASHION_FILES: &[&str] = &[
    "fashion/train-images-idx3-ubyte",
    "fashion/train-labels-idx1-ubyte",
    "fashion/t10k-images-idx3-ubyte",
    "fashion/t10k-labels-idx1-ubyte",
];
