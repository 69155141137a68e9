#![allow(dead_code)]

use std::path::{Path, PathBuf};

use photon_core::dataset::{load_idx, ExampleImage};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn find(base: &Path, name: &str) -> Option<PathBuf> {
    let plain = base.join(name);
    if plain.exists() {
        return Some(plain);
    }
    let gz = base.join(format!("{name}.gz"));
    gz.exists().then_some(gz)
}

/// `split` is `train` or `t10k`. `None` when the files are not installed.
pub fn load(dataset: &str, split: &str) -> Option<Vec<ExampleImage>> {
    let base = data_dir().join(dataset);
    let images = find(&base, &format!("{split}-images-idx3-ubyte"))?;
    let labels = find(&base, &format!("{split}-labels-idx1-ubyte"))?;
    Some(load_idx(images, labels).expect("installed dataset parses"))
}

pub fn skip(what: &str) {
    eprintln!("skipped: {what} not installed under {}", data_dir().display());
}
