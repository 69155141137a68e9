//! Matrix files.
//!
//! Binary layout, little-endian:
//!
//! ```text
//! bytes 0..4    magic: "UPHC" (complex unitary) or "UPHR" (real weights)
//! bytes 4..8    format version, u32 (currently 1)
//! bytes 8..16   dimension M, u64
//! then M*M entries in row-major order:
//!   UPHC: (f64 real, f64 imag) pairs
//!   UPHR: f64 values
//! ```

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::linalg::{CMat, UnitaryTransform, WeightMatrix};
use crate::{Error, Result};

pub const UNITARY_MAGIC: &[u8; 4] = b"UPHC";
pub const WEIGHTS_MAGIC: &[u8; 4] = b"UPHR";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 16;

fn header(magic: &[u8; 4], dim: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(magic);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(dim as u64).to_le_bytes());
    out
}

fn parse_header(bytes: &[u8], magic: &[u8; 4], entry_len: usize) -> Result<usize> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!("file too short for header: {} bytes", bytes.len())));
    }
    if &bytes[0..4] != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&bytes[0..4]),
            String::from_utf8_lossy(magic)
        )));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dim = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let expected = dim
        .checked_mul(dim)
        .and_then(|n| n.checked_mul(entry_len))
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Format(format!("dimension {dim} overflows")))?;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "dimension {dim} needs {expected} bytes, file has {}",
            bytes.len()
        )));
    }
    Ok(dim)
}

fn f64_at(bytes: &[u8], offset: usize) -> f64 {
    f64::from_le_bytes(bytes[offset..offset + 8].try_into().unwrap())
}

pub fn encode_unitary(u: &UnitaryTransform) -> Vec<u8> {
    encode_complex(u.matrix())
}

pub fn encode_complex(m: &CMat) -> Vec<u8> {
    let n = m.nrows();
    let mut out = header(UNITARY_MAGIC, n);
    out.reserve(n * n * 16);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

/// Decode and check unitarity.
pub fn decode_unitary(bytes: &[u8]) -> Result<UnitaryTransform> {
    let n = parse_header(bytes, UNITARY_MAGIC, 16)?;
    let body = &bytes[HEADER_LEN..];
    let m = CMat::from_fn(n, n, |i, j| {
        let off = (i * n + j) * 16;
        Complex64::new(f64_at(body, off), f64_at(body, off + 8))
    });
    UnitaryTransform::new(m)
}

pub fn encode_weights(w: &WeightMatrix) -> Vec<u8> {
    let mut out = header(WEIGHTS_MAGIC, w.dim());
    for v in w.to_row_major() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_weights(bytes: &[u8]) -> Result<WeightMatrix> {
    let n = parse_header(bytes, WEIGHTS_MAGIC, 8)?;
    let body = &bytes[HEADER_LEN..];
    let values: Vec<f64> = (0..n * n).map(|k| f64_at(body, k * 8)).collect();
    WeightMatrix::from_row_major(n, &values)
}

pub fn write_unitary(path: impl AsRef<Path>, u: &UnitaryTransform) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_unitary(u)).map_err(|e| Error::io(path, e))
}

pub fn read_unitary(path: impl AsRef<Path>) -> Result<UnitaryTransform> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_unitary(&bytes)
}

pub fn write_weights(path: impl AsRef<Path>, w: &WeightMatrix) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_weights(w)).map_err(|e| Error::io(path, e))
}

pub fn read_weights(path: impl AsRef<Path>) -> Result<WeightMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_weights(&bytes)
}

/// JSON form for small matrices: `{"dim": M, "real": [[..]], "imag": [[..]]}`.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct UnitaryJson {
    pub dim: usize,
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
}

impl From<&UnitaryTransform> for UnitaryJson {
    fn from(u: &UnitaryTransform) -> Self {
        let m = u.matrix();
        let n = u.dim();
        Self {
            dim: n,
            real: (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect(),
            imag: (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect(),
        }
    }
}

impl TryFrom<&UnitaryJson> for UnitaryTransform {
    type Error = Error;

    fn try_from(j: &UnitaryJson) -> Result<Self> {
        let n = j.dim;
        let rows_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !rows_ok(&j.real) || !rows_ok(&j.imag) {
            return Err(Error::Format(format!("unitary JSON is not {n}x{n}")));
        }
        UnitaryTransform::new(CMat::from_fn(n, n, |r, c| {
            Complex64::new(j.real[r][c], j.imag[r][c])
        }))
    }
}

pub fn unitary_to_json(u: &UnitaryTransform) -> Result<String> {
    Ok(serde_json::to_string_pretty(&UnitaryJson::from(u))?)
}

pub fn unitary_from_json(text: &str) -> Result<UnitaryTransform> {
    let j: UnitaryJson = serde_json::from_str(text)?;
    UnitaryTransform::try_from(&j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{build_generator, expm, ExpmConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample(n: usize) -> (WeightMatrix, UnitaryTransform) {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w = WeightMatrix::random_normal(n, 0.3, &mut rng);
        let u = expm(&build_generator(&w).unwrap(), &ExpmConfig::default()).unwrap();
        (w, u)
    }

    #[test]
    fn header_layout() {
        let (w, u) = sample(3);
        let b = encode_unitary(&u);
        assert_eq!(&b[0..4], b"UPHC");
        assert_eq!(u32::from_le_bytes(b[4..8].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(b[8..16].try_into().unwrap()), 3);
        assert_eq!(b.len(), 16 + 9 * 16);
        // entry (0, 1) real part sits right after entry (0, 0)
        assert_eq!(f64_at(&b, 16 + 16), u.matrix()[(0, 1)].re);
        assert_eq!(encode_weights(&w).len(), 16 + 9 * 8);
    }

    #[test]
    fn binary_and_json_round_trip_exactly() {
        let (w, u) = sample(5);
        assert_eq!(decode_unitary(&encode_unitary(&u)).unwrap(), u);
        assert_eq!(decode_weights(&encode_weights(&w)).unwrap(), w);
        assert_eq!(unitary_from_json(&unitary_to_json(&u).unwrap()).unwrap(), u);
    }

    #[test]
    fn corrupt_files_rejected() {
        let (w, u) = sample(2);
        let b = encode_unitary(&u);
        assert!(decode_unitary(&b[..b.len() - 1]).is_err());
        assert!(decode_unitary(&encode_weights(&w)).is_err());
        let mut bad = b.clone();
        bad[4] = 9;
        assert!(decode_unitary(&bad).is_err());
    }
}
