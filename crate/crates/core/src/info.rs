//! Entropies and mutual information in bits.

/// Shannon entropy of a distribution, `0 log 0 = 0`.
pub fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.log2())
        .sum::<f64>()
}

/// `I(X;Y)` for a joint distribution stored row-major as `rows x cols`
/// (`X` indexes rows). Entries must be non-negative and sum to 1.
pub fn mutual_information_bits(joint: &[f64], rows: usize, cols: usize) -> f64 {
    assert_eq!(joint.len(), rows * cols);
    let mut px = vec![0.0; rows];
    let mut py = vec![0.0; cols];
    for r in 0..rows {
        for c in 0..cols {
            let v = joint[r * cols + c];
            px[r] += v;
            py[c] += v;
        }
    }
    let mut mi = 0.0;
    for r in 0..rows {
        for c in 0..cols {
            let v = joint[r * cols + c];
            if v > 0.0 {
                mi += v * (v / (px[r] * py[c])).log2();
            }
        }
    }
    // rounding can push an independent joint a hair below zero
    mi.max(0.0)
}

/// Information figure derived from accuracy alone: the class entropy minus
/// `-log2(accuracy)`, i.e. `H(C) + log2(accuracy)`.
///
/// This is the entropy-difference recipe that turns 22.957% into 1.20 bits
/// for ten equiprobable classes. It is not a mutual information and can be
/// negative when the accuracy is below chance.
pub fn accuracy_information_bits(class_entropy: f64, accuracy: f64) -> f64 {
    class_entropy + accuracy.log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_entropy() {
        assert!((entropy_bits(&[0.1; 10]) - 10f64.log2()).abs() < 1e-14);
        assert_eq!(entropy_bits(&[1.0, 0.0]), 0.0);
    }

    #[test]
    fn independent_joint_has_zero_information() {
        let px = [0.2, 0.8];
        let py = [0.5, 0.3, 0.2];
        let joint: Vec<f64> = px.iter().flat_map(|a| py.iter().map(move |b| a * b)).collect();
        assert!(mutual_information_bits(&joint, 2, 3) < 1e-15);
    }

    #[test]
    fn diagonal_joint_carries_full_entropy() {
        let joint = [0.25, 0.0, 0.0, 0.75];
        let h = entropy_bits(&[0.25, 0.75]);
        assert!((mutual_information_bits(&joint, 2, 2) - h).abs() < 1e-14);
    }

    #[test]
    fn accuracy_information_reference_values() {
        let h = 10f64.log2();
        assert!((accuracy_information_bits(h, 0.22957) - 1.20).abs() < 0.005);
        assert!((accuracy_information_bits(h, 0.21375) - 1.10).abs() < 0.005);
        assert!((accuracy_information_bits(h, 0.4127) - 2.04).abs() < 0.01);
        assert!((accuracy_information_bits(h, 0.3614) - 1.85).abs() < 0.01);
    }
}
