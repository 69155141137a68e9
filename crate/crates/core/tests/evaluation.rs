use num_complex::Complex64;
use photon_core::dataset::{AmplitudeState, ClassStyleLayout};
use photon_core::eval::{evaluate_states, interference_audit, project_all, project_example};
use photon_core::linalg::{build_generator, expm, ExpmConfig, UnitaryTransform, WeightMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> UnitaryTransform {
    expm(&build_generator(&WeightMatrix::random_normal(dim, 0.7, rng)).unwrap(), &ExpmConfig::default()).unwrap()
}

fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> AmplitudeState {
    AmplitudeState::normalized((0..dim).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect())
        .unwrap()
}

fn setup(classes: usize, styles: usize, n: usize, seed: u64) -> (ClassStyleLayout, UnitaryTransform, Vec<(AmplitudeState, usize)>) {
    let layout = ClassStyleLayout::new(classes, styles, classes * styles).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_unitary(layout.dim(), &mut rng);
    let states = (0..n).map(|_| (random_state(layout.dim(), &mut rng), rng.gen_range(0..classes))).collect();
    (layout, u, states)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn report_identities(classes in 1usize..6, styles in 1usize..5, n in 1usize..40, seed in any::<u64>()) {
        let (layout, u, states) = setup(classes, styles, n, seed);
        let r = evaluate_states(&u, &states, &layout).unwrap();
        let mut trace = 0.0;
        for (c, row) in r.confusion.iter().enumerate() {
            let s: f64 = row.iter().sum();
            if r.class_counts[c] > 0 {
                prop_assert!((s - 1.0).abs() <= 1e-9);
            }
            trace += r.class_counts[c] as f64 / n as f64 * row[c];
        }
        prop_assert!((trace - r.expected_accuracy).abs() <= 1e-9);
        prop_assert!(r.mutual_information_bits >= 0.0);
        prop_assert!(r.mutual_information_bits <= r.class_entropy_bits + 1e-9);
        prop_assert!(r.class_entropy_bits <= (classes as f64).log2() + 1e-12);
        // merging cells into class groups cannot add information
        prop_assert!(r.mutual_information_bits <= r.mutual_information_full_bits + 1e-9);
    }

    #[test]
    fn projections_complete_and_orthogonal(classes in 1usize..6, styles in 1usize..5, seed in any::<u64>()) {
        let (layout, u, states) = setup(classes, styles, 1, seed);
        let a = &states[0].0;
        let parts = project_all(&u, a, &layout).unwrap();
        let mass: f64 = parts.iter().map(|p| p.mass).sum();
        prop_assert!((mass - 1.0).abs() <= 1e-9);
        for j in 0..layout.dim() {
            let sum: Complex64 = parts.iter().map(|p| p.amplitudes[j]).sum();
            prop_assert!((sum - a.amplitudes()[j]).norm() <= 1e-10);
        }
        for x in 0..classes {
            for y in x + 1..classes {
                let dot: Complex64 = parts[x].amplitudes.iter().zip(&parts[y].amplitudes).map(|(p, q)| p.conj() * q).sum();
                prop_assert!(dot.norm() <= 1e-9);
            }
        }
        let single = project_example(&u, a, classes - 1, &layout).unwrap();
        prop_assert_eq!(&single, &parts[classes - 1]);
    }

    #[test]
    fn interference_sums_to_combined(classes in 2usize..5, styles in 1usize..4, seed in any::<u64>()) {
        let (layout, u, states) = setup(classes, styles, 1, seed);
        let audit = interference_audit(&u, &states[0].0, &layout, (0, 1)).unwrap();
        for p in audit {
            prop_assert!((p.combined - p.separate - p.interference).abs() <= 1e-12);
        }
    }
}
