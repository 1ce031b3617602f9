//! Property tests over randomized inputs.

use proptest::prelude::*;

use gbsgauss::eigen::sym_eigen;
use gbsgauss::hafnian::{hafnian_dense, hafnian_repeated};
use gbsgauss::index::MultiIndex;
use gbsgauss::matrix::SymMatrix;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The coefficient-extraction hafnian agrees with the matching
    /// enumeration over the repeated submatrix.
    #[test]
    fn repeated_equals_dense_on_submatrix(
        n in 1usize..=4,
        entries in prop::collection::vec(0u32..=4, 4),
        rows in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 4), 4),
    ) {
        let rows: Vec<Vec<f64>> = rows.into_iter().take(n).map(|r| r.into_iter().take(n).collect()).collect();
        let b = SymMatrix::from_rows(&rows).unwrap();
        let mut entries: Vec<u32> = entries.into_iter().take(n).collect();
        // force even total degree
        let deg: u32 = entries.iter().sum();
        if deg % 2 == 1 { entries[0] += 1; }
        let idx = MultiIndex::new(entries);
        prop_assume!(idx.degree() <= 8);
        let a = hafnian_repeated(&b, &idx).unwrap();
        let d = hafnian_dense(&b.submatrix(&idx).unwrap()).unwrap();
        prop_assert!((a - d).abs() <= 1e-12 * d.abs().max(1e-12), "{a} vs {d}");
    }

    /// Jacobi reconstruction: Q diag(lambda) Q^T returns the input.
    #[test]
    fn eigen_reconstruction(n in 1usize..=8, seed_rows in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 8), 8)) {
        let rows: Vec<Vec<f64>> = seed_rows.into_iter().take(n).map(|r| r.into_iter().take(n).collect()).collect();
        let b = SymMatrix::from_rows(&rows).unwrap();
        let (vals, vecs) = sym_eigen(&b).unwrap();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += vecs[i][k] * vals[k] * vecs[j][k];
                }
                worst = worst.max((s - b.get(i, j)).abs());
            }
        }
        prop_assert!(worst <= 1e-10 * b.max_abs().max(1e-12), "residual {worst}");
    }

    /// Degree sums of the balanced family follow the designed weight, and
    /// an inserted odd-degree coefficient never shifts the exact mean.
    #[test]
    fn odd_coefficients_never_move_the_mean(
        a_odd in -5.0f64..5.0,
        k in 1u32..=4,
    ) {
        use gbsgauss::families::{make_example_coefficients, CoefficientStyle};
        use gbsgauss::problem::{GEProblem, Kind};

        let b = SymMatrix::from_rows(&[
            vec![0.30, 0.10, 0.05],
            vec![0.10, 0.28, 0.07],
            vec![0.05, 0.07, 0.33],
        ]).unwrap();
        let coeffs = make_example_coefficients(3, k, 0.5, 2.0, CoefficientStyle::Haf).unwrap();
        let before = GEProblem::new(coeffs.clone(), b.clone(), Kind::Haf).unwrap().mu_exact().unwrap();
        let mut tweaked = coeffs;
        tweaked.insert(MultiIndex::new(vec![1, 0, 0]), a_odd).unwrap();
        tweaked.insert(MultiIndex::new(vec![1, 1, 1]), a_odd).unwrap();
        let after = GEProblem::new(tweaked, b, Kind::Haf).unwrap().mu_exact().unwrap();
        prop_assert_eq!(before, after);
    }
}
