use eqls_core::tensor::{is_unitary, kron, matmul, par_matmul};
use eqls_core::{ComplexMatrix, Tolerance, C64};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), rows * cols)
        .prop_map(move |v| ComplexMatrix::from_vec(rows, cols, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap())
}

fn close(a: &ComplexMatrix, b: &ComplexMatrix, eps: f64) -> bool {
    a.max_abs_diff(b).unwrap() < eps
}

proptest! {
    #[test]
    fn kron_is_associative(a in matrix(2, 3), b in matrix(3, 2), c in matrix(2, 2)) {
        prop_assert!(close(&kron(&kron(&a, &b), &c), &kron(&a, &kron(&b, &c)), 1e-9));
    }

    #[test]
    fn kron_mixed_product(a in matrix(2, 3), b in matrix(3, 2), c in matrix(3, 2), d in matrix(2, 3)) {
        let lhs = matmul(&kron(&a, &b), &kron(&c, &d)).unwrap();
        let rhs = kron(&matmul(&a, &c).unwrap(), &matmul(&b, &d).unwrap());
        prop_assert!(close(&lhs, &rhs, 1e-9));
    }

    #[test]
    fn parallel_product_matches_serial(a in matrix(9, 9), b in matrix(9, 9)) {
        prop_assert!(close(&par_matmul(&a, &b).unwrap(), &matmul(&a, &b).unwrap(), 1e-12));
    }

    #[test]
    fn fixture_round_trip(a in matrix(3, 3)) {
        let back = ComplexMatrix::from_fixture(&a.to_fixture()).unwrap();
        prop_assert!(close(&a, &back, 1e-12));
    }
}

#[test]
fn kron_dimensions_and_entries() {
    let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
    let b = ComplexMatrix::from_real(1, 3, &[1.0, 0.0, -1.0]).unwrap();
    let k = kron(&a, &b);
    assert_eq!((k.rows(), k.cols()), (2, 6));
    // (a ⊗ b)[i1*1 + i2][j1*3 + j2] = a[i1][j1] b[i2][j2]
    for i in 0..2 {
        for j in 0..6 {
            assert_eq!(k.get(i, j), a.get(i, j / 3) * b.get(0, j % 3));
        }
    }
}

#[test]
fn products_of_unitaries_stay_unitary() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = ComplexMatrix::from_real(2, 2, &[s, s, s, -s]).unwrap();
    let p = ComplexMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
    let u = kron(&matmul(&h, &p).unwrap(), &h);
    assert!(is_unitary(&u, Tolerance::default()).unwrap());
    let bad = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
    assert!(!is_unitary(&bad, Tolerance::default()).unwrap());
    assert!(matmul(&h, &ComplexMatrix::zeros(3, 3)).is_err());
}
