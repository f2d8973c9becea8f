mod common;

use fiedcmg::oracle::subspace_angle;
use fiedcmg::{jacobi_eigen, DenseMatrix};
use proptest::prelude::*;

fn check(a: &DenseMatrix) -> Result<(), TestCaseError> {
    let n = a.n();
    let eig = jacobi_eigen(a).unwrap();
    let scale = a.frobenius().max(f64::MIN_POSITIVE);
    prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    for (lam, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        let av = a.matvec(v);
        let r: f64 = av
            .iter()
            .zip(v)
            .map(|(x, y)| (x - lam * y).powi(2))
            .sum::<f64>()
            .sqrt();
        prop_assert!(r <= 1e-10 * a.inf_norm().max(f64::MIN_POSITIVE));
    }
    for i in 0..n {
        for j in 0..n {
            let d: f64 = eig.eigenvectors[i]
                .iter()
                .zip(&eig.eigenvectors[j])
                .map(|(x, y)| x * y)
                .sum();
            let want = if i == j { 1.0 } else { 0.0 };
            prop_assert!((d - want).abs() <= 1e-10);
        }
    }
    let mut err = 0.0;
    for i in 0..n {
        for j in 0..n {
            let rec: f64 = (0..n)
                .map(|k| eig.eigenvalues[k] * eig.eigenvectors[k][i] * eig.eigenvectors[k][j])
                .sum();
            err += (rec - a.get(i, j)).powi(2);
        }
    }
    prop_assert!(err.sqrt() <= 1e-9 * scale);
    Ok(())
}

proptest! {
    #[test]
    fn random_symmetric_matrices(n in 1usize..24, vals in prop::collection::vec(-10.0f64..10.0, 576)) {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                data[i * n + j] = vals[i * 24 + j];
                data[j * n + i] = vals[i * 24 + j];
            }
        }
        check(&DenseMatrix::from_row_major(n, data).unwrap())?;
    }
}

#[test]
fn laplacian_spectra() {
    for (name, l) in common::laplacians() {
        let a = DenseMatrix::from(&l);
        check(&a).unwrap_or_else(|e| panic!("{name}: {e}"));
        let eig = jacobi_eigen(&a).unwrap();
        let g = l.inf_norm();
        assert!(eig.eigenvalues[0].abs() <= 1e-10 * g, "{name}");
        let ones = vec![1.0; l.n()];
        let angle = subspace_angle(&ones, &eig.eigenvectors[..1]);
        assert!(angle <= 1e-6, "{name}: {angle}");
    }
}

#[test]
fn angle_to_own_span_is_zero() {
    let e = vec![0.0, 1.0, 0.0];
    assert_eq!(subspace_angle(&e, std::slice::from_ref(&e)), 0.0);
    let v = vec![0.6, 0.8, 0.0];
    assert!(subspace_angle(&v, std::slice::from_ref(&v)) <= 1e-15);
    assert!((subspace_angle(&[1.0, 1.0, 0.0], &[e]) - std::f64::consts::FRAC_PI_4).abs() <= 1e-15);
}
