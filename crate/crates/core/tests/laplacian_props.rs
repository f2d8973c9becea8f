mod common;

use fiedcmg::vector::{dot, norm, project_out_ones};
use fiedcmg::{build_laplacian, generators, EdgeList};
use proptest::prelude::*;

fn arb_graph(max_n: usize) -> impl Strategy<Value = EdgeList> {
    (2..=max_n, any::<u64>(), 0usize..60).prop_map(|(n, seed, extra)| {
        generators::random_connected(n, extra, Some((0.05, 10.0)), seed).unwrap()
    })
}

proptest! {
    #[test]
    fn annihilates_constants(g in arb_graph(120)) {
        let l = build_laplacian(&g);
        let y = l.spmv(&vec![1.0; l.n()]).unwrap();
        let d = l.max_diagonal();
        prop_assert!(y.iter().all(|v| v.abs() <= 1e-12 * d));
        prop_assert!(l.validate().is_ok());
    }

    #[test]
    fn spmv_matches_dense_product(g in arb_graph(64), xs in prop::collection::vec(-5.0f64..5.0, 64)) {
        let l = build_laplacian(&g);
        let n = l.n();
        let x = &xs[..n];
        let dense = l.to_dense();
        let y = l.spmv(x).unwrap();
        for i in 0..n {
            let want: f64 = (0..n).map(|j| dense[i * n + j] * x[j]).sum();
            prop_assert!((y[i] - want).abs() <= 1e-12 * (1.0 + want.abs()) * l.inf_norm());
        }
    }

    #[test]
    fn quadratic_form_is_nonnegative(g in arb_graph(80), xs in prop::collection::vec(-3.0f64..3.0, 80)) {
        let l = build_laplacian(&g);
        let x = &xs[..l.n()];
        let q = l.quadratic_form(x);
        prop_assert!(q >= 0.0);
        let via_spmv = dot(x, &l.spmv(x).unwrap());
        prop_assert!((q - via_spmv).abs() <= 1e-10 * (1.0 + q) * l.inf_norm());
    }

    #[test]
    fn projection_is_idempotent(xs in prop::collection::vec(-1e3f64..1e3, 1..100)) {
        let once = project_out_ones(&xs);
        let twice = project_out_ones(&once);
        let scale = norm(&xs).max(1.0);
        prop_assert!(once.iter().sum::<f64>().abs() <= 1e-10 * scale);
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
    }
}

#[test]
fn corpus_is_valid() {
    for (name, l) in common::laplacians() {
        assert!(l.validate().is_ok(), "{name}");
        assert!(l.is_connected(), "{name}");
        for (i, j, w) in l.edges() {
            assert_eq!(l.get(i, j).to_bits(), l.get(j, i).to_bits(), "{name}");
            assert_eq!(l.get(i, j), -w);
        }
    }
}

#[test]
fn parallel_spmv_is_bit_identical() {
    let l = build_laplacian(&generators::grid(150, 150).unwrap());
    let x: Vec<f64> = (0..l.n()).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
    let serial = l.spmv(&x).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let parallel = pool.install(|| l.spmv(&x).unwrap());
    assert!(serial
        .iter()
        .zip(&parallel)
        .all(|(a, b)| a.to_bits() == b.to_bits()));
}
