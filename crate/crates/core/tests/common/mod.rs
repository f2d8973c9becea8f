#![allow(dead_code)]

use fiedcmg::{build_laplacian, generators, EdgeList, SparseLaplacian};

/// Small connected test graphs: named families plus seeded random ones.
pub fn corpus() -> Vec<(String, EdgeList)> {
    let mut out = vec![
        ("k2".to_string(), generators::complete(2).unwrap()),
        ("p3".to_string(), generators::path(3).unwrap()),
        ("p17".to_string(), generators::path(17).unwrap()),
        ("c12".to_string(), generators::cycle(12).unwrap()),
        ("star9".to_string(), generators::star(9).unwrap()),
        ("k6".to_string(), generators::complete(6).unwrap()),
        ("grid5x7".to_string(), generators::grid(5, 7).unwrap()),
        ("grid3d".to_string(), generators::grid3(3, 3, 4).unwrap()),
        (
            "geo40".to_string(),
            generators::random_geometric(40, 0.25, 3).unwrap(),
        ),
    ];
    for s in 0..11u64 {
        let n = 8 + (s as usize * 5) % 50;
        let w = if s % 2 == 0 { Some((0.1, 3.0)) } else { None };
        out.push((
            format!("rand{s}"),
            generators::random_connected(n, n / 2 + s as usize, w, 100 + s).unwrap(),
        ));
    }
    out
}

pub fn laplacians() -> Vec<(String, SparseLaplacian)> {
    corpus()
        .into_iter()
        .map(|(name, g)| (name, build_laplacian(&g)))
        .collect()
}

/// Dense `R L Rᵀ` computed entry by entry from the fine dense matrix.
pub fn dense_galerkin(l: &SparseLaplacian, assign: &[usize], coarse_n: usize) -> Vec<f64> {
    let n = l.n();
    let dense = l.to_dense();
    let mut out = vec![0.0; coarse_n * coarse_n];
    for i in 0..n {
        for j in 0..n {
            out[assign[i] * coarse_n + assign[j]] += dense[i * n + j];
        }
    }
    out
}
