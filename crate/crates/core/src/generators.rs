//! Small graph families for tests, examples and benchmarks.

use rand::Rng;

use crate::error::Result;
use crate::laplacian::EdgeList;
use crate::seed::rng;

pub fn path(n: usize) -> Result<EdgeList> {
    EdgeList::new(n, (1..n).map(|i| (i - 1, i, 1.0)))
}

pub fn cycle(n: usize) -> Result<EdgeList> {
    EdgeList::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0)))
}

/// Hub `0` joined to `leaves` leaves.
pub fn star(leaves: usize) -> Result<EdgeList> {
    EdgeList::new(leaves + 1, (1..=leaves).map(|i| (0, i, 1.0)))
}

pub fn complete(n: usize) -> Result<EdgeList> {
    EdgeList::new(
        n,
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j, 1.0))),
    )
}

/// `rows × cols` grid graph, vertex `(r, c)` at index `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> Result<EdgeList> {
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1, 1.0));
            }
            if r + 1 < rows {
                edges.push((v, v + cols, 1.0));
            }
        }
    }
    EdgeList::new(rows * cols, edges)
}

/// `nx × ny × nz` grid graph with 6-neighbour connectivity.
pub fn grid3(nx: usize, ny: usize, nz: usize) -> Result<EdgeList> {
    let idx = |x: usize, y: usize, z: usize| (z * ny + y) * nx + x;
    let mut edges = Vec::with_capacity(3 * nx * ny * nz);
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let v = idx(x, y, z);
                if x + 1 < nx {
                    edges.push((v, idx(x + 1, y, z), 1.0));
                }
                if y + 1 < ny {
                    edges.push((v, idx(x, y + 1, z), 1.0));
                }
                if z + 1 < nz {
                    edges.push((v, idx(x, y, z + 1), 1.0));
                }
            }
        }
    }
    EdgeList::new(nx * ny * nz, edges)
}

/// Connected random graph: a random spanning tree plus `extra_edges` uniform
/// random edges, weights uniform in `weight_range` (or all 1 when `None`).
pub fn random_connected(
    n: usize,
    extra_edges: usize,
    weight_range: Option<(f64, f64)>,
    seed: u64,
) -> Result<EdgeList> {
    let mut r = rng(seed);
    let weight = |r: &mut rand_chacha::ChaCha8Rng| match weight_range {
        Some((lo, hi)) => r.random_range(lo..hi),
        None => 1.0,
    };
    let mut edges = Vec::with_capacity(n + extra_edges);
    for v in 1..n {
        let u = r.random_range(0..v);
        let w = weight(&mut r);
        edges.push((u, v, w));
    }
    if n >= 2 {
        for _ in 0..extra_edges {
            let a = r.random_range(0..n);
            let b = r.random_range(0..n);
            if a != b {
                let w = weight(&mut r);
                edges.push((a, b, w));
            }
        }
    }
    EdgeList::new(n, edges)
}

/// Random geometric graph in the unit square joined with a nearest-neighbour
/// chain so it is always connected.
pub fn random_geometric(n: usize, radius: f64, seed: u64) -> Result<EdgeList> {
    let mut r = rng(seed);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (r.random(), r.random())).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt();
            if d < radius {
                edges.push((i, j, 1.0));
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pts[a].0.total_cmp(&pts[b].0));
    for w in order.windows(2) {
        edges.push((w[0], w[1], 1.0));
    }
    EdgeList::new(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_connected() {
        assert!(path(5).unwrap().is_connected());
        assert!(cycle(5).unwrap().is_connected());
        assert!(star(4).unwrap().is_connected());
        assert_eq!(complete(5).unwrap().num_edges(), 10);
        assert_eq!(grid(3, 4).unwrap().num_edges(), 17);
        assert_eq!(grid3(2, 2, 2).unwrap().num_edges(), 12);
        for seed in 0..20 {
            assert!(random_connected(50, 60, Some((0.5, 2.0)), seed)
                .unwrap()
                .is_connected());
            assert!(random_geometric(60, 0.2, seed).unwrap().is_connected());
        }
    }
}
