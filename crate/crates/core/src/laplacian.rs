//! Weighted undirected graphs and their Laplacians in compressed sparse row form.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Rows per rayon task when the matrix-vector product runs in parallel.
const PAR_CHUNK: usize = 4096;

/// An undirected weighted graph as a normalized edge list.
///
/// Edges are stored once with `i < j`, sorted, with parallel edges merged by
/// summing their weights. Self-loops never survive construction.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl EdgeList {
    /// Builds a normalized edge list. Self-loops are dropped with a warning,
    /// parallel edges are summed; zero, negative and non-finite weights are errors.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut loops = 0usize;
        let mut list = Vec::new();
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidEdge {
                    i,
                    j,
                    msg: format!("vertex id out of range for n = {n}"),
                });
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidEdge {
                    i,
                    j,
                    msg: format!("weight must be positive and finite, got {w}"),
                });
            }
            if i == j {
                loops += 1;
                continue;
            }
            list.push((i.min(j), i.max(j), w));
        }
        if loops > 0 {
            log::warn!("dropped {loops} self-loop(s)");
        }
        // stable: duplicates are summed in input order
        list.sort_by_key(|a| (a.0, a.1));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(list.len());
        for (i, j, w) in list {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += w,
                _ => merged.push((i, j, w)),
            }
        }
        Ok(Self { n, edges: merged })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// True iff the graph has exactly one connected component.
    pub fn is_connected(&self) -> bool {
        let mut dsu = DisjointSets::new(self.n);
        let mut components = self.n;
        for &(i, j, _) in &self.edges {
            if dsu.union(i, j) {
                components -= 1;
            }
        }
        components == 1
    }

    /// Multiplies every weight by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.n, self.edges.iter().map(|&(i, j, w)| (i, j, w * s)))
    }
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Graph Laplacian `L = D - W` stored as a symmetric CSR matrix.
///
/// Every row holds its diagonal entry (possibly zero) and columns are sorted.
/// Off-diagonal `(i, j)` and `(j, i)` are bit-identical by construction, and
/// the diagonal is the sum of the row's edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseLaplacian {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseLaplacian {
    /// Laplacian of a normalized edge list.
    pub fn from_edge_list(g: &EdgeList) -> Self {
        let n = g.n;
        let mut offsets = vec![0usize; n + 1];
        for &(i, _, _) in &g.edges {
            offsets[i + 1] += 1;
        }
        for r in 0..n {
            offsets[r + 1] += offsets[r];
        }
        let cols = g.edges.iter().map(|e| e.1).collect();
        let weights = g.edges.iter().map(|e| e.2).collect();
        Self::from_upper(n, offsets, cols, weights)
    }

    /// Assembles the full symmetric Laplacian from the strictly upper
    /// triangle given as CSR of positive edge weights (columns sorted, `col > row`).
    pub(crate) fn from_upper(
        n: usize,
        up_offsets: Vec<usize>,
        up_cols: Vec<usize>,
        up_weights: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(up_offsets.len(), n + 1);
        let mut counts = vec![1usize; n];
        for r in 0..n {
            counts[r] += up_offsets[r + 1] - up_offsets[r];
        }
        for &c in &up_cols {
            counts[c] += 1;
        }
        let mut row_offsets = vec![0usize; n + 1];
        for r in 0..n {
            row_offsets[r + 1] = row_offsets[r] + counts[r];
        }
        let nnz = row_offsets[n];
        let mut col_indices = vec![0usize; nnz];
        let mut values = vec![0.0f64; nnz];
        let mut fill = row_offsets[..n].to_vec();

        for r in 0..n {
            // lower part of row r was filled by earlier rows (ascending), now the
            // diagonal slot and the upper part
            let diag_pos = fill[r];
            fill[r] += 1;
            col_indices[diag_pos] = r;
            for k in up_offsets[r]..up_offsets[r + 1] {
                let c = up_cols[k];
                let w = up_weights[k];
                let p = fill[r];
                col_indices[p] = c;
                values[p] = -w;
                fill[r] += 1;
                let q = fill[c];
                col_indices[q] = r;
                values[q] = -w;
                fill[c] += 1;
            }
        }
        for r in 0..n {
            let (lo, hi) = (row_offsets[r], row_offsets[r + 1]);
            let mut degree = 0.0;
            let mut diag_pos = lo;
            for p in lo..hi {
                if col_indices[p] == r {
                    diag_pos = p;
                } else {
                    degree -= values[p];
                }
            }
            values[diag_pos] = degree;
        }
        Self {
            n,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored entries, diagonal included.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        (self.nnz() - self.n) / 2
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`, diagonal included.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    /// Off-diagonal neighbours of `i` with their positive edge weights.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (cols, vals) = self.row(i);
        cols.iter()
            .zip(vals)
            .filter(move |(c, _)| **c != i)
            .map(|(c, v)| (*c, -*v))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    /// Maximum absolute row sum `‖L‖∞`.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_diagonal(&self) -> f64 {
        self.diagonal().into_iter().fold(0.0, f64::max)
    }

    /// Undirected edges `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .filter(move |(j, _)| *j > i)
                .map(move |(j, w)| (i, j, w))
        })
    }

    pub fn to_edge_list(&self) -> EdgeList {
        EdgeList {
            n: self.n,
            edges: self.edges().collect(),
        }
    }

    /// `y = L x`.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    /// `y = L x` into a caller-provided buffer. Each row is reduced in
    /// column order, so results do not depend on the thread count.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if y.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: y.len(),
            });
        }
        let row = |i: usize| -> f64 {
            let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let mut acc = 0.0;
            for p in lo..hi {
                acc += self.values[p] * x[self.col_indices[p]];
            }
            acc
        };
        if rayon::current_num_threads() > 1 && self.n >= 2 * PAR_CHUNK {
            y.par_chunks_mut(PAR_CHUNK)
                .enumerate()
                .for_each(|(c, chunk)| {
                    let base = c * PAR_CHUNK;
                    for (k, out) in chunk.iter_mut().enumerate() {
                        *out = row(base + k);
                    }
                });
        } else {
            for (i, out) in y.iter_mut().enumerate() {
                *out = row(i);
            }
        }
        Ok(())
    }

    /// `xᵀ L x` evaluated as `Σ_{edges} w (x_i - x_j)²`, free of cancellation.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for (j, w) in self.neighbors(i) {
                if j > i {
                    let d = x[i] - x[j];
                    acc += w * d * d;
                }
            }
        }
        acc
    }

    /// Breadth-first check that the graph of the off-diagonal pattern is connected.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for (u, _) in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                a[i * n + c] = *v;
            }
        }
        a
    }

    /// Checks every structural Laplacian invariant.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidLaplacian(msg));
        if self.row_offsets.len() != self.n + 1 || self.row_offsets[self.n] != self.values.len() {
            return bad("inconsistent row offsets".into());
        }
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("row {i} columns not strictly increasing"));
            }
            let mut diag = None;
            let mut off = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                if !v.is_finite() {
                    return bad(format!("non-finite entry in row {i}"));
                }
                if c >= self.n {
                    return bad(format!("column {c} out of range in row {i}"));
                }
                if c == i {
                    diag = Some(v);
                    continue;
                }
                if v >= 0.0 {
                    return bad(format!("off-diagonal ({i}, {c}) = {v} is not negative"));
                }
                if self.get(c, i) != v {
                    return Err(Error::Asymmetric { i, j: c });
                }
                off += v;
            }
            let Some(d) = diag else {
                return bad(format!("row {i} has no diagonal entry"));
            };
            if d < 0.0 {
                return bad(format!("negative diagonal {d} in row {i}"));
            }
            if (d + off).abs() > 1e-12 * d {
                return bad(format!("row {i} sums to {}", d + off));
            }
        }
        Ok(())
    }
}

/// Laplacian of an edge list.
pub fn build_laplacian(g: &EdgeList) -> SparseLaplacian {
    SparseLaplacian::from_edge_list(g)
}
