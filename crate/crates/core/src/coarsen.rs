//! Heavy edge coarsening and the aggregation hierarchy.
//!
//! One coarsening pass visits the vertices in a random order; an unassigned
//! vertex joins the aggregate of its heaviest neighbour, or opens a new
//! aggregate with that neighbour when it is unassigned too. Every aggregate
//! therefore holds at least two vertices, so a pass at least halves a
//! connected graph. The coarse Laplacian is the Galerkin product `R L Rᵀ`
//! with the 0/1 aggregate restriction `R`.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laplacian::SparseLaplacian;
use crate::seed::{mix_seed, rng};

pub const DEFAULT_COARSEST_SIZE: usize = 25;

const UNASSIGNED: usize = usize::MAX;

/// Vertex-to-aggregate assignment; encodes the restriction `R` with
/// `R[a][v] = 1` iff `assign[v] == a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregateMap {
    coarse_n: usize,
    assign: Vec<usize>,
}

impl AggregateMap {
    /// Validates that `assign` is a surjection onto `0..coarse_n`.
    pub fn new(coarse_n: usize, assign: Vec<usize>) -> Result<Self> {
        let mut hit = vec![false; coarse_n];
        for &a in &assign {
            if a >= coarse_n {
                return Err(Error::InvalidConfig(format!(
                    "aggregate id {a} out of range for {coarse_n} aggregates"
                )));
            }
            hit[a] = true;
        }
        if let Some(a) = hit.iter().position(|h| !h) {
            return Err(Error::InvalidConfig(format!("aggregate {a} is empty")));
        }
        Ok(Self { coarse_n, assign })
    }

    /// Every vertex its own aggregate.
    pub fn identity(n: usize) -> Self {
        Self {
            coarse_n: n,
            assign: (0..n).collect(),
        }
    }

    pub fn fine_n(&self) -> usize {
        self.assign.len()
    }

    pub fn coarse_n(&self) -> usize {
        self.coarse_n
    }

    pub fn assign(&self) -> &[usize] {
        &self.assign
    }

    pub fn aggregate_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.coarse_n];
        for &a in &self.assign {
            sizes[a] += 1;
        }
        sizes
    }

    /// Coarsening rate `coarse_n / fine_n`.
    pub fn rate(&self) -> f64 {
        self.coarse_n as f64 / self.fine_n() as f64
    }

    /// Fine vertices grouped by aggregate, each group in increasing order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.coarse_n];
        for (v, &a) in self.assign.iter().enumerate() {
            groups[a].push(v);
        }
        groups
    }

    /// `R x`: sums fine values per aggregate.
    pub fn restrict(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.fine_n() {
            return Err(Error::DimensionMismatch {
                expected: self.fine_n(),
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.coarse_n];
        for (v, &a) in self.assign.iter().enumerate() {
            y[a] += x[v];
        }
        Ok(y)
    }

    /// `Rᵀ y`: piecewise-constant injection of coarse values.
    pub fn prolongate(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.coarse_n {
            return Err(Error::DimensionMismatch {
                expected: self.coarse_n,
                got: y.len(),
            });
        }
        Ok(self.assign.iter().map(|&a| y[a]).collect())
    }
}

/// Heaviest neighbour of `v`; ties go to the lowest vertex index.
fn heaviest_neighbor(l: &SparseLaplacian, v: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (u, w) in l.neighbors(v) {
        match best {
            Some((_, bw)) if w <= bw => {}
            _ => best = Some((u, w)),
        }
    }
    best.map(|(u, _)| u)
}

/// One heavy edge coarsening pass with a seeded uniform visit order.
pub fn hec_coarsen(l: &SparseLaplacian, seed: u64) -> Result<AggregateMap> {
    let n = l.n();
    if n < 2 {
        return Err(Error::TooSmall(n));
    }
    if !l.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng(seed));
    Ok(hec_with_order(l, &order))
}

/// Heavy edge coarsening with an explicit visit order. `l` must have no
/// isolated vertices.
pub fn hec_with_order(l: &SparseLaplacian, order: &[usize]) -> AggregateMap {
    let n = l.n();
    let mut assign = vec![UNASSIGNED; n];
    let mut count = 0usize;
    for &v in order {
        if assign[v] != UNASSIGNED {
            continue;
        }
        let m = heaviest_neighbor(l, v).expect("isolated vertex in connected graph");
        if assign[m] == UNASSIGNED {
            assign[m] = count;
            assign[v] = count;
            count += 1;
        } else {
            assign[v] = assign[m];
        }
    }
    AggregateMap {
        coarse_n: count,
        assign,
    }
}

/// Galerkin coarse operator `R L Rᵀ`: entry `(a, b)` is the sum of `L[u][v]`
/// over `u ∈ a`, `v ∈ b`. Edges inside an aggregate fold into the diagonal.
pub fn galerkin_coarsen(l: &SparseLaplacian, map: &AggregateMap) -> Result<SparseLaplacian> {
    if map.fine_n() != l.n() {
        return Err(Error::DimensionMismatch {
            expected: l.n(),
            got: map.fine_n(),
        });
    }
    let nc = map.coarse_n();
    let assign = map.assign();
    let members = map.members();

    // accumulate only the strict upper triangle so the mirrored halves are
    // bit-identical; diagonal entries are recomputed as weighted degrees
    let mut up_offsets = Vec::with_capacity(nc + 1);
    up_offsets.push(0);
    let mut up_cols = Vec::new();
    let mut up_weights = Vec::new();
    let mut acc = vec![0.0f64; nc];
    let mut touched: Vec<usize> = Vec::new();
    let mut marked = vec![false; nc];
    for (a, group) in members.iter().enumerate() {
        for &u in group {
            for (v, w) in l.neighbors(u) {
                let b = assign[v];
                if b <= a {
                    continue;
                }
                if !marked[b] {
                    marked[b] = true;
                    touched.push(b);
                }
                acc[b] += w;
            }
        }
        touched.sort_unstable();
        for &b in &touched {
            up_cols.push(b);
            up_weights.push(acc[b]);
            acc[b] = 0.0;
            marked[b] = false;
        }
        touched.clear();
        up_offsets.push(up_cols.len());
    }
    Ok(SparseLaplacian::from_upper(
        nc, up_offsets, up_cols, up_weights,
    ))
}

/// Per-level summary of a hierarchy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelStats {
    pub level: usize,
    pub n: usize,
    pub nnz: usize,
    /// `n_{i+1} / n_i`; absent on the coarsest level.
    pub rate: Option<f64>,
}

/// Laplacians `L⁰ … L^J` (fine to coarse) and the maps between them.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    levels: Vec<SparseLaplacian>,
    maps: Vec<AggregateMap>,
}

impl Hierarchy {
    pub fn levels(&self) -> &[SparseLaplacian] {
        &self.levels
    }

    pub fn maps(&self) -> &[AggregateMap] {
        &self.maps
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn finest(&self) -> &SparseLaplacian {
        &self.levels[0]
    }

    pub fn coarsest(&self) -> &SparseLaplacian {
        self.levels
            .last()
            .expect("hierarchy has at least one level")
    }

    pub fn stats(&self) -> Vec<LevelStats> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, l)| LevelStats {
                level: i,
                n: l.n(),
                nnz: l.nnz(),
                rate: self.maps.get(i).map(AggregateMap::rate),
            })
            .collect()
    }
}

/// Coarsens while the current level has more than `coarsest_size` vertices.
/// Level `i` is coarsened with seed `mix_seed(seed, i)`.
pub fn build_hierarchy(l: &SparseLaplacian, coarsest_size: usize, seed: u64) -> Result<Hierarchy> {
    if l.n() == 0 {
        return Err(Error::Empty);
    }
    if !l.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut levels = vec![l.clone()];
    let mut maps = Vec::new();
    loop {
        let cur = levels.last().unwrap();
        if cur.n() <= coarsest_size || cur.n() < 2 {
            break;
        }
        let i = maps.len();
        let map = hec_coarsen(cur, mix_seed(seed, i as u64))?;
        if map.coarse_n() >= cur.n() {
            return Err(Error::Stalled {
                level: i,
                n: cur.n(),
            });
        }
        let coarse = galerkin_coarsen(cur, &map)?;
        maps.push(map);
        levels.push(coarse);
    }
    Ok(Hierarchy { levels, maps })
}
