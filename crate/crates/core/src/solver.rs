//! The multilevel cascadic eigensolver.
//!
//! Setup builds the heavy-edge hierarchy; the coarsest Laplacian is solved by
//! power iteration from a Gaussian start; then each finer level takes the
//! prolongated vector as its start and refines it with power iteration. The
//! mean projection required after prolongation happens inside the smoother.

use std::time::Instant;

use serde::Serialize;

use crate::coarsen::{build_hierarchy, Hierarchy, DEFAULT_COARSEST_SIZE};
use crate::error::{Error, Result};
use crate::laplacian::SparseLaplacian;
use crate::seed::mix_seed;
use crate::smoother::{coarsest_solve, power_iterate, SmootherConfig};
use crate::vector::{canonical_sign, dot, norm};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub coarsest_size: usize,
    pub smoother: SmootherConfig,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            coarsest_size: DEFAULT_COARSEST_SIZE,
            smoother: SmootherConfig::default(),
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.coarsest_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "coarsest size must be at least 2, got {}",
                self.coarsest_size
            )));
        }
        self.smoother.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub n: usize,
    pub nnz: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiedlerResult {
    /// Unit vector orthogonal to `1`, first nonzero entry positive.
    pub vector: Vec<f64>,
    /// Rayleigh quotient `yᵀLy`.
    pub lambda2: f64,
    /// `‖L y - λ y‖₂`.
    pub residual: f64,
    /// Fine to coarse; the last entry is the coarsest solve.
    pub per_level: Vec<LevelReport>,
    pub setup_time_s: f64,
    pub solve_time_s: f64,
    pub wall_time_s: f64,
    pub seed: u64,
}

impl FiedlerResult {
    /// Whether the finest-level smoother met its tolerance.
    pub fn converged(&self) -> bool {
        self.per_level.first().is_some_and(|l| l.converged)
    }
}

/// Rayleigh quotient and residual norm of `y` (normalized internally).
pub fn residual_norm(l: &SparseLaplacian, y: &[f64]) -> Result<(f64, f64)> {
    let nrm = norm(y);
    if nrm == 0.0 {
        return Err(Error::ZeroVector);
    }
    if !nrm.is_finite() {
        return Err(Error::NonFinite("residual"));
    }
    let u: Vec<f64> = y.iter().map(|v| v / nrm).collect();
    let lu = l.spmv(&u)?;
    let lambda = dot(&u, &lu);
    let residual = lu
        .iter()
        .zip(&u)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok((lambda, residual))
}

/// Solves on a prebuilt hierarchy. Levels with fewer than two vertices are
/// ignored; the deepest level with at least two is treated as coarsest.
pub fn solve_on_hierarchy(h: &Hierarchy, cfg: &SolverConfig) -> Result<FiedlerResult> {
    cfg.validate()?;
    let start = Instant::now();
    let depth = h
        .levels()
        .iter()
        .rposition(|l| l.n() >= 2)
        .ok_or(Error::TooSmall(h.finest().n()))?;
    let coarsest = &h.levels()[depth];
    let coarse = coarsest_solve(coarsest, &cfg.smoother, mix_seed(cfg.seed, depth as u64))?;
    let mut per_level = vec![LevelReport {
        level: depth,
        n: coarsest.n(),
        nnz: coarsest.nnz(),
        iterations: coarse.iterations,
        converged: coarse.converged,
    }];
    let mut y = coarse.vector;
    for j in (0..depth).rev() {
        let start_vec = h.maps()[j].prolongate(&y)?;
        let lj = &h.levels()[j];
        let r = power_iterate(lj, &start_vec, &cfg.smoother)?;
        per_level.push(LevelReport {
            level: j,
            n: lj.n(),
            nnz: lj.nnz(),
            iterations: r.iterations,
            converged: r.converged,
        });
        y = r.vector;
    }
    per_level.reverse();
    canonical_sign(&mut y);
    let (lambda2, residual) = residual_norm(h.finest(), &y)?;
    let solve_time_s = start.elapsed().as_secs_f64();
    Ok(FiedlerResult {
        vector: y,
        lambda2,
        residual,
        per_level,
        setup_time_s: 0.0,
        solve_time_s,
        wall_time_s: solve_time_s,
        seed: cfg.seed,
    })
}

/// Approximate Fiedler pair of a connected Laplacian.
pub fn solve_fiedler(l: &SparseLaplacian, cfg: &SolverConfig) -> Result<FiedlerResult> {
    cfg.validate()?;
    if l.n() < 2 {
        return Err(Error::TooSmall(l.n()));
    }
    let start = Instant::now();
    let h = build_hierarchy(l, cfg.coarsest_size, cfg.seed)?;
    let setup_time_s = start.elapsed().as_secs_f64();
    let mut result = solve_on_hierarchy(&h, cfg)?;
    result.setup_time_s = setup_time_s;
    result.wall_time_s = setup_time_s + result.solve_time_s;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bisection {
    /// Part label (0 or 1) per vertex.
    pub part: Vec<u8>,
    pub sizes: [usize; 2],
    /// Total weight of edges between the parts.
    pub cut: f64,
    #[serde(skip)]
    pub fiedler: FiedlerResult,
}

/// Splits the graph at the median of its Fiedler vector: the `⌈n/2⌉`
/// vertices with the largest entries (ties by index) form part 0.
pub fn spectral_bisect(l: &SparseLaplacian, cfg: &SolverConfig) -> Result<Bisection> {
    let fiedler = solve_fiedler(l, cfg)?;
    let n = l.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        fiedler.vector[b]
            .total_cmp(&fiedler.vector[a])
            .then(a.cmp(&b))
    });
    let mut part = vec![1u8; n];
    let upper = n.div_ceil(2);
    for &v in &order[..upper] {
        part[v] = 0;
    }
    let cut = l
        .edges()
        .filter(|(i, j, _)| part[*i] != part[*j])
        .map(|(_, _, w)| w)
        .sum();
    Ok(Bisection {
        part,
        sizes: [upper, n - upper],
        cut,
        fiedler,
    })
}
