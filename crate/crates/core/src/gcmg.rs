//! Geometric cascadic multigrid for the Neumann Laplacian eigenproblem on
//! nested square grids.
//!
//! Level `j` is the `N_j × N_j` grid graph (5-point stencil, natural boundary)
//! with `N_{j+1} = (N_j - 1)/2 + 1`. The coarsest level is solved to machine
//! precision; every finer level receives the bilinear interpolant of the
//! coarser vector and applies `k_j = max(1, round(β^j k₀))` Richardson steps
//! `u ← (I - ω_j A_j) u` with `ω_j = 1/‖A_j‖∞`. Grid eigenvalues are known in
//! closed form, `λ₂(N) = 2 - 2cos(π/N)`, which makes per-level errors exact.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laplacian::{build_laplacian, EdgeList, SparseLaplacian};
use crate::oracle::fiedler_oracle;
use crate::seed::gaussian_vector;
use crate::smoother::{power_iterate, SmootherConfig};
use crate::vector::{dot, normalize_in_place, project_out_ones_in_place};

/// Coarsest problems up to this many unknowns use the dense oracle.
pub const DENSE_COARSEST_LIMIT: usize = 1024;

/// Default stopping size for automatic level selection.
pub const DEFAULT_COARSEST_SIDE: usize = 33;

/// Sweeps between renormalizations inside long Richardson runs.
const RESCALE_EVERY: usize = 64;

/// Laplacian of the `n_side × n_side` grid graph with unit weights;
/// vertex `(r, c)` has index `r * n_side + c`.
pub fn grid_laplacian(n_side: usize) -> Result<SparseLaplacian> {
    if n_side < 2 {
        return Err(Error::InvalidConfig(format!(
            "grid needs at least 2 points per side, got {n_side}"
        )));
    }
    let mut edges = Vec::with_capacity(2 * n_side * (n_side - 1));
    for r in 0..n_side {
        for c in 0..n_side {
            let v = r * n_side + c;
            if c + 1 < n_side {
                edges.push((v, v + 1, 1.0));
            }
            if r + 1 < n_side {
                edges.push((v, v + n_side, 1.0));
            }
        }
    }
    Ok(build_laplacian(&EdgeList::new(n_side * n_side, edges)?))
}

/// `λ_{p,q} = (2 - 2cos(πp/N)) + (2 - 2cos(πq/N))`, evaluated as
/// `4 sin²(πp/2N) + 4 sin²(πq/2N)` to avoid cancellation.
pub fn grid_eigenvalue(n_side: usize, p: usize, q: usize) -> f64 {
    let s = |k: usize| {
        let x = (std::f64::consts::PI * k as f64 / (2.0 * n_side as f64)).sin();
        4.0 * x * x
    };
    s(p) + s(q)
}

/// Second-smallest eigenvalue of the grid Laplacian (multiplicity two).
pub fn grid_lambda2(n_side: usize) -> f64 {
    grid_eigenvalue(n_side, 1, 0)
}

/// Side length of the next finer grid.
pub fn refine_side(n_coarse: usize) -> usize {
    2 * (n_coarse - 1) + 1
}

/// Bilinear interpolation from an `N_c × N_c` grid to the `(2N_c - 1)²` grid:
/// coincident points copy, edge midpoints average two, cell centres average four.
pub fn bilinear_prolongate(coarse: &[f64], n_coarse: usize) -> Result<Vec<f64>> {
    if n_coarse < 2 || coarse.len() != n_coarse * n_coarse {
        return Err(Error::InvalidNesting(format!(
            "vector of length {} is not a {n_coarse} x {n_coarse} grid",
            coarse.len()
        )));
    }
    let nf = refine_side(n_coarse);
    let mut fine = vec![0.0; nf * nf];
    let at = |r: usize, c: usize| coarse[r * n_coarse + c];
    for r in 0..nf {
        for c in 0..nf {
            let (rc, cc) = (r / 2, c / 2);
            fine[r * nf + c] = match (r % 2, c % 2) {
                (0, 0) => at(rc, cc),
                (0, 1) => 0.5 * (at(rc, cc) + at(rc, cc + 1)),
                (1, 0) => 0.5 * (at(rc, cc) + at(rc + 1, cc)),
                _ => 0.25 * (at(rc, cc) + at(rc, cc + 1) + at(rc + 1, cc) + at(rc + 1, cc + 1)),
            };
        }
    }
    Ok(fine)
}

#[derive(Debug, Clone)]
pub struct GridLevel {
    pub n_side: usize,
    pub operator: SparseLaplacian,
    /// `1 / ‖A‖∞`.
    pub omega: f64,
    pub k_steps: usize,
}

impl GridLevel {
    pub fn new(n_side: usize, k_steps: usize) -> Result<Self> {
        let operator = grid_laplacian(n_side)?;
        let omega = 1.0 / operator.inf_norm();
        Ok(Self {
            n_side,
            operator,
            omega,
            k_steps,
        })
    }

    pub fn n(&self) -> usize {
        self.n_side * self.n_side
    }
}

fn check_len(level: &GridLevel, u: &[f64]) -> Result<()> {
    if u.len() != level.n() {
        return Err(Error::DimensionMismatch {
            expected: level.n(),
            got: u.len(),
        });
    }
    Ok(())
}

/// Exactly `k` raw sweeps `u ← u - ω A u`, no projection or scaling.
pub fn richardson_apply(level: &GridLevel, u: &[f64], k: usize) -> Result<Vec<f64>> {
    check_len(level, u)?;
    let mut x = u.to_vec();
    let mut ax = vec![0.0; x.len()];
    for _ in 0..k {
        level.operator.spmv_into(&x, &mut ax)?;
        for (xi, ai) in x.iter_mut().zip(&ax) {
            *xi -= level.omega * ai;
        }
    }
    Ok(x)
}

/// `k` Richardson sweeps followed by mean projection and normalization.
///
/// Long runs are periodically re-projected and rescaled; both operations
/// commute with `I - ωA` (which leaves `1^⊥` invariant), so the direction
/// matches the raw sweeps while rounding drift along `1` and underflow are
/// kept out.
pub fn richardson_smooth(level: &GridLevel, u: &[f64], k: usize) -> Result<Vec<f64>> {
    check_len(level, u)?;
    let mut x = u.to_vec();
    project_out_ones_in_place(&mut x);
    normalize_in_place(&mut x).map_err(|e| match e {
        Error::ZeroVector => Error::ParallelToOnes,
        other => other,
    })?;
    let mut ax = vec![0.0; x.len()];
    for step in 1..=k {
        level.operator.spmv_into(&x, &mut ax)?;
        for (xi, ai) in x.iter_mut().zip(&ax) {
            *xi -= level.omega * ai;
        }
        if step % RESCALE_EVERY == 0 {
            project_out_ones_in_place(&mut x);
            normalize_in_place(&mut x)?;
        }
    }
    project_out_ones_in_place(&mut x);
    normalize_in_place(&mut x)?;
    Ok(x)
}

/// Rayleigh quotient `uᵀAu / uᵀu`.
pub fn rayleigh_quotient(a: &SparseLaplacian, u: &[f64]) -> f64 {
    a.quadratic_form(u) / dot(u, u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GcmgConfig {
    /// `N₀`; must equal `m · 2^J + 1`.
    pub n_side_finest: usize,
    /// Total number of levels `J + 1`; `None` coarsens until `N_j ≤ coarsest_side`.
    pub levels: Option<usize>,
    pub beta: f64,
    pub k0: usize,
    pub coarsest_side: usize,
    pub seed: u64,
}

impl Default for GcmgConfig {
    fn default() -> Self {
        Self {
            n_side_finest: 1025,
            levels: None,
            beta: 4.0,
            k0: 1,
            coarsest_side: DEFAULT_COARSEST_SIDE,
            seed: 0,
        }
    }
}

impl GcmgConfig {
    /// Grid sides `N_0 > N_1 > … > N_J`.
    pub fn sides(&self) -> Result<Vec<usize>> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        if self.k0 == 0 {
            return Err(Error::InvalidConfig("k0 must be at least 1".into()));
        }
        let n0 = self.n_side_finest;
        if n0 < 2 {
            return Err(Error::InvalidNesting(format!(
                "finest side {n0} is below 2"
            )));
        }
        let mut sides = vec![n0];
        match self.levels {
            Some(0) => {
                return Err(Error::InvalidConfig(
                    "at least one level is required".into(),
                ))
            }
            Some(l) => {
                for _ in 1..l {
                    let cur = *sides.last().unwrap();
                    if cur < 3 || (cur - 1) % 2 != 0 {
                        return Err(Error::InvalidNesting(format!(
                            "side {cur} cannot be halved ({n0} is not m·2^{} + 1)",
                            l - 1
                        )));
                    }
                    sides.push((cur - 1) / 2 + 1);
                }
            }
            None => loop {
                let cur = *sides.last().unwrap();
                if cur <= self.coarsest_side.max(2) || (cur - 1) % 2 != 0 {
                    break;
                }
                sides.push((cur - 1) / 2 + 1);
            },
        }
        Ok(sides)
    }

    /// `k_j = max(1, round(β^j k₀))`.
    pub fn steps(&self, level: usize) -> usize {
        let k = (self.beta.powi(level as i32) * self.k0 as f64).round();
        if k >= usize::MAX as f64 {
            usize::MAX
        } else {
            (k as usize).max(1)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GcmgLevelRow {
    pub level: usize,
    pub n_side: usize,
    pub k: usize,
    pub lambda_exact: f64,
    /// Rayleigh quotient right after interpolation.
    pub rq_pre: f64,
    /// Rayleigh quotient after `k` smoothing steps.
    pub rq_post: f64,
    pub err_pre: f64,
    pub err_post: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoarsestRow {
    pub level: usize,
    pub n_side: usize,
    pub lambda_exact: f64,
    pub rq: f64,
    pub err: f64,
    pub dense: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GcmgReport {
    /// Smoothed levels, finest (`i = 0`) first.
    pub rows: Vec<GcmgLevelRow>,
    pub coarsest: CoarsestRow,
    /// `Σ_{j<J} k_j n_j` with `n_j = N_j²`.
    pub total_work: u128,
    pub beta: f64,
    pub k0: usize,
    #[serde(skip)]
    pub vector: Vec<f64>,
}

impl GcmgReport {
    pub fn final_error(&self) -> f64 {
        self.rows.first().map_or(self.coarsest.err, |r| r.err_post)
    }

    pub fn finest_side(&self) -> usize {
        self.rows.first().map_or(self.coarsest.n_side, |r| r.n_side)
    }
}

fn solve_coarsest(level: &GridLevel, seed: u64) -> Result<(Vec<f64>, bool)> {
    if level.n() <= DENSE_COARSEST_LIMIT {
        let oracle = fiedler_oracle(&level.operator)?;
        return Ok((oracle.basis[0].clone(), true));
    }
    let cfg = SmootherConfig {
        tol: 1e-14,
        max_iters: 2_000_000,
        reproject_every: 100,
    };
    let r = power_iterate(&level.operator, &gaussian_vector(level.n(), seed), &cfg)?;
    Ok((r.vector, false))
}

/// Runs the cascade and records per-level eigenvalue errors.
pub fn gcmg_solve(cfg: &GcmgConfig) -> Result<GcmgReport> {
    let sides = cfg.sides()?;
    let j_max = sides.len() - 1;
    let coarse_level = GridLevel::new(sides[j_max], 0)?;
    let (mut u, dense) = solve_coarsest(&coarse_level, cfg.seed)?;
    let rq = rayleigh_quotient(&coarse_level.operator, &u);
    let lam = grid_lambda2(sides[j_max]);
    let coarsest = CoarsestRow {
        level: j_max,
        n_side: sides[j_max],
        lambda_exact: lam,
        rq,
        err: (rq - lam).abs(),
        dense,
    };

    let mut rows = Vec::with_capacity(j_max);
    let mut total_work: u128 = 0;
    for j in (0..j_max).rev() {
        let level = GridLevel::new(sides[j], cfg.steps(j))?;
        let mut start = bilinear_prolongate(&u, sides[j + 1])?;
        project_out_ones_in_place(&mut start);
        normalize_in_place(&mut start)?;
        let rq_pre = rayleigh_quotient(&level.operator, &start);
        u = richardson_smooth(&level, &start, level.k_steps)?;
        let rq_post = rayleigh_quotient(&level.operator, &u);
        let lambda_exact = grid_lambda2(sides[j]);
        total_work += level.k_steps as u128 * level.n() as u128;
        rows.push(GcmgLevelRow {
            level: j,
            n_side: sides[j],
            k: level.k_steps,
            lambda_exact,
            rq_pre,
            rq_post,
            err_pre: (rq_pre - lambda_exact).abs(),
            err_post: (rq_post - lambda_exact).abs(),
        });
    }
    rows.reverse();
    Ok(GcmgReport {
        rows,
        coarsest,
        total_work,
        beta: cfg.beta,
        k0: cfg.k0,
        vector: u,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePoint {
    pub n_side: usize,
    /// `1 / (N₀ - 1)`.
    pub h0: f64,
    pub levels: usize,
    pub error: f64,
    pub work: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub points: Vec<RatePoint>,
    /// Least-squares slope `p` of `log error` against `log h₀`.
    pub order: f64,
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Runs the cascade for each finest size, all sharing the coarsest grid
/// `coarsest_side`, and fits the observed order of the final eigenvalue error
/// in `h₀`.
pub fn rate_experiment(
    n_sides: &[usize],
    beta: f64,
    k0: usize,
    coarsest_side: usize,
    seed: u64,
) -> Result<RateReport> {
    if n_sides.len() < 3 {
        return Err(Error::InvalidConfig(format!(
            "a rate fit needs at least 3 sizes, got {}",
            n_sides.len()
        )));
    }
    let mut points = Vec::with_capacity(n_sides.len());
    for &n in n_sides {
        let mut levels = 1;
        let mut cur = n;
        while cur > coarsest_side {
            if cur < 3 || (cur - 1) % 2 != 0 {
                break;
            }
            cur = (cur - 1) / 2 + 1;
            levels += 1;
        }
        if cur != coarsest_side {
            return Err(Error::InvalidNesting(format!(
                "side {n} does not coarsen to the common coarsest side {coarsest_side}"
            )));
        }
        let cfg = GcmgConfig {
            n_side_finest: n,
            levels: Some(levels),
            beta,
            k0,
            coarsest_side,
            seed,
        };
        let report = gcmg_solve(&cfg)?;
        points.push(RatePoint {
            n_side: n,
            h0: 1.0 / (n - 1) as f64,
            levels,
            error: report.final_error(),
            work: report.total_work,
        });
    }
    if let Some(p) = points.iter().find(|p| !(p.error > 0.0)) {
        return Err(Error::InvalidConfig(format!(
            "error vanished at N = {}; cannot fit an order",
            p.n_side
        )));
    }
    let x: Vec<f64> = points.iter().map(|p| p.h0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.error.ln()).collect();
    let order = fit_slope(&x, &y);
    Ok(RateReport { points, order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fiedler_oracle;
    use crate::vector::line_angle;

    #[test]
    fn grid_closed_forms() {
        assert!((grid_lambda2(2) - 2.0).abs() < 1e-15);
        assert!((grid_lambda2(3) - 1.0).abs() < 1e-15);
        assert!((grid_lambda2(1025) - 9.394_024_199_700_7e-6).abs() < 1e-16);
        let o = fiedler_oracle(&grid_laplacian(3).unwrap()).unwrap();
        assert!((o.lambda2 - 1.0).abs() < 1e-12);
        assert_eq!(o.basis.len(), 2);
        // the 2x2 grid is the 4-cycle
        let c4 = grid_laplacian(2).unwrap();
        assert_eq!(c4.num_edges(), 4);
        assert!(grid_laplacian(1).is_err());
    }

    #[test]
    fn prolongation_examples() {
        assert_eq!(bilinear_prolongate(&[2.5; 9], 3).unwrap(), vec![2.5; 25]);

        let nc = 3;
        let coarse: Vec<f64> = (0..nc * nc)
            .map(|v| ((v / nc) as f64) * ((v % nc) as f64))
            .collect();
        let fine = bilinear_prolongate(&coarse, nc).unwrap();
        let nf = 5;
        for r in 0..nf {
            for c in 0..nf {
                let want = (r as f64 / 2.0) * (c as f64 / 2.0);
                assert_eq!(fine[r * nf + c], want);
            }
        }

        let mut hat = vec![0.0; 9];
        hat[4] = 1.0;
        let fine = bilinear_prolongate(&hat, 3).unwrap();
        assert_eq!(fine[2 * 5 + 2], 1.0);
        for v in [7, 11, 13, 17] {
            assert_eq!(fine[v], 0.5);
        }
        for v in [6, 8, 16, 18] {
            assert_eq!(fine[v], 0.25);
        }
        assert_eq!(fine.iter().sum::<f64>(), 1.0 + 4.0 * 0.5 + 4.0 * 0.25);
        assert!(bilinear_prolongate(&[1.0; 8], 3).is_err());
    }

    #[test]
    fn richardson_on_eigenvector() {
        let level = GridLevel::new(5, 3).unwrap();
        // (p, q) = (1, 0) mode: cos(π(c + 1/2)/N) along columns
        let n = 5;
        let phi: Vec<f64> = (0..n * n)
            .map(|v| (std::f64::consts::PI * ((v % n) as f64 + 0.5) / n as f64).cos())
            .collect();
        let lam = grid_lambda2(n);
        let out = richardson_apply(&level, &phi, 3).unwrap();
        let factor = (1.0 - level.omega * lam).powi(3);
        for (o, p) in out.iter().zip(&phi) {
            assert!((o - factor * p).abs() < 1e-14);
        }
        let smooth = richardson_smooth(&level, &phi, 3).unwrap();
        assert!(line_angle(&smooth, &phi) < 1e-7);
        let same = richardson_smooth(&level, &phi, 0).unwrap();
        assert!(line_angle(&same, &phi) < 1e-12);
        assert!(matches!(
            richardson_smooth(&level, &[1.0; 25], 1),
            Err(Error::ParallelToOnes)
        ));
        assert!(richardson_smooth(&level, &[1.0; 24], 1).is_err());
    }

    #[test]
    fn omega_normalizes_inf_norm() {
        for n in [2, 3, 9, 33] {
            let l = GridLevel::new(n, 1).unwrap();
            assert_eq!(l.omega * l.operator.inf_norm(), 1.0);
        }
    }

    #[test]
    fn level_selection() {
        let cfg = GcmgConfig::default();
        assert_eq!(cfg.sides().unwrap(), vec![1025, 513, 257, 129, 65, 33]);
        let cfg = GcmgConfig {
            n_side_finest: 129,
            levels: Some(3),
            ..GcmgConfig::default()
        };
        assert_eq!(cfg.sides().unwrap(), vec![129, 65, 33]);
        let bad = GcmgConfig {
            n_side_finest: 100,
            levels: Some(3),
            ..GcmgConfig::default()
        };
        assert!(matches!(bad.sides(), Err(Error::InvalidNesting(_))));
        let cfg = GcmgConfig {
            beta: 2.5,
            k0: 1,
            ..GcmgConfig::default()
        };
        assert_eq!(cfg.steps(0), 1);
        assert_eq!(cfg.steps(1), 3);
        assert_eq!(cfg.steps(2), 6);
    }

    #[test]
    fn tiny_grid_converges() {
        let cfg = GcmgConfig {
            n_side_finest: 5,
            levels: Some(2),
            beta: 4.0,
            k0: 200,
            coarsest_side: 3,
            seed: 1,
        };
        let r = gcmg_solve(&cfg).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!(r.final_error() <= 1e-10, "error {}", r.final_error());
        assert_eq!(r.total_work, 200 * 25);
    }

    #[test]
    fn rate_experiment_needs_three_nesting_sizes() {
        assert!(rate_experiment(&[9, 17], 8.0, 4, 5, 0).is_err());
        assert!(rate_experiment(&[9, 17, 30], 8.0, 4, 5, 0).is_err());
    }

    #[test]
    fn slope_of_exact_power_law() {
        let x: Vec<f64> = [0.1f64, 0.05, 0.025].iter().map(|v| v.ln()).collect();
        let y: Vec<f64> = [0.1f64, 0.05, 0.025]
            .iter()
            .map(|v| (3.0 * v * v).ln())
            .collect();
        assert!((fit_slope(&x, &y) - 2.0).abs() < 1e-12);
    }
}
