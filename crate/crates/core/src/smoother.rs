//! Gershgorin-shifted power iteration.
//!
//! With `g = ‖L‖∞` every eigenvalue of `B = gI - L` lies in `[0, g]`, and the
//! dominant eigenvector of `B` on `1^⊥` is the Fiedler vector of `L`. The
//! iteration starts from the mean-free part of the start vector and stops
//! once two consecutive unit iterates satisfy `uᵀv > 1 - tol`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laplacian::SparseLaplacian;
use crate::seed::gaussian_vector;
use crate::vector::{all_finite, dot, norm, normalize_in_place, project_out_ones_in_place};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmootherConfig {
    /// Converged when `uᵀv > 1 - tol`.
    pub tol: f64,
    pub max_iters: usize,
    /// Re-project onto `1^⊥` every this many iterations; 0 projects only at the start.
    pub reproject_every: usize,
}

impl Default for SmootherConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 1000,
            reproject_every: 0,
        }
    }
}

impl SmootherConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must lie in (0, 1), got {}",
                self.tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothResult {
    /// Unit vector orthogonal to the constant vector.
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub final_dot: f64,
}

/// Maximum absolute row sum of `L`, i.e. twice the largest weighted degree.
pub fn gershgorin_bound(l: &SparseLaplacian) -> f64 {
    l.inf_norm()
}

/// Step-by-step power iteration on `gI - L`, exposing every iterate.
#[derive(Debug, Clone)]
pub struct PowerIteration<'a> {
    l: &'a SparseLaplacian,
    g: f64,
    u: Vec<f64>,
    scratch: Vec<f64>,
    iterations: usize,
    annihilated: bool,
}

impl<'a> PowerIteration<'a> {
    /// Projects `y0` onto `1^⊥` and normalizes it.
    pub fn new(l: &'a SparseLaplacian, y0: &[f64]) -> Result<Self> {
        let n = l.n();
        if y0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: y0.len(),
            });
        }
        if !all_finite(y0) {
            return Err(Error::NonFinite("start vector"));
        }
        let y_norm = norm(y0);
        if y_norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let mut u = y0.to_vec();
        project_out_ones_in_place(&mut u);
        if norm(&u) <= 1e-14 * y_norm {
            return Err(Error::ParallelToOnes);
        }
        normalize_in_place(&mut u)?;
        Ok(Self {
            l,
            g: gershgorin_bound(l),
            u,
            scratch: vec![0.0; n],
            iterations: 0,
            annihilated: false,
        })
    }

    pub fn shift(&self) -> f64 {
        self.g
    }

    /// Current unit iterate.
    pub fn current(&self) -> &[f64] {
        &self.u
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// True when `B` mapped the iterate to zero, which happens only when it is
    /// an eigenvector of `L` with eigenvalue `g`.
    pub fn annihilated(&self) -> bool {
        self.annihilated
    }

    pub fn reproject(&mut self) -> Result<()> {
        project_out_ones_in_place(&mut self.u);
        normalize_in_place(&mut self.u).map(|_| ())
    }

    /// Applies `u ← B u / ‖B u‖` once and returns `uᵀv` with `v` the previous iterate.
    pub fn step(&mut self) -> Result<f64> {
        self.l.spmv_into(&self.u, &mut self.scratch)?;
        for (s, u) in self.scratch.iter_mut().zip(&self.u) {
            *s = self.g * u - *s;
        }
        self.iterations += 1;
        let bnorm = norm(&self.scratch);
        if !bnorm.is_finite() {
            return Err(Error::NonFinite("power iteration"));
        }
        if bnorm <= 1e-14 * self.g {
            self.annihilated = true;
            return Ok(1.0);
        }
        let inv = 1.0 / bnorm;
        for s in self.scratch.iter_mut() {
            *s *= inv;
        }
        let d = dot(&self.scratch, &self.u);
        std::mem::swap(&mut self.u, &mut self.scratch);
        Ok(d)
    }

    /// Final mean projection and normalization.
    pub fn into_vector(mut self) -> Result<Vec<f64>> {
        self.reproject()?;
        Ok(self.u)
    }
}

/// Runs power iteration on `gI - L` from `y0` until `uᵀv > 1 - tol` or
/// `max_iters` applications of `gI - L`.
pub fn power_iterate(
    l: &SparseLaplacian,
    y0: &[f64],
    cfg: &SmootherConfig,
) -> Result<SmoothResult> {
    cfg.validate()?;
    let mut it = PowerIteration::new(l, y0)?;
    let mut converged = false;
    let mut final_dot = 0.0;
    while it.iterations() < cfg.max_iters {
        final_dot = it.step()?;
        if it.annihilated() || final_dot > 1.0 - cfg.tol {
            converged = true;
            break;
        }
        if cfg.reproject_every > 0 && it.iterations() % cfg.reproject_every == 0 {
            it.reproject()?;
        }
    }
    let iterations = it.iterations();
    let vector = it.into_vector()?;
    Ok(SmoothResult {
        vector,
        iterations,
        converged,
        final_dot,
    })
}

/// Power iteration from a seeded standard-normal start vector.
pub fn coarsest_solve(
    l: &SparseLaplacian,
    cfg: &SmootherConfig,
    seed: u64,
) -> Result<SmoothResult> {
    if l.n() < 2 {
        return Err(Error::TooSmall(l.n()));
    }
    if !l.is_connected() {
        return Err(Error::Disconnected);
    }
    let y0 = gaussian_vector(l.n(), seed);
    power_iterate(l, &y0, cfg)
}
