//! Fiedler vectors of graph Laplacians by cascadic multigrid.
//!
//! The algebraic path coarsens a graph with heavy edge coarsening, solves the
//! coarsest Laplacian by Gershgorin-shifted power iteration and refines the
//! result level by level back to the input graph ([`solve_fiedler`]). The
//! geometric path ([`gcmg`]) runs the same cascade on nested square grids,
//! where closed-form eigenvalues make the per-level error measurable.
//!
//! ```
//! use fiedcmg::{build_laplacian, generators, solve_fiedler, SolverConfig};
//!
//! let g = generators::path(4).unwrap();
//! let l = build_laplacian(&g);
//! let r = solve_fiedler(&l, &SolverConfig::default()).unwrap();
//! assert!((r.lambda2 - (2.0 - 2.0f64.sqrt())).abs() < 1e-6);
//! ```

pub mod coarsen;
pub mod error;
pub mod gcmg;
pub mod generators;
pub mod io;
pub mod laplacian;
pub mod oracle;
pub mod seed;
pub mod smoother;
pub mod solver;
pub mod vector;

pub use coarsen::{
    build_hierarchy, galerkin_coarsen, hec_coarsen, AggregateMap, Hierarchy, LevelStats,
    DEFAULT_COARSEST_SIZE,
};
pub use error::{Error, Result};
pub use gcmg::{gcmg_solve, rate_experiment, GcmgConfig, GcmgReport, RateReport};
pub use io::{load_graph, GraphFormat};
pub use laplacian::{build_laplacian, EdgeList, SparseLaplacian};
pub use oracle::{fiedler_oracle, jacobi_eigen, DenseMatrix, EigenDecomposition, FiedlerOracle};
pub use smoother::{
    coarsest_solve, gershgorin_bound, power_iterate, PowerIteration, SmoothResult, SmootherConfig,
};
pub use solver::{
    residual_norm, solve_fiedler, solve_on_hierarchy, spectral_bisect, Bisection, FiedlerResult,
    LevelReport, SolverConfig,
};
pub use vector::project_out_ones;
