//! Dense symmetric eigensolver by cyclic Jacobi rotations.
//!
//! Deliberately shares no code path with the iterative solvers: it is the
//! ground truth that small-instance tests compare against.

use crate::error::{Error, Result};
use crate::laplacian::SparseLaplacian;

/// Largest matrix the oracle accepts.
pub const DENSE_LIMIT: usize = 2048;

const MAX_SWEEPS: usize = 100;

/// Square row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in d.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn inf_norm(&self) -> f64 {
        self.data
            .chunks(self.n.max(1))
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.n.max(1))
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl From<&SparseLaplacian> for DenseMatrix {
    fn from(l: &SparseLaplacian) -> Self {
        Self {
            n: l.n(),
            data: l.to_dense(),
        }
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

/// Full eigendecomposition of a symmetric matrix by cyclic-by-row Jacobi
/// sweeps, run until the off-diagonal Frobenius mass drops below
/// `1e-14 ‖A‖_F`. Rotations whose pivot is negligible against both diagonal
/// entries are skipped.
pub fn jacobi_eigen(a: &DenseMatrix) -> Result<EigenDecomposition> {
    let n = a.n;
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: DENSE_LIMIT,
        });
    }
    let scale = a.frobenius();
    for i in 0..n {
        for j in i + 1..n {
            let (x, y) = (a.get(i, j), a.get(j, i));
            if (x - y).abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::Asymmetric { i, j });
            }
        }
    }
    let mut m = a.data.clone();
    // symmetrize exactly so the rotations see one value per pair
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    // rows of `vt` are the eigenvector estimates, so rotations touch two rows
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    let target = 1e-14 * scale;

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum::<f64>()
            .sqrt();
        log::trace!("jacobi off-norm {off:e} target {target:e}");
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                if apq.abs() < 1e-18 * app.abs().min(aqq.abs()) {
                    m[p * n + q] = 0.0;
                    m[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A ← Jᵀ A J: rows p and q change, columns follow by symmetry
                let (head, tail) = m.split_at_mut(q * n);
                let row_p = &mut head[p * n..(p + 1) * n];
                let row_q = &mut tail[..n];
                for k in 0..n {
                    let (apk, aqk) = (row_p[k], row_q[k]);
                    row_p[k] = c * apk - s * aqk;
                    row_q[k] = s * apk + c * aqk;
                }
                row_p[p] = app - t * apq;
                row_q[q] = aqq + t * apq;
                row_p[q] = 0.0;
                row_q[p] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        m[k * n + p] = m[p * n + k];
                        m[k * n + q] = m[q * n + k];
                    }
                }
                let (head, tail) = vt.split_at_mut(q * n);
                let vp = &mut head[p * n..(p + 1) * n];
                let vq = &mut tail[..n];
                for k in 0..n {
                    let (a, b) = (vp[k], vq[k]);
                    vp[k] = c * a - s * b;
                    vq[k] = s * a + c * b;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[x * n + x].total_cmp(&m[y * n + y]));
    let eigenvalues = order.iter().map(|&k| m[k * n + k]).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| vt[k * n..(k + 1) * n].to_vec())
        .collect();
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Algebraic connectivity and an orthonormal basis of its eigenspace.
#[derive(Debug, Clone)]
pub struct FiedlerOracle {
    pub lambda2: f64,
    pub basis: Vec<Vec<f64>>,
    pub spectrum: EigenDecomposition,
}

impl FiedlerOracle {
    /// First eigenvalue strictly above `λ₂` (beyond the eigenspace tolerance).
    pub fn lambda_next(&self) -> Option<f64> {
        self.spectrum.eigenvalues.get(1 + self.basis.len()).copied()
    }

    /// `(λ_next - λ₂) / λ_next`.
    pub fn relative_gap(&self) -> Option<f64> {
        self.lambda_next().map(|l3| (l3 - self.lambda2) / l3)
    }

    /// Angle between `u` and the Fiedler eigenspace.
    pub fn angle(&self, u: &[f64]) -> f64 {
        subspace_angle(u, &self.basis)
    }
}

/// Dense Fiedler pair of a connected Laplacian; eigenvectors within
/// `1e-8 ‖L‖∞` of `λ₂` form the returned basis.
pub fn fiedler_oracle(l: &SparseLaplacian) -> Result<FiedlerOracle> {
    let n = l.n();
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: DENSE_LIMIT,
        });
    }
    if n < 2 {
        return Err(Error::TooSmall(n));
    }
    let spectrum = jacobi_eigen(&DenseMatrix::from(l))?;
    let tol = 1e-8 * l.inf_norm();
    let lambda2 = spectrum.eigenvalues[1];
    if lambda2 <= tol {
        return Err(Error::Disconnected);
    }
    let basis = spectrum
        .eigenvalues
        .iter()
        .zip(&spectrum.eigenvectors)
        .skip(1)
        .take_while(|(lam, _)| (**lam - lambda2).abs() <= tol)
        .map(|(_, v)| v.clone())
        .collect();
    Ok(FiedlerOracle {
        lambda2,
        basis,
        spectrum,
    })
}

/// `asin ‖u - Πu‖` for the normalized `u`, with `Π` the orthogonal projector
/// onto the span of the orthonormal `basis`.
pub fn subspace_angle(u: &[f64], basis: &[Vec<f64>]) -> f64 {
    let nrm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut r: Vec<f64> = u.iter().map(|v| v / nrm).collect();
    for b in basis {
        let c: f64 = r.iter().zip(b).map(|(x, y)| x * y).sum();
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri -= c * bi;
        }
    }
    let s = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    s.min(1.0).asin()
}
