//! Hermitian eigendecomposition and matrix functions.
//!
//! Small matrices use a cyclic Jacobi sweep; larger ones go through faer's
//! tridiagonal solver.

use super::matrix::{from_faer, to_faer, ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Matrices up to this dimension use the Jacobi solver.
pub const JACOBI_MAX_DIM: usize = 32;

/// Off-diagonal Frobenius threshold (relative to ‖A‖_F) ending the sweeps.
const JACOBI_THRESHOLD: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 60;

/// A = U diag(values) U†, eigenvalues ascending, eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// U f(Λ) U†.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.dim();
        let u = &self.vectors;
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        // U·diag(f) then ·U†
        let scaled = ComplexMatrix::from_fn(d, d, |i, k| u[(i, k)] * fv[k]);
        scaled.matmul_adjoint(u)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    /// Projector onto the eigenvectors whose eigenvalue satisfies `pred`.
    pub fn projector(&self, pred: impl Fn(f64) -> bool) -> ComplexMatrix {
        self.map(|x| if pred(x) { 1.0 } else { 0.0 })
    }
}

/// Eigendecomposition of the Hermitian part of `a`.
pub fn eigh(a: &ComplexMatrix) -> HermitianEigen {
    assert!(a.is_square(), "eigh needs a square matrix");
    if a.rows() <= JACOBI_MAX_DIM {
        jacobi_eigh(a)
    } else {
        faer_eigh(a)
    }
}

pub fn eigvalsh(a: &ComplexMatrix) -> Vec<f64> {
    if a.rows() <= JACOBI_MAX_DIM {
        jacobi_eigh(a).values
    } else {
        let h = a.hermitian_part();
        let mut v: Vec<f64> = to_faer(&h)
            .self_adjoint_eigenvalues(faer::Side::Lower)
            .expect("Hermitian eigenvalue iteration failed");
        v.sort_by(f64::total_cmp);
        v
    }
}

fn faer_eigh(a: &ComplexMatrix) -> HermitianEigen {
    let h = a.hermitian_part();
    let evd = to_faer(&h)
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("Hermitian eigendecomposition failed");
    let s = evd.S();
    let values: Vec<f64> = (0..h.rows()).map(|i| s[i].re).collect();
    let vectors = from_faer(evd.U());
    sort_eigenpairs(values, vectors)
}

/// Cyclic Jacobi for complex Hermitian matrices.
pub fn jacobi_eigh(a: &ComplexMatrix) -> HermitianEigen {
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_THRESHOLD * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE || r < 1e-300 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                if r < 1e-18 * scale && (app - aqq).abs() > 0.0 {
                    m[(p, q)] = ZERO;
                    m[(q, p)] = ZERO;
                    continue;
                }
                let phase = apq / r;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
                let g_pp = C64::new(c, 0.0);
                let g_pq = C64::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * g_pp + mkq * g_qp;
                    m[(k, q)] = mkp * g_pq + mkq * g_qq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = g_pp.conj() * mpk + g_qp.conj() * mqk;
                    m[(q, k)] = g_pq.conj() * mpk + g_qq.conj() * mqk;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)].im = 0.0;
                m[(q, q)].im = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }
    let values: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    sort_eigenpairs(values, v)
}

fn sort_eigenpairs(values: Vec<f64>, vectors: ComplexMatrix) -> HermitianEigen {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let sorted_vectors = ComplexMatrix::from_fn(vectors.rows(), n, |i, k| vectors[(i, order[k])]);
    HermitianEigen {
        values: sorted_values,
        vectors: sorted_vectors,
    }
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = to_faer(a).singular_values().expect("singular value iteration failed");
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// ‖A‖₁ = tr √(A†A).
pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).iter().sum()
}

/// Trace norm of a Hermitian matrix, Σ|λ|.
pub fn hermitian_trace_norm(a: &ComplexMatrix) -> f64 {
    eigvalsh(a).iter().map(|x| x.abs()).sum()
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// e^A for Hermitian A.
pub fn expm_hermitian(a: &ComplexMatrix) -> ComplexMatrix {
    eigh(a).map(f64::exp)
}

/// Principal square root of a PSD matrix; negative eigenvalues are clipped.
pub fn sqrtm_psd(a: &ComplexMatrix) -> ComplexMatrix {
    eigh(a).map(|x| x.max(0.0).sqrt())
}

/// Hermitian matrix logarithm; fails if an eigenvalue is not positive.
pub fn logm_pd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = eigh(a);
    if e.min() <= 0.0 {
        return Err(Error::NotPsd {
            min_eigenvalue: e.min(),
        });
    }
    Ok(e.map(f64::ln))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut s = seed.wrapping_add(17);
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let g = ComplexMatrix::from_fn(n, n, |_, _| C64::new(next(), next()));
        g.hermitian_part()
    }

    #[test]
    fn jacobi_reconstructs() {
        for &n in &[1, 2, 3, 7, 16, 32] {
            let a = random_hermitian(n, n as u64);
            let e = jacobi_eigh(&a);
            let err = (&a - &e.reconstruct()).frobenius_norm();
            assert!(err < 1e-12 * (n as f64), "n={n} err={err}");
            let ortho = (&e.vectors.adjoint_matmul(&e.vectors) - &ComplexMatrix::identity(n)).max_abs();
            assert!(ortho < 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn jacobi_agrees_with_faer() {
        let a = random_hermitian(24, 99);
        let j = jacobi_eigh(&a).values;
        let f = faer_eigh(&a).values;
        for (x, y) in j.iter().zip(&f) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let a = ComplexMatrix::identity(4).scale_real(2.5);
        let e = jacobi_eigh(&a);
        assert!(e.values.iter().all(|&x| (x - 2.5).abs() < 1e-15));
    }

    #[test]
    fn trace_norm_of_hermitian() {
        let a = ComplexMatrix::from_real_diag(&[1.0, -2.0, 0.5]);
        assert!((trace_norm(&a) - 3.5).abs() < 1e-12);
        assert!((hermitian_trace_norm(&a) - 3.5).abs() < 1e-12);
        assert!((operator_norm(&a) - 2.0).abs() < 1e-12);
    }
}
