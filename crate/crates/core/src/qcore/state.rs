use serde::{Deserialize, Serialize};

use super::eigen::{eigh, HermitianEigen};
use super::matrix::{ComplexMatrix, C64};
use super::tol;
use crate::error::{Error, Result};

/// Unit-trace positive semidefinite operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validate `mat` as a quantum state.
    ///
    /// Small negative eigenvalues (above −τ_psd) are clipped to zero and the
    /// result renormalized.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        mat.require_square()?;
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let margin = mat.hermitian_residual();
        if margin > tol::HERMITIAN {
            return Err(Error::NotHermitian { margin });
        }
        let h = mat.hermitian_part();
        let trace = h.trace().re;
        if (trace - 1.0).abs() > tol::TRACE {
            return Err(Error::NotUnitTrace { trace });
        }
        let e = eigh(&h);
        if e.min() < -tol::PSD {
            return Err(Error::NotPsd {
                min_eigenvalue: e.min(),
            });
        }
        if e.min() < 0.0 {
            let clipped = e.map(|x| x.max(0.0));
            let t = clipped.trace().re;
            return Ok(Self(clipped.scale_real(1.0 / t)));
        }
        Ok(Self(h))
    }

    /// Wrap without validation. Callers guarantee the state invariants.
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        Self(mat.hermitian_part())
    }

    /// Validate, first rescaling by the trace. Useful for outputs of
    /// trace-preserving maps accumulated in floating point.
    pub fn normalized(mat: ComplexMatrix) -> Result<Self> {
        let t = mat.trace().re;
        if !(t > 0.0) {
            return Err(Error::NotUnitTrace { trace: t });
        }
        Self::new(mat.scale_real(1.0 / t))
    }

    pub fn pure(ket: &[C64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let v: Vec<C64> = ket.iter().map(|z| z / norm).collect();
        Ok(Self(ComplexMatrix::outer(&v, &v)))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        Self(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn from_diag(p: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diag(p))
    }

    /// Qubit state with Bloch vector (x, y, z), |r| ≤ 1.
    pub fn bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => C64::new((1.0 + z) / 2.0, 0.0),
            (1, 1) => C64::new((1.0 - z) / 2.0, 0.0),
            (0, 1) => C64::new(x / 2.0, -y / 2.0),
            _ => C64::new(x / 2.0, y / 2.0),
        }))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn eigen(&self) -> HermitianEigen {
        eigh(&self.0)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        super::eigen::eigvalsh(&self.0)
    }

    pub fn purity(&self) -> f64 {
        self.0.trace_of_product(&self.0).re
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self(self.0.kron(&other.0))
    }

    pub fn tensor_power(&self, n: usize) -> Self {
        Self(self.0.kron_power(n))
    }

    /// tr(Xρ).
    pub fn expectation(&self, x: &ComplexMatrix) -> f64 {
        x.trace_of_product(&self.0).re
    }

    /// λρ + (1−λ)σ.
    pub fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self(&self.0.scale_real(lambda) + &other.0.scale_real(1.0 - lambda)))
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// Hermitian energy operator (natural units).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Hamiltonian(ComplexMatrix);

impl Hamiltonian {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        mat.require_square()?;
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let margin = mat.hermitian_residual();
        if margin > tol::HERMITIAN {
            return Err(Error::NotHermitian { margin });
        }
        Ok(Self(mat.hermitian_part()))
    }

    pub fn zero(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim, dim))
    }

    pub fn diag(levels: &[f64]) -> Self {
        Self(ComplexMatrix::from_real_diag(levels))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn eigen(&self) -> HermitianEigen {
        eigh(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.max_abs() == 0.0
    }

    /// Non-interacting n-copy Hamiltonian Σ_i 1⊗…⊗H⊗…⊗1.
    pub fn lift(&self, n: usize) -> Self {
        let d = self.dim();
        let mut total = ComplexMatrix::zeros(d.pow(n as u32), d.pow(n as u32));
        for i in 0..n {
            let left = ComplexMatrix::identity(d.pow(i as u32));
            let right = ComplexMatrix::identity(d.pow((n - 1 - i) as u32));
            total += &left.kron(&self.0).kron(&right);
        }
        Self(total)
    }

    /// H_A ⊗ 1 + 1 ⊗ H_B.
    pub fn sum_with(&self, other: &Self) -> Self {
        let a = self.0.kron(&ComplexMatrix::identity(other.dim()));
        let b = ComplexMatrix::identity(self.dim()).kron(&other.0);
        Self(&a + &b)
    }

    /// U H U†.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Self {
        Self(u.sandwich(&self.0).hermitian_part())
    }
}

impl<'de> Deserialize<'de> for Hamiltonian {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        Hamiltonian::new(m).map_err(serde::de::Error::custom)
    }
}

/// Heat-bath inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoContext {
    beta: f64,
}

impl ThermoContext {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "inverse temperature must be positive and finite, got {beta}"
            )));
        }
        Ok(Self { beta })
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl Default for ThermoContext {
    fn default() -> Self {
        Self { beta: 1.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_states() {
        let mm = DensityMatrix::new(ComplexMatrix::identity(2).scale_real(0.5)).unwrap();
        assert_eq!(mm.dim(), 2);
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diag(&[1.0, 0.0])).is_ok());
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let m = ComplexMatrix::from_real_diag(&[1.0 / 0.8, -0.2 / 0.8]);
        match DensityMatrix::new(m) {
            Err(Error::NotPsd { min_eigenvalue }) => assert!((min_eigenvalue + 0.25).abs() < 1e-12),
            other => panic!("expected NotPsd, got {other:?}"),
        }
    }

    #[test]
    fn tiny_negative_eigenvalue_is_clipped() {
        let m = ComplexMatrix::from_real_diag(&[1.0 + 1e-10, -1e-10]);
        let rho = DensityMatrix::new(m).unwrap();
        assert!(rho.eigenvalues().iter().all(|&x| x >= 0.0));
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn other_violations() {
        let mut m = ComplexMatrix::identity(2).scale_real(0.5);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotHermitian { .. })));
        let m = ComplexMatrix::identity(2);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotUnitTrace { .. })));
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn lifted_hamiltonian_spectrum() {
        let h = Hamiltonian::diag(&[0.0, 1.0]).lift(3);
        let mut levels: Vec<f64> = h.matrix().diagonal().iter().map(|z| z.re).collect();
        levels.sort_by(f64::total_cmp);
        assert_eq!(levels, vec![0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 3.0]);
    }

    #[test]
    fn beta_must_be_positive() {
        assert!(ThermoContext::new(0.0).is_err());
        assert!(ThermoContext::new(f64::NAN).is_err());
        assert!(ThermoContext::new(2.0).is_ok());
    }
}
