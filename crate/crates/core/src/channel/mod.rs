//! Quantum channels in Kraus form, with Choi and Stinespring views.

mod library;
mod spec;

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::exec;
use crate::qcore::eigen::{eigh, operator_norm};
use crate::qcore::tol;
use crate::qcore::{ComplexMatrix, DensityMatrix, Hamiltonian, C64};

pub use spec::ChannelSpec;

/// Default cap on the dimension of any composite operator.
pub const DEFAULT_BUDGET: usize = 4096;

/// Completely positive trace-preserving map X → X′.
#[derive(Debug, Clone)]
pub struct Channel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
    h_in: Option<Hamiltonian>,
    h_out: Option<Hamiltonian>,
    choi: OnceLock<ComplexMatrix>,
}

/// Isometry V: X → X′⊗E with E(ρ) = tr_E(VρV†).
#[derive(Debug, Clone)]
pub struct StinespringIsometry {
    v: ComplexMatrix,
    dim_in: usize,
    dim_out: usize,
    dim_env: usize,
}

impl Channel {
    /// Validate a Kraus decomposition. All operators must be `dim_out × dim_in`.
    pub fn from_kraus(
        kraus: Vec<ComplexMatrix>,
        h_in: Option<Hamiltonian>,
        h_out: Option<Hamiltonian>,
    ) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::ShapeMismatch("empty Kraus list".into()))?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::ShapeMismatch("zero-dimensional Kraus operator".into()));
        }
        for k in &kraus {
            if k.rows() != dim_out || k.cols() != dim_in {
                return Err(Error::ShapeMismatch(format!(
                    "Kraus operator {}x{} in a {dim_out}x{dim_in} family",
                    k.rows(),
                    k.cols()
                )));
            }
            if !k.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        let mut sum = ComplexMatrix::zeros(dim_in, dim_in);
        for k in &kraus {
            sum += &k.adjoint_matmul(k);
        }
        let residual = operator_norm(&(&sum - &ComplexMatrix::identity(dim_in)));
        if residual > tol::TRACE_PRESERVING {
            return Err(Error::NotTracePreserving { residual });
        }
        let ch = Self {
            dim_in,
            dim_out,
            kraus,
            h_in: None,
            h_out: None,
            choi: OnceLock::new(),
        };
        ch.with_hamiltonians(h_in, h_out)
    }

    pub(crate) fn from_kraus_unchecked(
        dim_in: usize,
        dim_out: usize,
        kraus: Vec<ComplexMatrix>,
        h_in: Option<Hamiltonian>,
        h_out: Option<Hamiltonian>,
    ) -> Self {
        Self {
            dim_in,
            dim_out,
            kraus,
            h_in,
            h_out,
            choi: OnceLock::new(),
        }
    }

    /// Attach (or replace) the input and output Hamiltonians.
    pub fn with_hamiltonians(mut self, h_in: Option<Hamiltonian>, h_out: Option<Hamiltonian>) -> Result<Self> {
        if let Some(h) = &h_in {
            if h.dim() != self.dim_in {
                return Err(Error::DimensionMismatch {
                    expected: self.dim_in,
                    found: h.dim(),
                });
            }
        }
        if let Some(h) = &h_out {
            if h.dim() != self.dim_out {
                return Err(Error::DimensionMismatch {
                    expected: self.dim_out,
                    found: h.dim(),
                });
            }
        }
        self.h_in = h_in;
        self.h_out = h_out;
        Ok(self)
    }

    /// Attach the same Hamiltonian to input and output.
    pub fn with_hamiltonian(self, h: Hamiltonian) -> Result<Self> {
        self.with_hamiltonians(Some(h.clone()), Some(h))
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn num_kraus(&self) -> usize {
        self.kraus.len()
    }

    pub fn h_in(&self) -> Option<&Hamiltonian> {
        self.h_in.as_ref()
    }

    pub fn h_out(&self) -> Option<&Hamiltonian> {
        self.h_out.as_ref()
    }

    /// Both Hamiltonians, or `MissingHamiltonian`.
    pub fn hamiltonians(&self) -> Result<(&Hamiltonian, &Hamiltonian)> {
        let h_in = self.h_in.as_ref().ok_or(Error::MissingHamiltonian("input"))?;
        let h_out = self.h_out.as_ref().ok_or(Error::MissingHamiltonian("output"))?;
        Ok((h_in, h_out))
    }

    fn check_input(&self, d: usize) -> Result<()> {
        if d != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: d,
            });
        }
        Ok(())
    }

    /// Σ_k K_k X K_k† for an arbitrary operator X on the input.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        x.require_square()?;
        self.check_input(x.rows())?;
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += &k.sandwich(x);
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply_operator(rho.matrix())?;
        Ok(DensityMatrix::from_trusted(out))
    }

    /// Heisenberg-picture map Σ_k K_k† Y K_k.
    pub fn adjoint_apply(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        y.require_square()?;
        if y.rows() != self.dim_out {
            return Err(Error::DimensionMismatch {
                expected: self.dim_out,
                found: y.rows(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out += &k.adjoint_matmul(&y.matmul(k));
        }
        Ok(out)
    }

    /// Choi matrix J = Σ_ij E(|i⟩⟨j|) ⊗ |i⟩⟨j| on X′⊗X.
    pub fn choi(&self) -> &ComplexMatrix {
        self.choi.get_or_init(|| {
            let d = self.dim_in * self.dim_out;
            let mut j = ComplexMatrix::zeros(d, d);
            for k in &self.kraus {
                // row-major vec(K) is indexed (x′, x)
                j += &ComplexMatrix::outer(k.data(), k.data());
            }
            j
        })
    }

    /// tr_X[J (1 ⊗ ρᵀ)].
    pub fn apply_via_choi(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        self.check_input(rho.dim())?;
        let lifted = ComplexMatrix::identity(self.dim_out).kron(&rho.matrix().transpose());
        self.choi()
            .matmul(&lifted)
            .partial_trace(&[self.dim_out, self.dim_in], &[0])
    }

    /// Rebuild a Kraus form from a Choi matrix on X′⊗X.
    pub fn from_choi(choi: &ComplexMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        let n = choi.require_square()?;
        if n != dim_in * dim_out {
            return Err(Error::DimensionMismatch {
                expected: dim_in * dim_out,
                found: n,
            });
        }
        let e = eigh(choi);
        let scale = e.max().abs().max(1.0);
        if e.min() < -tol::PSD * scale {
            return Err(Error::NotPsd {
                min_eigenvalue: e.min(),
            });
        }
        let kraus: Vec<ComplexMatrix> = (0..n)
            .rev()
            .filter(|&k| e.values[k] > tol::EIG_CUTOFF * scale)
            .map(|k| {
                let s = e.values[k].sqrt();
                let v: Vec<C64> = e.vector(k).into_iter().map(|z| z * s).collect();
                ComplexMatrix::new(dim_out, dim_in, v).expect("eigenvector length")
            })
            .collect();
        Self::from_kraus(kraus, None, None)
    }

    /// Canonical dilation stacking the Kraus operators: V|ψ⟩ = Σ_k K_k|ψ⟩ ⊗ |k⟩.
    pub fn stinespring(&self) -> StinespringIsometry {
        let ke = self.kraus.len();
        let v = ComplexMatrix::from_fn(self.dim_out * ke, self.dim_in, |r, i| self.kraus[r % ke][(r / ke, i)]);
        StinespringIsometry {
            v,
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            dim_env: ke,
        }
    }

    /// Channel X → E obtained by tracing out X′ instead of E.
    pub fn complementary(&self) -> Result<Channel> {
        let ke = self.kraus.len();
        let kraus = (0..self.dim_out)
            .map(|xp| ComplexMatrix::from_fn(ke, self.dim_in, |k, i| self.kraus[k][(xp, i)]))
            .collect();
        Channel::from_kraus(kraus, None, None)
    }

    /// E ⊗ F. Hamiltonians become H_A⊗1 + 1⊗H_B when both sides carry them.
    pub fn tensor(&self, other: &Channel) -> Channel {
        let kb = other.kraus.len();
        let kraus = exec::map_range(self.kraus.len() * kb, |idx| {
            self.kraus[idx / kb].kron(&other.kraus[idx % kb])
        });
        let join = |a: Option<&Hamiltonian>, b: Option<&Hamiltonian>| match (a, b) {
            (Some(a), Some(b)) => Some(a.sum_with(b)),
            _ => None,
        };
        Channel::from_kraus_unchecked(
            self.dim_in * other.dim_in,
            self.dim_out * other.dim_out,
            kraus,
            join(self.h_in(), other.h_in()),
            join(self.h_out(), other.h_out()),
        )
    }

    /// E^{⊗n}. The Kraus list is ordered with the first copy most significant.
    pub fn tensor_power(&self, n: usize, budget: usize) -> Result<Channel> {
        if n == 0 {
            return Err(Error::InvalidParameter("tensor power needs n ≥ 1".into()));
        }
        let pow = |b: usize| b.checked_pow(n as u32).unwrap_or(usize::MAX);
        let ke = self.kraus.len();
        let required = pow(self.dim_out).saturating_mul(pow(ke)).max(pow(self.dim_in));
        if required > budget {
            return Err(Error::BudgetExceeded { required, budget });
        }
        let count = pow(ke);
        let kraus = exec::map_range(count, |mut idx| {
            let mut digits = vec![0usize; n];
            for slot in digits.iter_mut().rev() {
                *slot = idx % ke;
                idx /= ke;
            }
            digits[1..]
                .iter()
                .fold(self.kraus[digits[0]].clone(), |acc, &k| acc.kron(&self.kraus[k]))
        });
        Ok(Channel::from_kraus_unchecked(
            pow(self.dim_in),
            pow(self.dim_out),
            kraus,
            self.h_in.as_ref().map(|h| h.lift(n)),
            self.h_out.as_ref().map(|h| h.lift(n)),
        ))
    }

    /// Residual ‖[J, H_out⊗1 − 1⊗H_inᵀ]‖∞ and whether it is within `tol`.
    ///
    /// The commutator vanishes exactly when E(e^{−iH_in t}ρe^{iH_in t}) =
    /// e^{−iH_out t}E(ρ)e^{iH_out t} for all t.
    pub fn is_time_covariant(&self, tol: f64) -> Result<(bool, f64)> {
        let (h_in, h_out) = self.hamiltonians()?;
        let gen = &h_out.matrix().kron(&ComplexMatrix::identity(self.dim_in))
            - &ComplexMatrix::identity(self.dim_out).kron(&h_in.matrix().transpose());
        let residual = operator_norm(&self.choi().commutator(&gen));
        Ok((residual <= tol, residual))
    }
}

impl StinespringIsometry {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.v
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn dim_env(&self) -> usize {
        self.dim_env
    }

    /// ‖V†V − 1‖∞.
    pub fn isometry_residual(&self) -> f64 {
        operator_norm(&(&self.v.adjoint_matmul(&self.v) - &ComplexMatrix::identity(self.dim_in)))
    }

    /// V X V† on X′⊗E.
    pub fn dilate(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.v.sandwich(x)
    }

    /// tr_E(V X V†).
    pub fn channel_output(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.dilate(x).partial_trace(&[self.dim_out, self.dim_env], &[0])
    }

    /// tr_X′(V X V†).
    pub fn complementary_output(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.dilate(x).partial_trace(&[self.dim_out, self.dim_env], &[1])
    }
}

pub use library::*;
