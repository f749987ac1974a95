//! Dense semidefinite programming over complex Hermitian blocks.
//!
//! Standard form:
//!
//! ```text
//! minimize   Σ_b ⟨C_b, X_b⟩
//! subject to Σ_b ⟨A_ib, X_b⟩ = b_i,   X_b ⪰ 0,
//! ```
//!
//! with ⟨A, X⟩ = Re tr(AX). The dual is max bᵀy s.t. C − Σ y_i A_i ⪰ 0.

mod quantities;
mod solver;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::{tol, ComplexMatrix, C64};

pub use quantities::{diamond_distance, hypothesis_testing_entropy, DIAMOND_MAX_DIM};
pub use solver::solve_sdp;

/// Default solver accuracy (relative gap and infeasibilities).
pub const SDP_EPS: f64 = 1e-7;

/// Largest block dimension accepted by the solver.
pub const MAX_BLOCK_DIM: usize = 256;

/// Hermitian matrix stored as its nonzero entries (both triangles).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseHermitian {
    entries: Vec<(usize, usize, C64)>,
}

impl SparseHermitian {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `a` at (i, j) and conj(a) at (j, i); a diagonal entry must be real.
    pub fn push(&mut self, i: usize, j: usize, a: C64) {
        if i == j {
            self.entries.push((i, i, C64::new(a.re, 0.0)));
        } else {
            self.entries.push((i, j, a));
            self.entries.push((j, i, a.conj()));
        }
    }

    pub fn from_dense(m: &ComplexMatrix) -> Result<Self> {
        let n = m.require_square()?;
        let margin = m.hermitian_residual();
        if margin > tol::HERMITIAN {
            return Err(Error::NotHermitian { margin });
        }
        let mut s = Self::new();
        for i in 0..n {
            for j in i..n {
                let a = m[(i, j)];
                if a.norm_sqr() > 0.0 {
                    s.push(i, j, a);
                }
            }
        }
        Ok(s)
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Re tr(A X).
    pub fn inner(&self, x: &ComplexMatrix) -> f64 {
        self.entries.iter().map(|&(i, j, a)| (a * x[(j, i)]).re).sum()
    }

    /// Y += s·A.
    pub fn add_scaled_to(&self, s: f64, y: &mut ComplexMatrix) {
        for &(i, j, a) in &self.entries {
            y[(i, j)] += a * s;
        }
    }

    fn max_index(&self) -> Option<usize> {
        self.entries.iter().map(|&(i, j, _)| i.max(j)).max()
    }

    fn frobenius_norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.2.norm_sqr()).sum()
    }
}

/// One affine equality Σ_b ⟨A_b, X_b⟩ = rhs.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, SparseHermitian)>,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// Σ⟨A, X⟩ ≥ rhs
    AtLeast,
    /// Σ⟨A, X⟩ ≤ rhs
    AtMost,
}

#[derive(Debug, Clone, Default)]
pub struct SdpProblem {
    blocks: Vec<usize>,
    objective: Vec<Option<ComplexMatrix>>,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SdpStatus {
    Optimal,
    /// Stopped on a numerical breakdown; the best iterate is within a looser tolerance.
    NearOptimal,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub primal_value: f64,
    pub dual_value: f64,
    pub x: Vec<ComplexMatrix>,
    pub y: Vec<f64>,
    pub s: Vec<ComplexMatrix>,
    pub iterations: usize,
    /// |p − d| / (1 + |p| + |d|).
    pub relative_gap: f64,
    /// ‖b − A(X)‖ / (1 + ‖b‖).
    pub primal_infeasibility: f64,
    /// ‖C − S − Aᵀy‖_F / (1 + ‖C‖_F).
    pub dual_infeasibility: f64,
}

impl SdpSolution {
    /// Worst of the relative gap and the two infeasibilities.
    pub fn residual(&self) -> f64 {
        self.relative_gap
            .max(self.primal_infeasibility)
            .max(self.dual_infeasibility)
    }
}

impl SdpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a PSD block variable and return its index.
    pub fn add_block(&mut self, dim: usize) -> usize {
        self.blocks.push(dim);
        self.objective.push(None);
        self.blocks.len() - 1
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub(crate) fn objective(&self) -> &[Option<ComplexMatrix>] {
        &self.objective
    }

    fn check_block(&self, block: usize) -> Result<usize> {
        self.blocks
            .get(block)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("no block {block}")))
    }

    /// Cost matrix of a block (defaults to zero).
    pub fn set_objective(&mut self, block: usize, c: ComplexMatrix) -> Result<()> {
        let dim = self.check_block(block)?;
        if c.require_square()? != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: c.rows(),
            });
        }
        let margin = c.hermitian_residual();
        if margin > tol::HERMITIAN {
            return Err(Error::NotHermitian { margin });
        }
        self.objective[block] = Some(c.hermitian_part());
        Ok(())
    }

    pub fn add_sparse_constraint(&mut self, terms: Vec<(usize, SparseHermitian)>, rhs: f64) -> Result<()> {
        for (b, a) in &terms {
            let dim = self.check_block(*b)?;
            if let Some(k) = a.max_index() {
                if k >= dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: k + 1,
                    });
                }
            }
        }
        if !rhs.is_finite() {
            return Err(Error::NonFinite);
        }
        self.constraints.push(Constraint { terms, rhs });
        Ok(())
    }

    /// Equality constraint with dense Hermitian coefficient matrices.
    pub fn add_constraint(&mut self, terms: Vec<(usize, ComplexMatrix)>, rhs: f64) -> Result<()> {
        let sparse = terms
            .into_iter()
            .map(|(b, m)| Ok((b, SparseHermitian::from_dense(&m)?)))
            .collect::<Result<Vec<_>>>()?;
        self.add_sparse_constraint(sparse, rhs)
    }

    /// Inequality constraint, turned into an equality with a fresh 1×1 slack block.
    pub fn add_inequality(&mut self, terms: Vec<(usize, ComplexMatrix)>, rel: Relation, rhs: f64) -> Result<usize> {
        let slack = self.add_block(1);
        let sign = match rel {
            Relation::AtLeast => -1.0,
            Relation::AtMost => 1.0,
        };
        let mut terms = terms;
        terms.push((slack, ComplexMatrix::from_real_diag(&[sign])));
        if let Err(e) = self.add_constraint(terms, rhs) {
            self.blocks.pop();
            self.objective.pop();
            return Err(e);
        }
        Ok(slack)
    }

    /// Σ_b ⟨A_ib, X_b⟩ for every constraint.
    pub(crate) fn apply(&self, x: &[ComplexMatrix]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|c| c.terms.iter().map(|(b, a)| a.inner(&x[*b])).sum())
            .collect()
    }

    /// Σ_i y_i A_i, per block.
    pub(crate) fn adjoint(&self, y: &[f64]) -> Vec<ComplexMatrix> {
        let mut out: Vec<ComplexMatrix> = self.blocks.iter().map(|&d| ComplexMatrix::zeros(d, d)).collect();
        for (c, &yi) in self.constraints.iter().zip(y) {
            for (b, a) in &c.terms {
                a.add_scaled_to(yi, &mut out[*b]);
            }
        }
        out
    }

    pub(crate) fn constraint_norms(&self) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|c| c.terms.iter().map(|(_, a)| a.frobenius_norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }
}
