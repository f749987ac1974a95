use super::{solve_sdp, SdpProblem, SparseHermitian};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::qcore::eigen::eigh;
use crate::qcore::{tol, ComplexMatrix, DensityMatrix, C64};

/// Largest Choi dimension din·dout accepted by [`diamond_distance`].
pub const DIAMOND_MAX_DIM: usize = 64;

/// Optimal type-II weights at or below this are reported as +∞.
const DH_FLOOR: f64 = 1e-12;

/// Accuracy used for the small hypothesis-testing programs.
const DH_EPS: f64 = 1e-10;

/// Hermitian orthonormal basis element number `k` of d×d matrices, as a list
/// of (row, col, value) over one triangle: E_pp, (E_pq+E_qp)/√2, i(E_pq−E_qp)/√2.
fn basis_elements(d: usize) -> Vec<(usize, usize, C64)> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for p in 0..d {
        out.push((p, p, C64::new(1.0, 0.0)));
        for q in p + 1..d {
            out.push((p, q, C64::new(s, 0.0)));
            out.push((p, q, C64::new(0.0, s)));
        }
    }
    out
}

fn single(i: usize, j: usize, a: C64) -> SparseHermitian {
    let mut m = SparseHermitian::new();
    m.push(i, j, a);
    m
}

/// ‖A − B‖⋄ = max over inputs with a reference system of the trace norm of
/// the output difference, via the SDP
/// max ⟨J, W⟩ s.t. W ⪯ 1 ⊗ ρ, W ⪰ 0, tr ρ = 1, where J is the Choi
/// difference on X′⊗X and the optimum equals half the diamond norm.
pub fn diamond_distance(a: &Channel, b: &Channel, eps: f64) -> Result<f64> {
    if a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out() {
        return Err(Error::ShapeMismatch(format!(
            "channels {}→{} and {}→{}",
            a.dim_in(),
            a.dim_out(),
            b.dim_in(),
            b.dim_out()
        )));
    }
    let (din, dout) = (a.dim_in(), a.dim_out());
    let d = din * dout;
    if d > DIAMOND_MAX_DIM {
        return Err(Error::BudgetExceeded {
            required: d,
            budget: DIAMOND_MAX_DIM,
        });
    }
    let j = a.choi() - b.choi();
    if j.max_abs() == 0.0 {
        return Ok(0.0);
    }

    let mut p = SdpProblem::new();
    let w = p.add_block(d);
    let slack = p.add_block(d);
    let rho = p.add_block(din);
    p.set_objective(w, j.scale_real(-1.0))?;
    // W + S = 1_X′ ⊗ ρ, tested against a Hermitian basis of X′⊗X
    for (r, c, val) in basis_elements(d) {
        let (ra, ri) = (r / din, r % din);
        let (ca, ci) = (c / din, c % din);
        let mut terms = vec![(w, single(r, c, val)), (slack, single(r, c, val))];
        if ra == ca {
            terms.push((rho, single(ri, ci, -val)));
        }
        p.add_sparse_constraint(terms, 0.0)?;
    }
    let mut tr = SparseHermitian::new();
    for i in 0..din {
        tr.push(i, i, C64::new(1.0, 0.0));
    }
    p.add_sparse_constraint(vec![(rho, tr)], 1.0)?;

    let sol = solve_sdp(&p, eps)?;
    let half = -0.5 * (sol.primal_value + sol.dual_value);
    Ok((2.0 * half).clamp(0.0, 2.0))
}

/// D_H^ε(ρ‖γ) = −ln min { tr(Qγ) : 0 ⪯ Q ⪯ 1, tr(Qρ) ≥ 1 − ε }.
///
/// Returns `f64::INFINITY` when a test with vanishing type-II weight exists.
pub fn hypothesis_testing_entropy(rho: &DensityMatrix, gamma: &ComplexMatrix, eps_ht: f64) -> Result<f64> {
    if !(eps_ht > 0.0 && eps_ht < 1.0) {
        return Err(Error::InvalidParameter(format!("ε must lie in (0, 1), got {eps_ht}")));
    }
    let dim = rho.dim();
    if gamma.require_square()? != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: gamma.rows(),
        });
    }
    let g = eigh(gamma);
    let scale = g.max().abs().max(1.0);
    if g.min() < -tol::PSD * scale {
        return Err(Error::NotPsd {
            min_eigenvalue: g.min(),
        });
    }
    // Q = 1 − Π_supp(γ) already passes when ρ has enough weight off the support
    let support = g.projector(|v| v > tol::EIG_CUTOFF * scale);
    if rho.expectation(&support) <= eps_ht {
        return Ok(f64::INFINITY);
    }

    let mut p = SdpProblem::new();
    let q = p.add_block(dim);
    let r = p.add_block(dim);
    let t = p.add_block(1);
    p.set_objective(q, gamma.hermitian_part())?;
    for (i, j, val) in basis_elements(dim) {
        let rhs = if i == j { 1.0 } else { 0.0 };
        p.add_sparse_constraint(vec![(q, single(i, j, val)), (r, single(i, j, val))], rhs)?;
    }
    p.add_sparse_constraint(
        vec![
            (q, SparseHermitian::from_dense(rho.matrix())?),
            (t, single(0, 0, C64::new(-1.0, 0.0))),
        ],
        1.0 - eps_ht,
    )?;
    let sol = solve_sdp(&p, DH_EPS)?;
    let value = 0.5 * (sol.primal_value + sol.dual_value);
    if value <= DH_FLOOR {
        return Ok(f64::INFINITY);
    }
    Ok(-value.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{erasure, identity, unitary};
    use crate::sdp::SDP_EPS;

    #[test]
    fn equal_channels_are_at_distance_zero() {
        assert_eq!(diamond_distance(&erasure(2), &erasure(2), SDP_EPS).unwrap(), 0.0);
    }

    #[test]
    fn phase_flip_is_perfectly_distinguishable() {
        let z = unitary(ComplexMatrix::from_real_diag(&[1.0, -1.0])).unwrap();
        let d = diamond_distance(&identity(2), &z, SDP_EPS).unwrap();
        assert!((d - 2.0).abs() < 1e-5, "{d}");
    }

    #[test]
    fn identity_versus_erasure() {
        // ‖id − reset‖⋄ = 2: |1⟩ is mapped to an orthogonal output
        let d = diamond_distance(&identity(2), &erasure(2), SDP_EPS).unwrap();
        assert!((d - 2.0).abs() < 1e-5, "{d}");
    }

    #[test]
    fn dh_of_identical_states() {
        let rho = DensityMatrix::from_diag(&[0.6, 0.3, 0.1]).unwrap();
        for eps in [0.01, 0.1, 0.3] {
            let v = hypothesis_testing_entropy(&rho, rho.matrix(), eps).unwrap();
            assert!((v + (1.0 - eps).ln()).abs() < 1e-6, "{eps}: {v}");
        }
    }

    #[test]
    fn dh_orthogonal_states() {
        let a = DensityMatrix::basis(2, 0);
        let b = DensityMatrix::basis(2, 1);
        assert_eq!(hypothesis_testing_entropy(&a, b.matrix(), 0.1).unwrap(), f64::INFINITY);
    }

    #[test]
    fn dh_rejects_bad_epsilon() {
        let a = DensityMatrix::basis(2, 0);
        assert!(hypothesis_testing_entropy(&a, a.matrix(), 1.0).is_err());
        assert!(hypothesis_testing_entropy(&a, a.matrix(), 0.0).is_err());
    }
}
