//! Entropic and free-energy functionals (nats, natural units).

use super::eigen::{eigh, hermitian_trace_norm, sqrtm_psd, trace_norm};
use super::matrix::ComplexMatrix;
use super::state::{DensityMatrix, Hamiltonian, ThermoContext};
use super::tol;
use crate::error::{Error, Result};

/// −Σ p ln p over a spectrum; entries ≤ ε_eig contribute nothing.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > tol::EIG_CUTOFF).map(|&x| -x * x.ln()).sum()
}

/// S(ρ) = −tr ρ ln ρ.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(&rho.eigenvalues()).max(0.0)
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// D(ρ‖γ) = tr ρ(ln ρ − ln γ) for PSD, possibly unnormalized γ.
///
/// Returns `f64::INFINITY` when ρ has weight above the support tolerance
/// outside the support of γ.
pub fn relative_entropy(rho: &DensityMatrix, gamma: &ComplexMatrix) -> Result<f64> {
    check_dims(rho.dim(), gamma.rows())?;
    gamma.require_square()?;
    let g = eigh(gamma);
    let scale = g.max().abs().max(f64::MIN_POSITIVE);
    if g.min() < -tol::PSD * scale.max(1.0) {
        return Err(Error::NotPsd {
            min_eigenvalue: g.min(),
        });
    }
    let support_cut = tol::EIG_CUTOFF * scale.max(1.0);
    // tr ρ ln γ = Σ_k ⟨g_k|ρ|g_k⟩ ln g_k
    let mut cross = 0.0;
    for (k, &gk) in g.values.iter().enumerate() {
        let v = g.vector(k);
        let w = rho.matrix().apply(&v);
        let weight: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        if gk <= support_cut {
            if weight > tol::PSD {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += weight * gk.ln();
    }
    Ok(-von_neumann_entropy(rho) - cross)
}

/// e^{−βH}.
pub fn gibbs_weight(h: &Hamiltonian, ctx: &ThermoContext) -> ComplexMatrix {
    let beta = ctx.beta();
    h.eigen().map(|e| (-beta * e).exp())
}

/// ln Z = ln tr e^{−βH}, computed with a shifted exponent for stability.
pub fn log_partition_function(h: &Hamiltonian, ctx: &ThermoContext) -> f64 {
    let beta = ctx.beta();
    let levels = h.eigen().values;
    let e0 = levels.first().copied().unwrap_or(0.0);
    let z: f64 = levels.iter().map(|&e| (-beta * (e - e0)).exp()).sum();
    z.ln() - beta * e0
}

/// e^{−βH}/Z.
pub fn gibbs_state(h: &Hamiltonian, ctx: &ThermoContext) -> DensityMatrix {
    let beta = ctx.beta();
    let e = h.eigen();
    let e0 = e.min();
    let w = e.map(|x| (-beta * (x - e0)).exp());
    let z = w.trace().re;
    DensityMatrix::from_trusted(w.scale_real(1.0 / z))
}

/// F(ρ) = tr(Hρ) − β⁻¹S(ρ).
///
/// Debug builds cross-check against β⁻¹D(ρ‖e^{−βH}).
pub fn free_energy(rho: &DensityMatrix, h: &Hamiltonian, ctx: &ThermoContext) -> Result<f64> {
    check_dims(h.dim(), rho.dim())?;
    let energy = rho.expectation(h.matrix());
    let f = energy - von_neumann_entropy(rho) / ctx.beta();
    #[cfg(debug_assertions)]
    {
        let d = relative_entropy(rho, &gibbs_weight(h, ctx))?;
        let scale = 1.0 + f.abs() + h.matrix().max_abs();
        debug_assert!(
            (d / ctx.beta() - f).abs() <= 1e-8 * scale,
            "free energy forms disagree: {} vs {}",
            d / ctx.beta(),
            f
        );
    }
    Ok(f)
}

/// ½‖ρ − σ‖₁.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let diff = rho.matrix() - sigma.matrix();
    Ok((0.5 * hermitian_trace_norm(&diff)).clamp(0.0, 1.0))
}

/// Root fidelity ‖√ρ √σ‖₁ of PSD operators (also valid when unnormalized).
pub fn fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    check_dims(rho.rows(), sigma.rows())?;
    let a = sqrtm_psd(rho);
    let b = sqrtm_psd(sigma);
    Ok(trace_norm(&a.matmul(&b)))
}
