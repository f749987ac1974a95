use super::Channel;
use crate::error::{Error, Result};
use crate::qcore::eigen::operator_norm;
use crate::qcore::{ComplexMatrix, C64};

fn unit(k: usize, d: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d];
    v[k] = C64::new(1.0, 0.0);
    v
}

fn build(kraus: Vec<ComplexMatrix>) -> Channel {
    Channel::from_kraus(kraus, None, None).expect("library channel is trace preserving")
}

/// Identity channel on dimension `d`.
pub fn identity(d: usize) -> Channel {
    build(vec![ComplexMatrix::identity(d)])
}

/// Reset to |0⟩: Kraus operators |0⟩⟨i|.
pub fn erasure(d: usize) -> Channel {
    build((0..d).map(|i| ComplexMatrix::outer(&unit(0, d), &unit(i, d))).collect())
}

/// Qubit amplitude damping with decay probability `gamma`.
pub fn amplitude_damping(gamma: f64) -> Channel {
    assert!((0.0..=1.0).contains(&gamma), "damping probability out of range");
    let k0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - gamma).sqrt()]]);
    let k1 = ComplexMatrix::from_real_rows(&[&[0.0, gamma.sqrt()], &[0.0, 0.0]]);
    build(vec![k0, k1])
}

/// Qubit dephasing ρ ↦ (1−p)ρ + pZρZ.
pub fn dephasing(p: f64) -> Channel {
    assert!((0.0..=1.0).contains(&p), "dephasing probability out of range");
    let k0 = ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt());
    let k1 = ComplexMatrix::from_real_diag(&[1.0, -1.0]).scale_real(p.sqrt());
    build(vec![k0, k1])
}

/// Complete dephasing in the computational basis.
pub fn full_dephasing(d: usize) -> Channel {
    build((0..d).map(|i| ComplexMatrix::outer(&unit(i, d), &unit(i, d))).collect())
}

/// ρ ↦ (1−p)ρ + p·1/d.
pub fn depolarizing(d: usize, p: f64) -> Channel {
    assert!((0.0..=1.0).contains(&p), "depolarizing probability out of range");
    let mut kraus = Vec::with_capacity(d * d + 1);
    if p < 1.0 {
        kraus.push(ComplexMatrix::identity(d).scale_real((1.0 - p).sqrt()));
    }
    let w = (p / d as f64).sqrt();
    for a in 0..d {
        for b in 0..d {
            kraus.push(ComplexMatrix::outer(&unit(a, d), &unit(b, d)).scale_real(w));
        }
    }
    build(kraus)
}

/// ρ ↦ UρU†.
pub fn unitary(u: ComplexMatrix) -> Result<Channel> {
    let d = u.require_square()?;
    let residual = operator_norm(&(&u.adjoint_matmul(&u) - &ComplexMatrix::identity(d)));
    if residual > crate::qcore::tol::TRACE_PRESERVING {
        return Err(Error::NotTracePreserving { residual });
    }
    Channel::from_kraus(vec![u], None, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::DensityMatrix;

    #[test]
    fn depolarizing_endpoints() {
        let rho = DensityMatrix::bloch(0.3, -0.2, 0.5).unwrap();
        let out = depolarizing(2, 1.0).apply(&rho).unwrap();
        assert!((out.matrix() - DensityMatrix::maximally_mixed(2).matrix()).max_abs() < 1e-15);
        let out = depolarizing(2, 0.0).apply(&rho).unwrap();
        assert!((out.matrix() - rho.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn amplitude_damping_populations() {
        let out = amplitude_damping(0.3).apply(&DensityMatrix::basis(2, 1)).unwrap();
        assert!((out.matrix()[(0, 0)].re - 0.3).abs() < 1e-15);
        assert!((out.matrix()[(1, 1)].re - 0.7).abs() < 1e-15);
    }

    #[test]
    fn dephasing_kills_coherence() {
        let rho = DensityMatrix::bloch(1.0, 0.0, 0.0).unwrap();
        let out = dephasing(0.5).apply(&rho).unwrap();
        assert!(out.matrix()[(0, 1)].norm() < 1e-15);
    }
}
