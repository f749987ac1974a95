use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::qcore::eigen::{eigh, sqrtm_psd};
use crate::qcore::{tol, ComplexMatrix, DensityMatrix};

/// Measure-then-implement channel Σ_σ T_σ(M_σ · M_σ), with M_σ the square
/// roots of the pretty-good measurement for the candidate states.
pub fn naive_implementation(candidates: &[(DensityMatrix, Channel)]) -> Result<Channel> {
    let (first_state, first_channel) = candidates
        .first()
        .ok_or_else(|| Error::InvalidParameter("no candidates".into()))?;
    let (din, dout) = (first_channel.dim_in(), first_channel.dim_out());
    for (rho, ch) in candidates {
        if rho.dim() != din || ch.dim_in() != din || ch.dim_out() != dout {
            return Err(Error::ShapeMismatch(format!(
                "candidate with state dim {} and channel {}→{}, expected {din}→{dout}",
                rho.dim(),
                ch.dim_in(),
                ch.dim_out()
            )));
        }
    }
    debug_assert_eq!(first_state.dim(), din);

    let roots: Vec<ComplexMatrix> = if candidates.len() == 1 {
        vec![ComplexMatrix::identity(din)]
    } else {
        let weight = 1.0 / candidates.len() as f64;
        let mut avg = ComplexMatrix::zeros(din, din);
        for (rho, _) in candidates {
            avg += &rho.matrix().scale_real(weight);
        }
        let e = eigh(&avg);
        let cutoff = tol::EIG_CUTOFF * e.max().max(1.0);
        let inv_half = e.map(|v| if v > cutoff { 1.0 / v.sqrt() } else { 0.0 });
        let effects: Vec<ComplexMatrix> = candidates
            .iter()
            .map(|(rho, _)| inv_half.sandwich(&rho.matrix().scale_real(weight)).hermitian_part())
            .collect();
        let mut total = ComplexMatrix::zeros(din, din);
        for m in &effects {
            total += m;
        }
        let residual = (&total - &ComplexMatrix::identity(din)).max_abs();
        if residual > tol::TRACE_PRESERVING {
            return Err(Error::InvalidPovm { residual });
        }
        effects.iter().map(sqrtm_psd).collect()
    };

    let kraus = candidates
        .iter()
        .zip(&roots)
        .flat_map(|((_, ch), m)| ch.kraus().iter().map(move |k| k.matmul(m)))
        .collect();
    Channel::from_kraus(kraus, first_channel.h_in().cloned(), first_channel.h_out().cloned())
}
