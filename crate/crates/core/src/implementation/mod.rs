//! Universal implementation W = M·V^{⊗n} of an i.i.d. channel, its accuracy
//! and its per-copy work cost.
//!
//! W is clipped to a contraction when needed. The missing trace
//! tr[(1 − W†W)(·)] is routed to the n-copy output Gibbs state ω.

mod naive;

use serde::Serialize;

pub use naive::naive_implementation;

use crate::channel::{Channel, ChannelSpec, StinespringIsometry, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::exec;
use crate::qcore::eigen::{eigh, expm_hermitian, sqrtm_psd, trace_norm};
use crate::qcore::{gibbs_state, ComplexMatrix, DensityMatrix, ThermoContext, C64};
use crate::sdp::{diamond_distance, SDP_EPS};
use crate::typic::{TypicalityOperator, TypicalityParams};

/// Bound on max(dim_out^n · K^n, dim_in^n) for the n-copy dilation.
pub const IMPLEMENTATION_BUDGET: usize = DEFAULT_BUDGET;

/// Completion terms with weight at or below this are dropped.
const COMPLETION_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    /// ‖M V‖∞ before clipping.
    pub preclip_norm: f64,
    pub clipped: bool,
    /// Per-copy threshold used in the outcome constraint.
    pub threshold: f64,
    pub eta: f64,
    pub input_sectors: usize,
    pub output_sectors: usize,
    pub admitted_pairs: usize,
    /// tr(W†W)/dim_in^n: weight kept on the maximally mixed input.
    pub surviving_weight: f64,
}

#[derive(Debug, Clone)]
pub struct Implementation {
    n: usize,
    beta: f64,
    w: ComplexMatrix,
    dilation: StinespringIsometry,
    channel: Channel,
    diagnostics: Diagnostics,
}

#[derive(Serialize)]
struct Record<'a> {
    n: usize,
    beta: f64,
    dim_env: usize,
    completion: &'static str,
    channel: ChannelSpec,
    diagnostics: &'a Diagnostics,
    w: &'a ComplexMatrix,
}

/// Scale W so that W†W ⪯ 1; returns the pre-clip norm.
fn clip(w: &mut ComplexMatrix) -> (f64, bool) {
    if w.max_abs() == 0.0 {
        return (0.0, false);
    }
    let e = eigh(&w.adjoint_matmul(w));
    let top = e.max().max(0.0);
    if top <= 1.0 {
        return (top.sqrt(), false);
    }
    let g = e.map(|l| if l > 1.0 { 1.0 / l.sqrt() } else { 1.0 });
    *w = w.matmul(&g);
    (top.sqrt(), true)
}

/// Universal implementation of `ch` on n copies.
pub fn build_universal_implementation(
    ch: &Channel,
    n: usize,
    params: &TypicalityParams,
    ctx: &ThermoContext,
) -> Result<Implementation> {
    ch.hamiltonians()?;
    let dilation = ch.tensor_power(n, IMPLEMENTATION_BUDGET)?.stinespring();
    let op = TypicalityOperator::new(ch, n, params, ctx)?;
    let mut w = op.contract(&dilation)?;
    let (preclip_norm, clipped) = clip(&mut w);
    let dim_in = dilation.dim_in() as f64;
    let diagnostics = Diagnostics {
        preclip_norm,
        clipped,
        threshold: op.threshold(),
        eta: op.eta(),
        input_sectors: op.input_sectors().len(),
        output_sectors: op.output_sectors().len(),
        admitted_pairs: op.admitted_pairs(),
        surviving_weight: w.frobenius_norm().powi(2) / dim_in,
    };
    log::debug!("n = {n}: {diagnostics:?}");
    Ok(Implementation {
        n,
        beta: ctx.beta(),
        w,
        dilation,
        channel: ch.clone(),
        diagnostics,
    })
}

impl Implementation {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// W with rows ordered X′^n ⊗ E^n.
    pub fn w(&self) -> &ComplexMatrix {
        &self.w
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    /// Dilation V^{⊗n} of the target E^{⊗n}.
    pub fn dilation(&self) -> &StinespringIsometry {
        &self.dilation
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    fn dims(&self) -> (usize, usize, usize) {
        (self.dilation.dim_in(), self.dilation.dim_out(), self.dilation.dim_env())
    }

    /// The same implementation with W multiplied by `factor` ∈ [0, 1].
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&factor) {
            return Err(Error::InvalidParameter(format!("scale factor {factor} outside [0, 1]")));
        }
        let mut out = self.clone();
        out.w = self.w.scale_real(factor);
        out.diagnostics.surviving_weight *= factor * factor;
        Ok(out)
    }

    /// ‖W†W − 1‖ restricted to positive excess: max(0, λ_max(W†W) − 1).
    pub fn contraction_excess(&self) -> f64 {
        (eigh(&self.w.adjoint_matmul(&self.w)).max() - 1.0).max(0.0)
    }

    /// Kraus operators W_e = (1 ⊗ ⟨e|) W of the W-branch.
    pub fn kraus_blocks(&self) -> Vec<ComplexMatrix> {
        let (din, dout, env) = self.dims();
        (0..env)
            .map(|e| ComplexMatrix::from_fn(dout, din, |x, i| self.w[(x * env + e, i)]))
            .collect()
    }

    /// tr_E(W X W†).
    pub fn apply_branch(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let (_, dout, env) = self.dims();
        let half = sqrtm_psd(x);
        let a = self.w.matmul(&half);
        let cols = a.cols();
        let b = a.reshape(dout, env * cols).expect("row-major layout");
        b.matmul_adjoint(&b)
    }

    /// n-copy output Gibbs state ω.
    pub fn completion_state(&self) -> DensityMatrix {
        let (_, h_out) = self.channel.hamiltonians().expect("checked at construction");
        let ctx = ThermoContext::new(self.beta).expect("positive β");
        gibbs_state(h_out, &ctx).tensor_power(self.n)
    }

    /// Kraus operators √(p_k μ_a)|ω_k⟩⟨a| of the completion branch.
    pub fn completion_kraus(&self) -> Vec<ComplexMatrix> {
        let (din, dout, _) = self.dims();
        let defect = &ComplexMatrix::identity(din) - &self.w.adjoint_matmul(&self.w);
        let d = eigh(&defect.hermitian_part());
        let omega = self.completion_state().eigen();
        let mut out = Vec::new();
        for a in 0..din {
            let mu = d.values[a];
            if mu <= COMPLETION_CUTOFF {
                continue;
            }
            let bra = d.vector(a);
            for k in 0..dout {
                let p = omega.values[k];
                if p * mu <= COMPLETION_CUTOFF {
                    continue;
                }
                let ket = omega.vector(k);
                let s = (p * mu).sqrt();
                let scaled: Vec<C64> = ket.iter().map(|z| z * s).collect();
                out.push(ComplexMatrix::outer(&scaled, &bra));
            }
        }
        out
    }

    /// The trace-preserving completion T(·) = tr_E W(·)W† + tr[(1 − W†W)(·)]ω.
    pub fn to_channel(&self) -> Result<Channel> {
        let mut kraus: Vec<ComplexMatrix> = self.kraus_blocks().into_iter().filter(|k| k.max_abs() > 0.0).collect();
        kraus.extend(self.completion_kraus());
        let (h_in, h_out) = self.channel.hamiltonians()?;
        Channel::from_kraus(kraus, Some(h_in.lift(self.n)), Some(h_out.lift(self.n)))
    }

    /// Per-copy work cost β⁻¹ ln λ_max(Γ′^{−1/2} T_W(Γ) Γ′^{−1/2}) / n of the
    /// W-branch, with Γ = e^{−βH_in}^{⊗n} and Γ′ = e^{−βH_out}^{⊗n}.
    /// An empty branch costs −∞.
    pub fn work_cost(&self, ctx: &ThermoContext) -> Result<f64> {
        let (h_in, h_out) = self.channel.hamiltonians()?;
        let beta = ctx.beta();
        let n = self.n;
        let (e_in, e_out) = (h_in.eigen().min(), h_out.eigen().min());
        let shift = |h: &crate::qcore::Hamiltonian, e0: f64, s: f64| {
            let m = h.matrix() - &ComplexMatrix::identity(h.dim()).scale_real(e0);
            expm_hermitian(&m.scale_real(s)).kron_power(n)
        };
        // shifted weights keep the exponentials in range
        let gamma_half = shift(h_in, e_in, -beta / 2.0);
        let inv_half = shift(h_out, e_out, beta / 2.0);
        let (_, dout, env) = self.dims();
        let a = self.w.matmul(&gamma_half);
        let cols = a.cols();
        let b = inv_half.matmul(&a.reshape(dout, env * cols).expect("row-major layout"));
        let top = eigh(&b.matmul_adjoint(&b).hermitian_part()).max();
        if top <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(top.ln() / (beta * n as f64) - (e_in - e_out))
    }

    /// Factors shared by the fidelity routines: Ã, B̃ as K × (dim_out^n·cols)
    /// matrices indexed [e, (x′, r)], for the purification (√σ)^{⊗n}.
    fn purified_branches(&self, sigma: &DensityMatrix) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
        let (din, dout, env) = self.dims();
        let local = self.channel.dim_in();
        if sigma.dim() != local {
            return Err(Error::DimensionMismatch {
                expected: local,
                found: sigma.dim(),
            });
        }
        let psi = sqrtm_psd(sigma.matrix()).kron_power(self.n);
        let a = self.w.matmul(&psi);
        let b = self.dilation.matrix().matmul(&psi);
        let layout = |m: &ComplexMatrix| {
            ComplexMatrix::from_fn(env, dout * din, |e, col| {
                let (x, r) = (col / din, col % din);
                m[(x * env + e, r)]
            })
        };
        Ok((layout(&a), layout(&b), psi))
    }

    /// Root fidelity between (T_W ⊗ id)(ψ_σ^{⊗n}) and ((E ⊗ id)(ψ_σ))^{⊗n}
    /// for the W-branch alone.
    pub fn iid_accuracy(&self, sigma: &DensityMatrix) -> Result<f64> {
        let (a, b, _) = self.purified_branches(sigma)?;
        Ok(trace_norm(&b.matmul_adjoint(&a)).clamp(0.0, 1.0))
    }

    /// As [`Self::iid_accuracy`] but with the completion branch included,
    /// so the compared states are both normalized.
    pub fn iid_accuracy_completed(&self, sigma: &DensityMatrix) -> Result<f64> {
        let (a, b, psi) = self.purified_branches(sigma)?;
        let (din, dout, env) = self.dims();
        let y = b.matmul_adjoint(&a);
        let mut g = y.matmul_adjoint(&y);

        let defect = &ComplexMatrix::identity(din) - &self.w.adjoint_matmul(&self.w);
        let tau = psi.transpose().matmul(&defect.transpose()).matmul(&psi.conj());
        let omega = self.completion_state();
        let blocks: Vec<ComplexMatrix> = (0..env)
            .map(|e| ComplexMatrix::new(dout, din, b.row(e).to_vec()).expect("block shape"))
            .collect();
        let mapped = exec::map_slice(&blocks, |be| omega.matrix().matmul(be).matmul(&tau.transpose()));
        for e in 0..env {
            for f in 0..env {
                let inner: C64 = blocks[e]
                    .data()
                    .iter()
                    .zip(mapped[f].data())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                g[(e, f)] += inner;
            }
        }
        let f: f64 = eigh(&g.hermitian_part())
            .values
            .iter()
            .map(|&l| l.max(0.0).sqrt())
            .sum();
        Ok(f.clamp(0.0, 1.0))
    }

    /// ‖T − E^{⊗n}‖⋄ for the completed map.
    pub fn diamond_accuracy(&self) -> Result<f64> {
        let target = self.channel.tensor_power(self.n, IMPLEMENTATION_BUDGET)?;
        diamond_distance(&self.to_channel()?, &target, SDP_EPS)
    }

    pub fn to_json(&self) -> String {
        let record = Record {
            n: self.n,
            beta: self.beta,
            dim_env: self.dilation.dim_env(),
            completion: "output-gibbs",
            channel: ChannelSpec::from_channel(&self.channel, Some(self.beta)),
            diagnostics: &self.diagnostics,
            w: &self.w,
        };
        serde_json::to_string(&record).expect("implementation serializes")
    }
}

/// Free-function forms of the methods above.
pub fn work_cost(imp: &Implementation, ctx: &ThermoContext) -> Result<f64> {
    imp.work_cost(ctx)
}

pub fn iid_accuracy(imp: &Implementation, sigma: &DensityMatrix) -> Result<f64> {
    imp.iid_accuracy(sigma)
}

pub fn diamond_accuracy(imp: &Implementation) -> Result<f64> {
    imp.diamond_accuracy()
}
