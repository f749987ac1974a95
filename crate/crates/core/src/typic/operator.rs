use serde::{Deserialize, Serialize};

use super::{default_energy_bin, energy_povm, spectrum_povm, TypicalPOVM};
use crate::channel::{Channel, StinespringIsometry};
use crate::error::{Error, Result};
use crate::exec;
use crate::optim::thermo_capacity;
use crate::qcore::{ComplexMatrix, Hamiltonian, ThermoContext};

/// Largest dimension of X′^n ⊗ E^n for which M is formed explicitly.
pub const EXPLICIT_MAX_DIM: usize = 1024;

/// Accuracy of the capacity solve used when no threshold is given.
const THRESHOLD_TOL: f64 = 1e-8;

/// Rounding allowance in the outcome constraint.
const CONSTRAINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalityParams {
    /// Per-copy slack in energy units. Overrides `eta_coefficient`.
    pub eta: Option<f64>,
    /// η = eta_coefficient / √n when `eta` is unset.
    pub eta_coefficient: f64,
    /// Per-copy work threshold; the channel's capacity when unset.
    pub threshold: Option<f64>,
    /// Energy bin width δ for both sides; (λ_max − λ_min)/(4n) when unset.
    pub energy_bin: Option<f64>,
    /// Return an empty operator instead of [`Error::EmptyConstraintSet`].
    pub allow_empty: bool,
}

impl Default for TypicalityParams {
    fn default() -> Self {
        Self {
            eta: None,
            eta_coefficient: 2.0,
            threshold: None,
            energy_bin: None,
            allow_empty: false,
        }
    }
}

impl TypicalityParams {
    pub fn with_threshold(mut self, t: f64) -> Self {
        self.threshold = Some(t);
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = Some(eta);
        self
    }

    pub fn allowing_empty(mut self) -> Self {
        self.allow_empty = true;
        self
    }

    pub fn slack(&self, n: usize) -> f64 {
        self.eta.unwrap_or(self.eta_coefficient / (n as f64).sqrt())
    }

    fn validate(&self) -> Result<()> {
        let eta_ok = self.eta.is_none_or(|e| e >= 0.0 && e.is_finite());
        if !eta_ok || !(self.eta_coefficient >= 0.0 && self.eta_coefficient.is_finite()) {
            return Err(Error::InvalidParameter("slack must be finite and nonnegative".into()));
        }
        if self.threshold.is_some_and(|t| t.is_nan() || t == f64::INFINITY) {
            return Err(Error::InvalidParameter("threshold must be a number below +∞".into()));
        }
        Ok(())
    }
}

/// Joint eigenspace P_s Q_h of the two commuting measurements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sector {
    pub entropy: f64,
    pub energy: f64,
    pub rank: usize,
    #[serde(skip)]
    pub projector: ComplexMatrix,
}

fn sectors(spectrum: &TypicalPOVM, energy: &TypicalPOVM) -> Vec<Sector> {
    let pairs: Vec<(usize, usize)> = (0..spectrum.len())
        .flat_map(|a| (0..energy.len()).map(move |b| (a, b)))
        .collect();
    exec::map_slice(&pairs, |&(a, b)| {
        let (p, q) = (&spectrum.elements[a], &energy.elements[b]);
        let prod = p.projector.matmul(&q.projector);
        let rank = prod.trace().re.round();
        (rank >= 1.0).then(|| Sector {
            entropy: p.label,
            energy: q.label,
            rank: rank as usize,
            projector: prod.hermitian_part(),
        })
    })
    .into_iter()
    .flatten()
    .collect()
}

fn side_sectors(h: &Hamiltonian, n: usize, bin: Option<f64>) -> Result<Vec<Sector>> {
    let delta = bin.unwrap_or_else(|| default_energy_bin(h, n));
    Ok(sectors(&spectrum_povm(h.dim(), n)?, &energy_povm(h, n, delta)?))
}

/// The outcome-constrained coherent sum over input sectors (s, h) and output
/// sectors (s′, h′) with −s′ + βh′ + s − βh ≤ β(T + η). Output projectors act
/// on X′^n and as the identity on E^n.
#[derive(Debug, Clone)]
pub struct TypicalityOperator {
    n: usize,
    beta: f64,
    threshold: f64,
    eta: f64,
    input: Vec<Sector>,
    output: Vec<Sector>,
    /// For each output sector, the indices of the admitted input sectors.
    admitted: Vec<Vec<usize>>,
}

impl TypicalityOperator {
    pub fn new(ch: &Channel, n: usize, params: &TypicalityParams, ctx: &ThermoContext) -> Result<Self> {
        params.validate()?;
        if n == 0 {
            return Err(Error::InvalidParameter("need n ≥ 1 copies".into()));
        }
        let (h_in, h_out) = ch.hamiltonians()?;
        let threshold = match params.threshold {
            Some(t) => t,
            None => thermo_capacity(ch, ctx, THRESHOLD_TOL)?.value,
        };
        let eta = params.slack(n);
        let input = side_sectors(h_in, n, params.energy_bin)?;
        let output = side_sectors(h_out, n, params.energy_bin)?;
        let beta = ctx.beta();
        let bound = beta * (threshold + eta);
        let admitted: Vec<Vec<usize>> = output
            .iter()
            .map(|o| {
                input
                    .iter()
                    .enumerate()
                    .filter(|(_, i)| {
                        let lhs = (i.entropy - beta * i.energy) - (o.entropy - beta * o.energy);
                        lhs <= bound + CONSTRAINT_TOL * (1.0 + bound.abs())
                    })
                    .map(|(k, _)| k)
                    .collect()
            })
            .collect();
        let op = Self {
            n,
            beta,
            threshold,
            eta,
            input,
            output,
            admitted,
        };
        if op.is_empty() && !params.allow_empty {
            return Err(Error::EmptyConstraintSet);
        }
        Ok(op)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn input_sectors(&self) -> &[Sector] {
        &self.input
    }

    pub fn output_sectors(&self) -> &[Sector] {
        &self.output
    }

    /// Number of admitted (input, output) sector pairs.
    pub fn admitted_pairs(&self) -> usize {
        self.admitted.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.admitted_pairs() == 0
    }

    fn check(&self, v: &StinespringIsometry) -> Result<(usize, usize)> {
        let din = self.input.first().map_or(0, |s| s.projector.rows());
        let dout = self.output.first().map_or(0, |s| s.projector.rows());
        if v.dim_in() != din || v.dim_out() != dout {
            return Err(Error::ShapeMismatch(format!(
                "isometry {}→{} against sectors {din}→{dout}",
                v.dim_in(),
                v.dim_out()
            )));
        }
        Ok((din, dout))
    }

    /// W = M V = Σ_{s′h′} (Π_{s′h′} ⊗ 1_E) V Σ_{admitted sh} Π_{sh}, for the
    /// n-copy dilation `v` with rows ordered X′^n ⊗ E^n.
    pub fn contract(&self, v: &StinespringIsometry) -> Result<ComplexMatrix> {
        let (din, dout) = self.check(v)?;
        let env = v.dim_env();
        let vm = v.matrix();
        let parts = exec::map_range(self.output.len(), |o| {
            let admitted = &self.admitted[o];
            if admitted.is_empty() {
                return None;
            }
            let mut allowed = ComplexMatrix::zeros(din, din);
            for &k in admitted {
                allowed += &self.input[k].projector;
            }
            let y = vm.matmul(&allowed).reshape(dout, env * din).expect("row-major layout");
            Some(self.output[o].projector.matmul(&y))
        });
        let mut w = ComplexMatrix::zeros(dout, env * din);
        for p in parts.into_iter().flatten() {
            w += &p;
        }
        Ok(w.reshape(dout * env, din).expect("row-major layout"))
    }

    /// M itself on X′^n ⊗ E^n, equal to W V†.
    pub fn explicit(&self, v: &StinespringIsometry) -> Result<ComplexMatrix> {
        let dim = v.dim_out() * v.dim_env();
        if dim > EXPLICIT_MAX_DIM {
            return Err(Error::BudgetExceeded {
                required: dim,
                budget: EXPLICIT_MAX_DIM,
            });
        }
        Ok(self.contract(v)?.matmul_adjoint(v.matrix()))
    }
}

/// M for `ch` on n copies, formed explicitly.
pub fn typicality_operator(
    ch: &Channel,
    n: usize,
    params: &TypicalityParams,
    ctx: &ThermoContext,
) -> Result<ComplexMatrix> {
    let v = ch.tensor_power(n, crate::channel::DEFAULT_BUDGET)?.stinespring();
    TypicalityOperator::new(ch, n, params, ctx)?.explicit(&v)
}
