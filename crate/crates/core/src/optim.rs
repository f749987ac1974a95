//! Thermodynamic capacity T(E) = max_σ [F(E(σ)) − F(σ)] and relatives.
//!
//! The solver works with the β-scaled objective
//! g(σ) = tr(Aσ) + S(σ) − S(E(σ)), A = β(E†(H′) − H),
//! which is concave since S(σ) − S(E(σ)) is a conditional entropy of the
//! Stinespring output. Each iteration proposes an alternating-maximization
//! step σ ∝ exp(A + E†ln E(σ)) and a conditional-gradient step towards the
//! top eigenvector of ∇g with exact line search, keeping the better one.
//! The conditional-gradient gap λ_max(∇g) − tr(∇g σ) bounds the distance to
//! the optimum and is the returned certificate.

use serde::Serialize;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::qcore::eigen::eigh;
use crate::qcore::eigen::eigvalsh;
use crate::qcore::entropy::{free_energy, shannon_entropy};
use crate::qcore::{ComplexMatrix, DensityMatrix, ThermoContext};

/// Iteration cap of the capacity solver.
pub const MAX_ITERATIONS: usize = 10_000;

/// Relative size of the maximally mixed admixture used before taking logs.
const LOG_REGULARIZATION: f64 = 1e-10;

const LINE_SEARCH_STEPS: usize = 54;

/// Iterations without a smaller certificate before giving up.
const STALL_LIMIT: usize = 200;

#[derive(Debug, Clone, Serialize)]
pub struct CapacityResult {
    /// F(E(σ*)) − F(σ*) in energy units.
    pub value: f64,
    pub maximizer: DensityMatrix,
    /// Upper bound on T(E) − value, in energy units.
    pub certificate_gap: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Target certificate gap, energy units.
    pub tol: f64,
    pub max_iterations: usize,
}

impl SolverOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            max_iterations: MAX_ITERATIONS,
        }
    }
}

/// F(E(σ)) − F(σ).
pub fn capacity_objective(ch: &Channel, sigma: &DensityMatrix, ctx: &ThermoContext) -> Result<f64> {
    let (h_in, h_out) = ch.hamiltonians()?;
    let out = ch.apply(sigma)?;
    Ok(free_energy(&out, h_out, ctx)? - free_energy(sigma, h_in, ctx)?)
}

/// T(E) with certificate gap ≤ `tol` (energy units).
///
/// When the maximizer is rank deficient the regularized logarithms put a
/// floor of roughly 1e−9 on the attainable gap.
pub fn thermo_capacity(ch: &Channel, ctx: &ThermoContext, tol: f64) -> Result<CapacityResult> {
    thermo_capacity_with(ch, ctx, SolverOptions::new(tol))
}

pub fn thermo_capacity_with(ch: &Channel, ctx: &ThermoContext, opts: SolverOptions) -> Result<CapacityResult> {
    let (h_in, h_out) = ch.hamiltonians()?;
    let beta = ctx.beta();
    let a = (&ch.adjoint_apply(h_out.matrix())? - h_in.matrix()).scale_real(beta);
    let sol = Ascent::new(ch, a).run(opts.tol * beta, opts.max_iterations)?;
    Ok(CapacityResult {
        value: capacity_objective(ch, &sol.sigma, ctx)?,
        maximizer: sol.sigma,
        certificate_gap: sol.gap / beta,
        iterations: sol.iterations,
    })
}

/// min_σ [S(E(σ)) − S(σ)] in nats, to within `tol`.
///
/// Solved independently of [`thermo_capacity`] by mirror descent on the
/// logarithm of the input state with an adaptive step.
pub fn min_entropy_gain(ch: &Channel, tol: f64) -> Result<f64> {
    GainDescent { ch }.run(tol, MAX_ITERATIONS)
}

/// T(F) − T(E): net work per copy needed to turn uses of E into uses of F.
pub fn interconversion_rate(e: &Channel, f: &Channel, ctx: &ThermoContext, tol: f64) -> Result<f64> {
    Ok(thermo_capacity(f, ctx, tol)?.value - thermo_capacity(e, ctx, tol)?.value)
}

struct GainDescent<'a> {
    ch: &'a Channel,
}

fn traceless(x: &ComplexMatrix) -> ComplexMatrix {
    let d = x.rows();
    let shift = x.trace().re / d as f64;
    x - &ComplexMatrix::identity(d).scale_real(shift)
}

/// ln on the support of a PSD matrix, zero on its kernel.
fn support_log(x: &ComplexMatrix) -> ComplexMatrix {
    let e = eigh(x);
    let cut = 1e-14 * e.max().max(f64::MIN_POSITIVE);
    e.map(|v| if v > cut { v.ln() } else { 0.0 })
}

impl GainDescent<'_> {
    /// ρ = exp(L)/tr exp(L) together with ln ρ, which is exact even where ρ
    /// underflows.
    fn state(log: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
        let e = eigh(log);
        let top = e.max();
        let z: f64 = e.values.iter().map(|&x| (x - top).exp()).sum();
        let shift = top + z.ln();
        let rho = e.map(|x| (x - shift).exp()).hermitian_part();
        let ln_rho = e.map(|x| x - shift).hermitian_part();
        (rho, ln_rho)
    }

    fn gain(&self, rho: &ComplexMatrix) -> f64 {
        let out = self.ch.apply_operator(rho).expect("dimensions checked");
        shannon_entropy(&eigvalsh(&out)) - shannon_entropy(&eigvalsh(rho))
    }

    /// ln ρ − E†(ln E(ρ)), the gradient of the gain up to a multiple of 1,
    /// with the certificate ⟨∇, ρ⟩ − λ_min(∇).
    fn certificate(&self, rho: &ComplexMatrix, ln_rho: &ComplexMatrix) -> (ComplexMatrix, f64) {
        let out = self.ch.apply_operator(rho).expect("dimensions checked");
        let pulled = self.ch.adjoint_apply(&support_log(&out)).expect("dimensions checked");
        let grad = (ln_rho - &pulled).hermitian_part();
        let gap = (grad.inner_re(rho) - eigh(&grad).min()).max(0.0);
        (grad, gap)
    }

    fn run(&self, tol: f64, max_iterations: usize) -> Result<f64> {
        let d = self.ch.dim_in();
        let mut log = ComplexMatrix::zeros(d, d);
        let (rho, ln_rho) = Self::state(&log);
        let mut value = self.gain(&rho);
        let (mut grad, mut gap) = self.certificate(&rho, &ln_rho);
        let mut step = 1.0f64;
        let mut best_gap = gap;
        let mut stalled = 0;
        for it in 0..max_iterations {
            if gap <= tol {
                return Ok(value);
            }
            // below rounding the values tie, and the certificate decides
            let slack = 4.0 * f64::EPSILON * value.abs().max(1.0);
            let mut next = None;
            let mut tie: Option<(ComplexMatrix, f64, (ComplexMatrix, f64))> = None;
            let mut trial_step = step;
            for _ in 0..60 {
                let trial_log = &log - &grad.scale_real(trial_step);
                let (trial, ln_trial) = Self::state(&trial_log);
                let v = self.gain(&trial);
                if v < value - slack {
                    next = Some((trial_log, v, self.certificate(&trial, &ln_trial)));
                    break;
                }
                if v <= value + slack {
                    let cert = self.certificate(&trial, &ln_trial);
                    if cert.1 < gap {
                        next = Some((trial_log, v, cert));
                        break;
                    }
                    if tie.as_ref().is_none_or(|t| cert.1 < t.2 .1) {
                        tie = Some((trial_log, v, cert));
                    }
                }
                trial_step *= 0.5;
            }
            step = trial_step;
            let Some((l, v, (g, c))) = next.or(tie) else {
                log::debug!("entropy-gain descent found no admissible step at iteration {it}");
                return Err(Error::NotConverged {
                    iterations: it,
                    gap,
                    value,
                });
            };
            // Barzilai–Borwein step on the traceless parts
            let ds = traceless(&(&l - &log));
            let dg = traceless(&(&g - &grad));
            let curvature = ds.inner_re(&dg);
            step = if curvature > 0.0 {
                (ds.inner_re(&ds) / curvature).clamp(1e-6, 1e6)
            } else {
                (step * 1.5).min(1e6)
            };
            (log, value, grad, gap) = (l, v, g, c);
            if gap < best_gap {
                best_gap = gap;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= STALL_LIMIT {
                    return Err(Error::NotConverged {
                        iterations: it + 1,
                        gap,
                        value,
                    });
                }
            }
        }
        Err(Error::NotConverged {
            iterations: max_iterations,
            gap,
            value,
        })
    }
}

struct Solution {
    sigma: DensityMatrix,
    gap: f64,
    iterations: usize,
}

struct Ascent<'a> {
    ch: &'a Channel,
    a: ComplexMatrix,
}

/// ln((1−δ)X + δ·1/d) for PSD X.
fn regularized_log(x: &ComplexMatrix) -> ComplexMatrix {
    let d = x.rows() as f64;
    eigh(x).map(|v| ((1.0 - LOG_REGULARIZATION) * v.max(0.0) + LOG_REGULARIZATION / d).ln())
}

impl<'a> Ascent<'a> {
    fn new(ch: &'a Channel, a: ComplexMatrix) -> Self {
        Self { ch, a }
    }

    fn value(&self, sigma: &ComplexMatrix) -> f64 {
        let out = self.ch.apply_operator(sigma).expect("dimensions checked");
        self.a.inner_re(sigma) + shannon_entropy(&eigvalsh(sigma)) - shannon_entropy(&eigvalsh(&out))
    }

    /// A − ln σ + E†(ln E(σ)).
    fn gradient(&self, sigma: &ComplexMatrix) -> ComplexMatrix {
        let out = self.ch.apply_operator(sigma).expect("dimensions checked");
        let pulled = self
            .ch
            .adjoint_apply(&regularized_log(&out))
            .expect("dimensions checked");
        (&(&self.a - &regularized_log(sigma)) + &pulled).hermitian_part()
    }

    fn alternating_step(&self, sigma: &ComplexMatrix) -> ComplexMatrix {
        let out = self.ch.apply_operator(sigma).expect("dimensions checked");
        let b = &self.a
            + &self
                .ch
                .adjoint_apply(&regularized_log(&out))
                .expect("dimensions checked");
        let e = eigh(&b);
        let top = e.max();
        let w = e.map(|x| (x - top).exp());
        let z = w.trace().re;
        w.scale_real(1.0 / z).hermitian_part()
    }

    /// Exact line search on the concave map t ↦ g((1−t)σ + tτ), by
    /// bisection on the sign of its derivative tr(∇g(σ_t)(τ − σ)).
    fn line_search(&self, sigma: &ComplexMatrix, target: &ComplexMatrix) -> (ComplexMatrix, f64) {
        let dir = target - sigma;
        let point = |t: f64| &sigma.scale_real(1.0 - t) + &target.scale_real(t);
        let slope = |t: f64| self.gradient(&point(t)).inner_re(&dir);
        let t = if slope(1.0) >= 0.0 {
            1.0
        } else if slope(0.0) <= 0.0 {
            0.0
        } else {
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..LINE_SEARCH_STEPS {
                let mid = 0.5 * (lo + hi);
                if slope(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let next = point(t);
        let v = self.value(&next);
        (next, v)
    }

    fn run(&self, tol: f64, max_iterations: usize) -> Result<Solution> {
        let d = self.ch.dim_in();
        let mut sigma = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
        let mut value = self.value(&sigma);
        let mut gap = f64::INFINITY;
        let mut stalled = 0;
        let mut best_gap = f64::INFINITY;
        let mut iterations = 0;
        for it in 0..max_iterations {
            iterations = it + 1;
            let grad = self.gradient(&sigma);
            let e = eigh(&grad);
            gap = (e.max() - grad.inner_re(&sigma)).max(0.0);
            if gap <= tol {
                return Ok(Solution {
                    sigma: DensityMatrix::from_trusted(sigma),
                    gap,
                    iterations: it,
                });
            }
            // lowest-index eigenvector among the maximizers
            let top = e.max();
            let k = (0..d)
                .find(|&k| e.values[k] >= top - 1e-12 * top.abs().max(1.0))
                .unwrap_or(d - 1);
            let v = e.vector(k);
            let vertex = ComplexMatrix::outer(&v, &v);

            let ba = self.alternating_step(&sigma);
            let ba_value = self.value(&ba);
            let (fw, fw_value) = self.line_search(&sigma, &vertex);
            let (next, next_value) = if ba_value >= fw_value {
                (ba, ba_value)
            } else {
                (fw, fw_value)
            };

            // rounding can hide genuine progress near the optimum, so ties
            // are accepted and stalling is judged by the certificate instead
            if next_value >= value - 4.0 * f64::EPSILON * value.abs().max(1.0) {
                sigma = next;
                value = next_value;
            }
            if gap < best_gap {
                best_gap = gap;
                stalled = 0;
            } else {
                stalled += 1;
            }
            if stalled >= STALL_LIMIT {
                log::debug!("capacity solver stalled at iteration {it} with gap {gap:e}");
                break;
            }
        }
        Err(Error::NotConverged { iterations, gap, value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{amplitude_damping, depolarizing, erasure, identity, unitary};
    use crate::qcore::Hamiltonian;
    use crate::random;

    fn ctx(beta: f64) -> ThermoContext {
        ThermoContext::new(beta).unwrap()
    }

    #[test]
    fn objective_examples() {
        let h = Hamiltonian::diag(&[0.0, 1.0]);
        let mut rng = random::seeded(1);
        let sigma = random::mixed_state(2, &mut rng);
        let id = identity(2).with_hamiltonian(h.clone()).unwrap();
        assert!(capacity_objective(&id, &sigma, &ctx(1.0)).unwrap().abs() < 1e-14);

        let er = erasure(2).with_hamiltonian(Hamiltonian::zero(2)).unwrap();
        let mm = DensityMatrix::maximally_mixed(2);
        let v = capacity_objective(&er, &mm, &ctx(1.0)).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-14);

        // amplitude damping at the maximally mixed input, by hand:
        // E(σ) = diag(0.65, 0.35), F(E(σ)) − F(σ) = 0.35 − H(0.65) − 0.5 + ln 2
        let ad = amplitude_damping(0.3).with_hamiltonian(h).unwrap();
        let v = capacity_objective(&ad, &mm, &ctx(1.0)).unwrap();
        let h2 = -(0.65f64 * 0.65f64.ln()) - 0.35 * 0.35f64.ln();
        assert!((v - (0.35 - h2 - 0.5 + 2f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn identity_has_zero_capacity() {
        let ch = identity(3)
            .with_hamiltonian(Hamiltonian::diag(&[0.0, 0.4, 1.1]))
            .unwrap();
        let r = thermo_capacity(&ch, &ctx(1.3), 1e-10).unwrap();
        assert!(r.value.abs() < 1e-9);
    }

    #[test]
    fn landauer() {
        for beta in [0.5, 1.0, 2.0] {
            let ch = erasure(2).with_hamiltonian(Hamiltonian::zero(2)).unwrap();
            let r = thermo_capacity(&ch, &ctx(beta), 1e-9).unwrap();
            assert!((r.value - 2f64.ln() / beta).abs() < 1e-9, "beta {beta}: {}", r.value);
        }
    }

    #[test]
    fn erasure_with_energy_gives_log_partition_function() {
        let ch = erasure(2).with_hamiltonian(Hamiltonian::diag(&[0.0, 1.0])).unwrap();
        let r = thermo_capacity(&ch, &ctx(1.0), 1e-10).unwrap();
        assert!((r.value - (1.0 + (-1.0f64).exp()).ln()).abs() < 1e-9);
    }

    #[test]
    fn unitary_capacity_is_energy_gain() {
        // σ ↦ XσX with H = diag(0,1): best input is the ground state, gain 1
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let ch = unitary(x)
            .unwrap()
            .with_hamiltonian(Hamiltonian::diag(&[0.0, 1.0]))
            .unwrap();
        let r = thermo_capacity(&ch, &ctx(1.0), 1e-9).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn certificate_brackets_value() {
        let mut rng = random::seeded(11);
        for _ in 0..5 {
            let ch = random::channel(2, 2, 2, &mut rng)
                .with_hamiltonians(
                    Some(random::hamiltonian(2, &mut rng)),
                    Some(random::hamiltonian(2, &mut rng)),
                )
                .unwrap();
            let r = thermo_capacity(&ch, &ctx(1.0), 1e-9).unwrap();
            assert!(r.certificate_gap <= 1e-9);
            for _ in 0..200 {
                let s = random::mixed_state(2, &mut rng);
                let v = capacity_objective(&ch, &s, &ctx(1.0)).unwrap();
                assert!(v <= r.value + r.certificate_gap + 1e-9);
            }
        }
    }

    #[test]
    fn entropy_gain_examples() {
        assert!(min_entropy_gain(&identity(2), 1e-10).unwrap().abs() < 1e-9);
        assert!((min_entropy_gain(&erasure(2), 1e-10).unwrap() + 2f64.ln()).abs() < 1e-9);
        assert!(min_entropy_gain(&depolarizing(2, 1.0), 1e-10).unwrap().abs() < 1e-9);
    }

    #[test]
    fn interconversion_examples() {
        let z = Hamiltonian::zero(2);
        let id = identity(2).with_hamiltonian(z.clone()).unwrap();
        let er = erasure(2).with_hamiltonian(z).unwrap();
        let c = ctx(2.0);
        assert!(interconversion_rate(&er, &er, &c, 1e-10).unwrap().abs() < 1e-12);
        let r = interconversion_rate(&id, &er, &c, 1e-10).unwrap();
        assert!((r - 2f64.ln() / 2.0).abs() < 1e-9);
    }

    #[test]
    fn missing_hamiltonians() {
        assert!(matches!(
            thermo_capacity(&identity(2), &ctx(1.0), 1e-6),
            Err(Error::MissingHamiltonian(_))
        ));
    }
}
