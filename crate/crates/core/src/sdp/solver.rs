//! Infeasible primal–dual path following with Nesterov–Todd scaling and a
//! Mehrotra predictor–corrector.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use super::{SdpProblem, SdpSolution, SdpStatus, MAX_BLOCK_DIM};
use crate::error::{Error, Result};
use crate::exec;
use crate::qcore::eigen::eigh;
use crate::qcore::ComplexMatrix;

const MAX_ITERATIONS: usize = 120;
const DIVERGENCE: f64 = 1e12;
const STEP_FRACTION: f64 = 0.98;
/// Largest residual accepted from the best iterate after a numerical breakdown.
const NEAR_OPTIMAL_TOL: f64 = 1e-6;

/// Per-block scaling data: W = GG† with W S W = X, and V = G†SG = G⁻¹XG⁻† diagonal.
struct Scaling {
    g: ComplexMatrix,
    g_inv: ComplexMatrix,
    w: ComplexMatrix,
    v: Vec<f64>,
}

fn nt_scaling(x: &ComplexMatrix, s: &ComplexMatrix) -> Result<Scaling> {
    let ex = eigh(x);
    if ex.min() <= 0.0 {
        return Err(Error::NumericalFailure("primal iterate left the cone".into()));
    }
    let x_half = ex.map(f64::sqrt);
    let x_inv_half = ex.map(|v| 1.0 / v.sqrt());
    let m = x_half.matmul(s).matmul(&x_half).hermitian_part();
    let em = eigh(&m);
    if em.min() <= 0.0 {
        return Err(Error::NumericalFailure("dual iterate left the cone".into()));
    }
    let d = x.rows();
    let q = &em.vectors;
    let lam = &em.values;
    let g = x_half.matmul(&ComplexMatrix::from_fn(d, d, |i, k| q[(i, k)] * lam[k].powf(-0.25)));
    let g_inv = ComplexMatrix::from_fn(d, d, |k, i| q[(i, k)].conj() * lam[k].powf(0.25)).matmul(&x_inv_half);
    let w = g.matmul_adjoint(&g).hermitian_part();
    let v = lam.iter().map(|l| l.sqrt()).collect();
    Ok(Scaling { g, g_inv, w, v })
}

/// Largest α ≤ ∞ keeping diag(v) + αD ⪰ 0.
fn max_step(v: &[f64], d: &ComplexMatrix) -> f64 {
    let n = v.len();
    let scaled = ComplexMatrix::from_fn(n, n, |i, j| d[(i, j)] / (v[i] * v[j]).sqrt());
    let lmin = eigh(&scaled).min();
    if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    }
}

fn inner(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.inner_re(y)).sum()
}

fn frob(a: &[ComplexMatrix]) -> f64 {
    a.iter().map(|x| x.frobenius_norm().powi(2)).sum::<f64>().sqrt()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Schur complement M_ij = Σ_b ⟨A_ib, W_b A_jb W_b⟩.
fn schur_complement(p: &SdpProblem, sc: &[Scaling]) -> Mat<f64> {
    let m = p.num_constraints();
    let cons = p.constraints();
    let columns: Vec<Vec<f64>> = exec::map_range(m, |j| {
        let mut wajw: Vec<Option<ComplexMatrix>> = vec![None; sc.len()];
        for (b, a) in &cons[j].terms {
            let w = &sc[*b].w;
            let d = w.rows();
            let slot = wajw[*b].get_or_insert_with(|| ComplexMatrix::zeros(d, d));
            // W A W = Σ_(p,q) a · w_{:,p} w_{q,:}
            for &(pi, qi, val) in a.entries() {
                for r in 0..d {
                    let left = w[(r, pi)] * val;
                    let row = w.row(qi);
                    let out = &mut slot.data_mut()[r * d..(r + 1) * d];
                    for (o, x) in out.iter_mut().zip(row) {
                        *o += left * x;
                    }
                }
            }
        }
        (0..m)
            .map(|i| {
                cons[i]
                    .terms
                    .iter()
                    .map(|(b, a)| wajw[*b].as_ref().map_or(0.0, |g| a.inner(g)))
                    .sum()
            })
            .collect()
    });
    Mat::from_fn(m, m, |i, j| 0.5 * (columns[j][i] + columns[i][j]))
}

struct Step {
    dx: Vec<ComplexMatrix>,
    dy: Vec<f64>,
    ds: Vec<ComplexMatrix>,
    ap: f64,
    ad: f64,
}

/// Predictor–corrector search direction and step lengths from (x, y, s).
fn newton_step(
    p: &SdpProblem,
    x: &[ComplexMatrix],
    s: &[ComplexMatrix],
    rp: &[f64],
    rd: &[ComplexMatrix],
    mu: f64,
    nf: f64,
) -> Result<Step> {
    let m = p.num_constraints();
    let sc: Vec<Scaling> = x
        .iter()
        .zip(s)
        .map(|(xb, sb)| nt_scaling(xb, sb))
        .collect::<Result<_>>()?;
    let schur = schur_complement(p, &sc);
    let chol = schur
        .llt(Side::Lower)
        .map_err(|_| Error::NumericalFailure("Schur complement is not positive definite".into()))?;

    // Direction for a given right-hand side R of the scaled complementarity equation.
    let direction = |r: &[ComplexMatrix]| -> Result<(Vec<ComplexMatrix>, Vec<f64>, Vec<ComplexMatrix>)> {
        let rc: Vec<ComplexMatrix> = sc
            .iter()
            .zip(r)
            .map(|(k, rb)| {
                let n = k.v.len();
                let hat = ComplexMatrix::from_fn(n, n, |i, j| rb[(i, j)] / (k.v[i] + k.v[j]));
                k.g.matmul(&hat).matmul_adjoint(&k.g)
            })
            .collect();
        let wrdw: Vec<ComplexMatrix> = sc.iter().zip(rd).map(|(k, r)| k.w.sandwich(r)).collect();
        let diff: Vec<ComplexMatrix> = rc.iter().zip(&wrdw).map(|(a, b)| a - b).collect();
        let adiff = p.apply(&diff);
        let rhs: Vec<f64> = rp.iter().zip(&adiff).map(|(a, b)| a - b).collect();
        let mut sol = Mat::from_fn(m, 1, |i, _| rhs[i]);
        chol.solve_in_place(sol.as_mut());
        let dy: Vec<f64> = (0..m).map(|i| sol[(i, 0)]).collect();
        if dy.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure("non-finite search direction".into()));
        }
        let atdy = p.adjoint(&dy);
        let ds: Vec<ComplexMatrix> = rd.iter().zip(&atdy).map(|(r, a)| (r - a).hermitian_part()).collect();
        let dx: Vec<ComplexMatrix> = rc
            .iter()
            .zip(sc.iter().zip(&ds))
            .map(|(r, (k, d))| (r - &k.w.sandwich(d)).hermitian_part())
            .collect();
        Ok((dx, dy, ds))
    };
    let scaled = |dx: &[ComplexMatrix], ds: &[ComplexMatrix]| -> (Vec<ComplexMatrix>, Vec<ComplexMatrix>) {
        let sx = sc
            .iter()
            .zip(dx)
            .map(|(k, d)| k.g_inv.matmul(d).matmul_adjoint(&k.g_inv))
            .collect();
        let ss = sc
            .iter()
            .zip(ds)
            .map(|(k, d)| k.g.adjoint_matmul(d).matmul(&k.g))
            .collect();
        (sx, ss)
    };
    let steps = |sx: &[ComplexMatrix], ss: &[ComplexMatrix]| -> (f64, f64) {
        let ap = sc
            .iter()
            .zip(sx)
            .map(|(k, d)| max_step(&k.v, d))
            .fold(f64::INFINITY, f64::min);
        let ad = sc
            .iter()
            .zip(ss)
            .map(|(k, d)| max_step(&k.v, d))
            .fold(f64::INFINITY, f64::min);
        (ap, ad)
    };

    // predictor
    let r_aff: Vec<ComplexMatrix> = sc
        .iter()
        .map(|k| ComplexMatrix::from_real_diag(&k.v.iter().map(|v| -2.0 * v * v).collect::<Vec<_>>()))
        .collect();
    let (dx_a, _, ds_a) = direction(&r_aff)?;
    let (sx_a, ss_a) = scaled(&dx_a, &ds_a);
    let (ap, ad) = steps(&sx_a, &ss_a);
    let (ap, ad) = (ap.min(1.0), ad.min(1.0));
    let x_aff: Vec<ComplexMatrix> = x.iter().zip(&dx_a).map(|(a, d)| a + &d.scale_real(ap)).collect();
    let s_aff: Vec<ComplexMatrix> = s.iter().zip(&ds_a).map(|(a, d)| a + &d.scale_real(ad)).collect();
    let mu_aff = inner(&x_aff, &s_aff) / nf;
    let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

    // corrector
    let r_cor: Vec<ComplexMatrix> = sc
        .iter()
        .zip(sx_a.iter().zip(&ss_a))
        .map(|(k, (dx, ds))| {
            let n = k.v.len();
            let cross = &dx.matmul(ds) + &ds.matmul(dx);
            ComplexMatrix::from_fn(n, n, |i, j| {
                let base = if i == j {
                    2.0 * (sigma * mu - k.v[i] * k.v[i])
                } else {
                    0.0
                };
                -cross[(i, j)] + base
            })
        })
        .collect();
    let (dx, dy, ds) = direction(&r_cor)?;
    let (sx, ss) = scaled(&dx, &ds);
    let (ap, ad) = steps(&sx, &ss);
    let ap = (STEP_FRACTION * ap).min(1.0);
    let ad = (STEP_FRACTION * ad).min(1.0);
    Ok(Step { dx, dy, ds, ap, ad })
}

pub fn solve_sdp(p: &SdpProblem, eps: f64) -> Result<SdpSolution> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("SDP accuracy must be positive".into()));
    }
    if let Some(&big) = p.blocks().iter().find(|&&d| d > MAX_BLOCK_DIM) {
        return Err(Error::BudgetExceeded {
            required: big,
            budget: MAX_BLOCK_DIM,
        });
    }
    let m = p.num_constraints();
    let blocks = p.blocks().to_vec();
    let n_total: usize = blocks.iter().sum();
    if n_total == 0 {
        return Err(Error::InvalidParameter("problem has no variables".into()));
    }
    let b: Vec<f64> = p.constraints().iter().map(|c| c.rhs).collect();
    let c: Vec<ComplexMatrix> = blocks
        .iter()
        .zip(p.objective())
        .map(|(&d, o)| o.clone().unwrap_or_else(|| ComplexMatrix::zeros(d, d)))
        .collect();
    let a_norms = p.constraint_norms();
    let c_norm = frob(&c);
    let b_norm = norm2(&b);

    let nf = n_total as f64;
    let xi = a_norms
        .iter()
        .zip(&b)
        .map(|(an, bi)| nf * (1.0 + bi.abs()) / (1.0 + an))
        .fold(10f64.max(nf.sqrt()), f64::max);
    let eta = a_norms.iter().copied().fold(10f64.max(nf.sqrt()).max(c_norm), f64::max);
    let mut x: Vec<ComplexMatrix> = blocks
        .iter()
        .map(|&d| ComplexMatrix::identity(d).scale_real(xi))
        .collect();
    let mut s: Vec<ComplexMatrix> = blocks
        .iter()
        .map(|&d| ComplexMatrix::identity(d).scale_real(eta))
        .collect();
    let mut y = vec![0.0; m];
    let mut best: Option<SdpSolution> = None;

    for it in 0..MAX_ITERATIONS {
        let ax = p.apply(&x);
        let rp: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let aty = p.adjoint(&y);
        let rd: Vec<ComplexMatrix> = (0..blocks.len()).map(|k| &(&c[k] - &s[k]) - &aty[k]).collect();
        let pobj = inner(&c, &x);
        let dobj: f64 = b.iter().zip(&y).map(|(bi, yi)| bi * yi).sum();
        let mu = inner(&x, &s) / nf;
        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let pinf = norm2(&rp) / (1.0 + b_norm);
        let dinf = frob(&rd) / (1.0 + c_norm);
        log::trace!("sdp it {it}: p {pobj:.10e} d {dobj:.10e} gap {rel_gap:.2e} pinf {pinf:.2e} dinf {dinf:.2e}");

        let current = SdpSolution {
            status: SdpStatus::Optimal,
            primal_value: pobj,
            dual_value: dobj,
            x: x.clone(),
            y: y.clone(),
            s: s.clone(),
            iterations: it,
            relative_gap: rel_gap,
            primal_infeasibility: pinf,
            dual_infeasibility: dinf,
        };
        if rel_gap <= eps && pinf <= eps && dinf <= eps {
            return Ok(current);
        }
        if best.as_ref().is_none_or(|b| current.residual() < b.residual()) {
            best = Some(SdpSolution {
                status: SdpStatus::NearOptimal,
                ..current
            });
        }
        if frob(&x) > DIVERGENCE * (1.0 + xi) || norm2(&y) > DIVERGENCE * (1.0 + eta) || !pobj.is_finite() {
            return Err(Error::Infeasible);
        }

        let step = match newton_step(p, &x, &s, &rp, &rd, mu, nf) {
            Ok(step) => step,
            // roundoff pushes an iterate out of the cone near the optimum
            Err(Error::NumericalFailure(why)) => {
                return match best.take() {
                    Some(b) if b.residual() <= NEAR_OPTIMAL_TOL => {
                        log::debug!("sdp breakdown at iteration {it} ({why}); returning best iterate");
                        Ok(b)
                    }
                    _ => Err(Error::NumericalFailure(why)),
                };
            }
            Err(e) => return Err(e),
        };
        let Step { dx, dy, ds, ap, ad } = step;

        for k in 0..blocks.len() {
            x[k] = (&x[k] + &dx[k].scale_real(ap)).hermitian_part();
            s[k] = (&s[k] + &ds[k].scale_real(ad)).hermitian_part();
        }
        for (yi, d) in y.iter_mut().zip(&dy) {
            *yi += ad * d;
        }
    }
    if let Some(b) = best.filter(|b| b.residual() <= NEAR_OPTIMAL_TOL) {
        return Ok(b);
    }
    Err(Error::NotConverged {
        iterations: MAX_ITERATIONS,
        gap: f64::NAN,
        value: inner(&c, &x),
    })
}
