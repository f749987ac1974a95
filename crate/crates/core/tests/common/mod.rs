//! Reference computations that avoid the library's solvers.
#![allow(dead_code)]

use rand::Rng;
use thermocap::channel::Channel;
use thermocap::exec;
use thermocap::qcore::{ComplexMatrix, Hamiltonian, ThermoContext, C64};

fn h2(p: f64) -> f64 {
    let f = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    f(p) + f(1.0 - p)
}

/// Eigenvalues of a 2×2 Hermitian matrix [[a, b], [b̄, d]].
fn eig2(a: f64, d: f64, b: C64) -> (f64, f64) {
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean + r, mean - r)
}

fn entropy2(a: f64, d: f64, b: C64) -> f64 {
    let (l1, l2) = eig2(a, d, b);
    let f = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    f(l1) + f(l2)
}

/// Max of F(E(ρ)) − F(ρ) over a cubic grid of Bloch vectors with |r| ≤ 1,
/// for a qubit-to-qubit channel. Every quantity is evaluated in closed form.
pub fn bloch_grid_capacity(ch: &Channel, ctx: &ThermoContext, step: f64) -> f64 {
    assert_eq!((ch.dim_in(), ch.dim_out()), (2, 2));
    let beta = ctx.beta();
    let h_in = ch.h_in().expect("input Hamiltonian").matrix().clone();
    let h_out = ch.h_out().expect("output Hamiltonian").matrix().clone();
    let paulis = [
        ComplexMatrix::identity(2),
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(0.0, 0.0),
                C64::new(0.0, -1.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, 0.0),
            ],
        )
        .unwrap(),
        ComplexMatrix::from_real_diag(&[1.0, -1.0]),
    ];
    // E(ρ) = ½ Σ r_μ E(σ_μ) with r_0 = 1
    let images: Vec<ComplexMatrix> = paulis
        .iter()
        .map(|p| ch.apply_operator(p).unwrap().scale_real(0.5))
        .collect();
    let energy_in: Vec<f64> = paulis.iter().map(|p| 0.5 * h_in.matmul(p).trace().re).collect();
    let energy_out: Vec<f64> = images.iter().map(|m| h_out.matmul(m).trace().re).collect();

    let k = (1.0 / step).round() as i64;
    let slices = exec::map_range((2 * k + 1) as usize, |ix| {
        let x = (ix as i64 - k) as f64 * step;
        let mut best = f64::NEG_INFINITY;
        for iy in -k..=k {
            let y = iy as f64 * step;
            let rxy = x * x + y * y;
            if rxy > 1.0 + 1e-12 {
                continue;
            }
            for iz in -k..=k {
                let z = iz as f64 * step;
                let r2 = rxy + z * z;
                if r2 > 1.0 + 1e-12 {
                    continue;
                }
                let r = [1.0, x, y, z];
                let mut a = 0.0;
                let mut d = 0.0;
                let mut b = C64::new(0.0, 0.0);
                let mut e_in = 0.0;
                let mut e_out = 0.0;
                for mu in 0..4 {
                    a += r[mu] * images[mu][(0, 0)].re;
                    d += r[mu] * images[mu][(1, 1)].re;
                    b += images[mu][(0, 1)] * r[mu];
                    e_in += r[mu] * energy_in[mu];
                    e_out += r[mu] * energy_out[mu];
                }
                let s_in = h2(0.5 * (1.0 + r2.sqrt().min(1.0)));
                let s_out = entropy2(a, d, b);
                let v = (e_out - s_out / beta) - (e_in - s_in / beta);
                if v > best {
                    best = v;
                }
            }
        }
        best
    });
    slices.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// e^A by scaling and squaring with a Taylor series.
pub fn expm_taylor(a: &ComplexMatrix) -> ComplexMatrix {
    let norm = a.frobenius_norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale_real(0.5f64.powi(squarings as i32));
    let d = a.rows();
    let mut term = ComplexMatrix::identity(d);
    let mut sum = ComplexMatrix::identity(d);
    for k in 1..30 {
        term = term.matmul(&scaled).scale_real(1.0 / k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

/// (e^{−βH})^{⊗n} through the Taylor exponential.
pub fn gibbs_weight_power(h: &Hamiltonian, beta: f64, n: usize) -> ComplexMatrix {
    expm_taylor(&h.matrix().scale_real(-beta)).kron_power(n)
}

pub fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// P(|K/n − p| > width) for K ~ Bin(n, p).
pub fn binomial_tail(n: u64, p: f64, width: f64) -> f64 {
    (0..=n)
        .filter(|&k| (k as f64 / n as f64 - p).abs() > width)
        .map(|k| binomial(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32))
        .sum()
}

/// −ln min { q·x : 0 ≤ x ≤ 1, p·x ≥ 1 − ε } by filling the largest ratios
/// p_i/q_i first (exact for this fractional knapsack).
pub fn dh_commuting(p: &[f64], q: &[f64], eps: f64) -> f64 {
    let mut need = 1.0 - eps;
    let mut cost = 0.0;
    // entries with q = 0 are free
    for (pi, _) in p.iter().zip(q).filter(|(_, &qi)| qi == 0.0) {
        need -= pi;
    }
    if need <= 0.0 {
        return f64::INFINITY;
    }
    let mut order: Vec<usize> = (0..p.len()).filter(|&i| q[i] > 0.0).collect();
    order.sort_by(|&i, &j| (p[j] / q[j]).total_cmp(&(p[i] / q[i])));
    for i in order {
        if need <= 0.0 {
            break;
        }
        let take = (need / p[i]).min(1.0);
        if p[i] == 0.0 {
            continue;
        }
        cost += take * q[i];
        need -= take * p[i];
    }
    -cost.ln()
}

fn trace_norm_hermitian(m: &ComplexMatrix) -> f64 {
    thermocap::qcore::eigvalsh(m).iter().map(|x| x.abs()).sum()
}

/// (Φ ⊗ id)(|ψ⟩⟨ψ|) from the Choi matrix, for ψ on X ⊗ R with dim R = dim X.
fn choi_action(choi: &ComplexMatrix, din: usize, dout: usize, psi: &[C64]) -> ComplexMatrix {
    // ψ = Σ c_{ir}|i⟩|r⟩; output on X′R is Σ c_{ir} c̄_{js} J[(x,i),(y,j)] |x r⟩⟨y s|
    let dim = dout * din;
    ComplexMatrix::from_fn(dim, dim, |row, col| {
        let (x, r) = (row / din, row % din);
        let (y, s) = (col / din, col % din);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..din {
            for j in 0..din {
                acc += psi[i * din + r] * psi[j * din + s].conj() * choi[(x * din + i, y * din + j)];
            }
        }
        acc
    })
}

/// Lower bound on ‖A − B‖⋄ by random restarts and local perturbation of the
/// input state on X ⊗ R.
pub fn diamond_lower_bound(a: &Channel, b: &Channel, restarts: usize, rng: &mut impl Rng) -> f64 {
    let (din, dout) = (a.dim_in(), a.dim_out());
    let diff = a.choi() - b.choi();
    let eval = |psi: &[C64]| trace_norm_hermitian(&choi_action(&diff, din, dout, psi));
    let normalize = |v: &mut Vec<C64>| {
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= n);
    };
    let mut best = 0.0f64;
    for _ in 0..restarts {
        let mut psi: Vec<C64> = (0..din * din)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        normalize(&mut psi);
        let mut value = eval(&psi);
        let mut radius = 0.3;
        while radius > 1e-6 {
            let mut improved = false;
            for _ in 0..20 {
                let mut trial: Vec<C64> = psi
                    .iter()
                    .map(|z| z + C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * radius)
                    .collect();
                normalize(&mut trial);
                let v = eval(&trial);
                if v > value {
                    psi = trial;
                    value = v;
                    improved = true;
                }
            }
            if !improved {
                radius *= 0.5;
            }
        }
        best = best.max(value);
    }
    best
}
