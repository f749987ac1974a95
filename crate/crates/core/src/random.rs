//! Seeded random states, unitaries, Hamiltonians and channels.
//!
//! All generators take an explicit RNG so results are reproducible from a
//! single 64-bit seed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::Channel;
use crate::qcore::{ComplexMatrix, DensityMatrix, Hamiltonian, C64};

/// The RNG used throughout the crate and its tools.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    rand::SeedableRng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Orthonormalize the columns (modified Gram–Schmidt, applied twice).
fn orthonormal_columns(mut m: ComplexMatrix) -> ComplexMatrix {
    let (rows, cols) = (m.rows(), m.cols());
    for j in 0..cols {
        let mut v = m.column(j);
        for _ in 0..2 {
            for k in 0..j {
                let u = m.column(k);
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for r in 0..rows {
                    v[r] -= proj * u[r];
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        m.set_column(j, &v);
    }
    m
}

/// Haar-random unitary.
pub fn unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    orthonormal_columns(ginibre(d, d, rng))
}

/// Haar-random isometry with `cols` ≤ `rows`.
pub fn isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(cols <= rows, "an isometry cannot increase dimension");
    orthonormal_columns(ginibre(rows, cols, rng))
}

/// Haar-random pure state.
pub fn pure_state(d: usize, rng: &mut impl Rng) -> DensityMatrix {
    let v: Vec<C64> = (0..d).map(|_| gaussian(rng)).collect();
    DensityMatrix::pure(&v).expect("nonzero Gaussian vector")
}

/// Hilbert–Schmidt random mixed state (full rank almost surely).
pub fn mixed_state(d: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = ginibre(d, d, rng);
    DensityMatrix::normalized(g.matmul_adjoint(&g)).expect("Wishart matrix is a state")
}

/// Hermitian matrix with Gaussian entries, scaled to operator norm O(1).
pub fn hamiltonian(d: usize, rng: &mut impl Rng) -> Hamiltonian {
    let g = ginibre(d, d, rng);
    let h = g.hermitian_part().scale_real(1.0 / (d as f64).sqrt());
    Hamiltonian::new(h).expect("Hermitian by construction")
}

/// Random channel with `num_kraus` Kraus operators, from a Haar isometry.
pub fn channel(dim_in: usize, dim_out: usize, num_kraus: usize, rng: &mut impl Rng) -> Channel {
    let v = isometry(dim_out * num_kraus, dim_in, rng);
    let kraus = (0..num_kraus)
        .map(|k| ComplexMatrix::from_fn(dim_out, dim_in, |x, i| v[(x * num_kraus + k, i)]))
        .collect();
    Channel::from_kraus(kraus, None, None).expect("isometry blocks are trace preserving")
}

/// Random unitary commuting with `h`: independent Haar unitaries on each
/// eigenspace (levels closer than `1e-9` are treated as degenerate).
pub fn energy_conserving_unitary(h: &Hamiltonian, rng: &mut impl Rng) -> ComplexMatrix {
    let e = h.eigen();
    let d = e.dim();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for k in 0..d {
        match blocks.last_mut() {
            Some(b) if (e.values[k] - e.values[b[0]]).abs() < 1e-9 => b.push(k),
            _ => blocks.push(vec![k]),
        }
    }
    let mut inner = ComplexMatrix::zeros(d, d);
    for b in &blocks {
        let u = unitary(b.len(), rng);
        for (i, &r) in b.iter().enumerate() {
            for (j, &c) in b.iter().enumerate() {
                inner[(r, c)] = u[(i, j)];
            }
        }
    }
    e.vectors.matmul(&inner).matmul_adjoint(&e.vectors)
}
