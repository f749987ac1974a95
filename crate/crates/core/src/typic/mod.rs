//! Spectrum- and energy-estimation measurements on n copies and the
//! typicality operator built from them.

mod operator;
pub mod young;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::qcore::{ComplexMatrix, Hamiltonian, C64};

pub use operator::{typicality_operator, Sector, TypicalityOperator, TypicalityParams, EXPLICIT_MAX_DIM};

/// Largest d^n for which the measurements are built.
pub const POVM_MAX_DIM: usize = 1024;

/// Largest number of copies for the spectrum measurement (n! permutations).
pub const POVM_MAX_COPIES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PovmKind {
    /// Labels are entropy estimates s in nats.
    Spectrum,
    /// Labels are per-copy energy estimates h.
    Energy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmElement {
    pub label: f64,
    /// Young diagram for spectrum elements.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagram: Option<Vec<usize>>,
    pub projector: ComplexMatrix,
}

/// Projective measurement on (ℂ^d)^{⊗n} with real labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalPOVM {
    pub kind: PovmKind,
    pub n: usize,
    pub local_dim: usize,
    pub elements: Vec<PovmElement>,
}

fn check_budget(d: usize, n: usize) -> Result<usize> {
    let required = d.checked_pow(n as u32).unwrap_or(usize::MAX);
    if required > POVM_MAX_DIM {
        return Err(Error::BudgetExceeded {
            required,
            budget: POVM_MAX_DIM,
        });
    }
    Ok(required)
}

/// Isotypic projectors P_λ = (dim λ / n!) Σ_π χ_λ(π) π for diagrams with at
/// most d rows, labelled by the entropy of λ/n.
pub fn spectrum_povm(d: usize, n: usize) -> Result<TypicalPOVM> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidParameter(
            "spectrum measurement needs d ≥ 1 and n ≥ 1".into(),
        ));
    }
    if n > POVM_MAX_COPIES {
        return Err(Error::BudgetExceeded {
            required: n,
            budget: POVM_MAX_COPIES,
        });
    }
    let dim = check_budget(d, n)?;
    let diagrams = young::partitions(n, d);
    let all_classes = young::partitions(n, n);
    let class_index = |ct: &[usize]| {
        all_classes
            .iter()
            .position(|c| c == ct)
            .expect("cycle type is a partition")
    };

    // class sums as basis maps, shared by all diagrams
    let perms = young::permutations(n);
    let mut maps_by_class: Vec<Vec<Vec<usize>>> = vec![Vec::new(); all_classes.len()];
    for p in &perms {
        maps_by_class[class_index(&young::cycle_type(p))].push(young::factor_map(p, d));
    }
    let group_order = perms.len() as f64;

    let elements = exec::map_slice(&diagrams, |lambda| {
        let weight = young::irrep_dimension(lambda) as f64 / group_order;
        let mut acc = vec![0.0f64; dim * dim];
        for (class, maps) in all_classes.iter().zip(&maps_by_class) {
            let chi = young::character(lambda, class) as f64;
            if chi == 0.0 {
                continue;
            }
            let c = weight * chi;
            for map in maps {
                for (x, &y) in map.iter().enumerate() {
                    acc[y * dim + x] += c;
                }
            }
        }
        let data = acc.into_iter().map(|v| C64::new(v, 0.0)).collect();
        PovmElement {
            label: young::diagram_entropy(lambda),
            diagram: Some(lambda.clone()),
            projector: ComplexMatrix::new(dim, dim, data).expect("square"),
        }
    });
    Ok(TypicalPOVM {
        kind: PovmKind::Spectrum,
        n,
        local_dim: d,
        elements,
    })
}

/// Default energy bin width (λ_max − λ_min)/(4n).
pub fn default_energy_bin(h: &Hamiltonian, n: usize) -> f64 {
    let e = h.eigen();
    (e.max() - e.min()) / (4.0 * n as f64)
}

/// Eigenprojectors of Σ_i H_i grouped into bins of width n·δ centred at
/// n·λ_min + k·n·δ; the label is the bin centre divided by n. Exactly
/// degenerate levels always share a bin, and δ = 0 keeps only those together.
pub fn energy_povm(h: &Hamiltonian, n: usize, delta: f64) -> Result<TypicalPOVM> {
    if n == 0 || !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(
            "energy measurement needs n ≥ 1 and a finite δ ≥ 0".into(),
        ));
    }
    let d = h.dim();
    let dim = check_budget(d, n)?;
    let e = h.eigen();
    let e_min = e.min();
    let scale = e.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let degeneracy_tol = 1e-9 * scale * n as f64;

    // total energy of each product eigenvector, digits most significant first
    let energies: Vec<f64> = (0..dim)
        .map(|mut x| {
            let mut total = 0.0;
            for _ in 0..n {
                total += e.values[x % d] - e_min;
                x /= d;
            }
            total
        })
        .collect();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]).then(a.cmp(&b)));

    // cluster exact degeneracies, then assign clusters to bins
    let mut bins: Vec<(i64, Vec<usize>)> = Vec::new();
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && energies[order[end]] - energies[order[start]] <= degeneracy_tol {
            end += 1;
        }
        let level = energies[order[start]];
        let key = if delta > 0.0 {
            (level / (n as f64 * delta)).round() as i64
        } else {
            bins.len() as i64
        };
        match bins.last_mut() {
            Some((k, members)) if *k == key => members.extend_from_slice(&order[start..end]),
            _ => bins.push((key, order[start..end].to_vec())),
        }
        start = end;
    }

    let u = e.vectors.kron_power(n);
    let elements = exec::map_slice(&bins, |(key, members)| {
        let centre = if delta > 0.0 {
            *key as f64 * n as f64 * delta
        } else {
            energies[members[0]]
        };
        let mut indicator = vec![0.0; dim];
        for &m in members {
            indicator[m] = 1.0;
        }
        let cols = ComplexMatrix::from_fn(dim, dim, |i, k| u[(i, k)] * indicator[k]);
        PovmElement {
            label: (centre + n as f64 * e_min) / n as f64,
            diagram: None,
            projector: cols.matmul_adjoint(&u).hermitian_part(),
        }
    });
    Ok(TypicalPOVM {
        kind: PovmKind::Energy,
        n,
        local_dim: d,
        elements,
    })
}

impl TypicalPOVM {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements.first().map_or(0, |e| e.projector.rows())
    }

    pub fn labels(&self) -> Vec<f64> {
        self.elements.iter().map(|e| e.label).collect()
    }

    /// max |Σ P − 1|.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for e in &self.elements {
            sum += &e.projector;
        }
        (&sum - &ComplexMatrix::identity(d)).max_abs()
    }

    /// max over pairs of |P_a P_b − δ_ab P_a|.
    pub fn orthogonality_residual(&self) -> f64 {
        let k = self.elements.len();
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect();
        exec::map_slice(&pairs, |&(a, b)| {
            let pa = &self.elements[a].projector;
            let prod = pa.matmul(&self.elements[b].projector);
            if a == b {
                (&prod - pa).max_abs()
            } else {
                prod.max_abs()
            }
        })
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// max over element pairs of |[P, Q]|.
    pub fn commutation_residual(&self, other: &TypicalPOVM) -> f64 {
        let pairs: Vec<(usize, usize)> = (0..self.len())
            .flat_map(|a| (0..other.len()).map(move |b| (a, b)))
            .collect();
        exec::map_slice(&pairs, |&(a, b)| {
            self.elements[a]
                .projector
                .commutator(&other.elements[b].projector)
                .max_abs()
        })
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// max |πPπ⁻¹ − P| over adjacent transpositions π, which generate S_n.
    pub fn permutation_residual(&self) -> f64 {
        let (n, d) = (self.n, self.local_dim);
        let mut worst = 0.0f64;
        for k in 0..n.saturating_sub(1) {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.swap(k, k + 1);
            let map = young::factor_map(&perm, d);
            for e in &self.elements {
                let p = &e.projector;
                let dim = p.rows();
                for x in 0..dim {
                    for y in 0..dim {
                        worst = worst.max((p[(map[x], map[y])] - p[(x, y)]).norm());
                    }
                }
            }
        }
        worst
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measurement serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank(p: &ComplexMatrix) -> usize {
        p.trace().re.round() as usize
    }

    #[test]
    fn two_qubits() {
        let m = spectrum_povm(2, 2).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.elements[0].diagram.as_deref(), Some(&[2][..]));
        assert_eq!(rank(&m.elements[0].projector), 3);
        assert_eq!(m.elements[0].label, 0.0);
        assert_eq!(rank(&m.elements[1].projector), 1);
        assert!((m.elements[1].label - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn three_qubits() {
        let m = spectrum_povm(2, 3).unwrap();
        let ranks: Vec<usize> = m.elements.iter().map(|e| rank(&e.projector)).collect();
        assert_eq!(ranks, vec![4, 4]);
    }

    #[test]
    fn qutrit_completeness() {
        let m = spectrum_povm(3, 3).unwrap();
        assert_eq!(m.len(), 3);
        assert!(m.completeness_residual() < 1e-12);
        assert!(m.orthogonality_residual() < 1e-12);
    }

    #[test]
    fn energy_levels_binomial() {
        let h = Hamiltonian::diag(&[0.0, 1.0]);
        let m = energy_povm(&h, 3, 0.01).unwrap();
        let ranks: Vec<usize> = m.elements.iter().map(|e| rank(&e.projector)).collect();
        assert_eq!(ranks, vec![1, 3, 3, 1]);
        let labels = m.labels();
        for (k, l) in labels.iter().enumerate() {
            assert!((l - k as f64 / 3.0).abs() <= 0.005, "{l}");
        }
        let exact = energy_povm(&h, 3, 0.0).unwrap().labels();
        for (k, l) in exact.iter().enumerate() {
            assert!((l - k as f64 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn trivial_hamiltonian_gives_one_element() {
        let h = Hamiltonian::zero(2);
        let m = energy_povm(&h, 3, default_energy_bin(&h, 3)).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.elements[0].label, 0.0);
        assert!((&m.elements[0].projector - &ComplexMatrix::identity(8)).max_abs() < 1e-15);
    }

    #[test]
    fn budget() {
        assert!(matches!(spectrum_povm(2, 9), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(spectrum_povm(3, 7), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn json_export() {
        let m = spectrum_povm(2, 2).unwrap();
        let back: TypicalPOVM = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }
}
