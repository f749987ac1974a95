//! Partitions, symmetric-group characters and permutations of tensor factors.

use std::collections::HashMap;

/// Partitions of `n` into at most `max_rows` parts, largest part first,
/// listed in reverse lexicographic order.
pub fn partitions(n: usize, max_rows: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, cap: usize, rows: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        if rows == 0 {
            return;
        }
        for part in (1..=cap.min(rest)).rev() {
            cur.push(part);
            rec(rest - part, part, rows - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, max_rows, &mut Vec::new(), &mut out);
    out
}

/// χ_λ(μ) by the Murnaghan–Nakayama rule on beta-numbers.
pub fn character(lambda: &[usize], mu: &[usize]) -> i64 {
    let len = lambda.len();
    let beta: Vec<usize> = lambda.iter().enumerate().map(|(i, &l)| l + len - 1 - i).collect();
    let mut memo = HashMap::new();
    mn(beta, mu, &mut memo)
}

fn mn(beta: Vec<usize>, mu: &[usize], memo: &mut HashMap<(Vec<usize>, usize), i64>) -> i64 {
    let Some((&r, rest)) = mu.split_first() else {
        return 1;
    };
    let key = (beta.clone(), mu.len());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut total = 0;
    for (idx, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        // leg length = number of beta-numbers strictly between b − r and b
        let leg = beta.iter().filter(|&&c| c > b - r && c < b).count();
        let mut next = beta.clone();
        next[idx] = b - r;
        next.sort_unstable_by(|x, y| y.cmp(x));
        let sign = if leg % 2 == 0 { 1 } else { -1 };
        total += sign * mn(next, rest, memo);
    }
    memo.insert(key, total);
    total
}

/// Dimension of the S_n irrep λ, via the hook length formula.
pub fn irrep_dimension(lambda: &[usize]) -> u64 {
    let n: usize = lambda.iter().sum();
    let mut hooks: u64 = 1;
    for (i, &row) in lambda.iter().enumerate() {
        for j in 0..row {
            let arm = row - j - 1;
            let leg = lambda[i + 1..].iter().filter(|&&r| r > j).count();
            hooks *= (arm + leg + 1) as u64;
        }
    }
    (1..=n as u64).product::<u64>() / hooks
}

/// Cycle type of a permutation, sorted descending.
pub fn cycle_type(perm: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; perm.len()];
    let mut cycles = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        cycles.push(len);
    }
    cycles.sort_unstable_by(|a, b| b.cmp(a));
    cycles
}

/// All permutations of 0..n in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

/// Basis permutation x ↦ y of (ℂ^d)^{⊗n} induced by moving factor k to
/// position perm[k]. Index digits are most significant first.
pub fn factor_map(perm: &[usize], d: usize) -> Vec<usize> {
    let n = perm.len();
    let total = d.pow(n as u32);
    let mut digits = vec![0usize; n];
    let mut place = vec![0usize; n];
    for k in 0..n {
        place[k] = d.pow((n - 1 - perm[k]) as u32);
    }
    (0..total)
        .map(|mut x| {
            for slot in digits.iter_mut().rev() {
                *slot = x % d;
                x /= d;
            }
            digits.iter().zip(&place).map(|(a, p)| a * p).sum()
        })
        .collect()
}

/// Shannon entropy of λ/n in nats.
pub fn diagram_entropy(lambda: &[usize]) -> f64 {
    let n: usize = lambda.iter().sum();
    lambda
        .iter()
        .filter(|&&l| l > 0)
        .map(|&l| {
            let p = l as f64 / n as f64;
            -p * p.ln()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        assert_eq!(partitions(4, 4).len(), 5);
        assert_eq!(partitions(8, 8).len(), 22);
        assert_eq!(
            partitions(8, 2),
            vec![vec![8], vec![7, 1], vec![6, 2], vec![5, 3], vec![4, 4]]
        );
    }

    #[test]
    fn characters_of_s3() {
        // rows (3), (2,1), (1,1,1); columns 1³, (2,1), (3)
        let table = [[1, 1, 1], [2, 0, -1], [1, -1, 1]];
        let classes = [vec![1, 1, 1], vec![2, 1], vec![3]];
        let irreps = [vec![3], vec![2, 1], vec![1, 1, 1]];
        for (i, l) in irreps.iter().enumerate() {
            for (j, m) in classes.iter().enumerate() {
                assert_eq!(character(l, m), table[i][j], "{l:?} {m:?}");
            }
        }
    }

    #[test]
    fn dimensions_match_characters_at_identity() {
        for n in 1..=8 {
            for l in partitions(n, n) {
                assert_eq!(character(&l, &vec![1; n]) as u64, irrep_dimension(&l));
            }
        }
    }

    #[test]
    fn sum_of_squared_dimensions_is_group_order() {
        let total: u64 = partitions(6, 6).iter().map(|l| irrep_dimension(l).pow(2)).sum();
        assert_eq!(total, 720);
    }

    #[test]
    fn permutation_enumeration() {
        let all = permutations(4);
        assert_eq!(all.len(), 24);
        assert_eq!(cycle_type(&[1, 0, 3, 2]), vec![2, 2]);
        assert_eq!(cycle_type(&[1, 2, 0]), vec![3]);
    }

    #[test]
    fn factor_map_swaps_qubits() {
        // swap of two qubits: |01⟩ ↔ |10⟩
        assert_eq!(factor_map(&[1, 0], 2), vec![0, 2, 1, 3]);
    }
}
