//! Dense linear assignment (Hungarian method with potentials).

/// Optimal solution of `min Σ_i cost[i][col[i]]` over permutations `col`,
/// with dual potentials satisfying `row_pot[i] + col_pot[j] ≤ cost[i][j]`
/// and `Σ row_pot + Σ col_pot = total`.
#[derive(Clone, Debug)]
pub struct Assignment {
    pub total: f64,
    pub col: Vec<usize>,
    pub row_pot: Vec<f64>,
    pub col_pot: Vec<f64>,
}

/// Solves the square assignment problem for an `n×n` row-major cost matrix.
pub fn min_cost_assignment(cost: &[f64], n: usize) -> Assignment {
    assert_eq!(cost.len(), n * n, "cost matrix must be n×n");
    // Shortest augmenting path formulation, 1-based with a virtual column 0.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col = vec![0; n];
    for j in 1..=n {
        if p[j] != 0 {
            col[p[j] - 1] = j - 1;
        }
    }
    let total = (0..n).map(|i| cost[i * n + col[i]]).sum();
    Assignment {
        total,
        col,
        row_pot: u[1..].to_vec(),
        col_pot: v[1..].to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn brute(cost: &[f64], n: usize) -> f64 {
        (0..n)
            .permutations(n)
            .map(|p| (0..n).map(|i| cost[i * n + p[i]]).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn small_example() {
        let cost = [4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0];
        let a = min_cost_assignment(&cost, 3);
        assert_eq!(a.total, 5.0);
        assert_eq!(a.col, vec![1, 0, 2]);
    }

    proptest! {
        #[test]
        fn matches_enumeration_and_duals_certify(n in 1usize..6, seed in prop::collection::vec(-10.0f64..10.0, 36)) {
            let cost: Vec<f64> = seed[..n * n].to_vec();
            let a = min_cost_assignment(&cost, n);
            prop_assert!((a.total - brute(&cost, n)).abs() < 1e-9);
            let dual: f64 = a.row_pot.iter().sum::<f64>() + a.col_pot.iter().sum::<f64>();
            prop_assert!((dual - a.total).abs() < 1e-9);
            for i in 0..n {
                for j in 0..n {
                    prop_assert!(a.row_pot[i] + a.col_pot[j] <= cost[i * n + j] + 1e-9);
                }
            }
        }
    }
}
