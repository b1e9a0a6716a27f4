//! Kuhn–Munkres assignment with row/column potentials, O(n^2 m).

/// Maximum-profit one-to-one assignment. For rectangular input every row
/// (or every column, whichever side is smaller) is matched. Returns
/// `(row, col)` pairs sorted by row.
pub fn hungarian(profit: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let rows = profit.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = profit[0].len();
    assert!(profit.iter().all(|r| r.len() == cols), "ragged profit matrix");
    assert!(profit.iter().flatten().all(|v| v.is_finite()), "profit must be finite");
    if cols == 0 {
        return Vec::new();
    }
    if rows <= cols {
        let cost: Vec<Vec<f64>> = profit.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
        min_cost_assignment(&cost)
    } else {
        let cost: Vec<Vec<f64>> = (0..cols).map(|j| (0..rows).map(|i| -profit[i][j]).collect()).collect();
        let mut pairs: Vec<(usize, usize)> = min_cost_assignment(&cost).into_iter().map(|(j, i)| (i, j)).collect();
        pairs.sort_unstable();
        pairs
    }
}

pub fn assignment_value(profit: &[Vec<f64>], pairs: &[(usize, usize)]) -> f64 {
    pairs.iter().map(|&(i, j)| profit[i][j]).sum()
}

// Requires rows <= cols.
fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let n = cost.len();
    let m = cost[0].len();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    // p[j]: row (1-based) matched to column j; column 0 is a sentinel
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
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
    let mut pairs: Vec<(usize, usize)> = (1..=m).filter(|&j| p[j] != 0).map(|j| (p[j] - 1, j - 1)).collect();
    pairs.sort_unstable();
    pairs
}
