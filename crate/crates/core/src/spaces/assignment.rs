/// Minimum-cost perfect matching on a square cost matrix (Hungarian method with
/// row/column potentials, O(n³)). Returns `(total cost, column assigned to each row)`.
///
/// Non-finite entries are treated as forbidden; the matrix must admit a
/// perfect matching through finite entries.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let n = cost.len();
    if n == 0 {
        return (0.0, Vec::new());
    }
    debug_assert!(cost.iter().all(|r| r.len() == n));
    let finite_total: f64 = cost.iter().flatten().filter(|c| c.is_finite()).map(|c| c.abs()).sum();
    let forbidden = 1.0 + 2.0 * finite_total;
    let c = |i: usize, j: usize| {
        let v = cost[i][j];
        if v.is_finite() {
            v
        } else {
            forbidden
        }
    };

    // 1-based arrays; index 0 is the virtual source column.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = c(i0 - 1, j - 1) - u[i0] - v[j];
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
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0usize; n];
    for j in 1..=n {
        if row_of[j] > 0 {
            col_of_row[row_of[j] - 1] = j - 1;
        }
    }
    let total = col_of_row.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    (total, col_of_row)
}
