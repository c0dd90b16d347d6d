//! Independent brute-force oracles and random instance generators shared by
//! the integration tests and the acceptance suite.
#![allow(dead_code)]

use frechet_core::spaces::{Diagram, Measure1D};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random probability vector with entries bounded away from zero.
pub fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize, half_width: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-half_width..half_width)).collect()
}

pub fn random_spd(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<f64> {
    let b = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    &b * b.transpose() + DMatrix::identity(dim, dim) * 0.1
}

pub fn random_orthogonal(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    a.qr().q()
}

pub fn random_diagram(rng: &mut ChaCha8Rng, max_points: usize) -> Diagram {
    let n = rng.gen_range(0..=max_points);
    Diagram::new(
        (0..n)
            .map(|_| {
                let b: f64 = rng.gen_range(0.0..2.0);
                (b, b + rng.gen_range(0.05..2.0))
            })
            .collect(),
    )
}

pub fn random_measure1d(rng: &mut ChaCha8Rng, max_atoms: usize) -> Measure1D {
    let k = rng.gen_range(1..=max_atoms);
    let atoms: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let weights = random_weights(rng, k);
    Measure1D::new(atoms, weights).unwrap()
}

/// Optimal transport cost `min Σ π_ij c_ij` over couplings of `a` and `b`,
/// by enumerating every basis of the transportation polytope.
pub fn transport_lp(a: &[f64], b: &[f64], cost: &[Vec<f64>]) -> f64 {
    let (m, n) = (a.len(), b.len());
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let basis_size = m + n - 1;
    let mut best = f64::INFINITY;
    let mut chosen = Vec::with_capacity(basis_size);
    subsets(&cells, basis_size, 0, &mut chosen, &mut |basis| {
        if let Some(x) = solve_basis(a, b, basis) {
            if x.iter().all(|v| *v >= -1e-12) {
                let c: f64 = basis.iter().zip(&x).map(|(&(i, j), v)| v.max(0.0) * cost[i][j]).sum();
                best = best.min(c);
            }
        }
    });
    best
}

fn subsets<T: Copy>(items: &[T], k: usize, start: usize, chosen: &mut Vec<T>, f: &mut dyn FnMut(&[T])) {
    if chosen.len() == k {
        f(chosen);
        return;
    }
    for i in start..items.len() {
        if items.len() - i < k - chosen.len() {
            break;
        }
        chosen.push(items[i]);
        subsets(items, k, i + 1, chosen, f);
        chosen.pop();
    }
}

/// Solves the marginal constraints restricted to `basis`; `None` if singular.
fn solve_basis(a: &[f64], b: &[f64], basis: &[(usize, usize)]) -> Option<Vec<f64>> {
    let (m, n) = (a.len(), b.len());
    let k = basis.len();
    // drop the last column constraint, which is implied by the others
    let rows = m + n - 1;
    let mut mat = DMatrix::zeros(rows, k);
    for (c, &(i, j)) in basis.iter().enumerate() {
        mat[(i, c)] = 1.0;
        if j < n - 1 {
            mat[(m + j, c)] = 1.0;
        }
    }
    let rhs = nalgebra::DVector::from_iterator(rows, a.iter().copied().chain(b[..n - 1].iter().copied()));
    let lu = mat.lu();
    if lu.u().diagonal().iter().any(|v: &f64| v.abs() < 1e-12) {
        return None;
    }
    lu.solve(&rhs).map(|x| x.iter().copied().collect())
}

/// 1-D transport distance by the transport LP with cost `|x − y|^q`.
pub fn w1d_by_lp(x: &Measure1D, y: &Measure1D, q: f64) -> f64 {
    let cost: Vec<Vec<f64>> = x
        .atoms()
        .iter()
        .map(|a| y.atoms().iter().map(|b| (a - b).abs().powf(q)).collect())
        .collect();
    transport_lp(x.weights(), y.weights(), &cost).powf(1.0 / q)
}

/// Diagram distance by enumerating every partial matching; unmatched points
/// pay their ℓ2 distance to the diagonal.
pub fn diagram_distance_by_enumeration(x: &Diagram, y: &Diagram, q: f64) -> f64 {
    let xs = x.points();
    let ys = y.points();
    let diag = |p: &(f64, f64)| (p.1 - p.0) / 2f64.sqrt();
    let pair = |p: &(f64, f64), r: &(f64, f64)| (p.0 - r.0).hypot(p.1 - r.1);
    fn go(
        i: usize,
        xs: &[(f64, f64)],
        ys: &[(f64, f64)],
        used: &mut Vec<bool>,
        acc: f64,
        best: &mut f64,
        q: f64,
        diag: &dyn Fn(&(f64, f64)) -> f64,
        pair: &dyn Fn(&(f64, f64), &(f64, f64)) -> f64,
    ) {
        if i == xs.len() {
            let rest: f64 = ys
                .iter()
                .zip(used.iter())
                .filter(|(_, u)| !**u)
                .map(|(p, _)| diag(p).powf(q))
                .sum();
            *best = best.min(acc + rest);
            return;
        }
        go(i + 1, xs, ys, used, acc + diag(&xs[i]).powf(q), best, q, diag, pair);
        for j in 0..ys.len() {
            if !used[j] {
                used[j] = true;
                go(
                    i + 1,
                    xs,
                    ys,
                    used,
                    acc + pair(&xs[i], &ys[j]).powf(q),
                    best,
                    q,
                    diag,
                    pair,
                );
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut used = vec![false; ys.len()];
    go(0, xs, ys, &mut used, 0.0, &mut best, q, &diag, &pair);
    best.powf(1.0 / q)
}

/// Lattice with the given step covering `[lo, hi]` coordinatewise.
pub fn box_lattice(lo: &[f64], hi: &[f64], step: f64) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = lo
        .iter()
        .zip(hi)
        .map(|(&a, &b)| {
            let k = ((b - a) / step).ceil().max(0.0) as usize;
            (0..=k).map(|i| (a + i as f64 * step).min(b)).collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for axis in &axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }
    out
}

/// Brute-force minimization of `objective` over parameter vectors: a coarse
/// box lattice plus `extra` seed points, then repeated local lattices of
/// halving step around the best few points until `final_step` is reached.
pub fn lattice_minimize(
    objective: &dyn Fn(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    step: f64,
    extra: &[Vec<f64>],
    final_step: f64,
) -> (f64, Vec<f64>) {
    const KEEP: usize = 4;
    let mut pool: Vec<(f64, Vec<f64>)> = box_lattice(lo, hi, step)
        .into_iter()
        .chain(extra.iter().cloned())
        .map(|x| (objective(&x), x))
        .collect();
    pool.sort_by(|a, b| a.0.total_cmp(&b.0));
    pool.truncate(KEEP);
    let mut h = step;
    while h > final_step {
        h /= 2.0;
        let mut next = pool.clone();
        for (_, c) in &pool {
            let lo: Vec<f64> = c.iter().map(|v| v - 2.0 * h).collect();
            let hi: Vec<f64> = c.iter().map(|v| v + 2.0 * h).collect();
            for x in box_lattice(&lo, &hi, h) {
                next.push((objective(&x), x));
            }
        }
        next.sort_by(|a, b| a.0.total_cmp(&b.0));
        next.dedup_by(|a, b| a.1 == b.1);
        next.truncate(KEEP);
        pool = next;
    }
    pool.swap_remove(0)
}

/// Symmetric matrix from its upper-triangular entries, row by row.
pub fn symmetric_from_params(dim: usize, v: &[f64]) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(dim, dim);
    let mut k = 0;
    for i in 0..dim {
        for j in i..dim {
            s[(i, j)] = v[k];
            s[(j, i)] = v[k];
            k += 1;
        }
    }
    s
}

pub fn params_from_symmetric(s: &DMatrix<f64>) -> Vec<f64> {
    let n = s.nrows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            out.push(s[(i, j)]);
        }
    }
    out
}

/// Symmetric square root by eigendecomposition.
pub fn sym_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let e = nalgebra::SymmetricEigen::new(m.clone());
    let d = e.eigenvalues.map(|l| l.max(0.0).sqrt());
    &e.eigenvectors * DMatrix::from_diagonal(&d) * e.eigenvectors.transpose()
}
