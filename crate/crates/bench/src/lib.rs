//! Seeded benchmark instances.

use frechet_core::spaces::{BuresWassersteinSpace, Diagram, Measure1D};
use frechet_core::DiscreteMeasure;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn euclidean_measure(n: usize, dim: usize, seed: u64) -> DiscreteMeasure<Vec<f64>> {
    let mut r = rng(seed);
    let support = (0..n)
        .map(|_| (0..dim).map(|_| r.gen_range(-3.0..3.0)).collect())
        .collect();
    DiscreteMeasure::uniform(support).expect("nonempty support")
}

pub fn diagram(points: usize, seed: u64) -> Diagram {
    let mut r = rng(seed);
    Diagram::new(
        (0..points)
            .map(|_| {
                let b: f64 = r.gen_range(0.0..5.0);
                (b, b + r.gen_range(0.01..3.0))
            })
            .collect(),
    )
}

pub fn measure1d(atoms: usize, seed: u64) -> Measure1D {
    let mut r = rng(seed);
    let xs = (0..atoms).map(|_| r.gen_range(-2.0..2.0)).collect();
    let ws = (0..atoms).map(|_| r.gen_range(0.1..1.0)).collect();
    Measure1D::new(xs, ws).expect("valid 1-D measure")
}

/// `B Bᵀ + I/10` for a random `B`.
pub fn spd(dim: usize, seed: u64) -> nalgebra::DMatrix<f64> {
    let mut r = rng(seed);
    let b: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..dim).map(|_| r.gen_range(-1.0..1.0)).collect())
        .collect();
    let rows: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| (0..dim).map(|k| b[i][k] * b[j][k]).sum::<f64>() + if i == j { 0.1 } else { 0.0 })
                .collect()
        })
        .collect();
    BuresWassersteinSpace::matrix_from_rows(&rows).expect("symmetric rows")
}
