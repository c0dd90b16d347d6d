use crate::error::Result;
use crate::frechet::{relaxed_mean_set, FrechetConfig, MeanSetApprox};
use crate::measure::DiscreteMeasure;
use crate::metric::{dedup_points, CandidateSet, MetricSpace};

/// Above this many points, refined candidate sets are not deduplicated.
const DEDUP_LIMIT: usize = 2000;

/// One refinement round: halve the resolution of a coarse approximation by
/// searching local grids of radius twice the coarse resolution around each
/// of its points (the coarse points stay in the candidate set).
pub fn refine_mean_set<S: MetricSpace + ?Sized>(
    space: &S,
    mu: &DiscreteMeasure<S::Point>,
    config: &FrechetConfig<S::Point>,
    coarse: &MeanSetApprox<S::Point>,
) -> Result<MeanSetApprox<S::Point>> {
    config.validate()?;
    mu.check_in(space)?;
    if mu.is_degenerate(space) || coarse.points.is_empty() {
        return Ok(coarse.clone());
    }
    let resolution = coarse.resolution / 2.0;
    let radius = 2.0 * coarse.resolution;
    let mut points = coarse.points.clone();
    for x in &coarse.points {
        points.extend(space.refine_around(x, radius, resolution)?);
    }
    if points.len() <= DEDUP_LIMIT {
        points = dedup_points(space, points);
    }
    relaxed_mean_set(space, mu, config, &CandidateSet::new(points, resolution))
}

/// Applies [`refine_mean_set`] `rounds` times.
pub fn refine_rounds<S: MetricSpace + ?Sized>(
    space: &S,
    mu: &DiscreteMeasure<S::Point>,
    config: &FrechetConfig<S::Point>,
    coarse: &MeanSetApprox<S::Point>,
    rounds: usize,
) -> Result<MeanSetApprox<S::Point>> {
    let mut current = coarse.clone();
    for _ in 0..rounds {
        current = refine_mean_set(space, mu, config, &current)?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::CandidateScheme;
    use crate::spaces::EuclideanSpace;

    #[test]
    fn halves_resolution_and_keeps_the_mean() {
        let space = EuclideanSpace::line();
        let mu = DiscreteMeasure::uniform(vec![vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let config = FrechetConfig::new(2.0);
        let grid = space.candidates(&mu, &CandidateScheme::Grid { step: 1.0 }).unwrap();
        let coarse = relaxed_mean_set(&space, &mu, &config, &grid).unwrap();
        assert_eq!(coarse.points, vec![vec![2.0]]);
        assert_eq!(coarse.resolution, 0.5);
        let fine = refine_mean_set(&space, &mu, &config, &coarse).unwrap();
        assert_eq!(fine.resolution, 0.25);
        assert_eq!(fine.points, vec![vec![2.0]]);
    }
}
