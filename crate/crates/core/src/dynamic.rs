//! Spaces, points and measures chosen at run time from JSON configuration.
//!
//! Point formats: real `1.5`; vectors `[1, 2]`; spider `[leg, t]`; 1-D
//! measures `{"atoms": [..], "weights": [..]}` or a bare atom list; matrices
//! as row lists; diagrams `[[birth, death], ..]`; product points `[left, right]`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::constructions::{GroupAction, GroupSpec, GroupSpecJson, ProductSpace, QuotientSpace, RegularizedSpace};
use crate::error::{FrechetError, Result};
use crate::frechet::{frechet_functional, relaxed_mean_set, FrechetConfig, MeanSetApprox};
use crate::measure::DiscreteMeasure;
use crate::metric::{CandidateScheme, CandidateSet, MetricSpace};
use crate::solvers::{bw_barycenter, euclidean_pmean, refine_rounds, SolverConfig, SolverKind};
use crate::spaces::{
    quantile_barycenter, BuresWassersteinSpace, Diagram, EuclideanSpace, LqSequenceSpace, Measure1D,
    PersistenceDiagramSpace, SpiderPoint, SpiderSpace, Wasserstein1D,
};

fn two() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceConfig {
    Real,
    Euclidean {
        dim: usize,
    },
    Lq {
        truncation: usize,
        q: f64,
    },
    Spider {
        legs: usize,
    },
    #[serde(rename = "wasserstein1d")]
    Wasserstein1d {
        #[serde(default = "two")]
        q: f64,
    },
    BuresWasserstein {
        dim: usize,
    },
    Persistence {
        #[serde(default = "two")]
        q: f64,
    },
    Product {
        left: Box<SpaceConfig>,
        right: Box<SpaceConfig>,
        #[serde(default = "two")]
        q: f64,
    },
    Quotient {
        base: Box<SpaceConfig>,
        group: GroupConfig,
    },
    Regularized {
        base: Box<SpaceConfig>,
        group: GroupConfig,
        lambda: f64,
    },
}

/// A named group preset or an explicit element list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupConfig {
    Preset { preset: GroupPreset },
    Explicit(GroupSpecJson),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum GroupPreset {
    Trivial { dim: usize },
    SignFlip { dim: usize },
    CyclicRotations { order: usize },
    LoopSymmetries { samples: usize, rotations: usize },
}

impl GroupConfig {
    pub fn build(&self) -> Result<GroupSpec> {
        match self {
            GroupConfig::Preset { preset } => match preset {
                GroupPreset::Trivial { dim } => Ok(GroupSpec::trivial(*dim)),
                GroupPreset::SignFlip { dim } => Ok(GroupSpec::sign_flip(*dim)),
                GroupPreset::CyclicRotations { order } => GroupSpec::cyclic_rotations(*order),
                GroupPreset::LoopSymmetries { samples, rotations } => GroupSpec::loop_symmetries(*samples, *rotations),
            },
            GroupConfig::Explicit(spec) => GroupSpec::from_json_spec(spec),
        }
        .map_err(|e| FrechetError::config(format!("group: {e}")))
    }
}

/// A point of any configurable space.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPoint {
    Vector(Vec<f64>),
    Spider(SpiderPoint),
    Measure(Measure1D),
    Matrix(DMatrix<f64>),
    Diagram(Diagram),
    Pair(Box<AnyPoint>, Box<AnyPoint>),
}

/// A finite matrix group acting on vector points; other points are fixed.
#[derive(Debug, Clone)]
pub struct VectorGroup(pub GroupSpec);

impl GroupAction<AnyPoint> for VectorGroup {
    fn order(&self) -> usize {
        GroupAction::<Vec<f64>>::order(&self.0)
    }
    fn identity(&self) -> usize {
        GroupAction::<Vec<f64>>::identity(&self.0)
    }
    fn inverse(&self, g: usize) -> usize {
        GroupAction::<Vec<f64>>::inverse(&self.0, g)
    }
    fn compose(&self, g: usize, h: usize) -> usize {
        GroupAction::<Vec<f64>>::compose(&self.0, g, h)
    }
    fn act(&self, g: usize, x: &AnyPoint) -> AnyPoint {
        match x {
            AnyPoint::Vector(v) => AnyPoint::Vector(self.0.act(g, v)),
            other => other.clone(),
        }
    }
    fn length(&self, g: usize) -> Option<f64> {
        GroupAction::<Vec<f64>>::length(&self.0, g)
    }
}

#[derive(Debug, Clone)]
pub enum AnySpace {
    Real(EuclideanSpace),
    Euclidean(EuclideanSpace),
    Lq(LqSequenceSpace),
    Spider(SpiderSpace),
    Wasserstein(Wasserstein1D),
    Bures(BuresWassersteinSpace),
    Persistence(PersistenceDiagramSpace),
    Product(Box<ProductSpace<AnySpace, AnySpace>>),
    Quotient(Box<QuotientSpace<AnySpace, VectorGroup>>),
    Regularized(Box<RegularizedSpace<AnySpace, VectorGroup>>),
}

fn vector_dim(space: &AnySpace) -> Option<usize> {
    match space {
        AnySpace::Real(_) => Some(1),
        AnySpace::Euclidean(e) => Some(e.dim),
        AnySpace::Lq(l) => Some(l.truncation),
        _ => None,
    }
}

impl AnySpace {
    pub fn from_config(config: &SpaceConfig) -> Result<Self> {
        let wrap = |e: FrechetError| FrechetError::config(format!("space: {e}"));
        Ok(match config {
            SpaceConfig::Real => AnySpace::Real(EuclideanSpace::line()),
            SpaceConfig::Euclidean { dim } => AnySpace::Euclidean(EuclideanSpace::new(*dim).map_err(wrap)?),
            SpaceConfig::Lq { truncation, q } => AnySpace::Lq(LqSequenceSpace::new(*truncation, *q).map_err(wrap)?),
            SpaceConfig::Spider { legs } => AnySpace::Spider(SpiderSpace::new(*legs).map_err(wrap)?),
            SpaceConfig::Wasserstein1d { q } => AnySpace::Wasserstein(Wasserstein1D::new(*q).map_err(wrap)?),
            SpaceConfig::BuresWasserstein { dim } => AnySpace::Bures(BuresWassersteinSpace::new(*dim).map_err(wrap)?),
            SpaceConfig::Persistence { q } => AnySpace::Persistence(PersistenceDiagramSpace::new(*q).map_err(wrap)?),
            SpaceConfig::Product { left, right, q } => AnySpace::Product(Box::new(
                ProductSpace::new(Self::from_config(left)?, Self::from_config(right)?, *q).map_err(wrap)?,
            )),
            SpaceConfig::Quotient { base, group } | SpaceConfig::Regularized { base, group, .. } => {
                let base = Self::from_config(base)?;
                let group = group.build()?;
                match vector_dim(&base) {
                    Some(d) if d == group.dim() => {}
                    Some(d) => {
                        return Err(FrechetError::config(format!(
                            "group acts on dimension {}, base space has dimension {d}",
                            group.dim()
                        )))
                    }
                    None => {
                        return Err(FrechetError::config(
                            "group actions are available on real, euclidean and lq bases",
                        ))
                    }
                }
                if let SpaceConfig::Regularized { lambda, .. } = config {
                    AnySpace::Regularized(Box::new(
                        RegularizedSpace::new(base, VectorGroup(group), *lambda).map_err(wrap)?,
                    ))
                } else {
                    AnySpace::Quotient(Box::new(QuotientSpace::new(base, VectorGroup(group))))
                }
            }
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let config: SpaceConfig =
            serde_json::from_value(value.clone()).map_err(|e| FrechetError::config(format!("space: {e}")))?;
        Self::from_config(&config)
    }

    /// The underlying Euclidean space for real and euclidean kinds.
    pub fn as_euclidean(&self) -> Option<&EuclideanSpace> {
        match self {
            AnySpace::Real(e) | AnySpace::Euclidean(e) => Some(e),
            _ => None,
        }
    }

    pub fn parse_point(&self, value: &Value) -> Result<AnyPoint> {
        let bad = |what: &str| FrechetError::config(format!("expected {what}, got {value}"));
        let point = match self {
            AnySpace::Real(_) => match value {
                Value::Number(n) => AnyPoint::Vector(vec![n.as_f64().ok_or_else(|| bad("a real"))?]),
                Value::Array(_) => AnyPoint::Vector(serde_json::from_value(value.clone()).map_err(|_| bad("a real"))?),
                _ => return Err(bad("a real")),
            },
            AnySpace::Euclidean(_) | AnySpace::Lq(_) => {
                AnyPoint::Vector(serde_json::from_value(value.clone()).map_err(|_| bad("an array of reals"))?)
            }
            AnySpace::Spider(_) => {
                AnyPoint::Spider(serde_json::from_value(value.clone()).map_err(|_| bad("[leg, t]"))?)
            }
            AnySpace::Wasserstein(_) => match value {
                Value::Array(_) => {
                    let atoms: Vec<f64> = serde_json::from_value(value.clone()).map_err(|_| bad("a list of atoms"))?;
                    AnyPoint::Measure(Measure1D::uniform(atoms)?)
                }
                _ => AnyPoint::Measure(
                    serde_json::from_value(value.clone()).map_err(|e| bad(&format!("{{atoms, weights}} ({e})")))?,
                ),
            },
            AnySpace::Bures(b) => {
                let rows: Vec<Value> = serde_json::from_value(value.clone()).map_err(|_| bad("a matrix"))?;
                let m = if rows.iter().all(Value::is_number) {
                    let flat: Vec<f64> = serde_json::from_value(value.clone()).map_err(|_| bad("a matrix"))?;
                    if flat.len() != b.dim * b.dim {
                        return Err(bad(&format!("{} entries", b.dim * b.dim)));
                    }
                    DMatrix::from_row_slice(b.dim, b.dim, &flat)
                } else {
                    let rows: Vec<Vec<f64>> = serde_json::from_value(value.clone()).map_err(|_| bad("a matrix"))?;
                    BuresWassersteinSpace::matrix_from_rows(&rows)?
                };
                AnyPoint::Matrix(m)
            }
            AnySpace::Persistence(_) => {
                AnyPoint::Diagram(serde_json::from_value(value.clone()).map_err(|_| bad("[[birth, death], ..]"))?)
            }
            AnySpace::Product(p) => match value {
                Value::Array(items) if items.len() == 2 => AnyPoint::Pair(
                    Box::new(p.left.parse_point(&items[0])?),
                    Box::new(p.right.parse_point(&items[1])?),
                ),
                _ => return Err(bad("[left, right]")),
            },
            AnySpace::Quotient(q) => q.base.parse_point(value)?,
            AnySpace::Regularized(r) => r.base.parse_point(value)?,
        };
        self.check_point(&point)
            .map_err(|e| FrechetError::config(format!("point {value}: {e}")))?;
        Ok(point)
    }

    pub fn point_to_json(&self, x: &AnyPoint) -> Value {
        match (self, x) {
            (AnySpace::Real(_), AnyPoint::Vector(v)) if v.len() == 1 => json!(v[0]),
            (_, AnyPoint::Vector(v)) => json!(v),
            (_, AnyPoint::Spider(s)) => json!([s.leg, s.t]),
            (_, AnyPoint::Measure(m)) => json!({"atoms": m.atoms(), "weights": m.weights()}),
            (_, AnyPoint::Matrix(m)) => {
                let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
                json!(rows)
            }
            (_, AnyPoint::Diagram(d)) => json!(d.points().iter().map(|(b, e)| [*b, *e]).collect::<Vec<_>>()),
            (AnySpace::Product(p), AnyPoint::Pair(a, b)) => json!([p.left.point_to_json(a), p.right.point_to_json(b)]),
            (_, AnyPoint::Pair(a, b)) => json!([self.point_to_json(a), self.point_to_json(b)]),
        }
    }

    /// Parses `{"support": [..], "weights": [..]}`; weights default to uniform
    /// and are rescaled when they do not sum to one.
    pub fn parse_measure(&self, value: &Value) -> Result<DiscreteMeasure<AnyPoint>> {
        let support = value
            .get("support")
            .and_then(Value::as_array)
            .ok_or_else(|| FrechetError::config("measure needs a \"support\" array"))?;
        let points = support
            .iter()
            .map(|v| self.parse_point(v))
            .collect::<Result<Vec<_>>>()?;
        let measure = match value.get("weights") {
            None | Some(Value::Null) => DiscreteMeasure::uniform(points),
            Some(w) => {
                let weights: Vec<f64> = serde_json::from_value(w.clone())
                    .map_err(|e| FrechetError::config(format!("measure weights: {e}")))?;
                DiscreteMeasure::from_unnormalized(points, weights)
            }
        };
        measure.map_err(|e| FrechetError::config(format!("measure: {e}")))
    }
}

fn mismatch() -> FrechetError {
    FrechetError::argument("point type does not match the space")
}

fn down_measure<Q: Clone>(
    mu: &DiscreteMeasure<AnyPoint>,
    down: impl Fn(&AnyPoint) -> Option<Q>,
) -> Result<DiscreteMeasure<Q>> {
    let support = mu
        .support()
        .iter()
        .map(|x| down(x).ok_or_else(mismatch))
        .collect::<Result<Vec<_>>>()?;
    DiscreteMeasure::new(support, mu.weights().to_vec())
}

fn down_scheme<Q>(
    scheme: &CandidateScheme<AnyPoint>,
    down: impl Fn(&AnyPoint) -> Option<Q>,
) -> Result<CandidateScheme<Q>> {
    Ok(match scheme {
        CandidateScheme::Support => CandidateScheme::Support,
        CandidateScheme::Grid { step } => CandidateScheme::Grid { step: *step },
        CandidateScheme::BallGrid { center, radius, step } => CandidateScheme::BallGrid {
            center: down(center).ok_or_else(mismatch)?,
            radius: *radius,
            step: *step,
        },
        CandidateScheme::SolverSeeded { seed, radius, step } => CandidateScheme::SolverSeeded {
            seed: down(seed).ok_or_else(mismatch)?,
            radius: *radius,
            step: *step,
        },
    })
}

fn lift_candidates<S: MetricSpace>(
    space: &S,
    mu: &DiscreteMeasure<AnyPoint>,
    scheme: &CandidateScheme<AnyPoint>,
    down: impl Fn(&AnyPoint) -> Option<S::Point> + Copy,
    up: impl Fn(S::Point) -> AnyPoint,
) -> Result<CandidateSet<AnyPoint>> {
    let set = space.candidates(&down_measure(mu, down)?, &down_scheme(scheme, down)?)?;
    Ok(CandidateSet::new(
        set.points.into_iter().map(up).collect(),
        set.resolution,
    ))
}

fn vec_of(x: &AnyPoint) -> Option<Vec<f64>> {
    match x {
        AnyPoint::Vector(v) => Some(v.clone()),
        _ => None,
    }
}
fn spider_of(x: &AnyPoint) -> Option<SpiderPoint> {
    match x {
        AnyPoint::Spider(v) => Some(*v),
        _ => None,
    }
}
fn measure_of(x: &AnyPoint) -> Option<Measure1D> {
    match x {
        AnyPoint::Measure(v) => Some(v.clone()),
        _ => None,
    }
}
fn matrix_of(x: &AnyPoint) -> Option<DMatrix<f64>> {
    match x {
        AnyPoint::Matrix(v) => Some(v.clone()),
        _ => None,
    }
}
fn diagram_of(x: &AnyPoint) -> Option<Diagram> {
    match x {
        AnyPoint::Diagram(v) => Some(v.clone()),
        _ => None,
    }
}
fn pair_of(x: &AnyPoint) -> Option<(AnyPoint, AnyPoint)> {
    match x {
        AnyPoint::Pair(a, b) => Some(((**a).clone(), (**b).clone())),
        _ => None,
    }
}
fn pair_up((a, b): (AnyPoint, AnyPoint)) -> AnyPoint {
    AnyPoint::Pair(Box::new(a), Box::new(b))
}

macro_rules! dispatch {
    ($self:expr, $x:expr, $y:expr, |$s:ident, $a:ident, $b:ident| $body:expr, $fallback:expr) => {
        match ($self, $x, $y) {
            (AnySpace::Real($s) | AnySpace::Euclidean($s), AnyPoint::Vector($a), AnyPoint::Vector($b)) => $body,
            (AnySpace::Lq($s), AnyPoint::Vector($a), AnyPoint::Vector($b)) => $body,
            (AnySpace::Spider($s), AnyPoint::Spider($a), AnyPoint::Spider($b)) => $body,
            (AnySpace::Wasserstein($s), AnyPoint::Measure($a), AnyPoint::Measure($b)) => $body,
            (AnySpace::Bures($s), AnyPoint::Matrix($a), AnyPoint::Matrix($b)) => $body,
            (AnySpace::Persistence($s), AnyPoint::Diagram($a), AnyPoint::Diagram($b)) => $body,
            (AnySpace::Product($s), AnyPoint::Pair(a1, a2), AnyPoint::Pair(b1, b2)) => {
                let $a = &((**a1).clone(), (**a2).clone());
                let $b = &((**b1).clone(), (**b2).clone());
                let $s = &**$s;
                $body
            }
            (AnySpace::Quotient($s), $a, $b) => {
                let $s = &**$s;
                $body
            }
            (AnySpace::Regularized($s), $a, $b) => {
                let $s = &**$s;
                $body
            }
            _ => $fallback,
        }
    };
}

impl MetricSpace for AnySpace {
    type Point = AnyPoint;

    fn distance(&self, x: &AnyPoint, y: &AnyPoint) -> f64 {
        dispatch!(self, x, y, |s, a, b| s.distance(a, b), f64::NAN)
    }

    fn check_point(&self, x: &AnyPoint) -> Result<()> {
        dispatch!(self, x, x, |s, a, _b| s.check_point(a), Err(mismatch()))
    }

    fn same_point(&self, x: &AnyPoint, y: &AnyPoint) -> bool {
        dispatch!(self, x, y, |s, a, b| s.same_point(a, b), false)
    }

    fn candidates(
        &self,
        mu: &DiscreteMeasure<AnyPoint>,
        scheme: &CandidateScheme<AnyPoint>,
    ) -> Result<CandidateSet<AnyPoint>> {
        mu.check_in(self)?;
        match self {
            AnySpace::Real(s) | AnySpace::Euclidean(s) => lift_candidates(s, mu, scheme, vec_of, AnyPoint::Vector),
            AnySpace::Lq(s) => lift_candidates(s, mu, scheme, vec_of, AnyPoint::Vector),
            AnySpace::Spider(s) => lift_candidates(s, mu, scheme, spider_of, AnyPoint::Spider),
            AnySpace::Wasserstein(s) => lift_candidates(s, mu, scheme, measure_of, AnyPoint::Measure),
            AnySpace::Bures(s) => lift_candidates(s, mu, scheme, matrix_of, AnyPoint::Matrix),
            AnySpace::Persistence(s) => lift_candidates(s, mu, scheme, diagram_of, AnyPoint::Diagram),
            AnySpace::Product(s) => lift_candidates(&**s, mu, scheme, pair_of, pair_up),
            AnySpace::Quotient(s) => s.candidates(mu, scheme),
            AnySpace::Regularized(s) => s.candidates(mu, scheme),
        }
    }

    fn refine_around(&self, x: &AnyPoint, radius: f64, resolution: f64) -> Result<Vec<AnyPoint>> {
        fn lift<S: MetricSpace>(
            s: &S,
            x: Option<S::Point>,
            radius: f64,
            resolution: f64,
            up: impl Fn(S::Point) -> AnyPoint,
        ) -> Result<Vec<AnyPoint>> {
            let x = x.ok_or_else(mismatch)?;
            Ok(s.refine_around(&x, radius, resolution)?.into_iter().map(up).collect())
        }
        match self {
            AnySpace::Real(s) | AnySpace::Euclidean(s) => lift(s, vec_of(x), radius, resolution, AnyPoint::Vector),
            AnySpace::Lq(s) => lift(s, vec_of(x), radius, resolution, AnyPoint::Vector),
            AnySpace::Spider(s) => lift(s, spider_of(x), radius, resolution, AnyPoint::Spider),
            AnySpace::Wasserstein(s) => lift(s, measure_of(x), radius, resolution, AnyPoint::Measure),
            AnySpace::Bures(s) => lift(s, matrix_of(x), radius, resolution, AnyPoint::Matrix),
            AnySpace::Persistence(s) => lift(s, diagram_of(x), radius, resolution, AnyPoint::Diagram),
            AnySpace::Product(s) => lift(&**s, pair_of(x), radius, resolution, pair_up),
            AnySpace::Quotient(s) => s.refine_around(x, radius, resolution),
            AnySpace::Regularized(s) => s.refine_around(x, radius, resolution),
        }
    }

    fn describe(&self) -> String {
        match self {
            AnySpace::Real(_) => "the real line".to_string(),
            AnySpace::Euclidean(s) => s.describe(),
            AnySpace::Lq(s) => s.describe(),
            AnySpace::Spider(s) => s.describe(),
            AnySpace::Wasserstein(s) => s.describe(),
            AnySpace::Bures(s) => s.describe(),
            AnySpace::Persistence(s) => s.describe(),
            AnySpace::Product(s) => s.describe(),
            AnySpace::Quotient(s) => s.describe(),
            AnySpace::Regularized(s) => s.describe(),
        }
    }
}

/// The specialized solver for a space and exponent, if one exists.
pub fn default_solver(space: &AnySpace, p: f64) -> SolverKind {
    match space {
        AnySpace::Real(_) | AnySpace::Euclidean(_) if p == 1.0 => SolverKind::Weiszfeld,
        AnySpace::Real(_) | AnySpace::Euclidean(_) => SolverKind::Subgradient,
        AnySpace::Wasserstein(w) if p == 2.0 && w.q == 2.0 => SolverKind::Quantile,
        AnySpace::Bures(_) if p == 2.0 => SolverKind::BwFixedPoint,
        _ => SolverKind::Grid,
    }
}

/// Request for [`compute_mean_set`].
#[derive(Debug, Clone)]
pub struct MeanRequest {
    pub p: f64,
    pub epsilon: f64,
    pub solver: SolverKind,
    /// Candidates for the grid solver.
    pub scheme: CandidateScheme<AnyPoint>,
    pub refine_rounds: usize,
    pub origin: Option<AnyPoint>,
    pub solver_config: SolverConfig,
}

/// Approximates `M_p(μ; ε)` with the requested solver. Specialized solvers
/// return one minimizer with resolution zero; the grid solver returns the
/// full band, optionally refined.
pub fn compute_mean_set(
    space: &AnySpace,
    mu: &DiscreteMeasure<AnyPoint>,
    request: &MeanRequest,
) -> Result<MeanSetApprox<AnyPoint>> {
    let mut config = FrechetConfig::new(request.p).with_epsilon(request.epsilon);
    if let Some(o) = &request.origin {
        config = config.with_origin(o.clone());
    }
    config.validate()?;
    mu.check_in(space)?;
    let origin = request.origin.clone().unwrap_or_else(|| mu.first_atom().clone());
    let singleton = |x: AnyPoint| -> Result<MeanSetApprox<AnyPoint>> {
        let value = frechet_functional(space, mu, &x, &origin, request.p)?;
        Ok(MeanSetApprox::singleton(x, 0.0, value))
    };
    match request.solver {
        SolverKind::Grid => {
            let grid = space.candidates(mu, &request.scheme)?;
            let band = relaxed_mean_set(space, mu, &config, &grid)?;
            if request.refine_rounds > 0 {
                refine_rounds(space, mu, &config, &band, request.refine_rounds)
            } else {
                Ok(band)
            }
        }
        SolverKind::Weiszfeld | SolverKind::Subgradient => {
            let e = space.as_euclidean().ok_or_else(|| {
                FrechetError::config(format!("solver {} needs a real or euclidean space", request.solver))
            })?;
            if request.solver == SolverKind::Weiszfeld && request.p != 1.0 {
                return Err(FrechetError::config("the weiszfeld solver requires p = 1"));
            }
            let out = euclidean_pmean(e, &down_measure(mu, vec_of)?, request.p, &request.solver_config)?;
            singleton(AnyPoint::Vector(out.point))
        }
        SolverKind::Quantile => {
            let AnySpace::Wasserstein(w) = space else {
                return Err(FrechetError::config("the quantile solver needs a wasserstein1d space"));
            };
            let bary = quantile_barycenter(w, &down_measure(mu, measure_of)?, request.p)?;
            singleton(AnyPoint::Measure(bary))
        }
        SolverKind::BwFixedPoint => {
            let AnySpace::Bures(b) = space else {
                return Err(FrechetError::config(
                    "the bw-fixed-point solver needs a bures_wasserstein space",
                ));
            };
            if request.p != 2.0 {
                return Err(FrechetError::config("the bw-fixed-point solver requires p = 2"));
            }
            let out = bw_barycenter(b, &down_measure(mu, matrix_of)?, &request.solver_config)?;
            singleton(AnyPoint::Matrix(out.point))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(v: Value) -> AnySpace {
        AnySpace::from_json(&v).unwrap()
    }

    #[test]
    fn diagram_distance_from_json() {
        let s = space(json!({"kind": "persistence", "q": 2}));
        let x = s.parse_point(&json!([[0.0, 2.0]])).unwrap();
        let y = s.parse_point(&json!([])).unwrap();
        assert!((s.distance(&x, &y) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn real_mean_via_default_solver() {
        let s = space(json!({"kind": "real"}));
        let mu = s.parse_measure(&json!({"support": [1, 2, 3]})).unwrap();
        let req = MeanRequest {
            p: 2.0,
            epsilon: 0.0,
            solver: default_solver(&s, 2.0),
            scheme: CandidateScheme::Support,
            refine_rounds: 0,
            origin: None,
            solver_config: SolverConfig::default(),
        };
        let m = compute_mean_set(&s, &mu, &req).unwrap();
        assert_eq!(s.point_to_json(&m.points[0]), json!(2.0));
    }

    #[test]
    fn product_and_quotient_points() {
        let s =
            space(json!({"kind": "product", "left": {"kind": "real"}, "right": {"kind": "spider", "legs": 3}, "q": 1}));
        let x = s.parse_point(&json!([0.0, [1, 0.5]])).unwrap();
        let y = s.parse_point(&json!([1.0, [2, 0.5]])).unwrap();
        assert!((s.distance(&x, &y) - 2.0).abs() < 1e-12);
        assert_eq!(s.point_to_json(&x), json!([0.0, [1, 0.5]]));
        let q = space(
            json!({"kind": "quotient", "base": {"kind": "real"}, "group": {"preset": {"name": "sign_flip", "dim": 1}}}),
        );
        let a = q.parse_point(&json!(3.0)).unwrap();
        let b = q.parse_point(&json!(-5.0)).unwrap();
        assert!((q.distance(&a, &b) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn config_errors() {
        assert!(AnySpace::from_json(&json!({"kind": "euclidean", "dim": 0})).is_err());
        assert!(AnySpace::from_json(&json!({"kind": "warp"})).is_err());
        let s = space(json!({"kind": "euclidean", "dim": 2}));
        assert!(matches!(s.parse_point(&json!([1.0])), Err(FrechetError::Config(_))));
        let bad = AnySpace::from_json(
            &json!({"kind": "quotient", "base": {"kind": "spider", "legs": 3}, "group": {"preset": {"name": "trivial", "dim": 1}}}),
        );
        assert!(bad.is_err());
    }
}
