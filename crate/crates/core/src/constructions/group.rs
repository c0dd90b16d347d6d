//! Finite groups acting linearly on vector-valued points.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{FrechetError, Result};
use crate::metric::MetricSpace;

/// A finite group acting on points of type `P`, elements indexed `0..order()`.
pub trait GroupAction<P>: Send + Sync {
    fn order(&self) -> usize;
    fn identity(&self) -> usize;
    fn inverse(&self, g: usize) -> usize;
    /// Index of `g ∘ h`.
    fn compose(&self, g: usize, h: usize) -> usize;
    fn act(&self, g: usize, x: &P) -> P;
    /// `ρ(g, e)`, when the group carries a length function.
    fn length(&self, g: usize) -> Option<f64>;
}

/// A finite matrix group acting on `ℝ^dim`, with optional lengths `ρ(g, e)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    labels: Vec<String>,
    matrices: Vec<DMatrix<f64>>,
    lengths: Option<Vec<f64>>,
    compose: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    identity: usize,
}

/// JSON form: `{"elements": [{"label": .., "matrix": [[..]]} | {"label": .., "permutation": [..]}], "lengths": [..]}`.
///
/// A permutation `π` acts by `(g·x)_i = x_{π(i)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpecJson {
    pub elements: Vec<GroupElementSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElementSpec {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
}

fn rotation(angle: f64) -> DMatrix<f64> {
    let (s, c) = angle.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Angle in `(−π, π]`.
fn wrap_angle(a: f64) -> f64 {
    let mut w = a % (2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    } else if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

const FINGERPRINT_SCALE: f64 = 1e8;

/// Images of two fixed generic probe vectors, rounded; identifies a linear map within a finite group.
fn fingerprint(m: &DMatrix<f64>) -> Vec<i64> {
    let n = m.ncols();
    let probe_a = DVector::from_fn(n, |i, _| 1.0 + (i as f64 + 1.0).sqrt() * 0.73);
    let probe_b = DVector::from_fn(n, |i, _| ((i as f64 + 2.0) * 1.618).sin());
    (m * probe_a)
        .iter()
        .chain((m * probe_b).iter())
        .map(|v| (v * FINGERPRINT_SCALE).round() as i64)
        .collect()
}

impl GroupSpec {
    /// Builds the group from its matrices, deriving the identity, inverse, and
    /// composition tables. Fails unless the matrices form a group.
    pub fn from_matrices(labels: Vec<String>, matrices: Vec<DMatrix<f64>>, lengths: Option<Vec<f64>>) -> Result<Self> {
        if matrices.is_empty() || labels.len() != matrices.len() {
            return Err(FrechetError::config(
                "group needs one label per element and at least one element",
            ));
        }
        let dim = matrices[0].nrows();
        if matrices.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(FrechetError::config(
                "group matrices must all be square of the same size",
            ));
        }
        let prints: Vec<Vec<i64>> = matrices.iter().map(fingerprint).collect();
        let index: HashMap<&Vec<i64>, usize> = prints.iter().enumerate().map(|(i, f)| (f, i)).collect();
        if index.len() != matrices.len() {
            return Err(FrechetError::config("group elements are not distinct"));
        }
        let identity = *index
            .get(&fingerprint(&DMatrix::identity(dim, dim)))
            .ok_or_else(|| FrechetError::config("group has no identity element"))?;
        let mut compose = vec![vec![0usize; matrices.len()]; matrices.len()];
        for (g, mg) in matrices.iter().enumerate() {
            for (h, mh) in matrices.iter().enumerate() {
                let prod = mg * mh;
                compose[g][h] = *index.get(&fingerprint(&prod)).ok_or_else(|| {
                    FrechetError::config(format!("group is not closed: {} * {}", labels[g], labels[h]))
                })?;
            }
        }
        let inverse = (0..matrices.len())
            .map(|g| {
                compose[g]
                    .iter()
                    .position(|&k| k == identity)
                    .ok_or_else(|| FrechetError::config(format!("{} has no inverse", labels[g])))
            })
            .collect::<Result<Vec<_>>>()?;
        let spec = Self {
            labels,
            matrices,
            lengths: None,
            compose,
            inverse,
            identity,
        };
        spec.with_lengths(lengths)
    }

    /// Attaches (or clears) the length function, checking `ρ(e,e) = 0` and `ρ(g⁻¹,e) = ρ(g,e)`.
    pub fn with_lengths(mut self, lengths: Option<Vec<f64>>) -> Result<Self> {
        if let Some(l) = &lengths {
            if l.len() != self.order() {
                return Err(FrechetError::config(format!(
                    "{} lengths given for a group of order {}",
                    l.len(),
                    self.order()
                )));
            }
            if l.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(FrechetError::config("lengths must be finite and nonnegative"));
            }
            if l[self.identity] != 0.0 {
                return Err(FrechetError::config("the identity must have length zero"));
            }
            for g in 0..self.order() {
                if (l[g] - l[self.inverse[g]]).abs() > 1e-12 * (1.0 + l[g]) {
                    return Err(FrechetError::config(format!(
                        "length of {} differs from the length of its inverse",
                        self.labels[g]
                    )));
                }
            }
        }
        self.lengths = lengths;
        Ok(self)
    }

    pub fn from_json_spec(spec: &GroupSpecJson) -> Result<Self> {
        let mut labels = Vec::with_capacity(spec.elements.len());
        let mut matrices = Vec::with_capacity(spec.elements.len());
        for el in &spec.elements {
            let m = match (&el.matrix, &el.permutation) {
                (Some(rows), None) => {
                    let n = rows.len();
                    if n == 0 || rows.iter().any(|r| r.len() != n) {
                        return Err(FrechetError::config(format!(
                            "element {} has a non-square matrix",
                            el.label
                        )));
                    }
                    DMatrix::from_fn(n, n, |i, j| rows[i][j])
                }
                (None, Some(perm)) => {
                    let n = perm.len();
                    let mut seen = vec![false; n];
                    for &k in perm {
                        if k >= n || std::mem::replace(&mut seen[k], true) {
                            return Err(FrechetError::config(format!(
                                "element {} is not a permutation",
                                el.label
                            )));
                        }
                    }
                    DMatrix::from_fn(n, n, |i, j| if perm[i] == j { 1.0 } else { 0.0 })
                }
                _ => {
                    return Err(FrechetError::config(format!(
                        "element {} needs exactly one of matrix or permutation",
                        el.label
                    )))
                }
            };
            labels.push(el.label.clone());
            matrices.push(m);
        }
        Self::from_matrices(labels, matrices, spec.lengths.clone())
    }

    pub fn to_json_spec(&self) -> GroupSpecJson {
        GroupSpecJson {
            elements: self
                .labels
                .iter()
                .zip(&self.matrices)
                .map(|(label, m)| GroupElementSpec {
                    label: label.clone(),
                    matrix: Some((0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()),
                    permutation: None,
                })
                .collect(),
            lengths: self.lengths.clone(),
        }
    }

    /// The one-element group on `ℝ^dim`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            labels: vec!["e".into()],
            matrices: vec![DMatrix::identity(dim, dim)],
            lengths: Some(vec![0.0]),
            compose: vec![vec![0]],
            inverse: vec![0],
            identity: 0,
        }
    }

    /// `{x ↦ x, x ↦ −x}` on `ℝ^dim`, with `ρ(flip, e) = 1`.
    pub fn sign_flip(dim: usize) -> Self {
        Self {
            labels: vec!["e".into(), "flip".into()],
            matrices: vec![DMatrix::identity(dim, dim), -DMatrix::identity(dim, dim)],
            lengths: Some(vec![0.0, 1.0]),
            compose: vec![vec![0, 1], vec![1, 0]],
            inverse: vec![0, 1],
            identity: 0,
        }
    }

    /// Rotations of the plane by multiples of `2π/order`, with `ρ` the absolute rotation angle.
    pub fn cyclic_rotations(order: usize) -> Result<Self> {
        Self::loop_symmetries(1, order)
    }

    /// Cyclic reindexing of `samples` planar points times rotations by
    /// multiples of `2π/rotations`, acting on `ℝ^{2·samples}` laid out as
    /// `(x₀, y₀, x₁, y₁, …)`: `((k, j)·f)_i = R_j f_{i−k}`.
    ///
    /// `ρ((k, j), e) = ‖(θ_k, φ_j)‖` with both angles wrapped to `(−π, π]`.
    pub fn loop_symmetries(samples: usize, rotations: usize) -> Result<Self> {
        if samples == 0 || rotations == 0 {
            return Err(FrechetError::config(
                "loop symmetries need at least one sample and one rotation",
            ));
        }
        let dim = 2 * samples;
        let order = samples * rotations;
        let idx = |k: usize, j: usize| k * rotations + j;
        let mut labels = Vec::with_capacity(order);
        let mut matrices = Vec::with_capacity(order);
        let mut lengths = Vec::with_capacity(order);
        for k in 0..samples {
            for j in 0..rotations {
                let phi = 2.0 * PI * j as f64 / rotations as f64;
                let theta = 2.0 * PI * k as f64 / samples as f64;
                let r = rotation(phi);
                let mut m = DMatrix::zeros(dim, dim);
                for i in 0..samples {
                    let src = (i + samples - k) % samples;
                    m.view_mut((2 * i, 2 * src), (2, 2)).copy_from(&r);
                }
                labels.push(format!("shift{k}-rot{j}"));
                matrices.push(m);
                let (wt, wp) = if samples == 1 {
                    (0.0, wrap_angle(phi))
                } else {
                    (wrap_angle(theta), wrap_angle(phi))
                };
                lengths.push(wt.hypot(wp));
            }
        }
        let mut compose = vec![vec![0; order]; order];
        let mut inverse = vec![0; order];
        for k in 0..samples {
            for j in 0..rotations {
                for k2 in 0..samples {
                    for j2 in 0..rotations {
                        compose[idx(k, j)][idx(k2, j2)] = idx((k + k2) % samples, (j + j2) % rotations);
                    }
                }
                inverse[idx(k, j)] = idx((samples - k) % samples, (rotations - j) % rotations);
            }
        }
        Ok(Self {
            labels,
            matrices,
            lengths: Some(lengths),
            compose,
            inverse,
            identity: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self, g: usize) -> &DMatrix<f64> {
        &self.matrices[g]
    }

    pub fn lengths(&self) -> Option<&[f64]> {
        self.lengths.as_deref()
    }

    /// Re-derives the tables from the matrices and compares them with the stored ones.
    pub fn check_axioms(&self) -> Result<()> {
        let derived = Self::from_matrices(self.labels.clone(), self.matrices.clone(), None)?;
        if derived.compose != self.compose || derived.inverse != self.inverse || derived.identity != self.identity {
            return Err(FrechetError::config("group tables disagree with the matrices"));
        }
        let n = self.order();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.compose[self.compose[a][b]][c] != self.compose[a][self.compose[b][c]] {
                        return Err(FrechetError::config("composition is not associative"));
                    }
                }
            }
        }
        Ok(())
    }
}

impl GroupAction<Vec<f64>> for GroupSpec {
    fn order(&self) -> usize {
        self.matrices.len()
    }

    fn identity(&self) -> usize {
        self.identity
    }

    fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    fn compose(&self, g: usize, h: usize) -> usize {
        self.compose[g][h]
    }

    fn act(&self, g: usize, x: &Vec<f64>) -> Vec<f64> {
        if g == self.identity {
            return x.clone();
        }
        let m = &self.matrices[g];
        (0..m.nrows())
            .map(|i| m.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn length(&self, g: usize) -> Option<f64> {
        self.lengths.as_ref().map(|l| l[g])
    }
}

/// Verifies `d(g·x, g·y) = d(x, y)` for every element on the sampled pairs.
pub fn check_isometry<S, G>(space: &S, group: &G, pairs: &[(S::Point, S::Point)], tolerance: f64) -> Result<()>
where
    S: MetricSpace,
    G: GroupAction<S::Point>,
{
    for (x, y) in pairs {
        let d = space.distance(x, y);
        for g in 0..group.order() {
            let dg = space.distance(&group.act(g, x), &group.act(g, y));
            if (dg - d).abs() > tolerance * (1.0 + d) {
                return Err(FrechetError::config(format!(
                    "group element {g} is not an isometry: {dg} vs {d}"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_satisfy_group_axioms() {
        GroupSpec::trivial(3).check_axioms().unwrap();
        GroupSpec::sign_flip(2).check_axioms().unwrap();
        GroupSpec::cyclic_rotations(6).unwrap().check_axioms().unwrap();
        GroupSpec::loop_symmetries(4, 3).unwrap().check_axioms().unwrap();
    }

    #[test]
    fn json_permutation_group() {
        let spec: GroupSpecJson = serde_json::from_str(
            r#"{"elements":[{"label":"e","permutation":[0,1,2]},{"label":"c","permutation":[1,2,0]},{"label":"c2","permutation":[2,0,1]}],"lengths":[0,1,1]}"#,
        )
        .unwrap();
        let g = GroupSpec::from_json_spec(&spec).unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(g.act(1, &vec![10.0, 20.0, 30.0]), vec![20.0, 30.0, 10.0]);
        assert_eq!(g.compose(1, 1), 2);
        assert_eq!(g.inverse(1), 2);
        let back = GroupSpec::from_json_spec(&g.to_json_spec()).unwrap();
        assert_eq!(back.compose, g.compose);
    }

    #[test]
    fn non_groups_are_rejected() {
        let spec = GroupSpecJson {
            elements: vec![
                GroupElementSpec {
                    label: "e".into(),
                    matrix: Some(vec![vec![1.0]]),
                    permutation: None,
                },
                GroupElementSpec {
                    label: "double".into(),
                    matrix: Some(vec![vec![2.0]]),
                    permutation: None,
                },
            ],
            lengths: None,
        };
        assert!(GroupSpec::from_json_spec(&spec).is_err());
        let asymmetric = GroupSpec::cyclic_rotations(3)
            .unwrap()
            .with_lengths(Some(vec![0.0, 1.0, 2.0]));
        assert!(asymmetric.is_err());
    }

    #[test]
    fn rotation_lengths_are_wrapped_angles() {
        let g = GroupSpec::cyclic_rotations(4).unwrap();
        let l = g.lengths().unwrap();
        assert_eq!(l[0], 0.0);
        assert!((l[1] - PI / 2.0).abs() < 1e-15);
        assert!((l[2] - PI).abs() < 1e-15);
        assert!((l[3] - PI / 2.0).abs() < 1e-15);
    }
}
