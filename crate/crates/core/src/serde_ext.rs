//! JSON encodings for reals that may be infinite or NaN, written as the
//! strings `"inf"`, `"-inf"` and `"nan"`.

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Real {
    Number(f64),
    Text(String),
}

fn encode(v: f64) -> Real {
    if v.is_finite() {
        Real::Number(v)
    } else if v.is_nan() {
        Real::Text("nan".into())
    } else if v > 0.0 {
        Real::Text("inf".into())
    } else {
        Real::Text("-inf".into())
    }
}

fn decode<E: de::Error>(r: Real) -> Result<f64, E> {
    match r {
        Real::Number(v) => Ok(v),
        Real::Text(s) => match s.as_str() {
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            "nan" => Ok(f64::NAN),
            other => Err(E::custom(format!(
                "expected a number, \"inf\", \"-inf\" or \"nan\", got {other:?}"
            ))),
        },
    }
}

/// Formats a real for CSV: shortest round-trip decimal, `inf`/`-inf`/`nan` otherwise.
pub fn csv_real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:?}")
    }
}

pub mod real {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        encode(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        decode(Real::deserialize(d)?)
    }
}

pub mod real_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| encode(*x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Real>::deserialize(d)?.into_iter().map(decode).collect()
    }
}

pub mod real_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|row| row.iter().map(|x| encode(*x)).collect::<Vec<_>>()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
        Vec::<Vec<Real>>::deserialize(d)?
            .into_iter()
            .map(|row| row.into_iter().map(decode).collect())
            .collect()
    }
}
