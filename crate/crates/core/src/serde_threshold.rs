//! JSON has no infinity, so the sentinel threshold is written as the string
//! `"sentinel"`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::metrics::SENTINEL;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Value(f64),
    Tag(String),
}

fn to_repr(t: f64) -> Repr {
    if t.is_infinite() {
        Repr::Tag("sentinel".into())
    } else {
        Repr::Value(t)
    }
}

fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
    match r {
        Repr::Value(v) => Ok(v),
        Repr::Tag(s) if s == "sentinel" => Ok(SENTINEL),
        Repr::Tag(s) => Err(E::custom(format!("unknown threshold tag {s:?}"))),
    }
}

pub fn serialize<S: Serializer>(t: &f64, s: S) -> Result<S::Ok, S::Error> {
    to_repr(*t).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    from_repr(Repr::deserialize(d)?)
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(t: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        t.map(to_repr).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<Repr>::deserialize(d)?.map(from_repr).transpose()
    }
}
