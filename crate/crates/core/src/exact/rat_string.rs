//! Serde adapter writing a [`Rat`] as the string `"p/q"` (or `"p"` when integral).
//!
//! Use with `#[serde(with = "kmzeta::exact::rat_string")]`.

use serde::{de, Deserialize, Deserializer, Serializer};

use super::Rat;

pub fn serialize<S: Serializer>(q: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(q)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
    let s = String::deserialize(d)?;
    s.trim().parse::<Rat>().map_err(|e| de::Error::custom(format!("invalid rational {s:?}: {e}")))
}
