//! JSON encoding of unbounded naturals: a plain number when it fits in
//! `u64`, a decimal string otherwise.

use num_traits::ToPrimitive;
use serde::Serializer;
use serde_json::Value;

use crate::bounds::Nat;

pub fn serialize_nat<S: Serializer>(v: &Nat, s: S) -> Result<S::Ok, S::Error> {
    match v.to_u64() {
        Some(small) => s.serialize_u64(small),
        None => s.serialize_str(&v.to_string()),
    }
}

pub fn nat_value(v: &Nat) -> Value {
    match v.to_u64() {
        Some(small) => Value::from(small),
        None => Value::String(v.to_string()),
    }
}

pub fn nats_value(vs: &[Nat]) -> Value {
    Value::Array(vs.iter().map(nat_value).collect())
}

/// Accepts a JSON number or a decimal string.
pub fn deserialize_nat<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Nat, D::Error> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(u64),
        Str(String),
    }
    match <Raw as serde::Deserialize>::deserialize(d)? {
        Raw::Num(v) => Ok(Nat::from(v)),
        Raw::Str(s) => s
            .parse()
            .map_err(|_| serde::de::Error::custom(format!("expected a natural number, got {s:?}"))),
    }
}
