//! Serde helpers emitting integers beyond 2^53 as decimal strings.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer, Visitor};
use serde::Serializer;
use std::fmt;

const SAFE: i64 = 1 << 53;

pub fn is_json_safe(n: &BigInt) -> bool {
    n.to_i64().is_some_and(|v| v.abs() <= SAFE)
}

struct IntVisitor;

impl<'de> Visitor<'de> for IntVisitor {
    type Value = BigInt;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "an integer or a decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<BigInt, E> {
        Ok(v.into())
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<BigInt, E> {
        Ok(v.into())
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<BigInt, E> {
        v.parse().map_err(E::custom)
    }
}

/// `#[serde(with = "bigint")]` for `BigInt` fields.
pub mod bigint {
    use super::*;

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        if is_json_safe(n) {
            s.serialize_i64(n.to_i64().unwrap())
        } else {
            s.serialize_str(&n.to_string())
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        d.deserialize_any(IntVisitor)
    }
}

/// `#[serde(with = "bigint_vec")]` for `Vec<BigInt>` fields.
pub mod bigint_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::Deserialize;

    #[derive(serde::Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::bigint")] BigInt);

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for n in v {
            seq.serialize_element(&Wrap(n.clone()))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v: Vec<Wrap> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|w| w.0).collect())
    }
}

/// `#[serde(with = "bigint_array3")]` for `[BigInt; 3]` fields.
pub mod bigint_array3 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt; 3], s: S) -> Result<S::Ok, S::Error> {
        super::bigint_vec::serialize(v, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[BigInt; 3], D::Error> {
        let v = super::bigint_vec::deserialize(d)?;
        v.try_into()
            .map_err(|v: Vec<BigInt>| de::Error::invalid_length(v.len(), &"three integers"))
    }
}

/// `#[serde(with = "bigint_array3_vec")]` for `Vec<[BigInt; 3]>` fields.
pub mod bigint_array3_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::Deserialize;

    #[derive(serde::Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::bigint_array3")] [BigInt; 3]);

    pub fn serialize<S: Serializer>(v: &[[BigInt; 3]], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for n in v {
            seq.serialize_element(&Wrap(n.clone()))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<[BigInt; 3]>, D::Error> {
        let v: Vec<Wrap> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|w| w.0).collect())
    }
}

/// Same policy for `i64` fields.
pub mod int64 {
    use super::*;

    pub fn serialize<S: Serializer>(n: &i64, s: S) -> Result<S::Ok, S::Error> {
        if n.abs() <= SAFE {
            s.serialize_i64(*n)
        } else {
            s.serialize_str(&n.to_string())
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<i64, D::Error> {
        super::bigint::deserialize(d)?
            .to_i64()
            .ok_or_else(|| de::Error::custom("integer out of i64 range"))
    }
}
