//! Serde helpers for arbitrary-precision integers.
//!
//! Integers that fit in an `i64` are written as plain JSON numbers, larger
//! ones as decimal strings. Both spellings are accepted on input.

use std::fmt;

use rug::Integer;
use serde::de::{self, Visitor};
use serde::{Deserializer, Serializer};

pub fn serialize<S: Serializer>(value: &Integer, serializer: S) -> Result<S::Ok, S::Error> {
    match value.to_i64() {
        Some(v) => serializer.serialize_i64(v),
        None => serializer.serialize_str(&value.to_string()),
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Integer, D::Error> {
    deserializer.deserialize_any(IntegerVisitor)
}

struct IntegerVisitor;

impl<'de> Visitor<'de> for IntegerVisitor {
    type Value = Integer;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal integer string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Integer, E> {
        Ok(Integer::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Integer, E> {
        Ok(Integer::from(v))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Integer, E> {
        Err(E::custom(format!("expected an integer, found {v}")))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Integer, E> {
        Integer::from_str_radix(v.trim(), 10)
            .map_err(|e| E::custom(format!("invalid integer {v:?}: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Holder(#[serde(with = "super")] Integer);

    #[test]
    fn small_values_are_numbers() {
        let s = serde_json::to_string(&Holder(Integer::from(-42))).unwrap();
        assert_eq!(s, "-42");
    }

    #[test]
    fn large_values_are_strings() {
        let big = Integer::from(i64::MAX) + 1u32;
        let s = serde_json::to_string(&Holder(big.clone())).unwrap();
        assert_eq!(s, "\"9223372036854775808\"");
        let back: Holder = serde_json::from_str(&s).unwrap();
        assert_eq!(back.0, big);
    }

    #[test]
    fn accepts_string_for_small_values() {
        let back: Holder = serde_json::from_str("\"17\"").unwrap();
        assert_eq!(back.0, 17);
    }

    #[test]
    fn rejects_fractions() {
        assert!(serde_json::from_str::<Holder>("1.5").is_err());
    }
}
