//! JSON encoding of complex numbers as `[re, im]` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub(crate) fn to_pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

pub(crate) fn from_pairs(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

pub(crate) fn serialize<S: Serializer>(values: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    to_pairs(values).serialize(s)
}

pub(crate) fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
    let pairs = Vec::<[f64; 2]>::deserialize(d)?;
    Ok(from_pairs(&pairs))
}

pub(crate) mod single {
    use num_complex::Complex64;
    use serde::{Serialize, Serializer};

    pub(crate) fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }
}
