//! Serde adapters writing complex numbers as `{"re": .., "im": ..}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReIm {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<Complex64> for ReIm {
    fn from(z: Complex64) -> Self {
        ReIm { re: z.re, im: z.im }
    }
}

impl From<ReIm> for Complex64 {
    fn from(z: ReIm) -> Self {
        Complex64::new(z.re, z.im)
    }
}

pub fn serialize<S: Serializer>(z: &Complex64, ser: S) -> Result<S::Ok, S::Error> {
    ReIm::from(*z).serialize(ser)
}

pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Complex64, D::Error> {
    ReIm::deserialize(de).map(Complex64::from)
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter().map(|z| ReIm::from(*z)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Complex64>, D::Error> {
        Vec::<ReIm>::deserialize(de).map(|v| v.into_iter().map(Complex64::from).collect())
    }
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Option<Complex64>, ser: S) -> Result<S::Ok, S::Error> {
        z.map(ReIm::from).serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Complex64>, D::Error> {
        Option::<ReIm>::deserialize(de).map(|z| z.map(Complex64::from))
    }
}

/// Row-major nested arrays of `{re, im}`.
pub mod matrix {
    use super::*;
    use serde::de::Error as _;

    pub fn serialize<S: Serializer>(m: &DMatrix<Complex64>, ser: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<ReIm>> = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| ReIm::from(m[(i, j)])).collect())
            .collect();
        rows.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<DMatrix<Complex64>, D::Error> {
        let rows = Vec::<Vec<ReIm>>::deserialize(de)?;
        let n = rows.len();
        if n == 0 {
            return Err(D::Error::custom("matrix must be non-empty"));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(D::Error::custom("matrix must be square"));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j].into()))
    }
}
