//! Wire formats shared by the library and the CLI.
//!
//! Matrices travel as `{"rows": r, "cols": c, "data": [[re, im], ...]}` in row-major
//! order. Channels, resource sets and groups embed that encoding.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{ComplexMatrix, C64};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(m: MatrixJson) -> Result<Self, Error> {
        let data = m.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        ComplexMatrix::new(m.rows, m.cols, data)
    }
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        let (rows, cols) = (m.rows(), m.cols());
        let data = m.into_data().into_iter().map(|z| [z.re, z.im]).collect();
        MatrixJson { rows, cols, data }
    }
}

/// Parses a JSON document, mapping serde failures onto [`Error::Parse`].
pub fn from_str<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, Error> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}
