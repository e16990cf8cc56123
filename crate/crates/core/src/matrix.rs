//! Preference matrices: the ground truth of a dueling-bandit environment.
//!
//! Entry `p[i][j]` is the probability that arm `i` beats arm `j` in a single
//! duel. Arms are 0-indexed everywhere in this crate, so the arm written
//! `a_1` in the usual 1-indexed notation is arm `0` here.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance applied when validating user-supplied matrices.
pub const VALIDATION_TOL: f64 = 1e-9;

/// Tolerance for the internal complementarity invariant after validation.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("matrix is not square: row {row} has {len} entries, expected {k}")]
    NonSquare { row: usize, len: usize, k: usize },
    #[error("matrix must have at least 2 arms, got {0}")]
    TooSmall(usize),
    #[error("entry p[{i}][{j}] = {value} is outside [0, 1]")]
    OutOfRange { i: usize, j: usize, value: f64 },
    #[error("p[{i}][{j}] + p[{j}][{i}] = {sum}, expected 1")]
    AsymmetryViolation { i: usize, j: usize, sum: f64 },
    #[error("diagonal entry p[{i}][{i}] = {value}, expected 0.5")]
    BadDiagonal { i: usize, value: f64 },
    #[error("malformed matrix file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Index of an arm in `[0, K)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArmId(pub usize);

impl ArmId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ArmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for ArmId {
    fn from(i: usize) -> Self {
        ArmId(i)
    }
}

/// A validated K×K preference matrix, stored row-major.
///
/// Invariants: `K >= 2`, entries in `[0, 1]`, `p[i][i] == 0.5`, and
/// `p[i][j] + p[j][i] == 1` to within [`SYMMETRY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceMatrix {
    k: usize,
    p: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    k: usize,
    p: Vec<Vec<f64>>,
}

impl PreferenceMatrix {
    /// Validates a raw matrix of rows.
    ///
    /// Diagonal entries within [`VALIDATION_TOL`] of 0.5 are snapped to exactly
    /// 0.5, and the lower triangle is rewritten as `1 - p[j][i]` so that the
    /// stored matrix is exactly complementary.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let k = rows.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != k {
                return Err(MatrixError::NonSquare { row, len: r.len(), k });
            }
        }
        if k < 2 {
            return Err(MatrixError::TooSmall(k));
        }
        for (i, r) in rows.iter().enumerate() {
            for (j, &value) in r.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    return Err(MatrixError::OutOfRange { i, j, value });
                }
            }
        }
        let mut p = vec![0.0; k * k];
        for i in 0..k {
            let d = rows[i][i];
            if (d - 0.5).abs() > VALIDATION_TOL {
                return Err(MatrixError::BadDiagonal { i, value: d });
            }
            p[i * k + i] = 0.5;
            for j in (i + 1)..k {
                let sum = rows[i][j] + rows[j][i];
                if (sum - 1.0).abs() > VALIDATION_TOL {
                    return Err(MatrixError::AsymmetryViolation { i, j, sum });
                }
                p[i * k + j] = rows[i][j];
                p[j * k + i] = rows[j][i];
                // Keep both stored entries honest to the tighter tolerance.
                if (sum - 1.0).abs() > SYMMETRY_TOL {
                    p[j * k + i] = 1.0 - rows[i][j];
                }
            }
        }
        Ok(Self { k, p })
    }

    /// Builds a matrix from its strict upper triangle: `upper(i, j)` for `i < j`.
    /// Used by generators, which are correct by construction.
    pub(crate) fn from_upper(k: usize, mut upper: impl FnMut(usize, usize) -> f64) -> Self {
        let mut p = vec![0.5; k * k];
        for i in 0..k {
            for j in (i + 1)..k {
                let v = upper(i, j);
                p[i * k + j] = v;
                p[j * k + i] = 1.0 - v;
            }
        }
        Self { k, p }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Probability that arm `i` beats arm `j`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.k + j]
    }

    #[inline]
    pub fn prob(&self, i: ArmId, j: ArmId) -> f64 {
        self.get(i.0, j.0)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.p[i * self.k..(i + 1) * self.k]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.k).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn contains(&self, arm: ArmId) -> bool {
        arm.0 < self.k
    }

    /// Parses the CSV form: K lines of K comma-separated decimals.
    pub fn from_csv_str(text: &str) -> Result<Self, MatrixError> {
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|cell| {
                    cell.trim().parse::<f64>().map_err(|e| {
                        MatrixError::Parse(format!("line {}: {:?}: {}", n + 1, cell.trim(), e))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for i in 0..self.k {
            let line: Vec<String> = self.row(i).iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses the JSON form `{"k": K, "p": [[...], ...]}`.
    pub fn from_json_str(text: &str) -> Result<Self, MatrixError> {
        let raw: MatrixJson =
            serde_json::from_str(text).map_err(|e| MatrixError::Parse(e.to_string()))?;
        if raw.k != raw.p.len() {
            return Err(MatrixError::Parse(format!(
                "declared k = {} but {} rows given",
                raw.k,
                raw.p.len()
            )));
        }
        Self::from_rows(&raw.p)
    }

    pub fn to_json_string(&self) -> String {
        let raw = MatrixJson {
            k: self.k,
            p: self.rows(),
        };
        serde_json::to_string_pretty(&raw).expect("matrix serialization cannot fail")
    }

    /// Loads a matrix, choosing the format from the file extension
    /// (`.json` is JSON, anything else CSV).
    pub fn load(path: &Path) -> Result<Self, MatrixError> {
        let text = std::fs::read_to_string(path)?;
        if is_json_path(path) {
            Self::from_json_str(&text)
        } else {
            Self::from_csv_str(&text)
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), MatrixError> {
        let text = if is_json_path(path) {
            self.to_json_string()
        } else {
            self.to_csv_string()
        };
        std::fs::write(path, text)?;
        Ok(())
    }
}

fn is_json_path(path: &Path) -> bool {
    path.extension()
        .map(|e| e.eq_ignore_ascii_case("json"))
        .unwrap_or(false)
}

impl Serialize for PreferenceMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson {
            k: self.k,
            p: self.rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PreferenceMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        if raw.k != raw.p.len() {
            return Err(serde::de::Error::custom("k does not match number of rows"));
        }
        Self::from_rows(&raw.p).map_err(serde::de::Error::custom)
    }
}
