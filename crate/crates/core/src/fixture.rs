//! JSON fixtures for covariances, task spaces and matrices.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Result};
use crate::gaussian::{CovarianceSpec, TaskSpace};
use crate::rng::Seed;

/// Serde adapter storing a matrix as `{rows, cols, data}` with `data` in
/// row-major order.
pub mod row_major {
    use nalgebra::DMatrix;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Shaped {
        rows: usize,
        cols: usize,
        data: Vec<f64>,
    }

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        Shaped {
            rows: m.nrows(),
            cols: m.ncols(),
            data: m.transpose().as_slice().to_vec(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let s = Shaped::deserialize(d)?;
        if s.data.len() != s.rows * s.cols {
            return Err(D::Error::custom(format!(
                "matrix data has {} entries, expected {}x{}",
                s.data.len(),
                s.rows,
                s.cols
            )));
        }
        Ok(DMatrix::from_row_slice(s.rows, s.cols, &s.data))
    }
}

/// `{d, K, active_sets, lambda, delta, epsilon, seed}` with `lambda` a
/// row-major `d*d` array.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub active_sets: Vec<Vec<usize>>,
    pub lambda: Vec<f64>,
    pub delta: f64,
    pub epsilon: f64,
    pub seed: Seed,
}

impl Fixture {
    pub fn from_parts(space: &TaskSpace, cov: &CovarianceSpec, delta: f64, seed: Seed) -> Self {
        Self {
            d: space.d(),
            k: space.k(),
            active_sets: space.active_sets().to_vec(),
            lambda: cov.lambda().transpose().as_slice().to_vec(),
            delta,
            epsilon: cov.epsilon(),
            seed,
        }
    }

    pub fn task_space(&self) -> Result<TaskSpace> {
        if self.active_sets.len() != self.k {
            return Err(mismatch(format!(
                "K={} but {} active sets given",
                self.k,
                self.active_sets.len()
            )));
        }
        TaskSpace::new(self.d, self.active_sets.clone())
    }

    pub fn covariance(&self) -> Result<CovarianceSpec> {
        if self.lambda.len() != self.d * self.d {
            return Err(mismatch(format!(
                "lambda has {} entries, expected {}",
                self.lambda.len(),
                self.d * self.d
            )));
        }
        CovarianceSpec::new(
            DMatrix::from_row_slice(self.d, self.d, &self.lambda),
            self.epsilon,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
