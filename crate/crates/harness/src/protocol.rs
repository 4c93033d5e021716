//! Evaluation protocol: dataset size, demonstrations, replications.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{file_err, Error, Result};
use crate::metrics::Metric;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Protocol {
    /// Test items per (task, setting).
    pub n: usize,
    /// Demonstrations per prompt.
    pub k: usize,
    pub replications: usize,
    pub seed: u64,
    pub metric: Metric,
    /// Prepend the task instruction to logical-task prompts.
    pub instruction: bool,
}

impl Default for Protocol {
    fn default() -> Self {
        Self {
            n: 100,
            k: 10,
            replications: 3,
            seed: 0,
            metric: Metric::ExactMatch,
            instruction: true,
        }
    }
}

impl Protocol {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(file_err(path))?;
        let p: Self =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if p.n == 0 || p.k == 0 || p.replications == 0 {
            return Err(Error::Config(
                "n, k and replications must be positive".into(),
            ));
        }
        Ok(p)
    }
}
