//! Scoring and evaluation plumbing for the text task suites.
//!
//! Prompts from [`compose_tasks`] are sent to an OpenAI-compatible
//! completion endpoint through [`client::CachedCompleter`], continuations
//! are normalised and scored with [`metrics`], and
//! [`experiment::run_experiment`] aggregates replicated runs into
//! [`report::ReportRow`]s. [`mock`] provides a local server with an
//! oracle-backed model for offline end-to-end checks.

pub mod cache;
pub mod client;
pub mod endpoint;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod mock;
pub mod protocol;
pub mod report;

pub use client::{CachedCompleter, Completer, HttpCompleter};
pub use endpoint::ModelEndpoint;
pub use error::{Error, Result};
pub use experiment::{run_experiment, EvalRecord, ExperimentOptions, RunReport};
pub use metrics::{exact_match, normalize_prediction, word_error_rate, Metric};
