//! Text task suites for probing compositional in-context learning.
//!
//! [`logical`] holds the symbol-driven word and number rules and their
//! pairwise composites; [`linguistic`] holds the English to chain-grammar
//! translation tasks. Both emit [`PromptInstance`]s that render to the
//! plain `input:`/`output:` prompt layout.

pub mod error;
pub mod instance;
pub mod lexicon;
pub mod linguistic;
pub mod logical;

pub use error::{Error, Result};
pub use instance::{render_prompt, Demonstration, PromptInstance, Setting};
