//! Formal-language translation tasks: English sentences mapped to a
//! chain-structured, upper-case logical form.

pub mod cogs;
pub mod compose;
pub mod corpus;
pub mod dataset;
pub mod grammar;
pub mod select;
pub mod syntax;

pub use compose::{compose_t1, compose_t2};
pub use dataset::{generate_linguistic_dataset, LinguisticOptions, LinguisticTask};
pub use grammar::{
    parse_chain_form, render_chain_form, Clause, LogicalForm, PhraseTerm, Slot, Term,
};
pub use select::{covers, select_in_context, Pool};
pub use syntax::{Det, Np, Sentence, SentencePair};
