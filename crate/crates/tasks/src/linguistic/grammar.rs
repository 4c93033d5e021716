//! Chain-structured target grammar:
//! `PRED ( AGENT , THEME , RECIPIENT )` clauses joined by `CCOMP`, with
//! prepositional phrases written `REL ( HEAD , COMPLEMENT )`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A noun terminal or a nested prepositional phrase.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Word(String),
    Phrase(Box<PhraseTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhraseTerm {
    pub relation: String,
    pub head: String,
    pub complement: Term,
}

impl Term {
    pub fn word(w: impl Into<String>) -> Self {
        Term::Word(w.into())
    }

    pub fn phrase(relation: impl Into<String>, head: impl Into<String>, complement: Term) -> Self {
        Term::Phrase(Box::new(PhraseTerm {
            relation: relation.into(),
            head: head.into(),
            complement,
        }))
    }

    /// Noun terminals, head first.
    pub fn nouns(&self) -> Vec<&str> {
        match self {
            Term::Word(w) => vec![w.as_str()],
            Term::Phrase(p) => {
                let mut out = vec![p.head.as_str()];
                out.extend(p.complement.nouns());
                out
            }
        }
    }

    /// Nesting depth; a plain word has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Word(_) => 0,
            Term::Phrase(p) => 1 + p.complement.depth(),
        }
    }
}

/// An argument slot; `None` renders as `NONE`.
pub type Slot = Option<Term>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause {
    pub predicate: String,
    pub agent: Slot,
    pub theme: Slot,
    pub recipient: Slot,
}

impl Clause {
    pub fn new(predicate: impl Into<String>, agent: Slot, theme: Slot, recipient: Slot) -> Self {
        Self {
            predicate: predicate.into(),
            agent,
            theme,
            recipient,
        }
    }

    pub fn slots(&self) -> [&Slot; 3] {
        [&self.agent, &self.theme, &self.recipient]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LogicalForm {
    pub clauses: Vec<Clause>,
}

impl LogicalForm {
    pub fn new(clauses: Vec<Clause>) -> Result<Self> {
        if clauses.is_empty() {
            return Err(Error::InvalidInput(
                "a logical form needs at least one clause".into(),
            ));
        }
        Ok(Self { clauses })
    }

    /// Predicates and every noun in any slot, upper-cased.
    pub fn primitives(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.clauses {
            out.push(c.predicate.to_uppercase());
            for t in c.slots().into_iter().flatten() {
                out.extend(t.nouns().into_iter().map(str::to_uppercase));
            }
        }
        out
    }
}

fn render_term(t: &Term, out: &mut String) {
    match t {
        Term::Word(w) => out.push_str(&w.to_uppercase()),
        Term::Phrase(p) => {
            out.push_str(&p.relation.to_uppercase());
            out.push_str(" ( ");
            out.push_str(&p.head.to_uppercase());
            out.push_str(" , ");
            render_term(&p.complement, out);
            out.push_str(" )");
        }
    }
}

fn render_slot(s: &Slot, out: &mut String) {
    match s {
        Some(t) => render_term(t, out),
        None => out.push_str("NONE"),
    }
}

/// Upper-case chain rendering, one space between all tokens.
pub fn render_chain_form(lf: &LogicalForm) -> String {
    let mut out = String::new();
    for (i, c) in lf.clauses.iter().enumerate() {
        if i > 0 {
            out.push_str(" CCOMP ");
        }
        out.push_str(&c.predicate.to_uppercase());
        out.push_str(" ( ");
        render_slot(&c.agent, &mut out);
        out.push_str(" , ");
        render_slot(&c.theme, &mut out);
        out.push_str(" , ");
        render_slot(&c.recipient, &mut out);
        out.push_str(" )");
    }
    out
}

impl fmt::Display for LogicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_chain_form(self))
    }
}

struct Parser<'a> {
    tokens: Vec<&'a str>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, reason: impl Into<String>) -> Error {
        Error::Parse {
            position: self.pos,
            reason: reason.into(),
        }
    }

    fn next(&mut self) -> Result<&'a str> {
        let t = self
            .tokens
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.err("unexpected end"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: &str) -> Result<()> {
        let got = self.next()?;
        if got == want {
            Ok(())
        } else {
            self.pos -= 1;
            Err(self.err(format!("expected {want:?}, found {got:?}")))
        }
    }

    fn word(&mut self) -> Result<&'a str> {
        let w = self.next()?;
        if matches!(w, "(" | ")" | "," | "CCOMP") || !w.chars().all(|c| c.is_ascii_uppercase()) {
            self.pos -= 1;
            return Err(self.err(format!("expected an upper-case terminal, found {w:?}")));
        }
        Ok(w)
    }

    fn term(&mut self) -> Result<Term> {
        let w = self.word()?;
        if self.tokens.get(self.pos) == Some(&"(") {
            self.expect("(")?;
            let head = self.word()?;
            self.expect(",")?;
            let complement = self.term()?;
            self.expect(")")?;
            Ok(Term::phrase(w, head, complement))
        } else {
            Ok(Term::word(w))
        }
    }

    fn slot(&mut self) -> Result<Slot> {
        if self.tokens.get(self.pos) == Some(&"NONE") {
            self.pos += 1;
            Ok(None)
        } else {
            self.term().map(Some)
        }
    }

    fn clause(&mut self) -> Result<Clause> {
        let predicate = self.word()?;
        self.expect("(")?;
        let agent = self.slot()?;
        self.expect(",")?;
        let theme = self.slot()?;
        self.expect(",")?;
        let recipient = self.slot()?;
        self.expect(")")?;
        Ok(Clause::new(predicate, agent, theme, recipient))
    }
}

/// Parses the output of [`render_chain_form`].
pub fn parse_chain_form(text: &str) -> Result<LogicalForm> {
    let mut p = Parser {
        tokens: text.split_whitespace().collect(),
        pos: 0,
    };
    let mut clauses = vec![p.clause()?];
    while p.pos < p.tokens.len() {
        p.expect("CCOMP")?;
        clauses.push(p.clause()?);
    }
    LogicalForm::new(clauses)
}
