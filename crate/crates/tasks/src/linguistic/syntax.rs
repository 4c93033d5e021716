//! English sentence structures, their surface realization and their
//! chain-grammar logical forms.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::corpus::{self, Verb};
use super::grammar::{render_chain_form, Clause, LogicalForm, Term};
use crate::error::{Error, Result};
use crate::lexicon::capitalize_first;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Det {
    A,
    The,
    /// Proper names take no determiner.
    Bare,
}

/// Noun phrase, optionally modified by a right-nested prepositional phrase.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Np {
    pub det: Det,
    pub noun: String,
    pub pp: Option<(String, Box<Np>)>,
}

impl Np {
    pub fn new(det: Det, noun: impl Into<String>) -> Self {
        Self {
            det,
            noun: noun.into(),
            pp: None,
        }
    }

    /// Proper name or common noun with its determiner.
    pub fn name(noun: &str) -> Self {
        Self::new(Det::Bare, noun)
    }

    pub fn a(noun: &str) -> Self {
        Self::new(Det::A, noun)
    }

    pub fn the(noun: &str) -> Self {
        Self::new(Det::The, noun)
    }

    pub fn with_pp(mut self, relation: &str, complement: Np) -> Self {
        self.pp = Some((relation.to_string(), Box::new(complement)));
        self
    }

    fn push_words(&self, out: &mut Vec<String>) {
        match self.det {
            Det::A => out.push("a".into()),
            Det::The => out.push("the".into()),
            Det::Bare => {}
        }
        out.push(self.noun.clone());
        if let Some((rel, comp)) = &self.pp {
            out.push(rel.clone());
            comp.push_words(out);
        }
    }

    pub fn term(&self) -> Term {
        match &self.pp {
            None => Term::word(&self.noun),
            Some((rel, comp)) => Term::phrase(rel, &self.noun, comp.term()),
        }
    }

    pub fn nouns(&self) -> Vec<&str> {
        let mut out = vec![self.noun.as_str()];
        if let Some((_, comp)) = &self.pp {
            out.extend(comp.nouns());
        }
        out
    }

    pub fn has_pp(&self) -> bool {
        self.pp.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sentence {
    /// "Sophia squeezed the donut"
    Transitive { agent: Np, verb: String, theme: Np },
    /// "The book was squeezed (by a girl)"
    Passive {
        theme: Np,
        verb: String,
        agent: Option<Np>,
    },
    /// "The baby screamed"
    Unergative { agent: Np, verb: String },
    /// "A cake grew"
    Unaccusative { theme: Np, verb: String },
    /// "Emma gave the girl a cake"
    Dative {
        agent: Np,
        verb: String,
        recipient: Np,
        theme: Np,
    },
    /// "A girl valued that ..."
    Ccomp {
        agent: Np,
        verb: String,
        complement: Box<Sentence>,
    },
}

fn lookup(lemma: &str) -> Result<&'static Verb> {
    corpus::verb(lemma)
        .ok_or_else(|| Error::InvalidInput(format!("verb {lemma:?} is not in the corpus")))
}

impl Sentence {
    pub fn verb(&self) -> &str {
        match self {
            Sentence::Transitive { verb, .. }
            | Sentence::Passive { verb, .. }
            | Sentence::Unergative { verb, .. }
            | Sentence::Unaccusative { verb, .. }
            | Sentence::Dative { verb, .. }
            | Sentence::Ccomp { verb, .. } => verb,
        }
    }

    /// Clauses from the outermost down the complement chain.
    pub fn clauses(&self) -> Vec<&Sentence> {
        let mut out = vec![self];
        let mut cur = self;
        while let Sentence::Ccomp { complement, .. } = cur {
            out.push(complement);
            cur = complement;
        }
        out
    }

    pub fn clause_count(&self) -> usize {
        self.clauses().len()
    }

    /// Grammatical subject of this clause only.
    pub fn subject(&self) -> &Np {
        match self {
            Sentence::Transitive { agent, .. }
            | Sentence::Unergative { agent, .. }
            | Sentence::Dative { agent, .. }
            | Sentence::Ccomp { agent, .. } => agent,
            Sentence::Passive { theme, .. } | Sentence::Unaccusative { theme, .. } => theme,
        }
    }

    fn push_words(&self, out: &mut Vec<String>) -> Result<()> {
        let v = lookup(self.verb())?;
        match self {
            Sentence::Transitive { agent, theme, .. } => {
                agent.push_words(out);
                out.push(v.past.into());
                theme.push_words(out);
            }
            Sentence::Passive { theme, agent, .. } => {
                theme.push_words(out);
                out.push("was".into());
                out.push(v.participle.into());
                if let Some(a) = agent {
                    out.push("by".into());
                    a.push_words(out);
                }
            }
            Sentence::Unergative { agent, .. } => {
                agent.push_words(out);
                out.push(v.past.into());
            }
            Sentence::Unaccusative { theme, .. } => {
                theme.push_words(out);
                out.push(v.past.into());
            }
            Sentence::Dative {
                agent,
                recipient,
                theme,
                ..
            } => {
                agent.push_words(out);
                out.push(v.past.into());
                recipient.push_words(out);
                theme.push_words(out);
            }
            Sentence::Ccomp {
                agent, complement, ..
            } => {
                agent.push_words(out);
                out.push(v.past.into());
                out.push("that".into());
                complement.push_words(out)?;
            }
        }
        Ok(())
    }

    /// Surface text: capitalized, tokens separated by single spaces, " ."
    /// at the end.
    pub fn realize(&self) -> Result<String> {
        let mut words = Vec::new();
        self.push_words(&mut words)?;
        Ok(format!("{} .", capitalize_first(&words.join(" "))))
    }

    pub fn logical_form(&self) -> Result<LogicalForm> {
        let clauses = self
            .clauses()
            .into_iter()
            .map(|s| {
                let pred = lookup(s.verb())?.lemma;
                Ok(match s {
                    Sentence::Transitive { agent, theme, .. } => {
                        Clause::new(pred, Some(agent.term()), Some(theme.term()), None)
                    }
                    Sentence::Passive { theme, agent, .. } => {
                        Clause::new(pred, agent.as_ref().map(Np::term), Some(theme.term()), None)
                    }
                    Sentence::Unergative { agent, .. } | Sentence::Ccomp { agent, .. } => {
                        Clause::new(pred, Some(agent.term()), None, None)
                    }
                    Sentence::Unaccusative { theme, .. } => {
                        Clause::new(pred, None, Some(theme.term()), None)
                    }
                    Sentence::Dative {
                        agent,
                        recipient,
                        theme,
                        ..
                    } => Clause::new(
                        pred,
                        Some(agent.term()),
                        Some(theme.term()),
                        Some(recipient.term()),
                    ),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        LogicalForm::new(clauses)
    }

    /// Lower-cased nouns and verb lemmas anywhere in the sentence.
    pub fn primitives(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for s in self.clauses() {
            out.insert(s.verb().to_string());
            let nps: Vec<&Np> = match s {
                Sentence::Transitive { agent, theme, .. } => vec![agent, theme],
                Sentence::Passive { theme, agent, .. } => {
                    std::iter::once(theme).chain(agent.as_ref()).collect()
                }
                Sentence::Unergative { agent, .. } | Sentence::Ccomp { agent, .. } => vec![agent],
                Sentence::Unaccusative { theme, .. } => vec![theme],
                Sentence::Dative {
                    agent,
                    recipient,
                    theme,
                    ..
                } => vec![agent, recipient, theme],
            };
            for np in nps {
                out.extend(np.nouns().into_iter().map(str::to_lowercase));
            }
        }
        out
    }

    /// Head nouns in grammatical subject position, over all clauses.
    pub fn subject_nouns(&self) -> BTreeSet<String> {
        self.clauses()
            .iter()
            .map(|s| s.subject().noun.to_lowercase())
            .collect()
    }

    /// Verbs used in an active-voice clause.
    pub fn active_verbs(&self) -> BTreeSet<String> {
        self.clauses()
            .iter()
            .filter(|s| !matches!(s, Sentence::Passive { .. }))
            .map(|s| s.verb().to_string())
            .collect()
    }

    pub fn has_pp_subject(&self) -> bool {
        self.subject().has_pp()
    }

    /// Replaces the first clause's agent. Fails when that clause has none.
    pub fn with_first_agent(&self, np: Np) -> Result<Sentence> {
        let mut s = self.clone();
        match &mut s {
            Sentence::Transitive { agent, .. }
            | Sentence::Unergative { agent, .. }
            | Sentence::Dative { agent, .. }
            | Sentence::Ccomp { agent, .. } => *agent = np,
            Sentence::Passive {
                agent: Some(agent), ..
            } => *agent = np,
            Sentence::Passive { agent: None, .. } | Sentence::Unaccusative { .. } => {
                return Err(Error::InvalidInput(
                    "the first clause has no agent to substitute".into(),
                ))
            }
        }
        Ok(s)
    }
}

/// Source sentence, its chain-grammar target and its primitives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePair {
    pub source: String,
    pub target: String,
    pub primitives: BTreeSet<String>,
}

impl SentencePair {
    pub fn from_sentence(s: &Sentence) -> Result<Self> {
        Ok(Self {
            source: s.realize()?,
            target: render_chain_form(&s.logical_form()?),
            primitives: s.primitives(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passive_and_active() {
        let passive = Sentence::Passive {
            theme: Np::the("book"),
            verb: "squeeze".into(),
            agent: None,
        };
        let p = SentencePair::from_sentence(&passive).unwrap();
        assert_eq!(p.source, "The book was squeezed .");
        assert_eq!(p.target, "SQUEEZE ( NONE , BOOK , NONE )");
        let by = Sentence::Passive {
            theme: Np::the("book"),
            verb: "draw".into(),
            agent: Some(Np::name("Emma")),
        };
        let p = SentencePair::from_sentence(&by).unwrap();
        assert_eq!(p.source, "The book was drawn by Emma .");
        assert_eq!(p.target, "DRAW ( EMMA , BOOK , NONE )");
    }

    #[test]
    fn dative_slots() {
        let s = Sentence::Dative {
            agent: Np::name("Emma"),
            verb: "give".into(),
            recipient: Np::the("girl"),
            theme: Np::a("cake"),
        };
        let p = SentencePair::from_sentence(&s).unwrap();
        assert_eq!(p.source, "Emma gave the girl a cake .");
        assert_eq!(p.target, "GIVE ( EMMA , CAKE , GIRL )");
        assert_eq!(
            p.primitives.into_iter().collect::<Vec<_>>(),
            vec!["cake", "emma", "girl", "give"]
        );
    }

    #[test]
    fn unknown_verb_rejected() {
        let s = Sentence::Unergative {
            agent: Np::a("dog"),
            verb: "teleport".into(),
        };
        assert!(s.realize().is_err());
    }

    #[test]
    fn subject_substitution_needs_an_agent() {
        let s = Sentence::Unaccusative {
            theme: Np::a("cake"),
            verb: "grow".into(),
        };
        assert!(s.with_first_agent(Np::a("dog")).is_err());
    }
}
