//! The two composite translation tasks.
//!
//! T1 puts a prepositional-phrase subject at the head of a long
//! complement chain. T2 takes a verb seen only in the passive and a noun seen
//! only as an object and produces an active sentence with that noun as
//! subject.

use super::corpus::{self, frame};
use super::syntax::{Det, Np, Sentence, SentencePair};
use crate::error::{Error, Result};

/// Substitutes `phrase` for the agent of the chain's first clause.
pub fn compose_t1_sentence(phrase: &Np, chain: &Sentence) -> Result<Sentence> {
    chain.with_first_agent(phrase.clone())
}

pub fn compose_t1(phrase: &Np, chain: &Sentence) -> Result<SentencePair> {
    SentencePair::from_sentence(&compose_t1_sentence(phrase, chain)?)
}

/// Active sentence with the passive fixture's verb and the object
/// fixture's noun (without modifiers) as subject.
pub fn compose_t2_sentence(passive: &Sentence, object: &Sentence, theme: Np) -> Result<Sentence> {
    let verb = match passive {
        Sentence::Passive { verb, .. } => verb.clone(),
        _ => {
            return Err(Error::InvalidInput(
                "the verb fixture is not a passive sentence".into(),
            ))
        }
    };
    if !corpus::verb(&verb).is_some_and(|v| v.allows(frame::TRANSITIVE)) {
        return Err(Error::InvalidInput(format!(
            "{verb:?} has no active transitive frame"
        )));
    }
    let noun = match object {
        Sentence::Transitive { theme, .. } | Sentence::Dative { theme, .. } => theme,
        _ => return Err(Error::InvalidInput("the noun fixture has no object".into())),
    };
    let det = match noun.det {
        Det::Bare => Det::Bare,
        _ => Det::A,
    };
    Ok(Sentence::Transitive {
        agent: Np::new(det, noun.noun.clone()),
        verb,
        theme,
    })
}

pub fn compose_t2(passive: &Sentence, object: &Sentence, theme: Np) -> Result<SentencePair> {
    SentencePair::from_sentence(&compose_t2_sentence(passive, object, theme)?)
}

/// Example sentences used in the published task descriptions.
pub mod fixtures {
    use super::*;

    fn ccomp(agent: Np, verb: &str, complement: Sentence) -> Sentence {
        Sentence::Ccomp {
            agent,
            verb: verb.into(),
            complement: Box::new(complement),
        }
    }

    /// "The book was squeezed ."
    pub fn passive_demo() -> Sentence {
        Sentence::Passive {
            theme: Np::the("book"),
            verb: "squeeze".into(),
            agent: None,
        }
    }

    /// "Sophia squeezed the donut ."
    pub fn active_test() -> Sentence {
        Sentence::Transitive {
            agent: Np::name("Sophia"),
            verb: "squeeze".into(),
            theme: Np::the("donut"),
        }
    }

    /// "Henry liked a cockroach in a box ."
    pub fn object_demo() -> Sentence {
        Sentence::Transitive {
            agent: Np::name("Henry"),
            verb: "like".into(),
            theme: Np::a("cockroach").with_pp("in", Np::a("box")),
        }
    }

    /// "A cockroach inflated a boy ."
    pub fn subject_test() -> Sentence {
        Sentence::Transitive {
            agent: Np::a("cockroach"),
            verb: "inflate".into(),
            theme: Np::a("boy"),
        }
    }

    /// "the baby on a tray in the house"
    pub fn baby_phrase() -> Np {
        Np::the("baby").with_pp("on", Np::a("tray").with_pp("in", Np::the("house")))
    }

    /// "The baby on a tray in the house screamed ."
    pub fn phrase_test() -> Sentence {
        Sentence::Unergative {
            agent: baby_phrase(),
            verb: "scream".into(),
        }
    }

    /// Ten-clause chain opening "A girl valued that Samuel admired that ...".
    pub fn long_chain() -> Sentence {
        let tail = Sentence::Unaccusative {
            theme: Np::a("cake"),
            verb: "grow".into(),
        };
        let links = [
            (Np::a("girl"), "value"),
            (Np::name("Samuel"), "admire"),
            (Np::a("monkey"), "like"),
            (Np::name("Luna"), "like"),
            (Np::name("Oliver"), "respect"),
            (Np::name("Savannah"), "hope"),
            (Np::a("penguin"), "notice"),
            (Np::name("Emma"), "notice"),
            (Np::the("lawyer"), "notice"),
        ];
        links
            .into_iter()
            .rev()
            .fold(tail, |inner, (agent, verb)| ccomp(agent, verb, inner))
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn t1_keeps_chain_length() {
        let chain = long_chain();
        let out = compose_t1_sentence(&baby_phrase(), &chain).unwrap();
        assert_eq!(out.clause_count(), chain.clause_count());
        let plain = compose_t1_sentence(&Np::a("boy"), &chain).unwrap();
        assert!(plain
            .realize()
            .unwrap()
            .starts_with("A boy valued that Samuel"));
    }

    #[test]
    fn t2_fixture() {
        let p = compose_t2(&passive_demo(), &object_demo(), Np::the("hedgehog")).unwrap();
        assert_eq!(p.source, "A cockroach squeezed the hedgehog .");
        assert_eq!(p.target, "SQUEEZE ( COCKROACH , HEDGEHOG , NONE )");
    }

    #[test]
    fn t2_rejects_wrong_fixtures() {
        assert!(compose_t2(&active_test(), &object_demo(), Np::a("dog")).is_err());
        assert!(compose_t2(&passive_demo(), &phrase_test(), Np::a("dog")).is_err());
    }
}
