//! Random sentence generation and T1/T2 dataset assembly.

use std::fmt;
use std::str::FromStr;

use compose_core::Seed;
use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::corpus::{frame, verbs_with, ANIMATE, INANIMATE, PROPER, RELATIONS};
use super::select::Pool;
use super::syntax::{Det, Np, Sentence, SentencePair};
use crate::error::{Error, Result};
use crate::instance::{Demonstration, PromptInstance, Setting};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinguisticTask {
    /// Phrase recombination with a longer chain.
    T1,
    /// Passive to active with object to subject.
    T2,
}

impl LinguisticTask {
    pub const ALL: [LinguisticTask; 2] = [LinguisticTask::T1, LinguisticTask::T2];

    pub fn as_str(self) -> &'static str {
        match self {
            LinguisticTask::T1 => "T1",
            LinguisticTask::T2 => "T2",
        }
    }

    fn tag(self) -> u64 {
        match self {
            LinguisticTask::T1 => 0x71,
            LinguisticTask::T2 => 0x72,
        }
    }
}

impl fmt::Display for LinguisticTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LinguisticTask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_uppercase().as_str() {
            "T1" => Ok(LinguisticTask::T1),
            "T2" => Ok(LinguisticTask::T2),
            _ => Err(Error::InvalidInput(format!(
                "unknown linguistic task {s:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinguisticOptions {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    /// Sentences generated per demonstration pool.
    pub pool_size: usize,
}

impl Default for LinguisticOptions {
    fn default() -> Self {
        Self {
            n: 800,
            k: 10,
            seed: 0,
            pool_size: 3000,
        }
    }
}

/// Chain lengths (in clauses) of short demonstrations and long test items.
const SHORT_CHAIN: std::ops::RangeInclusive<usize> = 1..=4;
const LONG_CHAIN: std::ops::RangeInclusive<usize> = 5..=10;
const MAX_TEST_REDRAWS: usize = 200;

fn det<R: Rng + ?Sized>(rng: &mut R) -> Det {
    if rng.random_bool(0.5) {
        Det::A
    } else {
        Det::The
    }
}

fn common<R: Rng + ?Sized>(rng: &mut R, nouns: &[&str]) -> Np {
    Np::new(det(rng), *nouns.choose(rng).expect("nonempty"))
}

/// Proper name a third of the time, otherwise an animate common noun.
fn animate<R: Rng + ?Sized>(rng: &mut R) -> Np {
    if rng.random_bool(1.0 / 3.0) {
        Np::name(PROPER.choose(rng).expect("nonempty"))
    } else {
        common(rng, ANIMATE)
    }
}

fn any_np<R: Rng + ?Sized>(rng: &mut R) -> Np {
    if rng.random_bool(0.5) {
        animate(rng)
    } else {
        common(rng, INANIMATE)
    }
}

/// Attaches a chain of one or two prepositional phrases to a common noun.
fn add_pp<R: Rng + ?Sized>(rng: &mut R, head: Np) -> Np {
    let depth = rng.random_range(1..=2);
    let mut comp = common(rng, INANIMATE);
    for _ in 1..depth {
        comp = common(rng, INANIMATE).with_pp(RELATIONS.choose(rng).unwrap(), comp);
    }
    head.with_pp(RELATIONS.choose(rng).unwrap(), comp)
}

fn maybe_pp<R: Rng + ?Sized>(rng: &mut R, make: fn(&mut R) -> Np, p: f64) -> Np {
    let np = make(rng);
    if np.det != Det::Bare && rng.random_bool(p) {
        add_pp(rng, np)
    } else {
        np
    }
}

fn pick_verb<R: Rng + ?Sized>(rng: &mut R, f: u8) -> String {
    verbs_with(f)
        .choose(rng)
        .expect("nonempty frame class")
        .lemma
        .to_string()
}

/// Single clause of any non-complement frame; objects carry a PP with
/// probability `object_pp`.
fn simple_clause<R: Rng + ?Sized>(rng: &mut R, object_pp: f64) -> Sentence {
    match rng.random_range(0..20) {
        0..=6 => Sentence::Transitive {
            agent: animate(rng),
            verb: pick_verb(rng, frame::TRANSITIVE),
            theme: maybe_pp(rng, any_np, object_pp),
        },
        7..=9 => Sentence::Unergative {
            agent: animate(rng),
            verb: pick_verb(rng, frame::UNERGATIVE),
        },
        10..=12 => Sentence::Unaccusative {
            theme: common(rng, INANIMATE),
            verb: pick_verb(rng, frame::UNACCUSATIVE),
        },
        13..=15 => Sentence::Dative {
            agent: animate(rng),
            verb: pick_verb(rng, frame::DATIVE),
            recipient: animate(rng),
            theme: maybe_pp(rng, |r| common(r, INANIMATE), object_pp),
        },
        _ => passive(rng, object_pp),
    }
}

fn passive<R: Rng + ?Sized>(rng: &mut R, pp: f64) -> Sentence {
    Sentence::Passive {
        theme: maybe_pp(rng, any_np, pp),
        verb: pick_verb(rng, frame::TRANSITIVE),
        agent: rng.random_bool(0.5).then(|| animate(rng)),
    }
}

fn active<R: Rng + ?Sized>(rng: &mut R, pp: f64) -> Sentence {
    match rng.random_range(0..10) {
        0..=5 => Sentence::Transitive {
            agent: animate(rng),
            verb: pick_verb(rng, frame::TRANSITIVE),
            theme: maybe_pp(rng, any_np, pp),
        },
        6..=7 => Sentence::Dative {
            agent: animate(rng),
            verb: pick_verb(rng, frame::DATIVE),
            recipient: animate(rng),
            theme: maybe_pp(rng, |r| common(r, INANIMATE), pp),
        },
        _ => Sentence::Unergative {
            agent: animate(rng),
            verb: pick_verb(rng, frame::UNERGATIVE),
        },
    }
}

/// `clauses - 1` complement links ending in a plain single clause.
fn chain<R: Rng + ?Sized>(rng: &mut R, clauses: usize) -> Sentence {
    let mut s = simple_clause(rng, 0.0);
    for _ in 1..clauses {
        s = Sentence::Ccomp {
            agent: animate(rng),
            verb: pick_verb(rng, frame::CCOMP),
            complement: Box::new(s),
        };
    }
    s
}

/// Chain whose first clause has an agent, so a phrase subject can go there.
fn agentive_chain<R: Rng + ?Sized>(rng: &mut R, clauses: usize) -> Sentence {
    loop {
        let s = chain(rng, clauses);
        if s.with_first_agent(Np::a("dog")).is_ok() {
            return s;
        }
    }
}

fn pp_subject<R: Rng + ?Sized>(rng: &mut R) -> Np {
    let head = common(rng, ANIMATE);
    add_pp(rng, head)
}

/// Item metadata used to keep forbidden evidence out of the pool.
struct Entry {
    pair: SentencePair,
    subjects: std::collections::BTreeSet<String>,
    active_verbs: std::collections::BTreeSet<String>,
}

fn entry(s: &Sentence) -> Result<Entry> {
    Ok(Entry {
        pair: SentencePair::from_sentence(s)?,
        subjects: s.subject_nouns(),
        active_verbs: s.active_verbs(),
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PoolKind {
    /// Single clauses, PPs only on objects.
    PhraseObjects,
    /// Short plain chains.
    ShortChains,
    /// Long chains with a PP subject.
    CompositeChains,
    Passive,
    Active,
    ActiveTransitive,
}

impl PoolKind {
    fn tag(self) -> u64 {
        self as u64 + 1
    }

    fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> Sentence {
        match self {
            PoolKind::PhraseObjects => simple_clause(rng, 0.5),
            PoolKind::ShortChains => {
                let len = rng.random_range(SHORT_CHAIN);
                chain(rng, len)
            }
            PoolKind::CompositeChains => {
                let len = rng.random_range(LONG_CHAIN);
                let c = agentive_chain(rng, len);
                c.with_first_agent(pp_subject(rng)).expect("agentive chain")
            }
            PoolKind::Passive => passive(rng, 0.3),
            PoolKind::Active => active(rng, 0.3),
            PoolKind::ActiveTransitive => Sentence::Transitive {
                agent: animate(rng),
                verb: pick_verb(rng, frame::TRANSITIVE),
                theme: maybe_pp(rng, any_np, 0.3),
            },
        }
    }
}

fn pool_kinds(task: LinguisticTask, setting: Setting) -> &'static [PoolKind] {
    use PoolKind::*;
    match (task, setting) {
        (LinguisticTask::T1, Setting::Simple1) => &[PhraseObjects],
        (LinguisticTask::T1, Setting::Simple2) => &[ShortChains],
        (LinguisticTask::T1, Setting::Composite) => &[PhraseObjects, ShortChains],
        (LinguisticTask::T1, Setting::CompositeInContext) => &[CompositeChains],
        (LinguisticTask::T2, Setting::Simple1) => &[Passive],
        (LinguisticTask::T2, Setting::Simple2) => &[Active],
        (LinguisticTask::T2, Setting::Composite) => &[Passive, Active],
        (LinguisticTask::T2, Setting::CompositeInContext) => &[ActiveTransitive],
    }
}

/// Test sentence plus the evidence its demonstrations must not contain:
/// a noun that may not be a subject and a verb that may not be active.
struct TestItem {
    sentence: Sentence,
    held_noun: Option<String>,
    held_verb: Option<String>,
}

fn draw_test<R: Rng + ?Sized>(task: LinguisticTask, setting: Setting, rng: &mut R) -> TestItem {
    let plain = |s| TestItem {
        sentence: s,
        held_noun: None,
        held_verb: None,
    };
    match (task, setting) {
        (LinguisticTask::T1, Setting::Simple1) => {
            let agent = pp_subject(rng);
            plain(if rng.random_bool(0.5) {
                Sentence::Unergative {
                    agent,
                    verb: pick_verb(rng, frame::UNERGATIVE),
                }
            } else {
                Sentence::Transitive {
                    agent,
                    verb: pick_verb(rng, frame::TRANSITIVE),
                    theme: any_np(rng),
                }
            })
        }
        (LinguisticTask::T1, Setting::Simple2) => {
            let len = rng.random_range(LONG_CHAIN);
            plain(chain(rng, len))
        }
        (LinguisticTask::T1, _) => plain(PoolKind::CompositeChains.draw(rng)),
        (LinguisticTask::T2, _) => {
            let noun = *ANIMATE.choose(rng).unwrap();
            let verb = pick_verb(rng, frame::TRANSITIVE);
            let agent = match setting {
                Setting::Simple1 => animate(rng),
                _ => Np::new(det(rng), noun),
            };
            let hide_noun = matches!(setting, Setting::Simple2 | Setting::Composite);
            let hide_verb = matches!(setting, Setting::Simple1 | Setting::Composite);
            TestItem {
                held_noun: hide_noun.then(|| noun.to_string()),
                held_verb: hide_verb.then(|| verb.clone()),
                sentence: Sentence::Transitive {
                    agent,
                    verb,
                    theme: any_np(rng),
                },
            }
        }
    }
}

/// `opts.n` instances of `task` under `setting`, deterministic in
/// `opts.seed`. Test items whose primitives the pool cannot cover within
/// `k` demonstrations are redrawn.
pub fn generate_linguistic_dataset(
    task: LinguisticTask,
    setting: Setting,
    opts: &LinguisticOptions,
) -> Result<Vec<PromptInstance>> {
    if opts.n == 0 || opts.k == 0 {
        return Err(Error::InvalidInput("n and k must be at least 1".into()));
    }
    let base = Seed(opts.seed).derive(task.tag());
    let mut entries = Vec::new();
    for kind in pool_kinds(task, setting) {
        let mut rng = base.derive(0x1000 + kind.tag()).stream(0);
        for _ in 0..opts.pool_size {
            entries.push(entry(&kind.draw(&mut rng))?);
        }
    }
    // Pool dedups on source text; keep metadata aligned with it.
    let mut seen = std::collections::BTreeSet::new();
    entries.retain(|e| seen.insert(e.pair.source.clone()));
    let pool = Pool::new(entries.iter().map(|e| e.pair.clone()));

    let test_seed = base.derive(0x2000 + setting as u64);
    let demo_seed = base.derive(0x3000 + setting as u64);
    (0..opts.n)
        .map(|i| {
            let mut rng = test_seed.stream(i as u64);
            let mut demo_rng = demo_seed.stream(i as u64);
            let mut last_err = None;
            for _ in 0..MAX_TEST_REDRAWS {
                let item = draw_test(task, setting, &mut rng);
                let test = SentencePair::from_sentence(&item.sentence)?;
                let allowed = |j: usize| {
                    let e = &entries[j];
                    !item
                        .held_noun
                        .as_ref()
                        .is_some_and(|n| e.subjects.contains(n))
                        && !item
                            .held_verb
                            .as_ref()
                            .is_some_and(|v| e.active_verbs.contains(v))
                };
                match pool.select_indices(&test, opts.k, &allowed, &mut demo_rng) {
                    Ok(idx) => {
                        return Ok(PromptInstance {
                            id: format!("{}-{}-{}-{}", task, setting, opts.seed, i),
                            task_pair: task.to_string(),
                            mode: "translation".into(),
                            setting,
                            instruction: String::new(),
                            demonstrations: idx
                                .into_iter()
                                .map(|j| {
                                    Demonstration::new(
                                        &pool.items()[j].source,
                                        &pool.items()[j].target,
                                    )
                                })
                                .collect(),
                            test_input: test.source,
                            gold: vec![test.target],
                            seed: opts.seed,
                        })
                    }
                    Err(e @ (Error::Uncovered(_) | Error::Exhausted(_))) => last_err = Some(e),
                    Err(e) => return Err(e),
                }
            }
            Err(last_err.expect("at least one attempt"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linguistic::grammar::parse_chain_form;

    fn small(seed: u64) -> LinguisticOptions {
        LinguisticOptions {
            n: 30,
            k: 10,
            seed,
            pool_size: 1500,
        }
    }

    #[test]
    fn every_setting_generates() {
        for task in LinguisticTask::ALL {
            for setting in Setting::ALL {
                let data = generate_linguistic_dataset(task, setting, &small(1)).unwrap();
                assert_eq!(data.len(), 30);
                for item in &data {
                    assert_eq!(item.demonstrations.len(), 10);
                    assert_eq!(item.gold.len(), 1);
                    let lf = parse_chain_form(&item.gold[0]).unwrap();
                    assert_eq!(crate::linguistic::render_chain_form(&lf), item.gold[0]);
                }
            }
        }
    }

    #[test]
    fn t2_composite_hides_evidence() {
        let data =
            generate_linguistic_dataset(LinguisticTask::T2, Setting::Composite, &small(2)).unwrap();
        for item in &data {
            let words: Vec<&str> = item.test_input.trim_end_matches(" .").split(' ').collect();
            // "<det> noun verb ..." with a common-noun subject
            let noun = words[1];
            let verb_upper = item.gold[0].split(' ').next().unwrap().to_string();
            for d in &item.demonstrations {
                let lf = parse_chain_form(&d.output).unwrap();
                let c = &lf.clauses[0];
                let passive = d.input.contains(" was ");
                if !passive {
                    assert_ne!(c.predicate, verb_upper, "{}", d.input);
                    let subj = d
                        .input
                        .split(' ')
                        .take(2)
                        .collect::<Vec<_>>()
                        .join(" ")
                        .to_lowercase();
                    assert!(!subj.ends_with(&format!(" {noun}")), "{}", d.input);
                }
            }
        }
    }

    #[test]
    fn t1_long_chains() {
        let data =
            generate_linguistic_dataset(LinguisticTask::T1, Setting::Composite, &small(3)).unwrap();
        for item in &data {
            let clauses = item.gold[0].matches(" CCOMP ").count() + 1;
            assert!(LONG_CHAIN.contains(&clauses));
            // first agent slot is a phrase
            assert!(
                item.gold[0]
                    .split(" , ")
                    .next()
                    .unwrap()
                    .matches('(')
                    .count()
                    >= 2
            );
        }
    }

    #[test]
    fn zero_sizes_rejected() {
        let mut o = small(0);
        o.n = 0;
        assert!(generate_linguistic_dataset(LinguisticTask::T1, Setting::Simple1, &o).is_err());
    }
}
