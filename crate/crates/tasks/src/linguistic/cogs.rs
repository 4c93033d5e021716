//! Conversion from the original variable-based COGS logical forms to the
//! chain grammar.
//!
//! Handles the conjunct shapes `noun ( x_i )` (optionally definite,
//! `* noun ( x_i ) ;`), `verb . role ( x_e , arg )` for agent, theme,
//! recipient and ccomp, and `noun . nmod . rel ( x_a , x_b )`.

use std::collections::{BTreeMap, BTreeSet};

use super::grammar::{Clause, LogicalForm, Term};
use crate::error::{Error, Result};

#[derive(Default)]
struct Event {
    verb: String,
    agent: Option<String>,
    theme: Option<String>,
    recipient: Option<String>,
    ccomp: Option<String>,
}

fn bad(reason: impl Into<String>) -> Error {
    Error::Parse {
        position: 0,
        reason: reason.into(),
    }
}

/// Splits `name ( a , b )` into `name` and its arguments.
fn call(conjunct: &str) -> Result<(&str, Vec<&str>)> {
    let (head, rest) = conjunct
        .split_once(" ( ")
        .ok_or_else(|| bad(format!("no argument list in {conjunct:?}")))?;
    let args = rest
        .strip_suffix(" )")
        .ok_or_else(|| bad(format!("unclosed argument list in {conjunct:?}")))?;
    Ok((head.trim(), args.split(" , ").map(str::trim).collect()))
}

fn is_var(s: &str) -> bool {
    s.starts_with("x_")
}

pub fn convert_cogs(lf: &str) -> Result<LogicalForm> {
    let mut nouns: BTreeMap<String, String> = BTreeMap::new();
    let mut events: BTreeMap<String, Event> = BTreeMap::new();
    let mut nmods: BTreeMap<String, (String, String)> = BTreeMap::new();

    for conjunct in lf.split(" ; ").flat_map(|s| s.split(" AND ")) {
        let conjunct = conjunct.trim().trim_start_matches("* ").trim();
        let (head, args) = call(conjunct)?;
        let parts: Vec<&str> = head.split(" . ").map(str::trim).collect();
        match (parts.as_slice(), args.as_slice()) {
            ([noun], [x]) if is_var(x) => {
                nouns.insert(x.to_string(), noun.to_string());
            }
            ([_, "nmod", rel], [a, b]) => {
                nmods.insert(a.to_string(), (rel.to_string(), b.to_string()));
            }
            ([verb, role], [e, arg]) => {
                let ev = events.entry(e.to_string()).or_default();
                ev.verb = verb.to_string();
                let slot = match *role {
                    "agent" => &mut ev.agent,
                    "theme" => &mut ev.theme,
                    "recipient" => &mut ev.recipient,
                    "ccomp" => &mut ev.ccomp,
                    other => return Err(bad(format!("unsupported role {other:?}"))),
                };
                *slot = Some(arg.to_string());
            }
            _ => return Err(bad(format!("unsupported conjunct {conjunct:?}"))),
        }
    }

    let term = |arg: &str| -> Result<Term> {
        if !is_var(arg) {
            return Ok(Term::word(arg));
        }
        let mut seen = BTreeSet::new();
        let mut chain = Vec::new();
        let mut cur = arg.to_string();
        loop {
            if !seen.insert(cur.clone()) {
                return Err(bad("cyclic nmod chain"));
            }
            let noun = nouns
                .get(&cur)
                .ok_or_else(|| bad(format!("unbound variable {cur}")))?;
            match nmods.get(&cur) {
                Some((rel, next)) => {
                    chain.push((rel.clone(), noun.clone()));
                    cur = next.clone();
                }
                None => {
                    let mut t = Term::word(noun);
                    for (rel, head) in chain.into_iter().rev() {
                        t = Term::phrase(rel, head, t);
                    }
                    return Ok(t);
                }
            }
        }
    };

    let targets: BTreeSet<&String> = events.values().filter_map(|e| e.ccomp.as_ref()).collect();
    let roots: Vec<&String> = events.keys().filter(|k| !targets.contains(k)).collect();
    let [root] = roots.as_slice() else {
        return Err(bad(format!(
            "expected one root event, found {}",
            roots.len()
        )));
    };
    let mut clauses = Vec::new();
    let mut cur = Some((*root).clone());
    while let Some(key) = cur {
        let ev = events
            .get(&key)
            .ok_or_else(|| bad(format!("ccomp to unknown event {key}")))?;
        let slot = |a: &Option<String>| a.as_deref().map(&term).transpose();
        clauses.push(Clause::new(
            &ev.verb,
            slot(&ev.agent)?,
            slot(&ev.theme)?,
            slot(&ev.recipient)?,
        ));
        if clauses.len() > events.len() {
            return Err(bad("cyclic ccomp chain"));
        }
        cur = ev.ccomp.clone();
    }
    LogicalForm::new(clauses)
}
