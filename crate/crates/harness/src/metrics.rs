//! Answer extraction and the two scores: positional word match and word
//! error rate.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    ExactMatch,
    Wer,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::ExactMatch => "exact_match",
            Metric::Wer => "wer",
        }
    }

    /// Score of `prediction` against the accepted answers. For WER the best
    /// (lowest) value over the gold set is taken.
    pub fn score(self, prediction: &str, gold: &[String]) -> f64 {
        match self {
            Metric::ExactMatch => exact_match(prediction, gold),
            Metric::Wer => gold
                .iter()
                .map(|g| word_error_rate(prediction, g))
                .fold(f64::INFINITY, f64::min),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact_match" | "exact-match" | "em" => Ok(Metric::ExactMatch),
            "wer" => Ok(Metric::Wer),
            other => Err(format!(
                "unknown metric {other:?} (expected exact_match or wer)"
            )),
        }
    }
}

/// Trims, keeps the first line and drops a leading `output:` label.
pub fn normalize_prediction(raw: &str) -> String {
    let line = raw.trim().lines().next().unwrap_or("");
    let line = line.trim();
    line.strip_prefix("output:")
        .map(str::trim)
        .unwrap_or(line)
        .to_string()
}

/// Fraction of gold tokens matched at the same position, case-sensitive,
/// maximised over the accepted answers. Empty gold lists score zero.
pub fn exact_match(prediction: &str, gold: &[String]) -> f64 {
    let pred: Vec<&str> = prediction.split_whitespace().collect();
    gold.iter()
        .map(|g| {
            let g: Vec<&str> = g.split_whitespace().collect();
            if g.is_empty() {
                return if pred.is_empty() { 1.0 } else { 0.0 };
            }
            let hits = g.iter().zip(&pred).filter(|(a, b)| a == b).count();
            (hits as f64 / g.len() as f64).min(1.0)
        })
        .fold(0.0, f64::max)
}

/// Word-level Levenshtein distance with unit costs.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edit distance divided by the gold length in words. Not capped: long
/// wrong predictions can exceed 1. An empty gold scores 0 against an
/// empty prediction and 1 otherwise.
pub fn word_error_rate(prediction: &str, gold: &str) -> f64 {
    let p: Vec<&str> = prediction.split_whitespace().collect();
    let g: Vec<&str> = gold.split_whitespace().collect();
    if g.is_empty() {
        return if p.is_empty() { 0.0 } else { 1.0 };
    }
    edit_distance(&p, &g) as f64 / g.len() as f64
}
