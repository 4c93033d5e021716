//! Logical rule tasks A-H, their seven composite pairs and dataset
//! generation.
//!
//! | rule | input          | output      |
//! |------|----------------|-------------|
//! | A    | `apple`        | `APPLE`     |
//! | B    | `bell ford`    | `ford bell` |
//! | C    | `twenty @ eleven` | `thirty-one` |
//! | D    | `pay`          | `paid`      |
//! | E    | `Above`        | `Below`     |
//! | F    | `435`          | `436`       |
//! | G    | `15 @ 6`       | `3`         |
//! | H    | `12 # 5`       | `18`        |

use std::fmt;
use std::str::FromStr;

use compose_core::Seed;
use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{malformed, Error, Result};
use crate::instance::{Demonstration, PromptInstance, Setting};
use crate::lexicon::{number_to_words, words_to_number, Lexicon};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SimpleRule {
    /// Capitalization, marked `*` when a marker is present.
    A,
    /// Swap of two words, marked `( )`.
    B,
    /// Sum of two number words, `@`.
    C,
    /// Past tense.
    D,
    /// Opposite.
    E,
    /// Plus one.
    F,
    /// Modulus, `@`.
    G,
    /// Sum plus one, `#`.
    H,
}

impl SimpleRule {
    pub const ALL: [SimpleRule; 8] = [
        SimpleRule::A,
        SimpleRule::B,
        SimpleRule::C,
        SimpleRule::D,
        SimpleRule::E,
        SimpleRule::F,
        SimpleRule::G,
        SimpleRule::H,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SimpleRule::A => "capitalization",
            SimpleRule::B => "swap",
            SimpleRule::C => "two-sum",
            SimpleRule::D => "past-tense",
            SimpleRule::E => "opposite",
            SimpleRule::F => "plus-one",
            SimpleRule::G => "modular",
            SimpleRule::H => "two-sum-plus-one",
        }
    }
}

fn tokens(input: &str) -> Vec<&str> {
    input.split_whitespace().collect()
}

/// Removes one enclosing `( ... )` pair if present.
fn strip_parens(input: &str) -> &str {
    let t = input.trim();
    t.strip_prefix("( ")
        .and_then(|s| s.strip_suffix(" )"))
        .map(str::trim)
        .unwrap_or(t)
}

fn parse_int(rule: SimpleRule, input: &str, s: &str) -> Result<u64> {
    s.trim().parse::<u64>().map_err(|_| {
        malformed(
            rule.name(),
            input,
            format!("{s:?} is not a nonnegative integer"),
        )
    })
}

fn split_binary<'a>(rule: SimpleRule, input: &'a str, op: &str) -> Result<(&'a str, &'a str)> {
    let parts: Vec<&str> = input.split(op).collect();
    if parts.len() != 2 {
        return Err(malformed(
            rule.name(),
            input,
            format!("expected exactly one {op:?}"),
        ));
    }
    Ok((parts[0].trim(), parts[1].trim()))
}

/// Gold output of a simple rule.
///
/// A accepts `w`, `* w` and `* ( w )`; B accepts `w1 w2` and `( w1 w2 )`.
pub fn apply_simple_rule(rule: SimpleRule, input: &str) -> Result<String> {
    let lex = Lexicon::get();
    let input_t = input.trim();
    if input_t.is_empty() {
        return Err(malformed(rule.name(), input, "empty input"));
    }
    match rule {
        SimpleRule::A => {
            let body = input_t
                .strip_prefix("* ")
                .map(strip_parens)
                .unwrap_or(input_t);
            if body.contains('*') {
                return Err(malformed(rule.name(), input, "nested marker"));
            }
            Ok(body.to_uppercase())
        }
        SimpleRule::B => {
            let words = tokens(strip_parens(input_t));
            if words.len() != 2 {
                return Err(malformed(
                    rule.name(),
                    input,
                    format!("swap needs 2 words, got {}", words.len()),
                ));
            }
            Ok(format!("{} {}", words[1], words[0]))
        }
        SimpleRule::C => {
            let (a, b) = split_binary(rule, input_t, " @ ")?;
            let parse = |s: &str| {
                words_to_number(s).ok_or_else(|| {
                    malformed(rule.name(), input, format!("{s:?} is not a number word"))
                })
            };
            let sum = parse(a)? + parse(b)?;
            number_to_words(sum).ok_or_else(|| malformed(rule.name(), input, "sum out of range"))
        }
        SimpleRule::D => lex
            .past_tense(input_t)
            .map(str::to_string)
            .ok_or_else(|| malformed(rule.name(), input, "verb not in the past-tense table")),
        SimpleRule::E => lex
            .antonym(input_t)
            .ok_or_else(|| malformed(rule.name(), input, "word not in the antonym table")),
        SimpleRule::F => Ok((parse_int(rule, input, input_t)? + 1).to_string()),
        SimpleRule::G => {
            let (a, b) = split_binary(rule, input_t, " @ ")?;
            let (a, b) = (parse_int(rule, input, a)?, parse_int(rule, input, b)?);
            if b == 0 {
                return Err(malformed(rule.name(), input, "modulus by zero"));
            }
            Ok((a % b).to_string())
        }
        SimpleRule::H => {
            let (a, b) = split_binary(rule, input_t, " # ")?;
            Ok((parse_int(rule, input, a)? + parse_int(rule, input, b)? + 1).to_string())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Rules act on disjoint input segments.
    ByParts,
    /// One rule acts on the other's output.
    BySteps,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::ByParts => "by-parts",
            Mode::BySteps => "by-steps",
        }
    }
}

/// The seven composite pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TaskPair {
    AB,
    AC,
    AF,
    BD,
    BE,
    DF,
    GH,
}

impl TaskPair {
    pub const ALL: [TaskPair; 7] = [
        TaskPair::AB,
        TaskPair::AC,
        TaskPair::AF,
        TaskPair::BD,
        TaskPair::BE,
        TaskPair::DF,
        TaskPair::GH,
    ];

    pub fn rules(self) -> (SimpleRule, SimpleRule) {
        use SimpleRule::*;
        match self {
            TaskPair::AB => (A, B),
            TaskPair::AC => (A, C),
            TaskPair::AF => (A, F),
            TaskPair::BD => (B, D),
            TaskPair::BE => (B, E),
            TaskPair::DF => (D, F),
            TaskPair::GH => (G, H),
        }
    }

    pub fn mode(self) -> Mode {
        match self {
            TaskPair::AF | TaskPair::DF => Mode::ByParts,
            _ => Mode::BySteps,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TaskPair::AB => "A+B",
            TaskPair::AC => "A+C",
            TaskPair::AF => "A+F",
            TaskPair::BD => "B+D",
            TaskPair::BE => "B+E",
            TaskPair::DF => "D+F",
            TaskPair::GH => "G+H",
        }
    }

    fn index(self) -> u64 {
        TaskPair::ALL.iter().position(|p| *p == self).unwrap() as u64
    }

    /// Instruction line prepended to prompts when enabled.
    pub fn instruction(self) -> &'static str {
        match self {
            TaskPair::AB => "* is a function before words for swapping the position of 2 words, # is another function after words for capitalizing letters of words.",
            TaskPair::AC => "@ is a function between number words for adding the two numbers, * is another function before words for capitalizing letters of words.",
            TaskPair::AF => "A number is increased by one and a word has its letters capitalized; if both are given, perform both operations.",
            TaskPair::BD => "( ) is a function around 2 words for swapping their positions, and each verb is changed into its past tense.",
            TaskPair::BE => "( ) is a function around 2 words for swapping their positions, and each word is changed into its opposite.",
            TaskPair::DF => "A number is increased by one and a verb is changed into its past tense; if both are given, perform both operations.",
            TaskPair::GH => "@ is a function between numbers for taking the modulus, # is another function between numbers for summing them and adding one.",
        }
    }
}

impl fmt::Display for TaskPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>()
            .to_uppercase();
        TaskPair::ALL
            .into_iter()
            .find(|p| p.as_str() == norm || p.as_str().replace('+', "") == norm)
            .ok_or_else(|| Error::InvalidInput(format!("unknown task pair {s:?}")))
    }
}

fn push_unique(out: &mut Vec<String>, s: String) {
    if !out.contains(&s) {
        out.push(s);
    }
}

/// Every accepted output of a composite input. Where the order of the two
/// operations matters, each order's result is included.
pub fn apply_composite_rule(pair: TaskPair, input: &str) -> Result<Vec<String>> {
    use SimpleRule::*;
    let t = input.trim();
    let task = pair.as_str();
    match pair {
        TaskPair::AB => {
            let inner = strip_parens(t);
            if inner == t {
                return Err(malformed(task, input, "expected ( * w1 * w2 )"));
            }
            let words = tokens(inner);
            if words.len() != 4 || words[0] != "*" || words[2] != "*" {
                return Err(malformed(task, input, "expected ( * w1 * w2 )"));
            }
            let caps = format!(
                "{} {}",
                apply_simple_rule(A, &format!("* {}", words[1]))?,
                apply_simple_rule(A, &format!("* {}", words[3]))?
            );
            Ok(vec![apply_simple_rule(B, &caps)?])
        }
        TaskPair::AC => {
            let inner = t
                .strip_prefix("* ")
                .map(strip_parens)
                .filter(|s| s.contains(" @ "))
                .ok_or_else(|| malformed(task, input, "expected * ( a @ b )"))?;
            Ok(vec![apply_simple_rule(A, &apply_simple_rule(C, inner)?)?])
        }
        TaskPair::AF | TaskPair::DF => {
            let word_rule = if pair == TaskPair::AF { A } else { D };
            let words = tokens(t);
            match words.as_slice() {
                [n, w] => Ok(vec![format!(
                    "{} {}",
                    apply_simple_rule(F, n)?,
                    apply_simple_rule(word_rule, w)?
                )]),
                _ => Err(malformed(task, input, "expected <number> <word>")),
            }
        }
        TaskPair::BD | TaskPair::BE => {
            let word_rule = if pair == TaskPair::BD { D } else { E };
            let words = tokens(strip_parens(t));
            if strip_parens(t) == t || words.len() != 2 {
                return Err(malformed(task, input, "expected ( w1 w2 )"));
            }
            let mapped = format!(
                "{} {}",
                apply_simple_rule(word_rule, words[0])?,
                apply_simple_rule(word_rule, words[1])?
            );
            let first_map = apply_simple_rule(B, &mapped)?;
            let swapped = apply_simple_rule(B, strip_parens(t))?;
            let sw: Vec<&str> = tokens(&swapped);
            let first_swap = format!(
                "{} {}",
                apply_simple_rule(word_rule, sw[0])?,
                apply_simple_rule(word_rule, sw[1])?
            );
            let mut out = vec![first_map];
            push_unique(&mut out, first_swap);
            Ok(out)
        }
        TaskPair::GH => {
            let (ab, c) = t
                .split_once(" @ ")
                .ok_or_else(|| malformed(task, input, "expected a # b @ c"))?;
            let (a, b) = ab
                .split_once(" # ")
                .ok_or_else(|| malformed(task, input, "expected a # b @ c"))?;
            // Sum first: (a + b + 1) mod c.
            let sum_first =
                apply_simple_rule(G, &format!("{} @ {}", apply_simple_rule(H, ab)?, c))?;
            // Modulus first: a + (b mod c) + 1.
            let mod_first = apply_simple_rule(
                H,
                &format!("{} # {}", a, apply_simple_rule(G, &format!("{b} @ {c}"))?),
            )?;
            let mut out = vec![sum_first];
            push_unique(&mut out, mod_first);
            Ok(out)
        }
    }
}

/// Which task an item is drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    First,
    Second,
    Composite,
}

impl Part {
    fn tag(self) -> u64 {
        match self {
            Part::First => 1,
            Part::Second => 2,
            Part::Composite => 3,
        }
    }
}

fn number<R: Rng + ?Sized>(rng: &mut R) -> u32 {
    rng.random_range(1..=1000)
}

fn number_word<R: Rng + ?Sized>(rng: &mut R) -> String {
    number_to_words(rng.random_range(1..=100)).expect("in range")
}

fn object<R: Rng + ?Sized>(rng: &mut R) -> &'static str {
    Lexicon::get()
        .objects()
        .choose(rng)
        .expect("nonempty word list")
}

fn verb<R: Rng + ?Sized>(rng: &mut R) -> &'static str {
    let lex = Lexicon::get();
    lex.verb(rng.random_range(0..lex.verb_count()))
}

/// Antonym-table word, lower-case or with an initial capital.
fn opposite_word<R: Rng + ?Sized>(rng: &mut R) -> String {
    let w = *Lexicon::get()
        .antonym_words()
        .choose(rng)
        .expect("nonempty table");
    if rng.random_bool(0.5) {
        crate::lexicon::capitalize_first(w)
    } else {
        w.to_string()
    }
}

fn two_distinct<R: Rng + ?Sized, T: PartialEq>(
    rng: &mut R,
    mut draw: impl FnMut(&mut R) -> T,
) -> (T, T) {
    let a = draw(rng);
    loop {
        let b = draw(rng);
        if b != a {
            return (a, b);
        }
    }
}

/// Draws one input of `part` in the pair's syntax.
pub fn draw_input<R: Rng + ?Sized>(pair: TaskPair, part: Part, rng: &mut R) -> String {
    match (pair, part) {
        (TaskPair::AB, Part::First) => format!("* {}", object(rng)),
        (TaskPair::AB, Part::Second) | (TaskPair::BD | TaskPair::BE, Part::First) => {
            let (a, b) = two_distinct(rng, object);
            format!("( {a} {b} )")
        }
        (TaskPair::AB, Part::Composite) => {
            let (a, b) = two_distinct(rng, object);
            format!("( * {a} * {b} )")
        }
        (TaskPair::AC, Part::First) => format!("* ( {} )", number_word(rng)),
        (TaskPair::AC, Part::Second) => format!("{} @ {}", number_word(rng), number_word(rng)),
        (TaskPair::AC, Part::Composite) => {
            format!("* ( {} @ {} )", number_word(rng), number_word(rng))
        }
        (TaskPair::AF, Part::First) => object(rng).to_string(),
        (TaskPair::AF, Part::Second) | (TaskPair::DF, Part::Second) => number(rng).to_string(),
        (TaskPair::AF, Part::Composite) => format!("{} {}", number(rng), object(rng)),
        (TaskPair::BD, Part::Second) | (TaskPair::DF, Part::First) => verb(rng).to_string(),
        (TaskPair::BD, Part::Composite) => {
            let (a, b) = two_distinct(rng, verb);
            format!("( {a} {b} )")
        }
        (TaskPair::BE, Part::Second) => opposite_word(rng),
        (TaskPair::BE, Part::Composite) => {
            let (a, b) = two_distinct(rng, opposite_word);
            format!("( {a} {b} )")
        }
        (TaskPair::DF, Part::Composite) => format!("{} {}", number(rng), verb(rng)),
        (TaskPair::GH, Part::First) => format!("{} @ {}", number(rng), number(rng)),
        (TaskPair::GH, Part::Second) => format!("{} # {}", number(rng), number(rng)),
        (TaskPair::GH, Part::Composite) => {
            format!("{} # {} @ {}", number(rng), number(rng), number(rng))
        }
    }
}

/// Gold set of an input drawn for `part`.
pub fn gold_for(pair: TaskPair, part: Part, input: &str) -> Result<Vec<String>> {
    let (r1, r2) = pair.rules();
    match part {
        Part::First => Ok(vec![apply_simple_rule(r1, input)?]),
        Part::Second => Ok(vec![apply_simple_rule(r2, input)?]),
        Part::Composite => apply_composite_rule(pair, input),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateOptions {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    /// Prepend the pair's instruction line.
    pub instruction: bool,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self {
            n: 100,
            k: 10,
            seed: 0,
            instruction: true,
        }
    }
}

const MAX_REDRAWS: usize = 1000;

/// Parts of the `k` demonstrations for a setting. The composite setting
/// alternates the two simple tasks, starting with the first.
pub fn demo_parts(setting: Setting, k: usize) -> Vec<Part> {
    (0..k)
        .map(|i| match setting {
            Setting::Simple1 => Part::First,
            Setting::Simple2 => Part::Second,
            Setting::Composite => {
                if i % 2 == 0 {
                    Part::First
                } else {
                    Part::Second
                }
            }
            Setting::CompositeInContext => Part::Composite,
        })
        .collect()
}

pub fn test_part(setting: Setting) -> Part {
    match setting {
        Setting::Simple1 => Part::First,
        Setting::Simple2 => Part::Second,
        Setting::Composite | Setting::CompositeInContext => Part::Composite,
    }
}

/// Demonstrations for one instance: inputs distinct from each other and
/// from `test_input`.
pub fn draw_demonstrations<R: Rng + ?Sized>(
    pair: TaskPair,
    setting: Setting,
    k: usize,
    test_input: &str,
    rng: &mut R,
) -> Result<Vec<Demonstration>> {
    let mut seen = vec![test_input.to_string()];
    let mut demos = Vec::with_capacity(k);
    for part in demo_parts(setting, k) {
        let mut tries = 0;
        let input = loop {
            let x = draw_input(pair, part, rng);
            if !seen.contains(&x) {
                break x;
            }
            tries += 1;
            if tries >= MAX_REDRAWS {
                return Err(Error::Exhausted(format!(
                    "{pair} {setting}: cannot find {k} distinct demonstrations"
                )));
            }
        };
        let output = gold_for(pair, part, &input)?.swap_remove(0);
        seen.push(input.clone());
        demos.push(Demonstration::new(input, output));
    }
    Ok(demos)
}

/// `n` instances of `pair` under `setting`, deterministic in `opts.seed`.
///
/// The test item of instance `i` depends only on (seed, pair, test task, i),
/// so both composite settings share their test inputs.
pub fn generate_dataset(
    pair: TaskPair,
    setting: Setting,
    opts: &GenerateOptions,
) -> Result<Vec<PromptInstance>> {
    if opts.n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let base = Seed(opts.seed).derive(pair.index());
    let part = test_part(setting);
    let test_seed = base.derive(part.tag());
    let demo_seed = base.derive(0x100 + setting as u64);
    (0..opts.n)
        .map(|i| {
            let mut rng = test_seed.stream(i as u64);
            let test_input = draw_input(pair, part, &mut rng);
            let gold = gold_for(pair, part, &test_input)?;
            let mut rng = demo_seed.stream(i as u64);
            let demonstrations = draw_demonstrations(pair, setting, opts.k, &test_input, &mut rng)?;
            Ok(PromptInstance {
                id: format!("{}-{}-{}-{}", pair, setting, opts.seed, i),
                task_pair: pair.to_string(),
                mode: pair.mode().as_str().to_string(),
                setting,
                instruction: if opts.instruction {
                    pair.instruction().to_string()
                } else {
                    String::new()
                },
                demonstrations,
                test_input,
                gold,
                seed: opts.seed,
            })
        })
        .collect()
}
