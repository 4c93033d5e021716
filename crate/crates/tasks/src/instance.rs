//! Prompt instances, their text rendering and the JSONL dataset format.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which demonstrations accompany the test input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Setting {
    /// First simple task only.
    Simple1,
    /// Second simple task only.
    Simple2,
    /// Simple-task demonstrations, composite test input.
    Composite,
    /// Composite demonstrations and composite test input.
    CompositeInContext,
}

impl Setting {
    pub const ALL: [Setting; 4] = [
        Setting::Simple1,
        Setting::Simple2,
        Setting::Composite,
        Setting::CompositeInContext,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Setting::Simple1 => "simple1",
            Setting::Simple2 => "simple2",
            Setting::Composite => "composite",
            Setting::CompositeInContext => "composite-in-context",
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Setting::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown setting {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demonstration {
    pub input: String,
    pub output: String,
}

impl Demonstration {
    pub fn new(input: impl Into<String>, output: impl Into<String>) -> Self {
        Self {
            input: input.into(),
            output: output.into(),
        }
    }
}

/// One evaluation item. `gold` lists every accepted answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptInstance {
    pub id: String,
    pub task_pair: String,
    pub mode: String,
    pub setting: Setting,
    /// Empty when no instruction is prepended.
    pub instruction: String,
    pub demonstrations: Vec<Demonstration>,
    pub test_input: String,
    pub gold: Vec<String>,
    pub seed: u64,
}

/// Optional instruction line, one `input:`/`output:` pair per
/// demonstration, then the test input with an open `output:`.
pub fn render_prompt(p: &PromptInstance) -> String {
    let mut out = String::new();
    if !p.instruction.is_empty() {
        out.push_str(&p.instruction);
        out.push('\n');
    }
    for d in &p.demonstrations {
        out.push_str("input: ");
        out.push_str(&d.input);
        out.push_str("\noutput: ");
        out.push_str(&d.output);
        out.push('\n');
    }
    out.push_str("input: ");
    out.push_str(&p.test_input);
    out.push_str("\noutput:");
    out
}

/// Parsed form of a rendered prompt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedPrompt {
    pub instruction: String,
    pub demonstrations: Vec<Demonstration>,
    pub test_input: String,
}

/// Inverse of [`render_prompt`].
pub fn parse_prompt(text: &str) -> Result<ParsedPrompt> {
    let lines: Vec<&str> = text.split('\n').collect();
    let bad = |position: usize, reason: &str| Error::Parse {
        position,
        reason: reason.to_string(),
    };
    let mut i = 0;
    let instruction = if lines.first().is_some_and(|l| !l.starts_with("input: ")) {
        i = 1;
        lines[0].to_string()
    } else {
        String::new()
    };
    let mut demonstrations = Vec::new();
    loop {
        let input = lines
            .get(i)
            .and_then(|l| l.strip_prefix("input: "))
            .ok_or_else(|| bad(i, "expected an input line"))?;
        let next = lines
            .get(i + 1)
            .ok_or_else(|| bad(i + 1, "missing output line"))?;
        if *next == "output:" && i + 2 == lines.len() {
            return Ok(ParsedPrompt {
                instruction,
                demonstrations,
                test_input: input.to_string(),
            });
        }
        let output = next
            .strip_prefix("output: ")
            .ok_or_else(|| bad(i + 1, "expected an output line"))?;
        demonstrations.push(Demonstration::new(input, output));
        i += 2;
    }
}

pub fn write_jsonl<W: Write>(mut w: W, items: &[PromptInstance]) -> Result<()> {
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<PromptInstance>> {
    let mut items = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        items.push(serde_json::from_str(&line)?);
    }
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(instruction: &str) -> PromptInstance {
        PromptInstance {
            id: "x".into(),
            task_pair: "A+B".into(),
            mode: "by-steps".into(),
            setting: Setting::Simple1,
            instruction: instruction.into(),
            demonstrations: vec![Demonstration::new("* apple", "APPLE")],
            test_input: "* cow".into(),
            gold: vec!["COW".into()],
            seed: 0,
        }
    }

    #[test]
    fn table_layout() {
        assert_eq!(
            render_prompt(&sample("")),
            "input: * apple\noutput: APPLE\ninput: * cow\noutput:"
        );
    }

    #[test]
    fn instruction_is_prepended_and_parsed_back() {
        let p = sample("say it loud");
        let text = render_prompt(&p);
        assert!(text.starts_with("say it loud\ninput: * apple"));
        let parsed = parse_prompt(&text).unwrap();
        assert_eq!(parsed.instruction, "say it loud");
        assert_eq!(parsed.demonstrations, p.demonstrations);
        assert_eq!(parsed.test_input, "* cow");
    }

    #[test]
    fn zero_shot_round_trip() {
        let mut p = sample("");
        p.demonstrations.clear();
        let parsed = parse_prompt(&render_prompt(&p)).unwrap();
        assert!(parsed.demonstrations.is_empty());
        assert_eq!(parsed.test_input, "* cow");
    }

    #[test]
    fn settings_parse() {
        for s in Setting::ALL {
            assert_eq!(s.as_str().parse::<Setting>().unwrap(), s);
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(json, format!("\"{}\"", s.as_str()));
        }
        assert!("both".parse::<Setting>().is_err());
    }

    #[test]
    fn jsonl_round_trip() {
        let items = vec![sample(""), sample("hi")];
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &items).unwrap();
        assert_eq!(read_jsonl(buf.as_slice()).unwrap(), items);
    }
}
