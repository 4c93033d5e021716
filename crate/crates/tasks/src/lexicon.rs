//! Bundled word lists: object nouns, number words, past tenses, antonyms.
//!
//! The object list is a fixed snapshot of single words obtained by splitting
//! ImageNet class names, lower-cased, with function words removed.

use std::collections::HashMap;
use std::sync::OnceLock;

const OBJECTS: &str = include_str!("../data/objects.txt");
const PAST_TENSE: &str = include_str!("../data/past_tense.tsv");
const ANTONYMS: &str = include_str!("../data/antonyms.tsv");

const ONES: [&str; 20] = [
    "zero",
    "one",
    "two",
    "three",
    "four",
    "five",
    "six",
    "seven",
    "eight",
    "nine",
    "ten",
    "eleven",
    "twelve",
    "thirteen",
    "fourteen",
    "fifteen",
    "sixteen",
    "seventeen",
    "eighteen",
    "nineteen",
];
const TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

pub struct Lexicon {
    objects: Vec<&'static str>,
    past: Vec<(&'static str, &'static str)>,
    past_map: HashMap<&'static str, &'static str>,
    antonym_words: Vec<&'static str>,
    antonym_map: HashMap<&'static str, &'static str>,
}

fn pairs(table: &'static str) -> Vec<(&'static str, &'static str)> {
    table
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (a, b) = l.split_once('\t').expect("tab separated table");
            (a.trim(), b.trim())
        })
        .collect()
}

impl Lexicon {
    /// Shared, lazily parsed instance.
    pub fn get() -> &'static Lexicon {
        static LEX: OnceLock<Lexicon> = OnceLock::new();
        LEX.get_or_init(|| {
            let objects = OBJECTS
                .lines()
                .map(str::trim)
                .filter(|w| !w.is_empty())
                .collect();
            let past = pairs(PAST_TENSE);
            let past_map = past.iter().copied().collect();
            let mut antonym_words = Vec::new();
            let mut antonym_map = HashMap::new();
            for (a, b) in pairs(ANTONYMS) {
                antonym_words.extend([a, b]);
                antonym_map.insert(a, b);
                antonym_map.insert(b, a);
            }
            Lexicon {
                objects,
                past,
                past_map,
                antonym_words,
                antonym_map,
            }
        })
    }

    pub fn objects(&self) -> &[&'static str] {
        &self.objects
    }

    pub fn verbs(&self) -> impl ExactSizeIterator<Item = &'static str> + '_ {
        self.past.iter().map(|(v, _)| *v)
    }

    pub fn verb_count(&self) -> usize {
        self.past.len()
    }

    pub fn verb(&self, i: usize) -> &'static str {
        self.past[i].0
    }

    pub fn antonym_words(&self) -> &[&'static str] {
        &self.antonym_words
    }

    /// Past tense of a lower-case verb from the bundled table.
    pub fn past_tense(&self, verb: &str) -> Option<&'static str> {
        self.past_map.get(verb).copied()
    }

    /// Opposite of `word`, keeping an initial capital ("Above" -> "Below").
    pub fn antonym(&self, word: &str) -> Option<String> {
        let mut chars = word.chars();
        let first = chars.next()?;
        let capitalized = first.is_uppercase();
        let lower = word.to_lowercase();
        let opp = self.antonym_map.get(lower.as_str())?;
        Some(if capitalized {
            capitalize_first(opp)
        } else {
            opp.to_string()
        })
    }
}

pub fn capitalize_first(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// English words for `n < 1_000_000`, compounds hyphenated, no "and":
/// 31 -> "thirty-one", 123 -> "one hundred twenty-three".
pub fn number_to_words(n: u32) -> Option<String> {
    if n >= 1_000_000 {
        return None;
    }
    if n == 0 {
        return Some(ONES[0].to_string());
    }
    let mut parts = Vec::new();
    let thousands = n / 1000;
    let rest = n % 1000;
    if thousands > 0 {
        parts.push(format!("{} thousand", below_thousand(thousands)));
    }
    if rest > 0 {
        parts.push(below_thousand(rest));
    }
    Some(parts.join(" "))
}

fn below_thousand(n: u32) -> String {
    debug_assert!(n > 0 && n < 1000);
    let hundreds = n / 100;
    let rest = n % 100;
    let mut parts = Vec::new();
    if hundreds > 0 {
        parts.push(format!("{} hundred", ONES[hundreds as usize]));
    }
    if rest > 0 {
        parts.push(below_hundred(rest));
    }
    parts.join(" ")
}

fn below_hundred(n: u32) -> String {
    if n < 20 {
        ONES[n as usize].to_string()
    } else if n.is_multiple_of(10) {
        TENS[(n / 10) as usize].to_string()
    } else {
        format!("{}-{}", TENS[(n / 10) as usize], ONES[(n % 10) as usize])
    }
}

/// Inverse of [`number_to_words`]; accepts only its canonical output
/// (case-insensitive).
pub fn words_to_number(text: &str) -> Option<u32> {
    let lower = text.trim().to_lowercase();
    let mut total = 0u32;
    let mut current = 0u32;
    let mut seen_any = false;
    for token in lower.split_whitespace() {
        seen_any = true;
        match token {
            "hundred" => {
                if current == 0 || current >= 10 {
                    return None;
                }
                current *= 100;
            }
            "thousand" => {
                if current == 0 {
                    return None;
                }
                total += current * 1000;
                current = 0;
            }
            _ => current += small_word_value(token)?,
        }
    }
    let n = total + current;
    // Reject non-canonical spellings such as "twenty one" or "ten hundred".
    (seen_any && number_to_words(n).as_deref() == Some(lower.as_str())).then_some(n)
}

fn small_word_value(token: &str) -> Option<u32> {
    if let Some((t, o)) = token.split_once('-') {
        let tens = TENS.iter().position(|w| !w.is_empty() && *w == t)? as u32;
        let ones = ONES.iter().position(|w| *w == o)? as u32;
        return (1..10).contains(&ones).then_some(tens * 10 + ones);
    }
    if let Some(i) = ONES.iter().position(|w| *w == token) {
        return Some(i as u32);
    }
    TENS.iter()
        .position(|w| !w.is_empty() && *w == token)
        .map(|i| i as u32 * 10)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_words_hand_cases() {
        assert_eq!(number_to_words(31).unwrap(), "thirty-one");
        assert_eq!(number_to_words(53).unwrap(), "fifty-three");
        assert_eq!(number_to_words(100).unwrap(), "one hundred");
        assert_eq!(number_to_words(123).unwrap(), "one hundred twenty-three");
        assert_eq!(number_to_words(200).unwrap(), "two hundred");
        assert_eq!(number_to_words(1001).unwrap(), "one thousand one");
        assert_eq!(words_to_number("twenty"), Some(20));
        assert_eq!(words_to_number("FIFTY-THREE"), Some(53));
        assert_eq!(words_to_number("twenty one"), None);
        assert_eq!(words_to_number("ten hundred"), None);
        assert_eq!(words_to_number(""), None);
    }

    #[test]
    fn number_words_round_trip() {
        for n in 0..5000 {
            let w = number_to_words(n).unwrap();
            assert_eq!(words_to_number(&w), Some(n), "{w}");
        }
    }

    #[test]
    fn tables_load() {
        let lex = Lexicon::get();
        assert!(lex.objects().len() >= 800);
        assert!(lex.verb_count() >= 300);
        assert_eq!(lex.past_tense("pay"), Some("paid"));
        assert_eq!(lex.antonym("Above").as_deref(), Some("Below"));
        assert_eq!(lex.antonym("below").as_deref(), Some("above"));
        assert!(lex.antonym_words().len() >= 200);
        assert!(lex.antonym("zebra").is_none());
    }
}
