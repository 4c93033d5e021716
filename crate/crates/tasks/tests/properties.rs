use compose_core::Seed;
use compose_tasks::instance::{
    parse_prompt, render_prompt, write_jsonl, Demonstration, PromptInstance, Setting,
};
use compose_tasks::lexicon::{number_to_words, words_to_number};
use compose_tasks::linguistic::{
    covers, generate_linguistic_dataset, parse_chain_form, render_chain_form, select_in_context,
    LinguisticOptions, LinguisticTask, SentencePair,
};
use compose_tasks::logical::{
    apply_composite_rule, apply_simple_rule, draw_input, generate_dataset, gold_for,
    GenerateOptions, Part, SimpleRule, TaskPair,
};
use proptest::prelude::*;
use rand::Rng;
use sha2::{Digest, Sha256};

#[test]
fn oracles_are_total_on_generated_inputs() {
    for pair in TaskPair::ALL {
        let mut rng = Seed(11).derive(pair as u64).stream(0);
        for part in [Part::First, Part::Second, Part::Composite] {
            for _ in 0..10_000 {
                let x = draw_input(pair, part, &mut rng);
                let gold = gold_for(pair, part, &x).unwrap_or_else(|e| panic!("{pair} {x}: {e}"));
                assert!(!gold.is_empty());
            }
        }
    }
}

#[test]
fn by_steps_equals_nested_application() {
    use SimpleRule::*;
    let mut rng = Seed(5).stream(0);
    for _ in 0..2000 {
        let x = draw_input(TaskPair::AC, Part::Composite, &mut rng);
        let inner = x.trim_start_matches("* ( ").trim_end_matches(" )");
        let nested = apply_simple_rule(A, &apply_simple_rule(C, inner).unwrap()).unwrap();
        assert_eq!(
            apply_composite_rule(TaskPair::AC, &x).unwrap(),
            vec![nested]
        );

        let x = draw_input(TaskPair::GH, Part::Composite, &mut rng);
        let (ab, c) = x.split_once(" @ ").unwrap();
        let sum_first =
            apply_simple_rule(G, &format!("{} @ {c}", apply_simple_rule(H, ab).unwrap())).unwrap();
        assert!(apply_composite_rule(TaskPair::GH, &x)
            .unwrap()
            .contains(&sum_first));
    }
}

#[test]
fn two_sum_words_agree_with_integers() {
    for a in 1..=100u32 {
        for b in 1..=100u32 {
            let input = format!(
                "{} @ {}",
                number_to_words(a).unwrap(),
                number_to_words(b).unwrap()
            );
            let out = apply_simple_rule(SimpleRule::C, &input).unwrap();
            assert_eq!(words_to_number(&out), Some(a + b), "{input} -> {out}");
        }
    }
}

fn digest(items: &[PromptInstance]) -> String {
    let mut buf = Vec::new();
    write_jsonl(&mut buf, items).unwrap();
    Sha256::digest(&buf)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[test]
fn logical_datasets_are_deterministic() {
    for pair in TaskPair::ALL {
        for setting in Setting::ALL {
            let opts = GenerateOptions::default();
            let a = generate_dataset(pair, setting, &opts).unwrap();
            let b = generate_dataset(pair, setting, &opts).unwrap();
            assert_eq!(digest(&a), digest(&b));
            for item in &a {
                assert_eq!(item.demonstrations.len(), 10);
                let part = compose_tasks::logical::test_part(setting);
                assert_eq!(item.gold, gold_for(pair, part, &item.test_input).unwrap());
            }
        }
    }
    let other = GenerateOptions {
        seed: 1,
        ..Default::default()
    };
    assert_ne!(
        digest(&generate_dataset(TaskPair::AB, Setting::Composite, &other).unwrap()),
        digest(
            &generate_dataset(
                TaskPair::AB,
                Setting::Composite,
                &GenerateOptions::default()
            )
            .unwrap()
        )
    );
}

#[test]
fn linguistic_default_sizes() {
    for task in LinguisticTask::ALL {
        let opts = LinguisticOptions::default();
        let a = generate_linguistic_dataset(task, Setting::Composite, &opts).unwrap();
        assert_eq!(a.len(), 800);
        let b = generate_linguistic_dataset(task, Setting::Composite, &opts).unwrap();
        assert_eq!(digest(&a), digest(&b));
    }
}

#[test]
fn coverage_holds_over_random_draws() {
    let opts = LinguisticOptions {
        n: 125,
        ..Default::default()
    };
    let mut checked = 0;
    for task in LinguisticTask::ALL {
        for setting in Setting::ALL {
            for item in generate_linguistic_dataset(task, setting, &opts).unwrap() {
                let to_pair = |src: &str, tgt: &str| SentencePair {
                    source: src.into(),
                    target: tgt.into(),
                    primitives: primitives_of(tgt),
                };
                let test = to_pair(&item.test_input, &item.gold[0]);
                let demos: Vec<SentencePair> = item
                    .demonstrations
                    .iter()
                    .map(|d| to_pair(&d.input, &d.output))
                    .collect();
                assert!(covers(&test, &demos), "{}", item.id);
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 1000);
}

/// Primitives recovered from the target string alone, independent of the
/// generator's sentence structures.
fn primitives_of(target: &str) -> std::collections::BTreeSet<String> {
    let lf = parse_chain_form(target).unwrap();
    lf.primitives()
        .into_iter()
        .map(|p| p.to_lowercase())
        .collect()
}

fn random_pair<R: Rng>(rng: &mut R, vocab: &[String], name: String) -> SentencePair {
    SentencePair {
        source: name.clone(),
        target: name,
        primitives: (0..rng.random_range(1..5))
            .map(|_| vocab[rng.random_range(0..vocab.len())].clone())
            .collect(),
    }
}

#[test]
fn select_is_valid_on_random_pools() {
    let vocab: Vec<String> = (0..30).map(|i| format!("w{i}")).collect();
    let mut selected = 0;
    for trial in 0..1000u64 {
        let mut rng = Seed(trial).stream(7);
        let pool: Vec<SentencePair> = (0..60)
            .map(|i| random_pair(&mut rng, &vocab, format!("p{i}")))
            .collect();
        let test = random_pair(&mut rng, &vocab, "test".into());
        let present = test
            .primitives
            .iter()
            .all(|p| pool.iter().any(|d| d.primitives.contains(p)));
        match select_in_context(&test, &pool, 10, Seed(trial)) {
            Ok(demos) => {
                assert_eq!(demos.len(), 10);
                assert!(covers(&test, &demos));
                selected += 1;
            }
            // test items have at most four primitives, so only absence can fail
            Err(compose_tasks::Error::Uncovered(missing)) => {
                assert!(!present);
                assert!(!missing.is_empty());
            }
            Err(e) => panic!("{e}"),
        }
    }
    assert!(selected > 900);
}

proptest! {
    #[test]
    fn prompt_render_parse_round_trip(
        instr in "[a-z ]{0,20}",
        demos in prop::collection::vec(("[a-z*()@# 0-9]{1,15}", "[A-Za-z0-9 -]{1,15}"), 0..6),
        test in "[a-z*()@# 0-9]{1,15}",
    ) {
        prop_assume!(!instr.starts_with("input: "));
        let p = PromptInstance {
            id: "p".into(),
            task_pair: "A+B".into(),
            mode: "by-steps".into(),
            setting: Setting::Simple1,
            instruction: instr.clone(),
            demonstrations: demos.iter().map(|(i, o)| Demonstration::new(i.as_str(), o.as_str())).collect(),
            test_input: test.clone(),
            gold: vec![],
            seed: 0,
        };
        let parsed = parse_prompt(&render_prompt(&p)).unwrap();
        prop_assert_eq!(parsed.instruction, instr);
        prop_assert_eq!(parsed.demonstrations, p.demonstrations);
        prop_assert_eq!(parsed.test_input, test);
    }

    #[test]
    fn chain_form_round_trip(seed in any::<u64>(), task in 0usize..2, setting in 0usize..4) {
        let opts = LinguisticOptions { n: 3, k: 10, seed, pool_size: 400 };
        let task = LinguisticTask::ALL[task];
        let setting = Setting::ALL[setting];
        if let Ok(items) = generate_linguistic_dataset(task, setting, &opts) {
            for item in items {
                for text in std::iter::once(&item.gold[0]).chain(item.demonstrations.iter().map(|d| &d.output)) {
                    let again = render_chain_form(&parse_chain_form(text).unwrap());
                    prop_assert_eq!(&again, text);
                    prop_assert_eq!(text.matches('(').count(), text.matches(')').count());
                    prop_assert!(text.split(' ').all(|t| matches!(t, "(" | ")" | ",") || t.chars().all(|c| c.is_ascii_uppercase())));
                }
            }
        }
    }

    #[test]
    fn number_words_round_trip(n in 0u32..1_000_000) {
        prop_assert_eq!(words_to_number(&number_to_words(n).unwrap()), Some(n));
    }
}
