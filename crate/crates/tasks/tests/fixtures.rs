//! Printed task examples reproduced through the oracles and renderers.

use compose_tasks::instance::{render_prompt, Demonstration, PromptInstance, Setting};
use compose_tasks::linguistic::cogs::convert_cogs;
use compose_tasks::linguistic::compose::{compose_t1, compose_t2, fixtures};
use compose_tasks::linguistic::{render_chain_form, Np, SentencePair};
use compose_tasks::logical::{apply_composite_rule, apply_simple_rule, SimpleRule, TaskPair};

fn demo(input: &str, output: &str) -> Demonstration {
    Demonstration::new(input, output)
}

fn instance(demos: Vec<Demonstration>, test: &str) -> PromptInstance {
    PromptInstance {
        id: "fixture".into(),
        task_pair: "A+B".into(),
        mode: "by-steps".into(),
        setting: Setting::Composite,
        instruction: String::new(),
        demonstrations: demos,
        test_input: test.into(),
        gold: vec![],
        seed: 0,
    }
}

#[test]
fn simple_rules_table() {
    use SimpleRule::*;
    let rows = [
        (A, "apple", "APPLE"),
        (B, "bell ford", "ford bell"),
        (C, "twenty @ eleven", "thirty-one"),
        (D, "pay", "paid"),
        (E, "Above", "Below"),
        (F, "435", "436"),
        (G, "15 @ 6", "3"),
        (H, "12 # 5", "18"),
    ];
    for (rule, input, output) in rows {
        assert_eq!(apply_simple_rule(rule, input).unwrap(), output, "{rule:?}");
    }
}

#[test]
fn composite_tables() {
    use SimpleRule::*;
    // per-pair simple demonstrations
    assert_eq!(apply_simple_rule(A, "* apple").unwrap(), "APPLE");
    assert_eq!(apply_simple_rule(B, "( farm frog )").unwrap(), "frog farm");
    assert_eq!(apply_simple_rule(A, "* ( five )").unwrap(), "FIVE");
    assert_eq!(apply_simple_rule(A, "cow").unwrap(), "COW");
    // composites
    let cases: [(TaskPair, &str, &[&str]); 6] = [
        (TaskPair::AB, "( * bell * ford )", &["FORD BELL"]),
        (TaskPair::AB, "( * good * zebra )", &["ZEBRA GOOD"]),
        (TaskPair::AB, "( * bicycle * add )", &["ADD BICYCLE"]),
        (
            TaskPair::AC,
            "* ( thirty-seven @ sixteen )",
            &["FIFTY-THREE"],
        ),
        (TaskPair::AF, "684 cat", &["685 CAT"]),
        (TaskPair::GH, "8 # 9 @ 7", &["4", "11"]),
    ];
    for (pair, input, gold) in cases {
        assert_eq!(
            apply_composite_rule(pair, input).unwrap(),
            gold,
            "{pair} {input}"
        );
    }
}

#[test]
fn composite_prompt_layouts() {
    let composite = instance(
        vec![demo("* apple", "APPLE"), demo("( farm frog )", "frog farm")],
        "( * bell * ford )",
    );
    assert_eq!(
        render_prompt(&composite),
        "input: * apple\noutput: APPLE\ninput: ( farm frog )\noutput: frog farm\ninput: ( * bell * ford )\noutput:"
    );
    let in_context = instance(
        vec![demo("( * good * zebra )", "ZEBRA GOOD")],
        "( * bicycle * add )",
    );
    assert_eq!(
        render_prompt(&in_context),
        "input: ( * good * zebra )\noutput: ZEBRA GOOD\ninput: ( * bicycle * add )\noutput:"
    );
}

#[test]
fn original_grammar_conversions() {
    let cases = [
        (
            "rose ( x_1 ) AND help . theme ( x_3 , x_1 ) AND help . agent ( x_3 , x_6 ) AND dog ( x_6 )",
            "HELP ( DOG , ROSE , NONE )",
        ),
        ("* captain ( x_1 ) ; eat . agent ( x_2 , x_1 )", "EAT ( CAPTAIN , NONE , NONE )"),
        (
            "* dog ( x_4 ) ; hope . agent ( x_1 , Liam ) AND hope . ccomp ( x_1 , x_5 ) AND prefer . agent ( x_5 , x_4 )",
            "HOPE ( LIAM , NONE , NONE ) CCOMP PREFER ( DOG , NONE , NONE )",
        ),
    ];
    for (original, chain) in cases {
        assert_eq!(render_chain_form(&convert_cogs(original).unwrap()), chain);
    }
}

fn pair(s: &compose_tasks::linguistic::Sentence) -> SentencePair {
    SentencePair::from_sentence(s).unwrap()
}

#[test]
fn passive_and_object_examples() {
    let p = pair(&fixtures::passive_demo());
    assert_eq!(p.source, "The book was squeezed .");
    assert_eq!(p.target, "SQUEEZE ( NONE , BOOK , NONE )");

    let p = pair(&fixtures::active_test());
    assert_eq!(p.source, "Sophia squeezed the donut .");
    assert_eq!(p.target, "SQUEEZE ( SOPHIA , DONUT , NONE )");

    let p = pair(&fixtures::object_demo());
    assert_eq!(p.source, "Henry liked a cockroach in a box .");
    assert_eq!(p.target, "LIKE ( HENRY , IN ( COCKROACH , BOX ) , NONE )");

    let p = pair(&fixtures::subject_test());
    assert_eq!(p.source, "A cockroach inflated a boy .");
    assert_eq!(p.target, "INFLATE ( COCKROACH , BOY , NONE )");

    let p = compose_t2(
        &fixtures::passive_demo(),
        &fixtures::object_demo(),
        Np::the("hedgehog"),
    )
    .unwrap();
    assert_eq!(p.source, "A cockroach squeezed the hedgehog .");
    assert_eq!(p.target, "SQUEEZE ( COCKROACH , HEDGEHOG , NONE )");
}

const CHAIN_TAIL_SRC: &str = "valued that Samuel admired that a monkey liked that Luna liked that Oliver respected that Savannah hoped that a penguin noticed that Emma noticed that the lawyer noticed that a cake grew .";
const CHAIN_TAIL_TGT: &str = "CCOMP ADMIRE ( SAMUEL , NONE , NONE ) CCOMP LIKE ( MONKEY , NONE , NONE ) CCOMP LIKE ( LUNA , NONE , NONE ) CCOMP RESPECT ( OLIVER , NONE , NONE ) CCOMP HOPE ( SAVANNAH , NONE , NONE ) CCOMP NOTICE ( PENGUIN , NONE , NONE ) CCOMP NOTICE ( EMMA , NONE , NONE ) CCOMP NOTICE ( LAWYER , NONE , NONE ) CCOMP GROW ( NONE , CAKE , NONE )";

#[test]
fn phrase_and_chain_examples() {
    let p = pair(&fixtures::phrase_test());
    assert_eq!(p.source, "The baby on a tray in the house screamed .");
    assert_eq!(
        p.target,
        "SCREAM ( ON ( BABY , IN ( TRAY , HOUSE ) ) , NONE , NONE )"
    );

    let p = pair(&fixtures::long_chain());
    assert_eq!(p.source, format!("A girl {CHAIN_TAIL_SRC}"));
    assert_eq!(
        p.target,
        format!("VALUE ( GIRL , NONE , NONE ) {CHAIN_TAIL_TGT}")
    );

    let p = compose_t1(&fixtures::baby_phrase(), &fixtures::long_chain()).unwrap();
    assert_eq!(
        p.source,
        format!("The baby on a tray in the house {CHAIN_TAIL_SRC}")
    );
    assert_eq!(
        p.target,
        format!("VALUE ( ON ( BABY , IN ( TRAY , HOUSE ) ) , NONE , NONE ) {CHAIN_TAIL_TGT}")
    );
}

#[test]
fn t1_changes_only_the_first_agent() {
    let plain = pair(&fixtures::long_chain()).target;
    let composed = compose_t1(&fixtures::baby_phrase(), &fixtures::long_chain())
        .unwrap()
        .target;
    let (p_head, p_rest) = plain.split_once(" , ").unwrap();
    let (c_head, c_rest) = composed.split_once(" ) , ").unwrap();
    assert_eq!(p_head, "VALUE ( GIRL");
    assert_eq!(c_head, "VALUE ( ON ( BABY , IN ( TRAY , HOUSE )");
    assert_eq!(p_rest, c_rest);
}
