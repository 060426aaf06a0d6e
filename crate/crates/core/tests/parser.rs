//! Parser and printer: round trips, worked parse examples and diagnostics.

mod common;

use dsr::parser::{parse_description, parse_model, parse_model_in, print_description, print_model};
use dsr::{rat, Body, CardinalityModifier, Description, ElementKind, Model, RegionExpr, SlotD};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_models_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = common::random_model(&mut rng, 0);
        let printed = print_model(&model);
        let parsed = parse_model(&printed).map_err(|d| TestCaseError::fail(format!("{:?}\n{}", d, printed)))?;
        prop_assert!(parsed == model, "{:?}\n{}", common::model_difference(&model, &parsed), printed);
        prop_assert_eq!(print_model(&parsed), printed);
    }

    #[test]
    fn generated_descriptions_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = common::model_description(&mut rng, 3);
        let printed = print_description(&d);
        let parsed = parse_description(&printed).map_err(|e| TestCaseError::fail(format!("{:?}\n{}", e, printed)))?;
        prop_assert_eq!(parsed, d);
    }
}

#[test]
fn fixtures_round_trip() {
    for name in common::all_fixtures() {
        if name == "syntax_error.dsr" {
            continue;
        }
        let model = common::load(&name);
        let printed = print_model(&model);
        let again = parse_model(&printed).unwrap_or_else(|d| panic!("{}: {:?}\n{}", name, d, printed));
        assert_eq!(again, model, "{}", name);
        assert_eq!(print_model(&again), printed, "{}", name);
    }
}

#[test]
fn quality_constraint_with_unit() {
    let m = parse_model("qc QC_1 := Processing_time (File_search) :: [0, 30 (Sec.)];").unwrap();
    let e = m.element("QC_1").unwrap();
    assert_eq!(e.kind, ElementKind::QC);
    let q = e.quality_statement().unwrap();
    assert_eq!(q.quality, Description::atomic("Processing_time"));
    assert_eq!(q.subject, Description::atomic("File_search"));
    assert_eq!(q.region, RegionExpr::interval(rat(0), rat(30), Some("Sec")));
}

#[test]
fn function_with_two_slots() {
    let m = parse_model("func F1 := Activate <actor: Manager> <object: Debit_card>;").unwrap();
    assert_eq!(
        m.element("F1").unwrap().body,
        Body::FunctionDesc {
            head: "Activate".to_string(),
            slots: vec![
                SlotD::new("actor", Description::atomic("Manager")),
                SlotD::new("object", Description::atomic("Debit_card")),
            ],
        }
    );
}

#[test]
fn missing_parenthesis_is_reported_with_span() {
    let text = common::fixture("syntax_error.dsr");
    let diags = parse_model_in(&text, Some(&common::fixture_path("syntax_error.dsr"))).unwrap_err();
    assert_eq!(diags.len(), 1);
    let d = &diags[0];
    assert!(d.message.contains("expected ')'"), "{}", d.message);
    assert_eq!((d.span.line, d.span.column), (1, 35));
    assert_eq!(&text[d.span.offset..d.span.offset + 2], "::");
    assert!(d.span.file.as_ref().unwrap().ends_with("syntax_error.dsr"));
}

#[test]
fn description_examples() {
    assert_eq!(
        parse_description("<register_for: >=3 Class>").unwrap(),
        Description::slot("register_for", CardinalityModifier::AtLeast(3), Description::atomic("Class"))
    );
    assert_eq!(
        parse_description("Student <gender: Male> <age: [20, 20]>").unwrap(),
        Description::and(
            Description::and(
                Description::atomic("Student"),
                Description::slot("gender", CardinalityModifier::ExactlyOne, Description::atomic("Male"))
            ),
            Description::slot(
                "age",
                CardinalityModifier::ExactlyOne,
                Description::Region(RegionExpr::interval(rat(20), rat(20), None))
            )
        )
    );
    assert_eq!(parse_description("Thing").unwrap(), Description::Thing);
}

#[test]
fn precedence_of_adjacency_union_and_difference() {
    let d = parse_description("A B or C - D").unwrap();
    let expected = Description::minus(
        Description::or(Description::and(Description::atomic("A"), Description::atomic("B")), Description::atomic("C")),
        Description::atomic("D"),
    );
    assert_eq!(d, expected);
}

#[test]
fn nested_fillers_print_verbatim() {
    let m = parse_model("func F1 := Store <object: Data <associated_with: Student>>;").unwrap();
    assert_eq!(print_model(&m), "func F1 := Store <object: Data <associated_with: Student>>;\n");
}

#[test]
fn empty_model_prints_nothing_but_header() {
    assert_eq!(print_model(&Model::new("empty")), "model empty;\n");
    assert_eq!(parse_model("model empty;").unwrap(), Model::new("empty"));
}

#[test]
fn semantic_errors_carry_spans() {
    let dangling = parse_model("goal G1 := \"a\";\nreduce G1 -> G9 [equate];").unwrap_err();
    assert!(dangling.iter().any(|d| d.message.contains("G9")), "{:?}", dangling);
    let duplicate = parse_model("goal G1 := \"a\";\ngoal G1 := \"b\";").unwrap_err();
    assert!(duplicate[0].span.line >= 1);
    let mismatch = parse_model("func F1 := A :< B;").unwrap_err();
    assert!(!mismatch.is_empty());
    for diags in [dangling, duplicate, mismatch] {
        for d in diags {
            assert!(d.span.line >= 1 && d.span.column >= 1);
        }
    }
}

#[test]
fn unknown_characters_are_rejected() {
    let diags = parse_model("goal G1 := \"ok\"; $").unwrap_err();
    assert_eq!(diags[0].span.line, 1);
}

#[test]
fn percentages_and_decimals() {
    let m = parse_model("qg Q := Speed ({s}) :: Fast with U(?X, <inheres_in: ?X>, 80.5%);").unwrap();
    let q = m.element("Q").unwrap().quality_statement().unwrap();
    assert_eq!(q.annotations[0].pct_low, dsr::ratio(161, 200));
}
