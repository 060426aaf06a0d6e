//! OWL functional-syntax export and the JSON report.

mod common;

use dsr::export::{emit_owl, emit_report, ExportError, ReportFinding, SubsumptionRecord};
use dsr::lint::{lint_model, LintConfig};
use dsr::parser::parse_model;
use dsr::reasoner::{propagate_fulfillment, VerdictMethod, VerdictStatus};
use dsr::Model;
use serde_json::Value;
use std::collections::BTreeSet;

/// Constructors of OWL 2 functional syntax that the exporter may use.
const CONSTRUCTORS: &[&str] = &[
    "Prefix",
    "Ontology",
    "Declaration",
    "Class",
    "ObjectProperty",
    "DataProperty",
    "NamedIndividual",
    "Datatype",
    "SubClassOf",
    "EquivalentClasses",
    "DisjointClasses",
    "SubObjectPropertyOf",
    "ObjectIntersectionOf",
    "ObjectUnionOf",
    "ObjectComplementOf",
    "ObjectOneOf",
    "ObjectSomeValuesFrom",
    "ObjectAllValuesFrom",
    "ObjectMinCardinality",
    "ObjectMaxCardinality",
    "ObjectExactCardinality",
    "ObjectInverseOf",
    "DataSomeValuesFrom",
    "DataAllValuesFrom",
    "DataMinCardinality",
    "DataMaxCardinality",
    "DataExactCardinality",
    "DataIntersectionOf",
    "DataUnionOf",
    "DataComplementOf",
    "DataOneOf",
    "DatatypeRestriction",
];

#[derive(Debug, PartialEq)]
enum Token {
    Open,
    Close,
    Word(String),
    Iri(String),
    Literal(String),
}

fn tokenize(text: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '(' => {
                out.push(Token::Open);
                i += 1;
            }
            ')' => {
                out.push(Token::Close);
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '<' => {
                let end = chars[i..].iter().position(|&c| c == '>').ok_or("unterminated IRI")? + i;
                out.push(Token::Iri(chars[i + 1..end].iter().collect()));
                i = end + 1;
            }
            '"' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j] != '"' {
                    j += if chars[j] == '\\' { 2 } else { 1 };
                }
                if j >= chars.len() {
                    return Err("unterminated literal".into());
                }
                j += 1;
                let mut literal: String = chars[i..j].iter().collect();
                if chars.get(j) == Some(&'^') && chars.get(j + 1) == Some(&'^') {
                    let k = chars[j + 2..].iter().position(|c| c.is_whitespace() || *c == ')').map_or(chars.len(), |p| p + j + 2);
                    let datatype: String = chars[j + 2..k].iter().collect();
                    if !["xsd:decimal", "owl:rational"].contains(&datatype.as_str()) {
                        return Err(format!("unexpected datatype {}", datatype));
                    }
                    literal.push_str(&format!("^^{}", datatype));
                    j = k;
                }
                out.push(Token::Literal(literal));
                i = j;
            }
            _ => {
                let end = chars[i..].iter().position(|c| c.is_whitespace() || "()<>\"".contains(*c)).map_or(chars.len(), |p| p + i);
                let word: String = chars[i..end].iter().collect();
                let ok = word.chars().all(|c| c.is_ascii_alphanumeric() || "_:%=-".contains(c));
                if !ok {
                    return Err(format!("bad word {}", word));
                }
                out.push(Token::Word(word));
                i = end;
            }
        }
    }
    Ok(out)
}

/// Checks the grammar shape: prefixes first, one ontology, balanced parentheses, every
/// parenthesis opened by a known constructor, and every local name declared.
fn check_owl(text: &str) -> Result<(), String> {
    let tokens = tokenize(text)?;
    let mut depth = 0i32;
    let mut seen_ontology = false;
    for (i, t) in tokens.iter().enumerate() {
        match t {
            Token::Open => {
                let Some(Token::Word(name)) = i.checked_sub(1).map(|p| &tokens[p]) else {
                    return Err(format!("parenthesis without constructor at token {}", i));
                };
                if !CONSTRUCTORS.contains(&name.as_str()) {
                    return Err(format!("unknown constructor {}", name));
                }
                if depth == 0 {
                    match name.as_str() {
                        "Prefix" if !seen_ontology => {}
                        "Ontology" if !seen_ontology => seen_ontology = true,
                        other => return Err(format!("unexpected top-level {}", other)),
                    }
                }
                depth += 1;
            }
            Token::Close => {
                depth -= 1;
                if depth < 0 {
                    return Err("unbalanced ')'".into());
                }
            }
            _ => {}
        }
    }
    if depth != 0 || !seen_ontology {
        return Err("unbalanced or missing ontology".into());
    }
    let mut declared = BTreeSet::new();
    for w in tokens.windows(4) {
        if let [Token::Word(kind), Token::Open, Token::Word(name), Token::Close] = w {
            if ["Class", "ObjectProperty", "DataProperty", "NamedIndividual", "Datatype"].contains(&kind.as_str()) {
                declared.insert(name.clone());
            }
        }
    }
    for t in &tokens {
        if let Token::Word(w) = t {
            if w.starts_with(':') && !w.ends_with('=') && !declared.contains(w) {
                return Err(format!("{} used without declaration", w));
            }
        }
    }
    Ok(())
}

fn model(text: &str) -> Model {
    parse_model(text).unwrap_or_else(|e| panic!("{:?}", e))
}

#[test]
fn checker_rejects_malformed_text() {
    assert!(check_owl("Ontology(<x>").is_err());
    assert!(check_owl("Ontology(<x> Foo(:a))").is_err());
    assert!(check_owl("Ontology(<x> SubClassOf(:a :b))").is_err());
    assert!(check_owl("Ontology(<x> Declaration(Class(:a)) Declaration(Class(:b)) SubClassOf(:a :b))").is_ok());
}

#[test]
fn fixtures_export_to_well_formed_owl() {
    for name in common::all_fixtures() {
        if name == "syntax_error.dsr" {
            continue;
        }
        let m = common::load(&name);
        match emit_owl(&m) {
            Ok(text) => check_owl(&text).unwrap_or_else(|e| panic!("{}: {}\n{}", name, e, text)),
            Err(ExportError::NestedUNotExportable(id)) => {
                let q = m.element(&id).unwrap().quality_statement().unwrap();
                assert!(q.annotations.len() >= 2, "{}", name);
            }
        }
    }
}

#[test]
fn generated_models_export_to_well_formed_owl() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    for i in 0..100 {
        let m = common::random_model(&mut rng, i);
        if let Ok(text) = emit_owl(&m) {
            check_owl(&text).unwrap_or_else(|e| panic!("{}\n{}", e, text));
        }
    }
}

#[test]
fn function_renders_as_equivalent_class() {
    let text = emit_owl(&model("func F1 := Activate <actor: Manager> <object: Debit_card>;")).unwrap();
    let expected = "EquivalentClasses(:F1 ObjectIntersectionOf(:Function :Activate \
        ObjectIntersectionOf(ObjectExactCardinality(1 :actor :Manager) ObjectAllValuesFrom(:actor :Manager)) \
        ObjectIntersectionOf(ObjectExactCardinality(1 :object :Debit_card) ObjectAllValuesFrom(:object :Debit_card))))";
    assert!(text.lines().any(|l| l == expected), "{}", text);
}

#[test]
fn empty_model_has_only_scaffolding() {
    let text = emit_owl(&Model::new("empty")).unwrap();
    check_owl(&text).unwrap();
    assert!(text.starts_with("Prefix(:=<http://example.org/dsr/empty#>)\n"));
    assert!(!text.contains("EquivalentClasses(:F"));
    let declared: Vec<&str> = text.lines().filter(|l| l.starts_with("Declaration(Class(")).collect();
    assert_eq!(declared, vec!["Declaration(Class(:ALL_Fulfilled_Thing))", "Declaration(Class(:Fulfilled_Thing))"]);
}

#[test]
fn refinement_edges_are_exported() {
    let m = model("goal G1 := \"a\";\ngoal G2 := \"b\";\nreduce G1 -> G2 [strengthen];\nfulfilled G2;");
    let text = emit_owl(&m).unwrap();
    assert!(text.contains("SubClassOf(:G1 ObjectSomeValuesFrom(:reduce_to :G2))"));
    assert!(text.contains("SubClassOf(:G2 :Fulfilled_Thing)"));
}

#[test]
fn nested_u_is_refused() {
    let m = model(
        "qg Q := Processing_time (Run <run_of: System_function>) :: Fast \
         with U(?F, <inheres_in: <run_of: ?F>>, 80%) with U(?Y, <inheres_in: ?Y>, 90%);",
    );
    assert_eq!(emit_owl(&m), Err(ExportError::NestedUNotExportable("Q".into())));
}

#[test]
fn export_is_deterministic() {
    let m = common::load("traffic.dsr");
    assert_eq!(emit_owl(&m).unwrap(), emit_owl(&m.clone()).unwrap());
}

#[test]
fn empty_report_is_exact() {
    assert_eq!(emit_report(&[], None, &[]), r#"{"version":1,"findings":[],"fulfillment":{},"subsumptions":[]}"#);
}

#[test]
fn report_round_trips_through_json() {
    let m = model("func F1 := Send <object: Meeting_notification>;\nda DA1 := Office :< Open;");
    let findings: Vec<ReportFinding> = lint_model(&m, &LintConfig::default()).iter().map(ReportFinding::from).collect();
    let state = propagate_fulfillment(&m, None);
    let records = vec![SubsumptionRecord {
        subsumee: "F1".into(),
        subsumer: "F1".into(),
        status: VerdictStatus::Proven,
        method: VerdictMethod::Structural,
    }];
    let text = emit_report(&findings, Some(&state), &records);
    let v: Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys.len(), 4);
    assert_eq!(v["version"], 1);
    assert_eq!(v["findings"].as_array().unwrap().len(), findings.len());
    assert_eq!(v["findings"][0]["element"], "F1");
    assert_eq!(v["findings"][0]["issue"], "Incomplete");
    assert_eq!(v["findings"][0]["suggestion"], "Reduce");
    assert_eq!(v["fulfillment"]["DA1"], "fulfilled");
    assert_eq!(v["fulfillment"]["F1"], "unknown");
    assert_eq!(v["subsumptions"][0]["status"], "proven");
    assert_eq!(v["subsumptions"][0]["method"], "structural");
    assert!(text.find("\"version\"").unwrap() < text.find("\"findings\"").unwrap());
    assert!(text.find("\"fulfillment\"").unwrap() < text.find("\"subsumptions\"").unwrap());
}
