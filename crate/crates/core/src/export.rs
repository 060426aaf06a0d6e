//! OWL 2 functional-syntax export of a translated model, and the JSON report format shared by
//! the command-line front end.

use crate::lint::LintFinding;
use crate::model::{Body, Model, OperatorKind, RegionExpr};
use crate::reasoner::{Fulfillment, FulfillmentState, VerdictMethod, VerdictStatus};
use crate::semantics::{translate_axiom, translate_element, CardKind, DlAxiom, DlConcept};
use crate::value::{format_rational, Rational, Value};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExportError {
    #[error("element {0} carries nested U annotations, which OWL export does not support")]
    NestedUNotExportable(String),
}

const BASE: &str = "http://example.org/dsr/";

/// Object properties linking a refined element to its refinements, with their parent.
const EDGE_PROPERTIES: [(&str, &str); 9] = [
    ("relate_to_one", "relate_to"),
    ("relate_to_many", "relate_to"),
    ("interpret_to", "relate_to_one"),
    ("scale_to", "relate_to_one"),
    ("deuniversalize_to", "relate_to_one"),
    ("observe_to", "relate_to_one"),
    ("reduce_to", "relate_to_many"),
    ("focus_to", "relate_to_many"),
    ("operationalize_to", "relate_to_many"),
];

fn edge_property(op: OperatorKind) -> Option<&'static str> {
    Some(match op {
        OperatorKind::Interpret => "interpret_to",
        OperatorKind::Scale => "scale_to",
        OperatorKind::DeUniversalize => "deuniversalize_to",
        OperatorKind::Observe => "observe_to",
        OperatorKind::Reduce => "reduce_to",
        OperatorKind::Focus => "focus_to",
        OperatorKind::Operationalize => "operationalize_to",
        OperatorKind::Resolve => return None,
    })
}

fn iri(name: &str) -> String {
    let mut out = String::from(":");
    for c in name.chars() {
        match c {
            'A'..='Z' | 'a'..='z' | '0'..='9' | '_' => out.push(c),
            other => {
                let mut buf = [0u8; 4];
                for b in other.encode_utf8(&mut buf).bytes() {
                    out.push_str(&format!("%{:02X}", b));
                }
            }
        }
    }
    out
}

fn number_literal(r: &Rational) -> String {
    let text = format_rational(r);
    if text.contains('/') {
        format!("\"{}\"^^owl:rational", text)
    } else {
        format!("\"{}\"^^xsd:decimal", text)
    }
}

fn value_literal(v: &Value) -> String {
    match v {
        Value::Num(n) => number_literal(n),
        Value::Str(s) => format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")),
    }
}

#[derive(Default)]
struct Vocabulary {
    classes: BTreeSet<String>,
    object_properties: BTreeSet<String>,
    data_properties: BTreeSet<String>,
    individuals: BTreeSet<String>,
    datatypes: BTreeSet<String>,
}

impl Vocabulary {
    fn collect(&mut self, c: &DlConcept) {
        c.walk(&mut |sub| match sub {
            DlConcept::Atomic(n) => {
                self.classes.insert(n.clone());
            }
            DlConcept::Nominal(ids) => self.individuals.extend(ids.iter().cloned()),
            DlConcept::Some(s, f) | DlConcept::Only(s, f) | DlConcept::One(s, f) => self.slot(s, f),
            DlConcept::Cardinality { slot, filler, .. } => self.slot(slot, filler),
            DlConcept::ExistsInverse(s, _) => {
                self.object_properties.insert(s.clone());
            }
            DlConcept::DataRange(RegionExpr::NamedRegion { name, .. }) => {
                self.datatypes.insert(name.clone());
            }
            _ => {}
        });
    }

    fn slot(&mut self, s: &str, filler: &DlConcept) {
        if filler.is_data() {
            self.data_properties.insert(s.to_string());
        } else {
            self.object_properties.insert(s.to_string());
        }
    }
}

fn data_range(c: &DlConcept) -> String {
    match c {
        DlConcept::DataRange(RegionExpr::Interval { low, high, .. }) => format!(
            "DatatypeRestriction(owl:real xsd:minInclusive {} xsd:maxInclusive {})",
            number_literal(low),
            number_literal(high)
        ),
        DlConcept::DataRange(RegionExpr::ValueSet(values)) => {
            let parts: Vec<String> = values.iter().map(value_literal).collect();
            format!("DataOneOf({})", parts.join(" "))
        }
        DlConcept::DataRange(RegionExpr::NamedRegion { name, .. }) => iri(name),
        DlConcept::And(parts) => format!("DataIntersectionOf({})", parts.iter().map(data_range).collect::<Vec<_>>().join(" ")),
        DlConcept::Or(parts) => format!("DataUnionOf({})", parts.iter().map(data_range).collect::<Vec<_>>().join(" ")),
        DlConcept::Not(inner) => format!("DataComplementOf({})", data_range(inner)),
        _ => "rdfs:Literal".to_string(),
    }
}

fn class_expr(c: &DlConcept) -> String {
    let restriction = |kind: &str, s: &str, f: &DlConcept| {
        if f.is_data() {
            format!("Data{}({} {})", kind, iri(s), data_range(f))
        } else {
            format!("Object{}({} {})", kind, iri(s), class_expr(f))
        }
    };
    let cardinality = |kind: &str, n: u32, s: &str, f: &DlConcept| {
        if f.is_data() {
            format!("Data{}Cardinality({} {} {})", kind, n, iri(s), data_range(f))
        } else {
            format!("Object{}Cardinality({} {} {})", kind, n, iri(s), class_expr(f))
        }
    };
    match c {
        DlConcept::Thing => "owl:Thing".to_string(),
        DlConcept::Nothing => "owl:Nothing".to_string(),
        DlConcept::Atomic(n) => iri(n),
        DlConcept::Nominal(ids) => format!("ObjectOneOf({})", ids.iter().map(|i| iri(i)).collect::<Vec<_>>().join(" ")),
        DlConcept::And(parts) if parts.is_empty() => "owl:Thing".to_string(),
        DlConcept::And(parts) if parts.len() == 1 => class_expr(&parts[0]),
        DlConcept::And(parts) => {
            format!("ObjectIntersectionOf({})", parts.iter().map(class_expr).collect::<Vec<_>>().join(" "))
        }
        DlConcept::Or(parts) if parts.is_empty() => "owl:Nothing".to_string(),
        DlConcept::Or(parts) if parts.len() == 1 => class_expr(&parts[0]),
        DlConcept::Or(parts) => format!("ObjectUnionOf({})", parts.iter().map(class_expr).collect::<Vec<_>>().join(" ")),
        DlConcept::Not(inner) => format!("ObjectComplementOf({})", class_expr(inner)),
        DlConcept::Some(s, f) => restriction("SomeValuesFrom", s, f),
        DlConcept::Only(s, f) => restriction("AllValuesFrom", s, f),
        DlConcept::One(s, f) => {
            format!("ObjectIntersectionOf({} {})", cardinality("Exact", 1, s, f), restriction("AllValuesFrom", s, f))
        }
        DlConcept::Cardinality { slot, kind, n, filler } => {
            let k = match kind {
                CardKind::Min => "Min",
                CardKind::Max => "Max",
                CardKind::Exact => "Exact",
            };
            cardinality(k, *n, slot, filler)
        }
        DlConcept::ExistsInverse(s, f) => format!("ObjectSomeValuesFrom(ObjectInverseOf({}) {})", iri(s), class_expr(f)),
        DlConcept::DataRange(_) => "owl:Nothing".to_string(),
    }
}

fn axiom_text(a: &DlAxiom) -> String {
    match a {
        DlAxiom::SubClassOf(l, r) => format!("SubClassOf({} {})", class_expr(l), class_expr(r)),
        DlAxiom::Disjoint(l, r) => format!("DisjointClasses({} {})", class_expr(l), class_expr(r)),
    }
}

/// Renders the model as an OWL 2 functional-syntax ontology.
///
/// Every element becomes a class equivalent to its translation; subsumption bodies and domain
/// axioms become class axioms; operator applications become existential edges along
/// properties under the `relate_to` hierarchy; fulfilled marks and domain assumptions are
/// placed under `Fulfilled_Thing`. Output is deterministic.
pub fn emit_owl(model: &Model) -> Result<String, ExportError> {
    for e in model.elements.values() {
        if e.quality_statement().is_some_and(|q| q.annotations.len() >= 2) {
            return Err(ExportError::NestedUNotExportable(e.id.clone()));
        }
    }
    let name = if model.name.is_empty() { "model" } else { &model.name };
    let mut vocab = Vocabulary::default();
    vocab.classes.insert("Fulfilled_Thing".to_string());
    vocab.classes.insert("ALL_Fulfilled_Thing".to_string());
    let mut body: Vec<String> = Vec::new();

    for e in model.elements.values() {
        vocab.classes.insert(e.id.clone());
        let (concept, axioms) = translate_element(e);
        if !matches!(e.body, Body::NaturalLanguage(_)) {
            vocab.collect(&concept);
            body.push(format!("EquivalentClasses({} {})", iri(&e.id), class_expr(&concept)));
        }
        for a in &axioms {
            let (l, r) = a.as_subclass();
            vocab.collect(&l);
            vocab.collect(&r);
            body.push(axiom_text(a));
        }
    }
    for a in &model.axioms {
        let dl = translate_axiom(a);
        let (l, r) = dl.as_subclass();
        vocab.collect(&l);
        vocab.collect(&r);
        body.push(axiom_text(&dl));
    }
    for app in &model.applications {
        let Some(prop) = edge_property(app.op) else { continue };
        for input in &app.inputs {
            for output in &app.outputs {
                body.push(format!("SubClassOf({} ObjectSomeValuesFrom({} {}))", iri(input), iri(prop), iri(output)));
            }
        }
    }
    let dropped = model.dropped_elements();
    for e in model.elements.values() {
        let assumed = e.kind == crate::model::ElementKind::DA && !dropped.contains(&e.id);
        if assumed || model.fulfilled_marks.contains(&e.id) {
            body.push(format!("SubClassOf({} :Fulfilled_Thing)", iri(&e.id)));
        }
    }
    for (p, _) in EDGE_PROPERTIES {
        vocab.object_properties.insert(p.to_string());
    }
    vocab.object_properties.insert("relate_to".to_string());

    let mut out = String::new();
    out.push_str(&format!("Prefix(:=<{}{}#>)\n", BASE, iri(name).trim_start_matches(':')));
    out.push_str("Prefix(owl:=<http://www.w3.org/2002/07/owl#>)\n");
    out.push_str("Prefix(rdf:=<http://www.w3.org/1999/02/22-rdf-syntax-ns#>)\n");
    out.push_str("Prefix(rdfs:=<http://www.w3.org/2000/01/rdf-schema#>)\n");
    out.push_str("Prefix(xsd:=<http://www.w3.org/2001/XMLSchema#>)\n");
    out.push_str(&format!("Ontology(<{}{}>\n", BASE, iri(name).trim_start_matches(':')));
    let declare = |out: &mut String, kind: &str, names: &BTreeSet<String>| {
        for n in names {
            out.push_str(&format!("Declaration({}({}))\n", kind, iri(n)));
        }
    };
    declare(&mut out, "Class", &vocab.classes);
    declare(&mut out, "ObjectProperty", &vocab.object_properties);
    declare(&mut out, "DataProperty", &vocab.data_properties);
    declare(&mut out, "NamedIndividual", &vocab.individuals);
    declare(&mut out, "Datatype", &vocab.datatypes);
    for (p, parent) in EDGE_PROPERTIES {
        out.push_str(&format!("SubObjectPropertyOf({} {})\n", iri(p), iri(parent)));
    }
    out.push_str("SubClassOf(ObjectSomeValuesFrom(:relate_to_one :Fulfilled_Thing) :Fulfilled_Thing)\n");
    out.push_str(
        "EquivalentClasses(:ALL_Fulfilled_Thing ObjectIntersectionOf(ObjectSomeValuesFrom(:relate_to_many owl:Thing) ObjectAllValuesFrom(:relate_to_many :Fulfilled_Thing)))\n",
    );
    out.push_str("SubClassOf(:ALL_Fulfilled_Thing :Fulfilled_Thing)\n");
    for line in body {
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str(")\n");
    Ok(out)
}

/// A finding in a report: lint findings, validation problems, strength-tag diagnostics or
/// consistency results.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportFinding {
    pub element: String,
    pub issue: String,
    pub detail: String,
    pub suggestion: Option<String>,
    pub span: Option<String>,
}

impl From<&LintFinding> for ReportFinding {
    fn from(f: &LintFinding) -> Self {
        ReportFinding {
            element: f.element.clone(),
            issue: format!("{:?}", f.issue),
            detail: f.detail.clone(),
            suggestion: f.suggested_operator.map(|o| o.name().to_string()),
            span: f.span.clone(),
        }
    }
}

/// One decided subsumption in a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsumptionRecord {
    pub subsumee: String,
    pub subsumer: String,
    pub status: VerdictStatus,
    pub method: VerdictMethod,
}

/// Serializes a versioned JSON report with keys `version`, `findings`, `fulfillment` and
/// `subsumptions`, in that order.
pub fn emit_report(findings: &[ReportFinding], fulfillment: Option<&FulfillmentState>, verdicts: &[SubsumptionRecord]) -> String {
    emit_report_extended(findings, fulfillment, verdicts, &[])
}

/// As [`emit_report`], followed by command-specific entries such as query matches or
/// membership degrees.
pub fn emit_report_extended(
    findings: &[ReportFinding],
    fulfillment: Option<&FulfillmentState>,
    verdicts: &[SubsumptionRecord],
    extra: &[(&str, serde_json::Value)],
) -> String {
    use serde::ser::{SerializeMap, Serializer};
    let fulfillment: BTreeMap<&str, Fulfillment> =
        fulfillment.map(|f| f.states.iter().map(|(k, v)| (k.as_str(), *v)).collect()).unwrap_or_default();
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::new(&mut buf);
    let mut map = ser.serialize_map(Some(4 + extra.len())).expect("report serialization");
    map.serialize_entry("version", &1).expect("report serialization");
    map.serialize_entry("findings", findings).expect("report serialization");
    map.serialize_entry("fulfillment", &fulfillment).expect("report serialization");
    map.serialize_entry("subsumptions", verdicts).expect("report serialization");
    for (k, v) in extra {
        map.serialize_entry(k, v).expect("report serialization");
    }
    map.end().expect("report serialization");
    String::from_utf8(buf).expect("utf-8 json")
}
