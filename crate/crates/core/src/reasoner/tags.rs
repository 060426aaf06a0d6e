//! Validation of declared strength tags on operator applications.

use super::{default_bound, model_axioms, Reasoner, VerdictStatus};
use crate::model::{Body, Element, ElementKind, Model, OperatorApplication, OperatorArgs, OperatorKind, ScaleDirection, Strength};
use crate::semantics::{root_concept, translate_description, translate_element, DlAxiom, DlConcept};
use serde::Serialize;

/// A strength tag contradicted by the operator kind or by a refuted subsumption.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TagDiagnostic {
    /// Position of the application in the model.
    pub application: usize,
    #[serde(serialize_with = "op_name")]
    pub op: OperatorKind,
    #[serde(serialize_with = "strength_name")]
    pub declared: Strength,
    pub message: String,
}

fn op_name<S: serde::Serializer>(op: &OperatorKind, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(op.name())
}

fn strength_name<S: serde::Serializer>(st: &Strength, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(st.keyword())
}

/// Strengths an operator kind allows regardless of its operands, if restricted.
fn fixed_strengths(app: &OperatorApplication) -> Option<&'static [Strength]> {
    match (app.op, &app.args) {
        (OperatorKind::Observe, _) => Some(&[Strength::Strengthening]),
        (OperatorKind::DeUniversalize, _) => Some(&[Strength::Weakening]),
        (OperatorKind::Scale, OperatorArgs::Scale { direction: ScaleDirection::Up, .. }) => Some(&[Strength::Strengthening]),
        (OperatorKind::Scale, OperatorArgs::Scale { direction: ScaleDirection::Down, .. }) => Some(&[Strength::Weakening]),
        (OperatorKind::Focus, _) => Some(&[Strength::Weakening, Strength::Equating]),
        _ => None,
    }
}

/// The element's concept without the root name marking its kind.
fn element_concept(e: &Element) -> DlConcept {
    let (concept, _) = translate_element(e);
    match (root_concept(e), concept) {
        (Some(root), DlConcept::And(parts)) => {
            DlConcept::and(parts.into_iter().filter(|p| *p != DlConcept::atomic(root)).collect())
        }
        (_, c) => c,
    }
}

/// The state a function brings about: its object or target filler together with the
/// subsumer of the goal it operationalizes.
fn function_effect(f: &Element, goal_subsumer: &DlConcept) -> Option<DlConcept> {
    let Body::FunctionDesc { slots, .. } = &f.body else { return None };
    let filler = slots.iter().find(|s| s.slot == "object" || s.slot == "target")?;
    Some(DlConcept::and(vec![translate_description(&filler.filler), goal_subsumer.clone()]))
}

fn obligations(model: &Model, app: &OperatorApplication) -> Option<Vec<(DlConcept, DlConcept)>> {
    let input = model.element(app.inputs.first()?)?;
    if !input.is_structured() {
        return None;
    }
    let mut outputs = Vec::new();
    for id in &app.outputs {
        let e = model.element(id)?;
        if !e.is_structured() {
            return None;
        }
        if e.kind != ElementKind::DA {
            outputs.push(e);
        }
    }
    if outputs.is_empty() {
        return Some(Vec::new());
    }
    let cross_kind = outputs.iter().any(|o| o.kind != input.kind);
    if app.op == OperatorKind::Operationalize && cross_kind {
        return match (input.kind, &input.body) {
            (ElementKind::FG, Body::Subsumption { subsumee, subsumer }) if outputs.iter().all(|o| o.kind == ElementKind::F) => {
                let d = translate_description(subsumer);
                let effects: Option<Vec<DlConcept>> = outputs.iter().map(|f| function_effect(f, &d)).collect();
                let goal = DlConcept::and(vec![translate_description(subsumee), d.clone()]);
                match app.strength {
                    Strength::Strengthening => Some(vec![(DlConcept::and(effects?), goal)]),
                    Strength::Weakening => Some(effects?.into_iter().map(|e| (goal.clone(), e)).collect()),
                    Strength::Equating => {
                        let conj = DlConcept::and(effects?);
                        Some(vec![(conj.clone(), goal.clone()), (goal, conj)])
                    }
                }
            }
            (ElementKind::QG, _) if outputs.iter().all(|o| o.kind == ElementKind::QC) => {
                Some(direct(app, input, &outputs))
            }
            _ => None,
        };
    }
    Some(direct(app, input, &outputs))
}

fn direct(app: &OperatorApplication, input: &Element, outputs: &[&Element]) -> Vec<(DlConcept, DlConcept)> {
    let i = element_concept(input);
    let outs: Vec<DlConcept> = outputs.iter().map(|o| element_concept(o)).collect();
    let conj = DlConcept::and(outs.clone());
    match app.strength {
        Strength::Strengthening => vec![(conj, i)],
        Strength::Weakening => outs.into_iter().map(|o| (i.clone(), o)).collect(),
        Strength::Equating if app.op == OperatorKind::Focus => outs.into_iter().map(|o| (i.clone(), o)).collect(),
        Strength::Equating => vec![(conj.clone(), i.clone()), (i, conj)],
    }
}

/// Checks every application's declared strength.
///
/// Operators with a fixed strength must carry it. For the rest, the subsumptions the tag
/// asserts between input and outputs are decided under the domain axioms and assumptions,
/// and a refuted one is reported. Resolve applications and applications involving
/// natural-language elements are not checked. At most one diagnostic is produced per application.
pub fn check_strength_tags(model: &Model, bound: Option<usize>) -> Vec<TagDiagnostic> {
    let axioms: Vec<DlAxiom> = model_axioms(model, false).into_iter().map(|a| a.axiom).collect();
    let reasoner = Reasoner::new(&axioms, bound.unwrap_or_else(default_bound));
    let mut out = Vec::new();
    for (idx, app) in model.applications.iter().enumerate() {
        if app.op == OperatorKind::Resolve {
            continue;
        }
        let diag = |message: String| TagDiagnostic { application: idx, op: app.op, declared: app.strength, message };
        if let Some(allowed) = fixed_strengths(app) {
            if !allowed.contains(&app.strength) {
                let names: Vec<&str> = allowed.iter().map(|s| s.keyword()).collect();
                out.push(diag(format!(
                    "{} declared '{}' but this operator only admits '{}'",
                    app.op,
                    app.strength.keyword(),
                    names.join("' or '")
                )));
                continue;
            }
        }
        let Some(obls) = obligations(model, app) else { continue };
        for (sub, sup) in obls {
            if reasoner.subsumes(&sub, &sup).status == VerdictStatus::Refuted {
                out.push(diag(format!(
                    "{} declared '{}' but {} ⊑ {} has a counter-model",
                    app.op,
                    app.strength.keyword(),
                    sub,
                    sup
                )));
                break;
            }
        }
    }
    out
}
