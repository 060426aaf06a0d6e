//! The eight refinement operators. Each takes a model and returns a new model with the
//! produced elements added and the application recorded.

use crate::model::{
    output_kind_problem, Body, Description, Element, ElementKind, FocusTarget, Model, OperatorApplication,
    OperatorArgs, OperatorKind, RegionExpr, ScaleDirection, ScaleFactor, Strength, UAnnotation,
};
use crate::reasoner::{model_axioms, Prover};
use crate::semantics::{expand_u, DlAxiom};
use crate::value::Rational;
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperatorError {
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("element id {0} is already used")]
    DuplicateId(String),
    #[error("{op} needs at least one output")]
    EmptyOutputs { op: OperatorKind },
    #[error("{0}")]
    KindMismatch(String),
    #[error("{op} does not admit the '{}' tag", strength.keyword())]
    StrengthNotAllowed { op: OperatorKind, strength: Strength },
    #[error("{op} applies to quality goals and constraints, not to {id}")]
    NotQuality { op: OperatorKind, id: String },
    #[error("Focus needs at least one target")]
    EmptyTargets,
    #[error("scaling factor ({low}, {high}) does not scale {direction}")]
    FactorDirection { low: String, high: String, direction: &'static str },
    #[error("quantitative scaling needs an interval region")]
    NeedsInterval,
    #[error("qualitative scaling needs a named region")]
    NeedsNamedRegion,
    #[error("no declared ordering relates {from} and {to}")]
    MissingOrdering { from: String, to: String },
    #[error("pct must lie in (0, 1], got {0}")]
    PctOutOfRange(String),
    #[error("path {0:?} does not match the subject structure")]
    PathMismatch(Vec<String>),
    #[error("path {0:?} is already de-universalized")]
    RepeatedDeUniversalize(Vec<String>),
    #[error("Resolve inputs {0:?} are not a declared conflict")]
    NotAConflict(Vec<String>),
}

type OpResult = Result<Model, OperatorError>;

fn input<'a>(model: &'a Model, id: &str) -> Result<&'a Element, OperatorError> {
    model.element(id).ok_or_else(|| OperatorError::UnknownElement(id.to_string()))
}

fn add_new(model: &mut Model, element: Element) -> Result<(), OperatorError> {
    if model.elements.contains_key(&element.id) {
        return Err(OperatorError::DuplicateId(element.id));
    }
    model.add_element(element);
    Ok(())
}

fn check_kinds(op: OperatorKind, input: &Element, outputs: &[Element]) -> Result<(), OperatorError> {
    for o in outputs {
        if let Some(problem) = output_kind_problem(op, input.kind, o.kind) {
            return Err(OperatorError::KindMismatch(problem));
        }
    }
    Ok(())
}

fn record(
    model: &Model,
    op: OperatorKind,
    input_id: &str,
    outputs: Vec<Element>,
    strength: Strength,
    args: OperatorArgs,
) -> OpResult {
    let mut next = model.clone();
    let ids: Vec<String> = outputs.iter().map(|e| e.id.clone()).collect();
    for e in outputs {
        add_new(&mut next, e)?;
    }
    next.applications.push(OperatorApplication { op, inputs: vec![input_id.to_string()], outputs: ids, strength, args });
    Ok(next)
}

/// Refines an element into same-kind parts, optionally with domain assumptions.
pub fn apply_reduce(model: &Model, input_id: &str, outputs: Vec<Element>, strength: Strength) -> OpResult {
    let i = input(model, input_id)?;
    if outputs.is_empty() {
        return Err(OperatorError::EmptyOutputs { op: OperatorKind::Reduce });
    }
    check_kinds(OperatorKind::Reduce, i, &outputs)?;
    record(model, OperatorKind::Reduce, input_id, outputs, strength, OperatorArgs::None)
}

/// Disambiguates or encodes an element; a Goal may be interpreted into any kind.
pub fn apply_interpret(model: &Model, input_id: &str, output: Element, strength: Strength) -> OpResult {
    let i = input(model, input_id)?;
    if strength == Strength::Weakening {
        return Err(OperatorError::StrengthNotAllowed { op: OperatorKind::Interpret, strength });
    }
    let outputs = vec![output];
    check_kinds(OperatorKind::Interpret, i, &outputs)?;
    record(model, OperatorKind::Interpret, input_id, outputs, strength, OperatorArgs::None)
}

/// Turns a goal into functions, constraints and assumptions. An output set made only of
/// domain assumptions is always recorded as a weakening.
pub fn apply_operationalize(model: &Model, input_id: &str, outputs: Vec<Element>, strength: Strength) -> OpResult {
    let i = input(model, input_id)?;
    if outputs.is_empty() {
        return Err(OperatorError::EmptyOutputs { op: OperatorKind::Operationalize });
    }
    check_kinds(OperatorKind::Operationalize, i, &outputs)?;
    let strength = if outputs.iter().all(|o| o.kind == ElementKind::DA) { Strength::Weakening } else { strength };
    record(model, OperatorKind::Operationalize, input_id, outputs, strength, OperatorArgs::None)
}

fn quality_input<'a>(model: &'a Model, id: &str, op: OperatorKind) -> Result<&'a Element, OperatorError> {
    let e = input(model, id)?;
    if !e.kind.is_quality() || e.quality_statement().is_none() {
        return Err(OperatorError::NotQuality { op, id: id.to_string() });
    }
    Ok(e)
}

fn with_statement(e: &Element, id: &str, kind: ElementKind, edit: impl FnOnce(&mut crate::model::QualityStatement)) -> Element {
    let mut out = e.clone();
    out.id = id.to_string();
    out.kind = kind;
    if let Body::Quality(q) = &mut out.body {
        edit(q);
    }
    out
}

/// Narrows a quality requirement to sub-subjects or sub-qualities. Each output widens the
/// focused position to `original ∨ target`, so the input is subsumed by every output.
pub fn apply_focus(model: &Model, input_id: &str, targets: &[FocusTarget], strength: Strength) -> OpResult {
    let e = quality_input(model, input_id, OperatorKind::Focus)?;
    if targets.is_empty() {
        return Err(OperatorError::EmptyTargets);
    }
    if strength == Strength::Strengthening {
        return Err(OperatorError::StrengthNotAllowed { op: OperatorKind::Focus, strength });
    }
    let mut scratch = model.clone();
    let mut outputs = Vec::new();
    for t in targets {
        let id = scratch.fresh_id(&format!("{}_fk", input_id));
        let out = with_statement(e, &id, e.kind, |q| match t {
            FocusTarget::Subject(d) => q.subject = Description::or(q.subject.clone(), d.clone()),
            FocusTarget::Quality(d) => q.quality = Description::or(q.quality.clone(), d.clone()),
        });
        scratch.add_element(out.clone());
        outputs.push(out);
    }
    record(model, OperatorKind::Focus, input_id, outputs, strength, OperatorArgs::Focus(targets.to_vec()))
}

fn lower_first(name: &str) -> String {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn region_le(low: &Rational, high: &Rational, old_low: &Rational, old_high: &Rational) -> bool {
    old_low <= low && high <= old_high
}

/// Relaxes (Down) or tightens (Up) the region of a quality requirement.
///
/// A quantitative factor multiplies the interval bounds; a qualitative modifier such as
/// `Nearly` renames the region (`Fast` becomes `Nearly_fast`) and requires the ordering
/// between the two regions to follow from the declared axioms and assumptions.
pub fn apply_scale(model: &Model, input_id: &str, factor: ScaleFactor, direction: ScaleDirection) -> OpResult {
    let e = quality_input(model, input_id, OperatorKind::Scale)?;
    let q = e.quality_statement().unwrap();
    let (suffix, strength, dir_name) = match direction {
        ScaleDirection::Down => ("_sd", Strength::Weakening, "down"),
        ScaleDirection::Up => ("_su", Strength::Strengthening, "up"),
    };
    let region = match (&factor, &q.region) {
        (ScaleFactor::Quantitative { low_factor, high_factor }, RegionExpr::Interval { low, high, unit }) => {
            let one = Rational::one();
            let factor_ok = match direction {
                ScaleDirection::Down => *low_factor <= one && one <= *high_factor,
                ScaleDirection::Up => *low_factor >= one && *high_factor <= one,
            };
            let new_low = low * low_factor;
            let new_high = high * high_factor;
            let contained = match direction {
                ScaleDirection::Down => region_le(low, high, &new_low, &new_high),
                ScaleDirection::Up => new_low <= new_high && region_le(&new_low, &new_high, low, high),
            };
            if !factor_ok || !contained {
                return Err(OperatorError::FactorDirection {
                    low: crate::value::format_rational(low_factor),
                    high: crate::value::format_rational(high_factor),
                    direction: dir_name,
                });
            }
            RegionExpr::Interval { low: new_low, high: new_high, unit: unit.clone() }
        }
        (ScaleFactor::Quantitative { .. }, _) => return Err(OperatorError::NeedsInterval),
        (ScaleFactor::Qualitative { region_name }, RegionExpr::NamedRegion { name, qualitative }) => {
            let new_name = format!("{}_{}", region_name, lower_first(name));
            let axioms: Vec<DlAxiom> = model_axioms(model, false).into_iter().map(|a| a.axiom).collect();
            let prover = Prover::new(&axioms);
            let ordered = match direction {
                ScaleDirection::Down => prover.atomic_sub(name, &new_name),
                ScaleDirection::Up => prover.atomic_sub(&new_name, name),
            };
            if !ordered {
                return Err(OperatorError::MissingOrdering { from: name.clone(), to: new_name });
            }
            RegionExpr::NamedRegion { name: new_name, qualitative: *qualitative }
        }
        (ScaleFactor::Qualitative { .. }, _) => return Err(OperatorError::NeedsNamedRegion),
    };
    let id = model.fresh_id(&format!("{}{}", input_id, suffix));
    let out = with_statement(e, &id, e.kind, |q| q.region = region);
    record(model, OperatorKind::Scale, input_id, vec![out], strength, OperatorArgs::Scale { direction, factor: Some(factor) })
}

/// Relaxes a quality requirement so that only a fraction `pct` of the instances reached by
/// `path` must satisfy it.
pub fn apply_deuniversalize(model: &Model, input_id: &str, var_id: &str, path: &[&str], pct: Rational) -> OpResult {
    let e = quality_input(model, input_id, OperatorKind::DeUniversalize)?;
    if pct <= Rational::zero() || pct > Rational::one() {
        return Err(OperatorError::PctOutOfRange(crate::value::format_rational(&pct)));
    }
    let annotation = UAnnotation::new(var_id, path, pct);
    let q = e.quality_statement().unwrap();
    if q.annotations.iter().any(|a| a.path == annotation.path) {
        return Err(OperatorError::RepeatedDeUniversalize(annotation.path));
    }
    let id = model.fresh_id(&format!("{}_u", input_id));
    let out = with_statement(e, &id, e.kind, |q| q.annotations.push(annotation.clone()));
    if expand_u(&out).is_err() {
        return Err(OperatorError::PathMismatch(annotation.path));
    }
    record(model, OperatorKind::DeUniversalize, input_id, vec![out], Strength::Weakening, OperatorArgs::DeUniversalize(annotation))
}

/// Attaches an observer to a quality requirement, producing a quality constraint.
pub fn apply_observe(model: &Model, input_id: &str, observer: Description) -> OpResult {
    let e = quality_input(model, input_id, OperatorKind::Observe)?;
    let id = model.fresh_id(&format!("{}_ob", input_id));
    let out = with_statement(e, &id, ElementKind::QC, |q| q.observers.push(observer.clone()));
    record(model, OperatorKind::Observe, input_id, vec![out], Strength::Strengthening, OperatorArgs::Observe(observer))
}

/// Settles a declared conflict. Outputs are either kept inputs (passed with their existing
/// definition) or new elements; inputs not kept are dropped from fulfillment.
pub fn apply_resolve(model: &Model, input_ids: &[&str], outputs: Vec<Element>) -> OpResult {
    for id in input_ids {
        input(model, id)?;
    }
    let set: BTreeSet<String> = input_ids.iter().map(|s| s.to_string()).collect();
    if !model.conflicts.contains(&set) {
        return Err(OperatorError::NotAConflict(input_ids.iter().map(|s| s.to_string()).collect()));
    }
    let mut next = model.clone();
    let mut ids = Vec::new();
    for o in outputs {
        match model.element(&o.id) {
            Some(existing) if *existing == o => {}
            Some(_) => return Err(OperatorError::DuplicateId(o.id)),
            None => next.add_element(o.clone()),
        }
        ids.push(o.id);
    }
    next.applications.push(OperatorApplication {
        op: OperatorKind::Resolve,
        inputs: input_ids.iter().map(|s| s.to_string()).collect(),
        outputs: ids,
        strength: Strength::Weakening,
        args: OperatorArgs::None,
    });
    Ok(next)
}
