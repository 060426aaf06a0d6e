//! Interrelation queries: which elements a description pattern matches.

use super::{model_axioms, Prover};
use crate::model::{normalize, Body, Description, Model, RegionExpr, SlotD, CardinalityModifier, Element};
use crate::semantics::{translate_description, DlAxiom};
use std::collections::BTreeSet;

/// The description an element denotes for querying; natural-language elements have none.
///
/// Functions become `head ⊓ slots`, quality elements
/// `quality ⊓ <inheres_in: subject> ⊓ <has_value_in: region> ⊓ <observed_by: o>...`, and
/// subsumption elements `<subsumee: C> ⊓ <subsumer: D>`.
pub fn element_description(element: &Element) -> Option<Description> {
    match &element.body {
        Body::NaturalLanguage(_) => None,
        Body::FunctionDesc { head, slots } => {
            let mut parts = vec![Description::atomic(head)];
            parts.extend(slots.iter().map(SlotD::to_description));
            Some(Description::and_all(parts))
        }
        Body::Quality(q) => {
            let mut parts = vec![
                q.quality.clone(),
                Description::slot("inheres_in", CardinalityModifier::ExactlyOne, q.subject.clone()),
                Description::slot("has_value_in", CardinalityModifier::ExactlyOne, Description::Region(q.region.clone())),
            ];
            parts.extend(
                q.observers.iter().map(|o| Description::slot("observed_by", CardinalityModifier::ExactlyOne, o.clone())),
            );
            Some(Description::and_all(parts))
        }
        Body::Subsumption { subsumee, subsumer } => Some(Description::and(
            Description::slot("subsumee", CardinalityModifier::ExactlyOne, subsumee.clone()),
            Description::slot("subsumer", CardinalityModifier::ExactlyOne, subsumer.clone()),
        )),
    }
}

fn refers(d: &Description, ids: &BTreeSet<String>) -> bool {
    match d {
        Description::AtomicConcept(n) => ids.contains(n),
        Description::Enumeration(es) => es.iter().any(|e| ids.contains(e)),
        Description::InverseProjection(src, _) => refers(src, ids),
        Description::Intersection(l, r) | Description::Union(l, r) => refers(l, ids) || refers(r, ids),
        Description::Difference(l, _) => refers(l, ids),
        _ => false,
    }
}

fn matches(pattern: &Description, desc: &Description, prover: &Prover) -> bool {
    match pattern {
        Description::Thing => true,
        Description::Nothing => false,
        Description::Intersection(l, r) => matches(l, desc, prover) && matches(r, desc, prover),
        Description::Union(l, r) => matches(l, desc, prover) || matches(r, desc, prover),
        Description::Difference(l, r) => matches(l, desc, prover) && !matches(r, desc, prover),
        Description::SlotRestriction(slot, _, pf) => desc.conjuncts().into_iter().any(|c| match c {
            Description::SlotRestriction(s, _, f) => s == slot && matches(pf, f, prover),
            _ => false,
        }),
        Description::Enumeration(ids) => refers(desc, &ids.iter().cloned().collect()),
        Description::Region(r) => match desc {
            Description::Region(dr) => region_within(dr, r, prover),
            _ => false,
        },
        Description::AtomicConcept(_) | Description::InverseProjection(..) => {
            prover.proves(&translate_description(desc), &translate_description(pattern))
        }
    }
}

fn region_within(sub: &RegionExpr, sup: &RegionExpr, prover: &Prover) -> bool {
    sub == sup || prover.region_sub(sub, sup)
}

/// Ids of the elements whose description matches `pattern`, in declaration order.
///
/// Slot patterns match a conjunct with the same slot whose filler matches recursively,
/// enumerations match descriptions referring to one of the listed ids, and concept names match
/// descriptions the domain axioms prove to be subsumed by them.
pub fn query(model: &Model, pattern: &Description) -> Vec<String> {
    let axioms: Vec<DlAxiom> = model_axioms(model, false).into_iter().map(|a| a.axiom).collect();
    let prover = Prover::new(&axioms);
    let pattern = normalize(pattern);
    model
        .elements
        .values()
        .filter(|e| element_description(e).is_some_and(|d| matches(&pattern, &normalize(&d), &prover)))
        .map(|e| e.id.clone())
        .collect()
}
