//! Translation of descriptions and elements into the description-logic fragment.

use super::dl::{CardKind, DlAxiom, DlConcept};
use super::SemanticsError;
use crate::model::{Axiom, Body, CardinalityModifier, Description, Element, ElementKind, RegionExpr, UAnnotation};
use crate::value::Rational;
use num_traits::One;

/// Slot carrying the de-universalization percentage.
pub const PCT_SLOT: &str = "pct";

/// Structural image of a description.
pub fn translate_description(d: &Description) -> DlConcept {
    match d {
        Description::Thing => DlConcept::Thing,
        Description::Nothing => DlConcept::Nothing,
        Description::AtomicConcept(n) => DlConcept::Atomic(n.clone()),
        Description::Enumeration(ids) => DlConcept::Nominal(ids.iter().cloned().collect()),
        Description::Region(r) => DlConcept::DataRange(r.clone()),
        Description::Intersection(l, r) => DlConcept::and(vec![translate_description(l), translate_description(r)]),
        Description::Union(l, r) => DlConcept::or(vec![translate_description(l), translate_description(r)]),
        Description::Difference(l, r) => {
            DlConcept::and(vec![translate_description(l), DlConcept::not(translate_description(r))])
        }
        Description::InverseProjection(src, slot) => DlConcept::ExistsInverse(slot.clone(), Box::new(translate_description(src))),
        Description::SlotRestriction(slot, modifier, filler) => {
            let f = Box::new(translate_description(filler));
            let card = |kind, n| DlConcept::Cardinality { slot: slot.clone(), kind, n, filler: f.clone() };
            match modifier {
                CardinalityModifier::ExactlyOne if slot == PCT_SLOT => DlConcept::Some(slot.clone(), f),
                CardinalityModifier::ExactlyOne => DlConcept::One(slot.clone(), f),
                CardinalityModifier::AtMost(n) => card(CardKind::Max, *n),
                CardinalityModifier::AtLeast(n) => card(CardKind::Min, *n),
                CardinalityModifier::Exactly(n) => card(CardKind::Exact, *n),
                CardinalityModifier::Some => DlConcept::Some(slot.clone(), f),
                CardinalityModifier::Only => DlConcept::Only(slot.clone(), f),
            }
        }
    }
}

/// Translates a domain axiom; `A B :< Nothing` becomes a disjointness axiom.
pub fn translate_axiom(axiom: &Axiom) -> DlAxiom {
    if axiom.subsumer == Description::Nothing {
        if let Description::Intersection(l, r) = &axiom.subsumee {
            return DlAxiom::Disjoint(translate_description(l), translate_description(r));
        }
    }
    DlAxiom::SubClassOf(translate_description(&axiom.subsumee), translate_description(&axiom.subsumer))
}

/// Root concept name marking the element kind in its translation, if any.
pub fn root_concept(element: &Element) -> Option<&'static str> {
    match (&element.body, element.kind) {
        (Body::FunctionDesc { .. }, _) => Some("Function"),
        (Body::Quality(_), ElementKind::QC) => Some("QC"),
        (Body::Quality(_), _) => Some("QG"),
        _ => None,
    }
}

/// Concept and axioms for one element.
pub fn translate_element(element: &Element) -> (DlConcept, Vec<DlAxiom>) {
    let root = root_concept(element).map(DlConcept::atomic);
    match &element.body {
        Body::NaturalLanguage(_) => (DlConcept::atomic(&element.id), Vec::new()),
        Body::FunctionDesc { head, slots } => {
            let mut parts = vec![root.unwrap(), DlConcept::atomic(head)];
            parts.extend(slots.iter().map(|s| translate_description(&s.to_description())));
            (DlConcept::and(parts), Vec::new())
        }
        Body::Subsumption { subsumee, subsumer } => {
            let c = translate_description(subsumee);
            let d = translate_description(subsumer);
            let concept = DlConcept::and(vec![DlConcept::some("subsumee", c), DlConcept::some("subsumer", d)]);
            (concept, vec![translate_axiom(&Axiom::new(subsumee.clone(), subsumer.clone()))])
        }
        Body::Quality(_) => {
            let expanded = expand_u(element).unwrap_or_else(|_| element.clone());
            let q = expanded.quality_statement().unwrap();
            let mut parts = vec![
                root.unwrap(),
                translate_description(&q.quality),
                DlConcept::some("inheres_in", translate_description(&q.subject)),
                DlConcept::some("has_value_in", DlConcept::DataRange(q.region.clone())),
            ];
            parts.extend(q.observers.iter().map(|o| DlConcept::one("observed_by", translate_description(o))));
            (DlConcept::and(parts), Vec::new())
        }
    }
}

/// The `<pct: [p, 100%]>` restriction added by de-universalization.
pub fn pct_restriction(pct: &Rational) -> Description {
    Description::slot(
        PCT_SLOT,
        CardinalityModifier::ExactlyOne,
        Description::Region(RegionExpr::Interval { low: pct.clone(), high: Rational::one(), unit: None }),
    )
}

fn rewrite_path(d: &Description, path: &[String], pct: &Rational) -> Option<Description> {
    if path.is_empty() {
        return Some(Description::or(d.clone(), pct_restriction(pct)));
    }
    match d {
        Description::SlotRestriction(s, m, f) if *s == path[0] => {
            Some(Description::SlotRestriction(s.clone(), *m, Box::new(rewrite_path(f, &path[1..], pct)?)))
        }
        Description::Intersection(l, r) => match rewrite_path(l, path, pct) {
            Some(nl) => Some(Description::Intersection(Box::new(nl), r.clone())),
            None => rewrite_path(r, path, pct).map(|nr| Description::Intersection(l.clone(), Box::new(nr))),
        },
        Description::Union(l, r) => match rewrite_path(l, path, pct) {
            Some(nl) => Some(Description::Union(Box::new(nl), r.clone())),
            None => rewrite_path(r, path, pct).map(|nr| Description::Union(l.clone(), Box::new(nr))),
        },
        _ => None,
    }
}

/// Materializes every U-annotation as `original ∨ <pct: [p, 100%]>` at its path.
pub fn expand_u(element: &Element) -> Result<Element, SemanticsError> {
    let mut out = element.clone();
    let Body::Quality(q) = &mut out.body else {
        return Err(SemanticsError::Unstructured(element.id.clone()));
    };
    let annotations: Vec<UAnnotation> = std::mem::take(&mut q.annotations);
    for ann in &annotations {
        let mismatch = || SemanticsError::PathMismatch { element: element.id.clone(), path: ann.path.clone() };
        match ann.path.first().map(String::as_str) {
            Some("inheres_in") => {
                q.subject = rewrite_path(&q.subject, &ann.path[1..], &ann.pct_low).ok_or_else(mismatch)?;
            }
            Some("observed_by") => {
                if q.observers.is_empty() {
                    return Err(mismatch());
                }
                let mut rewritten = Vec::new();
                for o in &q.observers {
                    rewritten.push(rewrite_path(o, &ann.path[1..], &ann.pct_low).ok_or_else(mismatch)?);
                }
                q.observers = rewritten;
            }
            _ => return Err(mismatch()),
        }
    }
    Ok(out)
}
