//! Set-theoretic evaluation of descriptions and satisfaction of elements over a world.

use super::world::{region_contains, QualityRecord, World};
use super::SemanticsError;
use crate::model::{Body, CardinalityModifier, Description, Element, QualityStatement, RegionExpr, UAnnotation};
use crate::value::{Rational, Value};
use num_bigint::BigInt;
use std::collections::BTreeSet;

/// Whether a data value lies in a region-level description.
pub fn region_level_contains(d: &Description, value: &Value, world: &World) -> bool {
    match d {
        Description::Region(r) => region_contains(r, value, world),
        Description::Intersection(l, r) => region_level_contains(l, value, world) && region_level_contains(r, value, world),
        Description::Union(l, r) => region_level_contains(l, value, world) || region_level_contains(r, value, world),
        Description::Difference(l, r) => region_level_contains(l, value, world) && !region_level_contains(r, value, world),
        Description::Thing => true,
        _ => false,
    }
}

/// The extension of `d` in `world`.
pub fn eval_description(d: &Description, world: &World) -> BTreeSet<String> {
    match d {
        Description::Thing => world.individuals.clone(),
        Description::Nothing | Description::Region(_) => BTreeSet::new(),
        Description::AtomicConcept(name) => world.extension(name).intersection(&world.individuals).cloned().collect(),
        Description::Enumeration(ids) => ids.iter().filter(|i| world.individuals.contains(*i)).cloned().collect(),
        Description::Intersection(l, r) => {
            let left = eval_description(l, world);
            let right = eval_description(r, world);
            left.intersection(&right).cloned().collect()
        }
        Description::Union(l, r) => {
            let mut left = eval_description(l, world);
            left.extend(eval_description(r, world));
            left
        }
        Description::Difference(l, r) => {
            let left = eval_description(l, world);
            let right = eval_description(r, world);
            left.difference(&right).cloned().collect()
        }
        Description::InverseProjection(source, slot) => {
            let src = eval_description(source, world);
            let mut out = BTreeSet::new();
            if let Some(tuples) = world.slot_tuples.get(slot) {
                for (a, b) in tuples {
                    if src.contains(a) {
                        out.insert(b.clone());
                    }
                }
            }
            out
        }
        Description::SlotRestriction(slot, modifier, filler) => {
            let data = filler.is_region_level();
            let ext = if data { BTreeSet::new() } else { eval_description(filler, world) };
            world
                .individuals
                .iter()
                .filter(|x| {
                    let (hits, total) = if data {
                        match world.data(x, slot) {
                            Some(v) => (usize::from(region_level_contains(filler, v, world)), 1),
                            None => (0, 0),
                        }
                    } else {
                        let succ = world.successors(slot, x);
                        (succ.iter().filter(|y| ext.contains(**y)).count(), succ.len())
                    };
                    modifier_holds(*modifier, hits, total)
                })
                .cloned()
                .collect()
        }
    }
}

/// Cardinality test given the number of successors in the filler and the total number of successors.
pub fn modifier_holds(modifier: CardinalityModifier, hits: usize, total: usize) -> bool {
    match modifier {
        CardinalityModifier::ExactlyOne => hits == 1 && total == 1,
        CardinalityModifier::AtMost(n) => hits <= n as usize,
        CardinalityModifier::AtLeast(n) => hits >= n as usize,
        CardinalityModifier::Exactly(n) => hits == n as usize,
        CardinalityModifier::Some => hits >= 1,
        CardinalityModifier::Only => hits == total,
    }
}

/// Outcome of checking an element against a world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Satisfaction {
    Holds,
    /// Offending individuals, quality records or counting units.
    Violated(BTreeSet<String>),
    NotApplicable,
}

/// Checks whether a structured element is satisfied by `world`.
pub fn element_holds(element: &Element, world: &World) -> Result<Satisfaction, SemanticsError> {
    match &element.body {
        Body::NaturalLanguage(_) => Err(SemanticsError::Unstructured(element.id.clone())),
        Body::Subsumption { subsumee, subsumer } => {
            let sub = eval_description(subsumee, world);
            let sup = eval_description(subsumer, world);
            let bad: BTreeSet<String> = sub.difference(&sup).cloned().collect();
            Ok(if bad.is_empty() { Satisfaction::Holds } else { Satisfaction::Violated(bad) })
        }
        Body::FunctionDesc { head, slots } => {
            let runs = world.extension(&element.id);
            if runs.is_empty() {
                return Ok(Satisfaction::NotApplicable);
            }
            let mut parts = vec![Description::atomic(head)];
            parts.extend(slots.iter().map(|s| s.to_description()));
            let ok = eval_description(&Description::and_all(parts), world);
            let bad: BTreeSet<String> = runs.difference(&ok).cloned().collect();
            Ok(if bad.is_empty() { Satisfaction::Holds } else { Satisfaction::Violated(bad) })
        }
        Body::Quality(q) => quality_holds(&element.id, q, world),
    }
}

fn record_in_region(element: &str, q: &QualityStatement, record: &QualityRecord, world: &World) -> Result<bool, SemanticsError> {
    if let (RegionExpr::Interval { unit: Some(expected), .. }, Some(actual)) = (&q.region, &record.unit) {
        if expected != actual {
            return Err(SemanticsError::UnitMismatch { element: element.to_string(), record: record.id.clone() });
        }
    }
    Ok(region_contains(&q.region, &record.value, world))
}

fn fraction_reaches(satisfied: usize, total: usize, pct: &Rational) -> bool {
    let lhs = Rational::from_integer(BigInt::from(satisfied));
    let rhs = pct * Rational::from_integer(BigInt::from(total));
    lhs >= rhs
}

/// Follows a slot path inside a subject description and returns the filler reached.
fn filler_at_path<'a>(d: &'a Description, path: &[String]) -> Option<&'a Description> {
    if path.is_empty() {
        return Some(d);
    }
    match d {
        Description::SlotRestriction(s, _, f) if *s == path[0] => filler_at_path(f, &path[1..]),
        Description::Intersection(l, r) => filler_at_path(l, path).or_else(|| filler_at_path(r, path)),
        _ => None,
    }
}

/// Individuals reachable from `start` along `path`.
fn reach(world: &World, start: &str, path: &[String]) -> BTreeSet<String> {
    let mut frontier: BTreeSet<String> = [start.to_string()].into_iter().collect();
    for slot in path {
        frontier = frontier
            .iter()
            .flat_map(|x| world.successors(slot, x).into_iter().map(str::to_string).collect::<Vec<_>>())
            .collect();
    }
    frontier
}

fn quality_holds(id: &str, q: &QualityStatement, world: &World) -> Result<Satisfaction, SemanticsError> {
    let subjects = eval_description(&q.subject, world);
    if subjects.is_empty() {
        return Ok(Satisfaction::NotApplicable);
    }
    let qualities = eval_description(&q.quality, world);
    let mut observers: Option<BTreeSet<String>> = None;
    for o in &q.observers {
        let ext = eval_description(o, world);
        observers = Some(match observers {
            None => ext,
            Some(prev) => prev.intersection(&ext).cloned().collect(),
        });
    }
    if observers.as_ref().is_some_and(|o| o.is_empty()) {
        return Ok(Satisfaction::NotApplicable);
    }
    let relevant: Vec<&QualityRecord> = world
        .quality_records
        .iter()
        .filter(|r| qualities.contains(&r.id) && subjects.contains(&r.bearer))
        .filter(|r| observers.as_ref().is_none_or(|o| r.observers.iter().any(|x| o.contains(x))))
        .collect();
    let mut in_region = std::collections::BTreeMap::new();
    for r in &relevant {
        in_region.insert(r.id.clone(), record_in_region(id, q, r, world)?);
    }
    let all_ok = |records: &mut dyn Iterator<Item = &&QualityRecord>| {
        for r in records {
            if !in_region[&r.id] {
                return false;
            }
        }
        true
    };

    let inheres: Vec<&UAnnotation> = q.annotations.iter().filter(|a| a.path.first().map(String::as_str) == Some("inheres_in")).collect();
    let observed: Vec<&UAnnotation> = q.annotations.iter().filter(|a| a.path.first().map(String::as_str) == Some("observed_by")).collect();
    if inheres.len() + observed.len() != q.annotations.len() {
        let bad = q.annotations.iter().find(|a| !matches!(a.path.first().map(String::as_str), Some("inheres_in" | "observed_by")));
        return Err(SemanticsError::PathMismatch { element: id.to_string(), path: bad.map(|a| a.path.clone()).unwrap_or_default() });
    }
    if inheres.len() > 2 || observed.len() > 1 || (!inheres.is_empty() && !observed.is_empty()) {
        return Err(SemanticsError::UnsupportedNestedU(id.to_string()));
    }

    if q.annotations.is_empty() {
        let bad: BTreeSet<String> = relevant.iter().filter(|r| !in_region[&r.id]).map(|r| r.id.clone()).collect();
        return Ok(if bad.is_empty() { Satisfaction::Holds } else { Satisfaction::Violated(bad) });
    }

    let subject_ok = |s: &str| all_ok(&mut relevant.iter().filter(|r| r.bearer == s));

    if let Some(ann) = observed.first() {
        if ann.path.len() != 1 {
            return Err(SemanticsError::UnsupportedNestedU(id.to_string()));
        }
        let units = observers.clone().unwrap_or_default();
        if units.is_empty() {
            return Err(SemanticsError::PathMismatch { element: id.to_string(), path: ann.path.clone() });
        }
        let bad: BTreeSet<String> =
            units.iter().filter(|o| !all_ok(&mut relevant.iter().filter(|r| r.observers.contains(*o)))).cloned().collect();
        return Ok(verdict(units.len(), bad, &ann.pct_low));
    }

    let mut sorted = inheres.clone();
    sorted.sort_by_key(|a| std::cmp::Reverse(a.path.len()));
    let outer = sorted[0];
    let inner = sorted.get(1).copied();
    if let Some(inner) = inner {
        if inner.path.len() != 1 || outer.path.len() < 2 {
            return Err(SemanticsError::UnsupportedNestedU(id.to_string()));
        }
    }
    if outer.path.len() == 1 {
        let bad: BTreeSet<String> = subjects.iter().filter(|s| !subject_ok(s)).cloned().collect();
        return Ok(verdict(subjects.len(), bad, &outer.pct_low));
    }
    let rest = &outer.path[1..];
    let filler = filler_at_path(&q.subject, rest)
        .ok_or_else(|| SemanticsError::PathMismatch { element: id.to_string(), path: outer.path.clone() })?;
    let units = eval_description(filler, world);
    if units.is_empty() {
        return Ok(Satisfaction::NotApplicable);
    }
    let mut bad = BTreeSet::new();
    for unit in &units {
        let group: Vec<&String> = subjects.iter().filter(|s| reach(world, s, rest).contains(unit)).collect();
        let ok = match inner {
            None => group.iter().all(|s| subject_ok(s)),
            Some(inner) => {
                let sat = group.iter().filter(|s| subject_ok(s)).count();
                group.is_empty() || fraction_reaches(sat, group.len(), &inner.pct_low)
            }
        };
        if !ok {
            bad.insert(unit.clone());
        }
    }
    Ok(verdict(units.len(), bad, &outer.pct_low))
}

fn verdict(total: usize, bad: BTreeSet<String>, pct: &Rational) -> Satisfaction {
    if fraction_reaches(total - bad.len(), total, pct) {
        Satisfaction::Holds
    } else {
        Satisfaction::Violated(bad)
    }
}
