//! Model consistency: forward chaining over the declared world, or a satisfiability search
//! when no world is given.

use super::{subsumes, default_bound, VerdictStatus};
use crate::model::{Body, ElementKind, Model};
use crate::semantics::{data_contains, eval_concept, translate_axiom, translate_description, CardKind, DlAxiom, DlConcept, World};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// An axiom together with the model statement it came from (`axiom#N` or an element id).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledAxiom {
    pub source: String,
    pub axiom: DlAxiom,
}

/// Why a model was found inconsistent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Explanation {
    /// The violated axiom, rendered as `source: axiom`.
    pub clash: String,
    /// Every axiom taking part in the derivation, the clashing one first.
    pub axioms: Vec<String>,
    /// World facts and derived facts used by the derivation.
    pub facts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Consistency {
    /// A world satisfying every axiom.
    Consistent(World),
    Inconsistent(Explanation),
    Unknown,
}

/// Axioms contributed by a model.
///
/// With `include_requirements` the bodies of non-dropped structured subsumption elements and
/// the definitions of non-dropped functions are added to the domain axioms and assumptions.
pub fn model_axioms(model: &Model, include_requirements: bool) -> Vec<LabeledAxiom> {
    let mut out: Vec<LabeledAxiom> = model
        .axioms
        .iter()
        .enumerate()
        .map(|(i, a)| LabeledAxiom { source: format!("axiom#{}", i), axiom: translate_axiom(a) })
        .collect();
    let dropped = model.dropped_elements();
    for e in model.elements.values() {
        let assumption = e.kind == ElementKind::DA;
        if !(include_requirements || assumption) || dropped.contains(&e.id) {
            continue;
        }
        match &e.body {
            Body::Subsumption { subsumee, subsumer } => {
                let axiom = translate_axiom(&crate::model::Axiom::new(subsumee.clone(), subsumer.clone()));
                out.push(LabeledAxiom { source: e.id.clone(), axiom });
            }
            Body::FunctionDesc { head, slots } if include_requirements => {
                let mut parts = vec![DlConcept::atomic(head)];
                parts.extend(slots.iter().map(|s| translate_description(&s.to_description())));
                out.push(LabeledAxiom {
                    source: e.id.clone(),
                    axiom: DlAxiom::SubClassOf(DlConcept::atomic(&e.id), DlConcept::and(parts)),
                });
            }
            _ => {}
        }
    }
    out
}

struct Clash {
    axiom: usize,
    individual: String,
    detail: String,
}

struct Chainer<'a> {
    world: World,
    axioms: &'a [LabeledAxiom],
    /// (individual, concept) -> (axiom index, individual whose membership triggered it)
    derived: BTreeMap<(String, String), (usize, String)>,
    pending: bool,
}

impl<'a> Chainer<'a> {
    fn enforce(&mut self, r: &DlConcept, x: &str, k: usize, trigger: &str) -> Result<bool, Clash> {
        let clash = |detail: String| Clash { axiom: k, individual: x.to_string(), detail };
        match r {
            DlConcept::Thing => Ok(false),
            DlConcept::Nothing => Err(clash(format!("{} would have to belong to ⊥", x))),
            DlConcept::Atomic(a) => {
                if self.world.is_member(a, x) {
                    return Ok(false);
                }
                self.world.assert_concept(a, x);
                self.derived.insert((x.to_string(), a.clone()), (k, trigger.to_string()));
                Ok(true)
            }
            DlConcept::And(parts) => {
                let mut changed = false;
                for p in parts {
                    changed |= self.enforce(p, x, k, trigger)?;
                }
                Ok(changed)
            }
            DlConcept::Nominal(ids) => {
                if ids.contains(x) {
                    Ok(false)
                } else {
                    Err(clash(format!("{} is not among the listed individuals", x)))
                }
            }
            DlConcept::Only(slot, filler) | DlConcept::One(slot, filler) => {
                let single = matches!(r, DlConcept::One(..));
                if filler.is_data() {
                    return match self.world.data(x, slot) {
                        Some(v) if !data_contains(filler, v, &self.world) => {
                            Err(clash(format!("{}({}, {}) lies outside the required range", slot, x, v)))
                        }
                        Some(_) => Ok(false),
                        None => {
                            self.pending |= single;
                            Ok(false)
                        }
                    };
                }
                let succ: Vec<String> = self.world.successors(slot, x).into_iter().map(str::to_string).collect();
                if single && succ.len() > 1 {
                    return Err(clash(format!("{} has {} {}-successors where exactly one is allowed", x, succ.len(), slot)));
                }
                if single && succ.is_empty() {
                    self.pending = true;
                }
                let mut changed = false;
                for y in succ {
                    changed |= self.enforce(filler, &y, k, x)?;
                }
                Ok(changed)
            }
            DlConcept::Cardinality { slot, kind: kind @ (CardKind::Max | CardKind::Exact), n, filler } => {
                let hits = if filler.is_data() {
                    self.world.data(x, slot).map_or(0, |v| usize::from(data_contains(filler, v, &self.world)))
                } else {
                    let ext = eval_concept(filler, &self.world);
                    self.world.successors(slot, x).into_iter().filter(|y| ext.contains(*y)).count()
                };
                if hits > *n as usize {
                    return Err(clash(format!("{} has {} qualifying {}-successors, more than {}", x, hits, slot, n)));
                }
                if *kind == CardKind::Exact && hits < *n as usize {
                    self.pending = true;
                }
                Ok(false)
            }
            _ => {
                self.pending = true;
                Ok(false)
            }
        }
    }

    fn explain(&self, clash: &Clash) -> Explanation {
        let render = |i: usize| format!("{}: {}", self.axioms[i].source, self.axioms[i].axiom);
        let mut used = vec![clash.axiom];
        let mut facts = Vec::new();
        let mut visited = BTreeSet::new();
        let mut stack = vec![clash.individual.clone()];
        while let Some(x) = stack.pop() {
            if !visited.insert(x.clone()) {
                continue;
            }
            for (concept, members) in &self.world.concept_extensions {
                if !members.contains(&x) {
                    continue;
                }
                match self.derived.get(&(x.clone(), concept.clone())) {
                    Some((k, from)) => {
                        facts.push(format!("{} ∈ {} (by {})", x, concept, self.axioms[*k].source));
                        if !used.contains(k) {
                            used.push(*k);
                        }
                        if *from != x {
                            if let Some(tuples) = self.world.slot_tuples.iter().find_map(|(s, t)| {
                                t.contains(&(from.clone(), x.clone())).then(|| s.clone())
                            }) {
                                facts.push(format!("{}({}, {})", tuples, from, x));
                            }
                            stack.push(from.clone());
                        }
                    }
                    None => facts.push(format!("{} ∈ {}", x, concept)),
                }
            }
        }
        facts.push(clash.detail.clone());
        Explanation { clash: render(clash.axiom), axioms: used.into_iter().map(render).collect(), facts }
    }
}

fn chain(world: &World, axioms: &[LabeledAxiom]) -> Consistency {
    let pairs: Vec<(DlConcept, DlConcept)> = axioms.iter().map(|a| a.axiom.as_subclass()).collect();
    let mut ch = Chainer { world: world.clone(), axioms, derived: BTreeMap::new(), pending: false };
    for _ in 0..64 {
        let mut changed = false;
        for (k, (lhs, rhs)) in pairs.iter().enumerate() {
            for x in eval_concept(lhs, &ch.world) {
                match ch.enforce(rhs, &x, k, &x) {
                    Ok(c) => changed |= c,
                    Err(clash) => return Consistency::Inconsistent(ch.explain(&clash)),
                }
            }
        }
        if !changed {
            break;
        }
    }
    let holds = pairs.iter().all(|(l, r)| eval_concept(l, &ch.world).is_subset(&eval_concept(r, &ch.world)));
    if holds {
        Consistency::Consistent(ch.world)
    } else {
        Consistency::Unknown
    }
}

/// Checks that the model's axioms, assumptions and structured requirements admit a world.
///
/// When the model declares a world, membership facts are forward-chained through the axioms
/// and a violation yields an explanation naming the clashing axiom. Without a world the axioms
/// are tested for satisfiability by searching for a non-empty model up to `bound` individuals.
pub fn check_consistency(model: &Model, bound: Option<usize>) -> Consistency {
    let axioms = model_axioms(model, true);
    if let Some(world) = &model.world {
        return chain(world, &axioms);
    }
    if axioms.is_empty() {
        return Consistency::Consistent(World::new());
    }
    let dl: Vec<DlAxiom> = axioms.iter().map(|a| a.axiom.clone()).collect();
    let verdict = subsumes(&DlConcept::Thing, &DlConcept::Nothing, &dl, bound.unwrap_or_else(default_bound));
    match verdict.status {
        VerdictStatus::Refuted => Consistency::Consistent(verdict.witness.unwrap_or_default()),
        VerdictStatus::Proven => {
            let rendered: Vec<String> = axioms.iter().map(|a| format!("{}: {}", a.source, a.axiom)).collect();
            Consistency::Inconsistent(Explanation {
                clash: "every individual is forced into ⊥".to_string(),
                axioms: rendered,
                facts: Vec::new(),
            })
        }
        VerdictStatus::Unknown => Consistency::Unknown,
    }
}
