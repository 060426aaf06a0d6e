//! Subsumption and consistency services, interrelation queries, strength-tag validation and
//! fulfillment propagation.

pub mod consistency;
pub mod fulfillment;
pub mod query;
pub mod search;
pub mod structural;
pub mod tags;

pub use consistency::{check_consistency, model_axioms, Consistency, Explanation, LabeledAxiom};
pub use fulfillment::{propagate_fulfillment, Fulfillment, FulfillmentState, FulfillmentWarning};
pub use query::{element_description, query};
pub use structural::{normalize_dl, Prover};
pub use tags::{check_strength_tags, TagDiagnostic};

use crate::semantics::{DlAxiom, DlConcept, World};
use search::{find_counter_model, SearchOutcome};
use serde::Serialize;

/// Counter-model size used when no bound is configured.
pub const DEFAULT_BOUND: usize = 4;

/// The bound from `DESIREE_BOUND`, falling back to [`DEFAULT_BOUND`].
pub fn default_bound() -> usize {
    std::env::var("DESIREE_BOUND").ok().and_then(|v| v.trim().parse().ok()).filter(|b| *b >= 1).unwrap_or(DEFAULT_BOUND)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictStatus {
    Proven,
    Refuted,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictMethod {
    #[serde(rename = "structural")]
    Structural,
    #[serde(rename = "bounded-model")]
    BoundedModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsumptionVerdict {
    pub status: VerdictStatus,
    /// A world in which the subsumption fails; present exactly when Refuted.
    pub witness: Option<World>,
    pub method: VerdictMethod,
}

/// Reusable reasoning context over a fixed axiom set.
pub struct Reasoner {
    prover: Prover,
    axioms: Vec<(DlConcept, DlConcept)>,
    bound: usize,
}

impl Reasoner {
    pub fn new(axioms: &[DlAxiom], bound: usize) -> Self {
        Reasoner {
            prover: Prover::new(axioms),
            axioms: axioms.iter().map(|a| a.as_subclass()).collect(),
            bound: bound.max(1),
        }
    }

    pub fn prover(&self) -> &Prover {
        &self.prover
    }

    /// Structural proof only.
    pub fn proves(&self, sub: &DlConcept, sup: &DlConcept) -> bool {
        self.prover.proves(sub, sup)
    }

    pub fn subsumes(&self, sub: &DlConcept, sup: &DlConcept) -> SubsumptionVerdict {
        if self.prover.proves(sub, sup) {
            return SubsumptionVerdict { status: VerdictStatus::Proven, witness: None, method: VerdictMethod::Structural };
        }
        let sub = normalize_dl(sub);
        let sup = normalize_dl(sup);
        match find_counter_model(&sub, &sup, &self.axioms, self.bound, &self.prover) {
            SearchOutcome::Found(world) => SubsumptionVerdict {
                status: VerdictStatus::Refuted,
                witness: Some(world),
                method: VerdictMethod::BoundedModel,
            },
            SearchOutcome::Exhausted | SearchOutcome::GaveUp => {
                SubsumptionVerdict { status: VerdictStatus::Unknown, witness: None, method: VerdictMethod::BoundedModel }
            }
        }
    }
}

/// Decides `sub ⊑ sup` under `axioms`: structural proof first, then counter-model search up to `bound` individuals.
pub fn subsumes(sub: &DlConcept, sup: &DlConcept, axioms: &[DlAxiom], bound: usize) -> SubsumptionVerdict {
    Reasoner::new(axioms, bound).subsumes(sub, sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RegionExpr;
    use crate::semantics::eval_concept;
    use crate::value::rat;

    fn a(n: &str) -> DlConcept {
        DlConcept::atomic(n)
    }

    #[test]
    fn independent_atoms_refuted_with_one_individual() {
        let v = subsumes(&a("A"), &a("B"), &[], 4);
        assert_eq!(v.status, VerdictStatus::Refuted);
        let w = v.witness.unwrap();
        assert_eq!(w.individuals.len(), 1);
        assert!(!eval_concept(&a("A"), &w).is_subset(&eval_concept(&a("B"), &w)));
    }

    #[test]
    fn interval_refutation_uses_data_values() {
        let r = |l, h| DlConcept::some("has_value_in", DlConcept::DataRange(RegionExpr::interval(rat(l), rat(h), None)));
        assert_eq!(subsumes(&r(0, 30), &r(0, 40), &[], 4).status, VerdictStatus::Proven);
        let v = subsumes(&r(0, 40), &r(0, 30), &[], 4);
        assert_eq!(v.status, VerdictStatus::Refuted);
        assert_eq!(v.method, VerdictMethod::BoundedModel);
    }

    #[test]
    fn refutation_respects_axioms() {
        let axioms = [DlAxiom::SubClassOf(a("A"), a("B"))];
        let sub = DlConcept::and(vec![a("Book"), DlConcept::one("object", a("B"))]);
        let sup = DlConcept::and(vec![a("Book"), DlConcept::one("object", a("A"))]);
        let v = subsumes(&sub, &sup, &axioms, 4);
        assert_eq!(v.status, VerdictStatus::Refuted);
        let w = v.witness.unwrap();
        assert!(eval_concept(&a("A"), &w).is_subset(&eval_concept(&a("B"), &w)));
    }

    #[test]
    fn unsatisfiable_axioms_leave_no_counter_model() {
        let axioms = [DlAxiom::SubClassOf(DlConcept::Thing, DlConcept::Nothing)];
        let v = subsumes(&a("A"), &a("B"), &axioms, 3);
        assert_ne!(v.status, VerdictStatus::Refuted);
    }
}
