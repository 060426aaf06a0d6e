//! Fulfillment propagation along refinement links.

use crate::model::{ElementKind, Model, OperatorKind};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Fulfillment {
    Fulfilled,
    Unfulfilled,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FulfillmentWarning {
    /// No one-to-many application has as many outputs as the threshold.
    ThresholdUnreachable { threshold: usize, max_outputs: usize },
}

impl std::fmt::Display for FulfillmentWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FulfillmentWarning::ThresholdUnreachable { threshold, max_outputs } => write!(
                f,
                "threshold {} exceeds the largest number of outputs of any one-to-many application ({})",
                threshold, max_outputs
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FulfillmentState {
    pub states: BTreeMap<String, Fulfillment>,
    pub threshold: Option<usize>,
    pub warnings: Vec<FulfillmentWarning>,
}

impl FulfillmentState {
    pub fn get(&self, id: &str) -> Fulfillment {
        self.states.get(id).copied().unwrap_or(Fulfillment::Unknown)
    }
}

fn combine_all(values: &[Fulfillment], threshold: Option<usize>) -> Fulfillment {
    let fulfilled = values.iter().filter(|v| **v == Fulfillment::Fulfilled).count();
    let unfulfilled = values.iter().filter(|v| **v == Fulfillment::Unfulfilled).count();
    let needed = threshold.map_or(values.len(), |k| k.min(values.len()));
    if fulfilled >= needed {
        Fulfillment::Fulfilled
    } else if values.len() - unfulfilled < needed {
        Fulfillment::Unfulfilled
    } else {
        Fulfillment::Unknown
    }
}

/// Computes a fulfillment state for every element.
///
/// Domain assumptions and elements marked fulfilled start fulfilled; elements dropped by
/// Resolve are unfulfilled. Every other element is fulfilled when one of its refinement
/// alternatives is: a one-to-one application through its single output, a one-to-many
/// application (Reduce, Focus, Operationalize) through all of its outputs, or through at least
/// `threshold` of them when a threshold is given. It is unfulfilled when it has alternatives
/// and every one of them is unfulfilled.
pub fn propagate_fulfillment(model: &Model, threshold: Option<usize>) -> FulfillmentState {
    let dropped = model.dropped_elements();
    let mut fixed: BTreeMap<String, Fulfillment> = BTreeMap::new();
    for e in model.elements.values() {
        if dropped.contains(&e.id) {
            fixed.insert(e.id.clone(), Fulfillment::Unfulfilled);
        } else if e.kind == ElementKind::DA || model.fulfilled_marks.contains(&e.id) {
            fixed.insert(e.id.clone(), Fulfillment::Fulfilled);
        }
    }
    let mut states: BTreeMap<String, Fulfillment> = model
        .elements
        .keys()
        .map(|id| (id.clone(), fixed.get(id).copied().unwrap_or(Fulfillment::Unknown)))
        .collect();

    let refining: Vec<_> = model.applications.iter().filter(|a| a.op != OperatorKind::Resolve).collect();
    loop {
        let mut changed = false;
        for id in model.elements.keys() {
            if fixed.contains_key(id) {
                continue;
            }
            let alternatives: Vec<Fulfillment> = refining
                .iter()
                .filter(|a| a.inputs.iter().any(|i| i == id))
                .map(|a| {
                    let outs: Vec<Fulfillment> =
                        a.outputs.iter().map(|o| states.get(o).copied().unwrap_or(Fulfillment::Unknown)).collect();
                    if a.op.is_one_to_one() {
                        combine_all(&outs, None)
                    } else {
                        combine_all(&outs, threshold)
                    }
                })
                .collect();
            let next = if alternatives.contains(&Fulfillment::Fulfilled) {
                Fulfillment::Fulfilled
            } else if !alternatives.is_empty() && alternatives.iter().all(|a| *a == Fulfillment::Unfulfilled) {
                Fulfillment::Unfulfilled
            } else {
                Fulfillment::Unknown
            };
            if states[id] != next {
                states.insert(id.clone(), next);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut warnings = Vec::new();
    if let Some(k) = threshold {
        let max_outputs = refining.iter().filter(|a| !a.op.is_one_to_one()).map(|a| a.outputs.len()).max().unwrap_or(0);
        if k > max_outputs {
            warnings.push(FulfillmentWarning::ThresholdUnreachable { threshold: k, max_outputs });
        }
    }
    FulfillmentState { states, threshold, warnings }
}
