//! Finite instance structures used as the brute-force oracle and runtime checker.

use crate::model::RegionExpr;
use crate::value::Value;
use std::collections::{BTreeMap, BTreeSet};

/// A measured quality: `quality q : QType inheres a value 25 Sec observed_by {u1};`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QualityRecord {
    pub id: String,
    pub quality: String,
    pub bearer: String,
    pub value: Value,
    pub unit: Option<String>,
    pub observers: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct World {
    pub individuals: BTreeSet<String>,
    pub concept_extensions: BTreeMap<String, BTreeSet<String>>,
    pub slot_tuples: BTreeMap<String, BTreeSet<(String, String)>>,
    pub data_values: BTreeMap<(String, String), Value>,
    pub quality_records: Vec<QualityRecord>,
    /// Extensions of named regions over data values; undefined names contain only their own string.
    pub region_defs: BTreeMap<String, RegionExpr>,
}

impl World {
    pub fn new() -> Self {
        World::default()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn add_individual(&mut self, id: &str) {
        self.individuals.insert(id.to_string());
    }

    /// Adds `id` (declaring it if needed) to the extension of `concept`.
    pub fn assert_concept(&mut self, concept: &str, id: &str) {
        self.add_individual(id);
        self.concept_extensions.entry(concept.to_string()).or_default().insert(id.to_string());
    }

    /// Adds the tuple `slot(subject, object)`, declaring both individuals.
    pub fn assert_slot(&mut self, slot: &str, subject: &str, object: &str) {
        self.add_individual(subject);
        self.add_individual(object);
        self.slot_tuples
            .entry(slot.to_string())
            .or_default()
            .insert((subject.to_string(), object.to_string()));
    }

    pub fn assert_data(&mut self, slot: &str, subject: &str, value: Value) {
        self.add_individual(subject);
        self.data_values.insert((subject.to_string(), slot.to_string()), value);
    }

    /// Records a quality measurement and materializes its facts.
    pub fn add_quality_record(&mut self, record: QualityRecord) {
        self.assert_concept(&record.quality, &record.id);
        self.assert_slot("inheres_in", &record.id, &record.bearer);
        self.assert_data("has_value_in", &record.id, record.value.clone());
        for o in &record.observers {
            self.assert_slot("observed_by", &record.id, o);
        }
        self.quality_records.push(record);
    }

    pub fn extension(&self, concept: &str) -> BTreeSet<String> {
        self.concept_extensions.get(concept).cloned().unwrap_or_default()
    }

    pub fn is_member(&self, concept: &str, id: &str) -> bool {
        self.concept_extensions.get(concept).is_some_and(|ext| ext.contains(id))
    }

    /// Objects related to `subject` through `slot`.
    pub fn successors<'a>(&'a self, slot: &str, subject: &'a str) -> Vec<&'a str> {
        match self.slot_tuples.get(slot) {
            None => Vec::new(),
            Some(tuples) => tuples
                .range((subject.to_string(), String::new())..)
                .take_while(|(s, _)| s == subject)
                .map(|(_, o)| o.as_str())
                .collect(),
        }
    }

    pub fn has_tuple(&self, slot: &str, subject: &str, object: &str) -> bool {
        self.slot_tuples
            .get(slot)
            .is_some_and(|t| t.contains(&(subject.to_string(), object.to_string())))
    }

    pub fn data(&self, subject: &str, slot: &str) -> Option<&Value> {
        self.data_values.get(&(subject.to_string(), slot.to_string()))
    }

    /// Lists every violated world invariant.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut out = Vec::new();
        let known = |id: &str| self.individuals.contains(id);
        for (concept, ext) in &self.concept_extensions {
            for id in ext.iter().filter(|id| !known(id)) {
                out.push(format!("{} in {} is not a declared individual", id, concept));
            }
        }
        for (slot, tuples) in &self.slot_tuples {
            for (a, b) in tuples {
                if !known(a) || !known(b) {
                    out.push(format!("tuple {}({}, {}) uses an undeclared individual", slot, a, b));
                }
            }
        }
        for (id, slot) in self.data_values.keys() {
            if !known(id) {
                out.push(format!("data {}({}) uses an undeclared individual", slot, id));
            }
        }
        for r in &self.quality_records {
            if !self.has_tuple("inheres_in", &r.id, &r.bearer) || self.data(&r.id, "has_value_in") != Some(&r.value) {
                out.push(format!("quality record {} is not materialized", r.id));
            }
            for o in &r.observers {
                if !self.has_tuple("observed_by", &r.id, o) {
                    out.push(format!("quality record {} observer {} is not materialized", r.id, o));
                }
            }
        }
        out
    }
}

/// Whether `value` lies in `region` (units are compared by the callers that know them).
pub fn region_contains(region: &RegionExpr, value: &Value, world: &World) -> bool {
    match region {
        RegionExpr::Interval { low, high, .. } => value.as_num().is_some_and(|v| low <= v && v <= high),
        RegionExpr::ValueSet(values) => values.contains(value),
        RegionExpr::NamedRegion { name, .. } => match world.region_defs.get(name) {
            Some(RegionExpr::NamedRegion { name: inner, .. }) if inner == name => *value == Value::Str(name.clone()),
            Some(def) => region_contains(def, value, world),
            None => *value == Value::Str(name.clone()),
        },
    }
}
