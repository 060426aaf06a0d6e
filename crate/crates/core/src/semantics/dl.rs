//! The description-logic fragment targeted by the translation, with its standard interpretation over worlds.

use super::world::{region_contains, World};
use crate::model::RegionExpr;
use crate::value::{format_rational, Value};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CardKind {
    Min,
    Max,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DlConcept {
    Thing,
    Nothing,
    Atomic(String),
    /// `{a} ⊔ {b} ⊔ ...`
    Nominal(BTreeSet<String>),
    And(Vec<DlConcept>),
    Or(Vec<DlConcept>),
    Not(Box<DlConcept>),
    /// `∃ s.C`
    Some(String, Box<DlConcept>),
    /// `∀ s.C`
    Only(String, Box<DlConcept>),
    /// `1 s.C`: exactly one s-successor, and it is a C.
    One(String, Box<DlConcept>),
    /// Qualified number restriction `≥n / ≤n / =n s.C`.
    Cardinality { slot: String, kind: CardKind, n: u32, filler: Box<DlConcept> },
    /// `∃ s⁻.C`
    ExistsInverse(String, Box<DlConcept>),
    DataRange(RegionExpr),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DlAxiom {
    SubClassOf(DlConcept, DlConcept),
    Disjoint(DlConcept, DlConcept),
}

impl DlAxiom {
    /// The axiom as a subclass pair (`a ⊓ b ⊑ ⊥` for disjointness).
    pub fn as_subclass(&self) -> (DlConcept, DlConcept) {
        match self {
            DlAxiom::SubClassOf(a, b) => (a.clone(), b.clone()),
            DlAxiom::Disjoint(a, b) => (DlConcept::and(vec![a.clone(), b.clone()]), DlConcept::Nothing),
        }
    }
}

impl DlConcept {
    pub fn atomic(name: &str) -> Self {
        DlConcept::Atomic(name.to_string())
    }

    /// Flattening conjunction constructor; a single part is returned as is.
    pub fn and(parts: Vec<DlConcept>) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                DlConcept::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => DlConcept::Thing,
            1 => flat.pop().unwrap(),
            _ => DlConcept::And(flat),
        }
    }

    /// Flattening disjunction constructor; a single part is returned as is.
    pub fn or(parts: Vec<DlConcept>) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                DlConcept::Or(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => DlConcept::Nothing,
            1 => flat.pop().unwrap(),
            _ => DlConcept::Or(flat),
        }
    }

    pub fn some(slot: &str, filler: DlConcept) -> Self {
        DlConcept::Some(slot.to_string(), Box::new(filler))
    }

    pub fn only(slot: &str, filler: DlConcept) -> Self {
        DlConcept::Only(slot.to_string(), Box::new(filler))
    }

    pub fn one(slot: &str, filler: DlConcept) -> Self {
        DlConcept::One(slot.to_string(), Box::new(filler))
    }

    pub fn not(inner: DlConcept) -> Self {
        DlConcept::Not(Box::new(inner))
    }

    /// True when the concept denotes a set of data values rather than individuals.
    pub fn is_data(&self) -> bool {
        match self {
            DlConcept::DataRange(_) => true,
            DlConcept::And(parts) | DlConcept::Or(parts) => !parts.is_empty() && parts.iter().all(|p| p.is_data()),
            DlConcept::Not(inner) => inner.is_data(),
            _ => false,
        }
    }

    /// Conjuncts of a top-level intersection.
    pub fn conjuncts(&self) -> Vec<&DlConcept> {
        match self {
            DlConcept::And(parts) => parts.iter().collect(),
            other => vec![other],
        }
    }

    /// Visits every sub-concept, including the concept itself.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a DlConcept)) {
        f(self);
        match self {
            DlConcept::And(parts) | DlConcept::Or(parts) => parts.iter().for_each(|p| p.walk(f)),
            DlConcept::Not(inner)
            | DlConcept::Some(_, inner)
            | DlConcept::Only(_, inner)
            | DlConcept::One(_, inner)
            | DlConcept::ExistsInverse(_, inner) => inner.walk(f),
            DlConcept::Cardinality { filler, .. } => filler.walk(f),
            _ => {}
        }
    }
}

/// Whether a data value belongs to a data-level concept.
pub fn data_contains(c: &DlConcept, value: &Value, world: &World) -> bool {
    match c {
        DlConcept::DataRange(r) => region_contains(r, value, world),
        DlConcept::And(parts) => parts.iter().all(|p| data_contains(p, value, world)),
        DlConcept::Or(parts) => parts.iter().any(|p| data_contains(p, value, world)),
        DlConcept::Not(inner) => !data_contains(inner, value, world),
        DlConcept::Thing => true,
        _ => false,
    }
}

/// Counts (fillers in `filler`, all successors) of `x` along `slot`.
fn successor_counts(
    slot: &str,
    filler: &DlConcept,
    x: &str,
    world: &World,
    filler_ext: Option<&BTreeSet<String>>,
) -> (usize, usize) {
    match filler_ext {
        None => match world.data(x, slot) {
            Some(v) => (usize::from(data_contains(filler, v, world)), 1),
            None => (0, 0),
        },
        Some(ext) => {
            let succ = world.successors(slot, x);
            let hits = succ.iter().filter(|y| ext.contains(**y)).count();
            (hits, succ.len())
        }
    }
}

/// The standard interpretation of `c` in `world`.
pub fn eval_concept(c: &DlConcept, world: &World) -> BTreeSet<String> {
    match c {
        DlConcept::Thing => world.individuals.clone(),
        DlConcept::Nothing => BTreeSet::new(),
        DlConcept::Atomic(name) => world.extension(name).intersection(&world.individuals).cloned().collect(),
        DlConcept::Nominal(ids) => ids.intersection(&world.individuals).cloned().collect(),
        DlConcept::And(parts) => {
            let mut iter = parts.iter();
            let mut acc = match iter.next() {
                Some(first) => eval_concept(first, world),
                None => return world.individuals.clone(),
            };
            for p in iter {
                let ext = eval_concept(p, world);
                acc.retain(|x| ext.contains(x));
            }
            acc
        }
        DlConcept::Or(parts) => parts.iter().flat_map(|p| eval_concept(p, world)).collect(),
        DlConcept::Not(inner) => {
            let ext = eval_concept(inner, world);
            world.individuals.iter().filter(|x| !ext.contains(*x)).cloned().collect()
        }
        DlConcept::DataRange(_) => BTreeSet::new(),
        DlConcept::ExistsInverse(slot, filler) => {
            let ext = eval_concept(filler, world);
            let mut out = BTreeSet::new();
            if let Some(tuples) = world.slot_tuples.get(slot) {
                for (a, b) in tuples {
                    if ext.contains(a) {
                        out.insert(b.clone());
                    }
                }
            }
            out
        }
        DlConcept::Some(slot, filler)
        | DlConcept::Only(slot, filler)
        | DlConcept::One(slot, filler)
        | DlConcept::Cardinality { slot, filler, .. } => {
            let filler_ext = if filler.is_data() { None } else { Some(eval_concept(filler, world)) };
            world
                .individuals
                .iter()
                .filter(|x| {
                    let (hits, total) = successor_counts(slot, filler, x, world, filler_ext.as_ref());
                    match c {
                        DlConcept::Some(..) => hits >= 1,
                        DlConcept::Only(..) => hits == total,
                        DlConcept::One(..) => hits == 1 && total == 1,
                        DlConcept::Cardinality { kind, n, .. } => {
                            let n = *n as usize;
                            match kind {
                                CardKind::Min => hits >= n,
                                CardKind::Max => hits <= n,
                                CardKind::Exact => hits == n,
                            }
                        }
                        _ => unreachable!(),
                    }
                })
                .cloned()
                .collect()
        }
    }
}

fn fmt_region(r: &RegionExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match r {
        RegionExpr::NamedRegion { name, .. } => write!(f, "{}", name),
        RegionExpr::Interval { low, high, unit } => {
            write!(f, "((≥{}) ⊓ (≤{}))", format_rational(low), format_rational(high))?;
            if let Some(u) = unit {
                write!(f, "[{}]", u)?;
            }
            Ok(())
        }
        RegionExpr::ValueSet(values) => {
            let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
            write!(f, "{{{}}}", parts.join(", "))
        }
    }
}

impl fmt::Display for DlConcept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |c: &DlConcept| -> String {
            match c {
                DlConcept::And(_) | DlConcept::Or(_) => format!("({})", c),
                _ => c.to_string(),
            }
        };
        match self {
            DlConcept::Thing => f.write_str("⊤"),
            DlConcept::Nothing => f.write_str("⊥"),
            DlConcept::Atomic(n) => f.write_str(n),
            DlConcept::Nominal(ids) => {
                let parts: Vec<String> = ids.iter().map(|i| format!("{{{}}}", i)).collect();
                if parts.len() > 1 {
                    write!(f, "({})", parts.join(" ⊔ "))
                } else {
                    f.write_str(&parts.join(""))
                }
            }
            DlConcept::And(parts) => {
                let parts: Vec<String> = parts.iter().map(wrap).collect();
                f.write_str(&parts.join(" ⊓ "))
            }
            DlConcept::Or(parts) => {
                let parts: Vec<String> = parts.iter().map(wrap).collect();
                f.write_str(&parts.join(" ⊔ "))
            }
            DlConcept::Not(inner) => write!(f, "¬{}", wrap(inner)),
            DlConcept::Some(s, c) => write!(f, "∃{}.{}", s, wrap(c)),
            DlConcept::Only(s, c) => write!(f, "∀{}.{}", s, wrap(c)),
            DlConcept::One(s, c) => write!(f, "=1 {}.{}", s, wrap(c)),
            DlConcept::Cardinality { slot, kind, n, filler } => {
                let op = match kind {
                    CardKind::Min => "≥",
                    CardKind::Max => "≤",
                    CardKind::Exact => "=",
                };
                write!(f, "{}{} {}.{}", op, n, slot, wrap(filler))
            }
            DlConcept::ExistsInverse(s, c) => write!(f, "∃{}⁻.{}", s, wrap(c)),
            DlConcept::DataRange(r) => fmt_region(r, f),
        }
    }
}

impl fmt::Display for DlAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DlAxiom::SubClassOf(a, b) => write!(f, "{} ⊑ {}", a, b),
            DlAxiom::Disjoint(a, b) => write!(f, "{} ⊓ {} ⊑ ⊥", a, b),
        }
    }
}
