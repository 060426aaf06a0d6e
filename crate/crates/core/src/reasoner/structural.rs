//! Sound, incomplete structural subsumption over the description-logic fragment.

use crate::model::RegionExpr;
use crate::semantics::{CardKind, DlAxiom, DlConcept};
use crate::value::Value;
use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};

/// Canonical form: flattened and sorted conjunctions/disjunctions, merged nominals, unit and zero laws.
pub fn normalize_dl(c: &DlConcept) -> DlConcept {
    match c {
        DlConcept::And(parts) => {
            let mut flat = BTreeSet::new();
            let mut nominal: Option<BTreeSet<String>> = None;
            for p in parts {
                let n = normalize_dl(p);
                let inner = match n {
                    DlConcept::And(inner) => inner,
                    other => vec![other],
                };
                for q in inner {
                    match q {
                        DlConcept::Thing => {}
                        DlConcept::Nothing => return DlConcept::Nothing,
                        DlConcept::Nominal(ids) => {
                            nominal = Some(match nominal {
                                None => ids,
                                Some(prev) => prev.intersection(&ids).cloned().collect(),
                            })
                        }
                        other => {
                            flat.insert(other);
                        }
                    }
                }
            }
            if let Some(ids) = nominal {
                if ids.is_empty() {
                    return DlConcept::Nothing;
                }
                flat.insert(DlConcept::Nominal(ids));
            }
            match flat.len() {
                0 => DlConcept::Thing,
                1 => flat.into_iter().next().unwrap(),
                _ => DlConcept::And(flat.into_iter().collect()),
            }
        }
        DlConcept::Or(parts) => {
            let mut flat = BTreeSet::new();
            let mut nominal: BTreeSet<String> = BTreeSet::new();
            for p in parts {
                let n = normalize_dl(p);
                let inner = match n {
                    DlConcept::Or(inner) => inner,
                    other => vec![other],
                };
                for q in inner {
                    match q {
                        DlConcept::Nothing => {}
                        DlConcept::Thing => return DlConcept::Thing,
                        DlConcept::Nominal(ids) => nominal.extend(ids),
                        other => {
                            flat.insert(other);
                        }
                    }
                }
            }
            if !nominal.is_empty() {
                flat.insert(DlConcept::Nominal(nominal));
            }
            match flat.len() {
                0 => DlConcept::Nothing,
                1 => flat.into_iter().next().unwrap(),
                _ => DlConcept::Or(flat.into_iter().collect()),
            }
        }
        DlConcept::Not(inner) => match normalize_dl(inner) {
            DlConcept::Not(x) => *x,
            DlConcept::Thing => DlConcept::Nothing,
            DlConcept::Nothing => DlConcept::Thing,
            other => DlConcept::not(other),
        },
        DlConcept::Some(s, f) => match normalize_dl(f) {
            DlConcept::Nothing => DlConcept::Nothing,
            f => DlConcept::Some(s.clone(), Box::new(f)),
        },
        DlConcept::One(s, f) => match normalize_dl(f) {
            DlConcept::Nothing => DlConcept::Nothing,
            f => DlConcept::One(s.clone(), Box::new(f)),
        },
        DlConcept::Only(s, f) => match normalize_dl(f) {
            DlConcept::Thing => DlConcept::Thing,
            f => DlConcept::Only(s.clone(), Box::new(f)),
        },
        DlConcept::ExistsInverse(s, f) => match normalize_dl(f) {
            DlConcept::Nothing => DlConcept::Nothing,
            f => DlConcept::ExistsInverse(s.clone(), Box::new(f)),
        },
        DlConcept::Cardinality { slot, kind, n, filler } => {
            let f = normalize_dl(filler);
            match (kind, &f) {
                (CardKind::Min | CardKind::Exact, DlConcept::Nothing) if *n >= 1 => DlConcept::Nothing,
                (CardKind::Max, DlConcept::Nothing) => DlConcept::Thing,
                _ => DlConcept::Cardinality { slot: slot.clone(), kind: *kind, n: *n, filler: Box::new(f) },
            }
        }
        DlConcept::Nominal(ids) if ids.is_empty() => DlConcept::Nothing,
        other => other.clone(),
    }
}

/// Structural prover holding the preprocessed axioms.
pub struct Prover {
    /// Told super-concepts of atomic names (right-hand sides, normalized).
    told: BTreeMap<String, Vec<DlConcept>>,
    /// Reflexive-transitive atomic closure.
    atomic_supers: BTreeMap<String, BTreeSet<String>>,
    /// Axioms with a non-atomic left-hand side.
    general: Vec<(DlConcept, DlConcept)>,
    budget: Cell<usize>,
}

const MAX_DEPTH: usize = 6;
const BUDGET: usize = 200_000;

impl Prover {
    pub fn new(axioms: &[DlAxiom]) -> Self {
        let mut told: BTreeMap<String, Vec<DlConcept>> = BTreeMap::new();
        let mut general = Vec::new();
        for axiom in axioms {
            let (l, r) = axiom.as_subclass();
            let (l, r) = (normalize_dl(&l), normalize_dl(&r));
            match l {
                DlConcept::Atomic(name) => told.entry(name).or_default().push(r),
                other => general.push((other, r)),
            }
        }
        let mut atomic_supers: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for name in told.keys() {
            let mut seen: BTreeSet<String> = [name.clone()].into_iter().collect();
            let mut stack = vec![name.clone()];
            while let Some(n) = stack.pop() {
                for r in told.get(&n).into_iter().flatten() {
                    for c in r.conjuncts() {
                        if let DlConcept::Atomic(m) = c {
                            if seen.insert(m.clone()) {
                                stack.push(m.clone());
                            }
                        }
                    }
                }
            }
            atomic_supers.insert(name.clone(), seen);
        }
        Prover { told, atomic_supers, general, budget: Cell::new(BUDGET) }
    }

    /// True when `a ⊑ b` follows from atomic axioms (names of concepts and of regions).
    pub fn atomic_sub(&self, a: &str, b: &str) -> bool {
        a == b || self.atomic_supers.get(a).is_some_and(|s| s.contains(b))
    }

    /// Decides `sub ⊑ sup` structurally; false means "not derived".
    pub fn proves(&self, sub: &DlConcept, sup: &DlConcept) -> bool {
        self.budget.set(BUDGET);
        self.prove(&normalize_dl(sub), &normalize_dl(sup), MAX_DEPTH)
    }

    fn spend(&self) -> bool {
        let left = self.budget.get();
        if left == 0 {
            return false;
        }
        self.budget.set(left - 1);
        true
    }

    fn prove(&self, c: &DlConcept, d: &DlConcept, depth: usize) -> bool {
        if !self.spend() {
            return false;
        }
        if c == d || *d == DlConcept::Thing || *c == DlConcept::Nothing {
            return true;
        }
        if let DlConcept::And(ds) = d {
            return ds.iter().all(|di| self.prove(c, di, depth));
        }
        if let DlConcept::Or(cs) = c {
            return cs.iter().all(|ci| self.prove(ci, d, depth));
        }
        if c.is_data() || d.is_data() {
            return self.data_sub(c, d);
        }
        let facts = self.saturate(c, depth);
        if self.unsatisfiable(&facts, depth) {
            return true;
        }
        if depth > 0 {
            if let Some(split) = facts.iter().find(|f| matches!(f, DlConcept::Or(_))) {
                let DlConcept::Or(branches) = split else { unreachable!() };
                let rest: Vec<DlConcept> = facts.iter().filter(|f| *f != split).cloned().collect();
                let all = branches.iter().all(|b| {
                    let mut parts = rest.clone();
                    parts.push(b.clone());
                    self.prove(&normalize_dl(&DlConcept::And(parts)), d, depth - 1)
                });
                if all {
                    return true;
                }
            }
        }
        self.matches_facts(&facts, d, depth)
    }

    fn matches_facts(&self, facts: &BTreeSet<DlConcept>, d: &DlConcept, depth: usize) -> bool {
        match d {
            DlConcept::Or(ds) => {
                let whole = DlConcept::and(facts.iter().cloned().collect());
                ds.iter().any(|di| self.matches_facts(facts, di, depth) || (depth > 0 && self.prove(&whole, di, depth - 1)))
            }
            DlConcept::Not(e) => {
                if depth == 0 {
                    return false;
                }
                let mut parts: Vec<DlConcept> = facts.iter().cloned().collect();
                parts.push((**e).clone());
                let combined = normalize_dl(&DlConcept::And(parts));
                combined == DlConcept::Nothing || self.unsatisfiable(&self.saturate(&combined, depth - 1), depth - 1)
            }
            DlConcept::Nothing => false,
            _ => facts.iter().any(|f| self.match_one(f, d, depth)),
        }
    }

    /// Conjuncts of `c` closed under told axioms, general axioms and ∀/∃ interaction.
    fn saturate(&self, c: &DlConcept, depth: usize) -> BTreeSet<DlConcept> {
        let mut facts: BTreeSet<DlConcept> = c.conjuncts().into_iter().cloned().collect();
        for _ in 0..8 {
            let mut added = Vec::new();
            for f in &facts {
                if let DlConcept::Atomic(name) = f {
                    for r in self.told.get(name).into_iter().flatten() {
                        added.extend(r.conjuncts().into_iter().cloned());
                    }
                }
            }
            if depth > 0 && !self.general.is_empty() {
                let whole = DlConcept::and(facts.iter().cloned().collect());
                for (l, r) in &self.general {
                    if self.cheap_lhs(&facts, l) || self.prove(&whole, l, depth - 1) {
                        added.extend(r.conjuncts().into_iter().cloned());
                    }
                }
            }
            for f in &facts {
                if let DlConcept::Only(s, all) = f {
                    for g in &facts {
                        match g {
                            DlConcept::Some(t, e) if t == s && !e.is_data() => added.push(normalize_dl(&DlConcept::some(
                                s,
                                DlConcept::and(vec![(**e).clone(), (**all).clone()]),
                            ))),
                            DlConcept::One(t, e) if t == s && !e.is_data() => added.push(normalize_dl(&DlConcept::one(
                                s,
                                DlConcept::and(vec![(**e).clone(), (**all).clone()]),
                            ))),
                            _ => {}
                        }
                    }
                }
            }
            let before = facts.len();
            for a in added {
                match normalize_dl(&a) {
                    DlConcept::And(inner) => facts.extend(inner),
                    DlConcept::Thing => {}
                    other => {
                        facts.insert(other);
                    }
                }
            }
            if facts.len() == before || facts.len() > 256 {
                break;
            }
        }
        facts
    }

    fn cheap_lhs(&self, facts: &BTreeSet<DlConcept>, l: &DlConcept) -> bool {
        l.conjuncts().iter().all(|lc| facts.contains(*lc))
    }

    fn unsatisfiable(&self, facts: &BTreeSet<DlConcept>, depth: usize) -> bool {
        if facts.contains(&DlConcept::Nothing) {
            return true;
        }
        let atoms: Vec<&String> = facts
            .iter()
            .filter_map(|f| if let DlConcept::Atomic(n) = f { Some(n) } else { None })
            .collect();
        for f in facts {
            match f {
                DlConcept::Not(inner) => match &**inner {
                    DlConcept::Atomic(y) if atoms.iter().any(|x| self.atomic_sub(x, y)) => return true,
                    other if facts.contains(other) => return true,
                    _ => {}
                },
                DlConcept::Some(_, e) | DlConcept::One(_, e) | DlConcept::ExistsInverse(_, e)
                    if depth > 0 && !e.is_data() =>
                {
                    let inner = self.saturate(e, depth - 1);
                    if self.unsatisfiable(&inner, depth - 1) {
                        return true;
                    }
                }
                _ => {}
            }
        }
        let nominals: Vec<&BTreeSet<String>> = facts
            .iter()
            .filter_map(|f| if let DlConcept::Nominal(ids) = f { Some(ids) } else { None })
            .collect();
        if nominals.len() > 1 {
            let mut common = nominals[0].clone();
            for n in &nominals[1..] {
                common = common.intersection(n).cloned().collect();
            }
            if common.is_empty() {
                return true;
            }
        }
        false
    }

    fn match_one(&self, f: &DlConcept, d: &DlConcept, depth: usize) -> bool {
        // Object and data fillers are evaluated differently, so they never compare.
        let sub = |e: &DlConcept, g: &DlConcept| e.is_data() == g.is_data() && self.prove(e, g, depth);
        match (f, d) {
            (DlConcept::Atomic(a), DlConcept::Atomic(b)) => self.atomic_sub(a, b),
            (DlConcept::Nominal(xs), DlConcept::Nominal(ys)) => xs.is_subset(ys),
            (DlConcept::Some(s, e) | DlConcept::One(s, e), DlConcept::Some(t, g)) => s == t && sub(e, g),
            (DlConcept::Cardinality { slot, kind: CardKind::Min | CardKind::Exact, n, filler }, DlConcept::Some(t, g)) => {
                *n >= 1 && slot == t && sub(filler, g)
            }
            (DlConcept::Only(s, e) | DlConcept::One(s, e), DlConcept::Only(t, g)) => s == t && sub(e, g),
            (DlConcept::One(s, e), DlConcept::One(t, g)) => s == t && sub(e, g),
            (
                DlConcept::Cardinality { slot, kind: CardKind::Min | CardKind::Exact, n, filler },
                DlConcept::Cardinality { slot: t, kind: CardKind::Min, n: m, filler: g },
            ) => slot == t && n >= m && sub(filler, g),
            (DlConcept::One(s, e) | DlConcept::Some(s, e), DlConcept::Cardinality { slot: t, kind: CardKind::Min, n: 1, filler: g }) => {
                s == t && sub(e, g)
            }
            (
                DlConcept::Cardinality { slot, kind: CardKind::Max | CardKind::Exact, n, filler },
                DlConcept::Cardinality { slot: t, kind: CardKind::Max, n: m, filler: g },
            ) => slot == t && n <= m && sub(g, filler),
            (DlConcept::One(s, _), DlConcept::Cardinality { slot: t, kind: CardKind::Max, n, .. }) => s == t && *n >= 1,
            (
                DlConcept::Cardinality { slot, kind: CardKind::Exact, n, filler },
                DlConcept::Cardinality { slot: t, kind: CardKind::Exact, n: m, filler: g },
            ) => slot == t && n == m && sub(filler, g) && sub(g, filler),
            (DlConcept::One(s, e), DlConcept::Cardinality { slot: t, kind: CardKind::Exact, n: 1, filler: g }) => {
                s == t && sub(e, g)
            }
            (DlConcept::ExistsInverse(s, e), DlConcept::ExistsInverse(t, g)) => s == t && sub(e, g),
            _ => false,
        }
    }

    /// Containment between data-level concepts.
    fn data_sub(&self, c: &DlConcept, d: &DlConcept) -> bool {
        match (c, d) {
            (_, DlConcept::Thing) | (DlConcept::Nothing, _) => true,
            (_, DlConcept::And(ds)) => ds.iter().all(|di| self.data_sub(c, di)),
            (DlConcept::Or(cs), _) => cs.iter().all(|ci| self.data_sub(ci, d)),
            (DlConcept::And(cs), _) => cs.iter().any(|ci| self.data_sub(ci, d)),
            (_, DlConcept::Or(ds)) => ds.iter().any(|di| self.data_sub(c, di)),
            (DlConcept::DataRange(r), DlConcept::DataRange(q)) => self.region_sub(r, q),
            _ => c == d,
        }
    }

    /// Region containment; named regions use the atomic axiom closure.
    pub fn region_sub(&self, r: &RegionExpr, q: &RegionExpr) -> bool {
        match (r, q) {
            _ if r == q => true,
            (
                RegionExpr::Interval { low: l1, high: h1, unit: u1 },
                RegionExpr::Interval { low: l2, high: h2, unit: u2 },
            ) => l1 > h1 || (u1 == u2 && l2 <= l1 && h1 <= h2),
            (RegionExpr::ValueSet(vs), RegionExpr::Interval { low, high, .. }) => {
                vs.iter().all(|v| matches!(v, Value::Num(n) if low <= n && n <= high))
            }
            (RegionExpr::ValueSet(vs), RegionExpr::ValueSet(ws)) => vs.iter().all(|v| ws.contains(v)),
            (RegionExpr::NamedRegion { name: a, .. }, RegionExpr::NamedRegion { name: b, .. }) => self.atomic_sub(a, b),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::rat;

    fn a(n: &str) -> DlConcept {
        DlConcept::atomic(n)
    }

    #[test]
    fn axiom_chaining_and_fillers() {
        let p = Prover::new(&[DlAxiom::SubClassOf(a("Airline_ticket"), a("Ticket"))]);
        let sub = DlConcept::and(vec![a("Book"), DlConcept::one("object", a("Airline_ticket"))]);
        let sup = DlConcept::and(vec![a("Book"), DlConcept::one("object", a("Ticket"))]);
        assert!(p.proves(&sub, &sup));
        assert!(!p.proves(&sup, &sub));
    }

    #[test]
    fn disjointness_makes_conjunction_empty() {
        let p = Prover::new(&[DlAxiom::Disjoint(a("A"), a("B"))]);
        assert!(p.proves(&DlConcept::and(vec![a("A"), a("B")]), &DlConcept::Nothing));
        assert!(p.proves(&DlConcept::and(vec![a("A"), a("B")]), &a("C")));
        assert!(!p.proves(&a("A"), &DlConcept::Nothing));
    }

    #[test]
    fn intervals_and_cardinalities() {
        let p = Prover::new(&[]);
        let r = |l, h| DlConcept::some("v", DlConcept::DataRange(RegionExpr::interval(rat(l), rat(h), None)));
        assert!(p.proves(&r(0, 30), &r(0, 40)));
        assert!(!p.proves(&r(0, 40), &r(0, 30)));
        let card = |kind, n| DlConcept::Cardinality { slot: "s".into(), kind, n, filler: Box::new(a("C")) };
        assert!(p.proves(&card(CardKind::Min, 3), &card(CardKind::Min, 2)));
        assert!(p.proves(&card(CardKind::Max, 2), &card(CardKind::Max, 3)));
        assert!(!p.proves(&card(CardKind::Min, 2), &card(CardKind::Min, 3)));
    }

    #[test]
    fn negation_and_disjunction() {
        let p = Prover::new(&[]);
        assert!(p.proves(&a("A"), &DlConcept::or(vec![a("A"), a("B")])));
        assert!(p.proves(&DlConcept::and(vec![a("A"), DlConcept::not(a("B"))]), &DlConcept::not(a("B"))));
        let split = DlConcept::and(vec![DlConcept::or(vec![a("A"), a("B")]), DlConcept::not(a("B"))]);
        assert!(p.proves(&split, &a("A")));
    }
}
