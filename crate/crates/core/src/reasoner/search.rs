//! Bounded counter-model search: depth-first assignment of a finite world with three-valued
//! (Kleene) evaluation used to prune partial assignments.

use super::structural::Prover;
use crate::model::RegionExpr;
use crate::semantics::{data_contains, eval_concept, CardKind, DlConcept, World};
use crate::value::{rat, Rational, Value};
use std::collections::{BTreeMap, BTreeSet};

/// Maximum number of search nodes per query.
const NODE_BUDGET: usize = 400_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum T3 {
    T,
    F,
    U,
}

impl T3 {
    fn from(b: bool) -> T3 {
        if b {
            T3::T
        } else {
            T3::F
        }
    }
    fn not(self) -> T3 {
        match self {
            T3::T => T3::F,
            T3::F => T3::T,
            T3::U => T3::U,
        }
    }
    fn and(self, o: T3) -> T3 {
        match (self, o) {
            (T3::F, _) | (_, T3::F) => T3::F,
            (T3::T, T3::T) => T3::T,
            _ => T3::U,
        }
    }
    fn or(self, o: T3) -> T3 {
        match (self, o) {
            (T3::T, _) | (_, T3::T) => T3::T,
            (T3::F, T3::F) => T3::F,
            _ => T3::U,
        }
    }
}

/// Result of a bounded search.
pub enum SearchOutcome {
    Found(World),
    /// Every world up to the bound was examined.
    Exhausted,
    /// The node budget ran out first.
    GaveUp,
}

#[derive(Default)]
struct Vocabulary {
    concepts: BTreeSet<String>,
    individuals: BTreeSet<String>,
    object_slots: BTreeSet<String>,
    data_slots: BTreeSet<String>,
    numbers: BTreeSet<Rational>,
    strings: BTreeSet<Value>,
    region_names: BTreeSet<String>,
}

impl Vocabulary {
    fn collect(&mut self, c: &DlConcept) {
        c.walk(&mut |x| match x {
            DlConcept::Atomic(n) => {
                self.concepts.insert(n.clone());
            }
            DlConcept::Nominal(ids) => self.individuals.extend(ids.iter().cloned()),
            DlConcept::Some(s, f)
            | DlConcept::Only(s, f)
            | DlConcept::One(s, f)
            | DlConcept::Cardinality { slot: s, filler: f, .. } => {
                if f.is_data() {
                    self.data_slots.insert(s.clone());
                } else {
                    self.object_slots.insert(s.clone());
                }
            }
            DlConcept::ExistsInverse(s, _) => {
                self.object_slots.insert(s.clone());
            }
            DlConcept::DataRange(r) => self.collect_region(r),
            _ => {}
        });
    }

    fn collect_region(&mut self, r: &RegionExpr) {
        match r {
            RegionExpr::Interval { low, high, .. } => {
                let one = rat(1);
                let two = rat(2);
                self.numbers.insert(low.clone());
                self.numbers.insert(high.clone());
                self.numbers.insert(low - &one);
                self.numbers.insert(high + &one);
                self.numbers.insert((low + high) / two);
            }
            RegionExpr::ValueSet(values) => {
                for v in values {
                    match v {
                        Value::Num(n) => {
                            self.numbers.insert(n.clone());
                            self.numbers.insert(n + rat(1));
                        }
                        Value::Str(_) => {
                            self.strings.insert(v.clone());
                        }
                    }
                }
            }
            RegionExpr::NamedRegion { name, .. } => {
                self.region_names.insert(name.clone());
                self.strings.insert(Value::Str(name.clone()));
            }
        }
    }
}

#[derive(Clone, Copy)]
enum Var {
    Concept(usize, usize),
    Data(usize, usize),
    Edge(usize, usize, usize),
}

struct Search<'a> {
    names: Vec<String>,
    concept_ix: BTreeMap<String, usize>,
    object_ix: BTreeMap<String, usize>,
    data_ix: BTreeMap<String, usize>,
    candidates: Vec<Value>,
    conc: Vec<Vec<Option<bool>>>,
    data: Vec<Vec<Option<Option<usize>>>>,
    edge: Vec<Vec<Vec<Option<bool>>>>,
    order: Vec<Var>,
    sub: &'a DlConcept,
    sup: &'a DlConcept,
    axioms: &'a [(DlConcept, DlConcept)],
    regions: World,
    nodes: usize,
}

impl<'a> Search<'a> {
    fn eval(&self, c: &DlConcept, i: usize) -> T3 {
        match c {
            DlConcept::Thing => T3::T,
            DlConcept::Nothing | DlConcept::DataRange(_) => T3::F,
            DlConcept::Atomic(a) => match self.concept_ix.get(a) {
                Some(&k) => self.conc[k][i].map_or(T3::U, T3::from),
                None => T3::F,
            },
            DlConcept::Nominal(ids) => T3::from(ids.contains(&self.names[i])),
            DlConcept::And(parts) => parts.iter().fold(T3::T, |acc, p| if acc == T3::F { acc } else { acc.and(self.eval(p, i)) }),
            DlConcept::Or(parts) => parts.iter().fold(T3::F, |acc, p| if acc == T3::T { acc } else { acc.or(self.eval(p, i)) }),
            DlConcept::Not(inner) => self.eval(inner, i).not(),
            DlConcept::ExistsInverse(s, f) => {
                let Some(&k) = self.object_ix.get(s) else { return T3::F };
                let mut acc = T3::F;
                for j in 0..self.names.len() {
                    let e = self.edge[k][j][i].map_or(T3::U, T3::from);
                    if e == T3::F {
                        continue;
                    }
                    acc = acc.or(e.and(self.eval(f, j)));
                    if acc == T3::T {
                        break;
                    }
                }
                acc
            }
            DlConcept::Some(s, f) | DlConcept::Only(s, f) | DlConcept::One(s, f) | DlConcept::Cardinality { slot: s, filler: f, .. } => {
                if f.is_data() {
                    self.eval_data(c, s, f, i)
                } else {
                    self.eval_object(c, s, f, i)
                }
            }
        }
    }

    fn eval_data(&self, c: &DlConcept, s: &str, f: &DlConcept, i: usize) -> T3 {
        let Some(&k) = self.data_ix.get(s) else { return T3::from(counts_hold(c, 0, 0)) };
        match self.data[k][i] {
            None => T3::U,
            Some(None) => T3::from(counts_hold(c, 0, 0)),
            Some(Some(v)) => {
                let hit = usize::from(data_contains(f, &self.candidates[v], &self.regions));
                T3::from(counts_hold(c, hit, 1))
            }
        }
    }

    fn eval_object(&self, c: &DlConcept, s: &str, f: &DlConcept, i: usize) -> T3 {
        let n = self.names.len();
        let (mut hits_min, mut hits_max, mut tot_min, mut tot_max) = (0, 0, 0, 0);
        let mut sure_bad = false;
        let mut sure_single_good = None;
        if let Some(&k) = self.object_ix.get(s) {
            for j in 0..n {
                let e = self.edge[k][i][j].map_or(T3::U, T3::from);
                if e == T3::F {
                    continue;
                }
                let fj = self.eval(f, j);
                if e == T3::T {
                    tot_min += 1;
                    if fj == T3::T {
                        hits_min += 1;
                    }
                    if fj == T3::F {
                        sure_bad = true;
                    }
                    sure_single_good = Some(fj == T3::T);
                }
                tot_max += 1;
                if fj != T3::F {
                    hits_max += 1;
                }
            }
        }
        match c {
            DlConcept::Some(..) => {
                if hits_min >= 1 {
                    T3::T
                } else if hits_max == 0 {
                    T3::F
                } else {
                    T3::U
                }
            }
            DlConcept::Only(..) => {
                if sure_bad {
                    T3::F
                } else if hits_min == tot_max {
                    T3::T
                } else {
                    T3::U
                }
            }
            DlConcept::One(..) => {
                if tot_min >= 2 || tot_max == 0 || sure_bad {
                    T3::F
                } else if tot_min == 1 && tot_max == 1 && sure_single_good == Some(true) {
                    T3::T
                } else {
                    T3::U
                }
            }
            DlConcept::Cardinality { kind, n, .. } => {
                let n = *n as usize;
                match kind {
                    CardKind::Min if hits_min >= n => T3::T,
                    CardKind::Min if hits_max < n => T3::F,
                    CardKind::Max if hits_max <= n => T3::T,
                    CardKind::Max if hits_min > n => T3::F,
                    CardKind::Exact if hits_min == n && hits_max == n => T3::T,
                    CardKind::Exact if hits_min > n || hits_max < n => T3::F,
                    _ => T3::U,
                }
            }
            _ => T3::U,
        }
    }

    /// Three-valued status of all constraints.
    fn status(&self) -> T3 {
        let n = self.names.len();
        let mut goal = T3::F;
        for i in 0..n {
            goal = goal.or(self.eval(self.sub, i).and(self.eval(self.sup, i).not()));
            if goal == T3::T {
                break;
            }
        }
        if goal == T3::F {
            return T3::F;
        }
        let mut all = goal;
        for (l, r) in self.axioms {
            for i in 0..n {
                let holds = self.eval(l, i).not().or(self.eval(r, i));
                if holds == T3::F {
                    return T3::F;
                }
                all = all.and(holds);
            }
        }
        all
    }

    fn dfs(&mut self, k: usize) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > NODE_BUDGET {
            return None;
        }
        match self.status() {
            T3::F => return Some(false),
            T3::T => return Some(true),
            T3::U if k == self.order.len() => return Some(false),
            T3::U => {}
        }
        match self.order[k] {
            Var::Concept(c, i) => {
                for v in [true, false] {
                    self.conc[c][i] = Some(v);
                    if self.dfs(k + 1)? {
                        return Some(true);
                    }
                }
                self.conc[c][i] = None;
            }
            Var::Edge(s, i, j) => {
                for v in [false, true] {
                    self.edge[s][i][j] = Some(v);
                    if self.dfs(k + 1)? {
                        return Some(true);
                    }
                }
                self.edge[s][i][j] = None;
            }
            Var::Data(t, i) => {
                let options: Vec<Option<usize>> =
                    std::iter::once(None).chain((0..self.candidates.len()).map(Some)).collect();
                for v in options {
                    self.data[t][i] = Some(v);
                    if self.dfs(k + 1)? {
                        return Some(true);
                    }
                }
                self.data[t][i] = None;
            }
        }
        Some(false)
    }

    /// Completes unassigned variables with defaults and builds the world.
    fn world(&self) -> World {
        let mut w = self.regions.clone();
        for name in &self.names {
            w.add_individual(name);
        }
        for (c, &k) in &self.concept_ix {
            for (i, name) in self.names.iter().enumerate() {
                if self.conc[k][i] == Some(true) {
                    w.assert_concept(c, name);
                }
            }
        }
        for (s, &k) in &self.object_ix {
            for i in 0..self.names.len() {
                for j in 0..self.names.len() {
                    if self.edge[k][i][j] == Some(true) {
                        w.assert_slot(s, &self.names[i], &self.names[j]);
                    }
                }
            }
        }
        for (s, &k) in &self.data_ix {
            for (i, name) in self.names.iter().enumerate() {
                if let Some(Some(v)) = self.data[k][i] {
                    w.assert_data(s, name, self.candidates[v].clone());
                }
            }
        }
        w
    }
}

fn counts_hold(c: &DlConcept, hits: usize, total: usize) -> bool {
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
        _ => false,
    }
}

/// Searches worlds with at most `bound` anonymous individuals (plus the named ones) that satisfy
/// every axiom and contain a member of `sub` outside `sup`.
pub fn find_counter_model(
    sub: &DlConcept,
    sup: &DlConcept,
    axioms: &[(DlConcept, DlConcept)],
    bound: usize,
    prover: &Prover,
) -> SearchOutcome {
    let mut voc = Vocabulary::default();
    voc.collect(sub);
    voc.collect(sup);
    for (l, r) in axioms {
        voc.collect(l);
        voc.collect(r);
    }
    let mut regions = World::new();
    for name in &voc.region_names {
        let members: Vec<Value> =
            voc.region_names.iter().filter(|t| prover.atomic_sub(t, name)).map(|t| Value::Str(t.clone())).collect();
        regions.region_defs.insert(name.clone(), RegionExpr::ValueSet(members));
    }
    if !voc.data_slots.is_empty() && voc.numbers.is_empty() && voc.strings.is_empty() {
        voc.numbers.insert(rat(0));
    }
    let candidates: Vec<Value> =
        voc.numbers.iter().cloned().map(Value::Num).chain(voc.strings.iter().cloned()).collect();
    let concept_ix: BTreeMap<String, usize> = voc.concepts.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let object_ix: BTreeMap<String, usize> = voc.object_slots.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let data_ix: BTreeMap<String, usize> = voc.data_slots.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();

    let named: Vec<String> = voc.individuals.iter().cloned().collect();
    let start = if named.is_empty() { 1 } else { 0 };
    let mut nodes = 0;
    let mut gave_up = false;
    for anonymous in start..=bound {
        let mut names: Vec<String> = Vec::new();
        let mut k = 0;
        while names.len() < anonymous {
            k += 1;
            let candidate = format!("x{}", k);
            if !voc.individuals.contains(&candidate) {
                names.push(candidate);
            }
        }
        names.extend(named.iter().cloned());
        let n = names.len();
        let mut order = Vec::new();
        for i in 0..n {
            for c in 0..concept_ix.len() {
                order.push(Var::Concept(c, i));
            }
            for t in 0..data_ix.len() {
                order.push(Var::Data(t, i));
            }
            for s in 0..object_ix.len() {
                for j in 0..n {
                    order.push(Var::Edge(s, i, j));
                }
            }
        }
        let mut search = Search {
            names,
            concept_ix: concept_ix.clone(),
            object_ix: object_ix.clone(),
            data_ix: data_ix.clone(),
            candidates: candidates.clone(),
            conc: vec![vec![None; n]; concept_ix.len()],
            data: vec![vec![None; n]; data_ix.len()],
            edge: vec![vec![vec![None; n]; n]; object_ix.len()],
            order,
            sub,
            sup,
            axioms,
            regions: regions.clone(),
            nodes,
        };
        match search.dfs(0) {
            Some(true) => {
                let world = search.world();
                if verify(sub, sup, axioms, &world) {
                    return SearchOutcome::Found(world);
                }
                gave_up = true;
            }
            Some(false) => {}
            None => {
                gave_up = true;
                break;
            }
        }
        nodes = search.nodes;
    }
    if gave_up {
        SearchOutcome::GaveUp
    } else {
        SearchOutcome::Exhausted
    }
}

/// Checks a candidate counter-model with the two-valued interpretation.
pub fn verify(sub: &DlConcept, sup: &DlConcept, axioms: &[(DlConcept, DlConcept)], world: &World) -> bool {
    let sub_ext = eval_concept(sub, world);
    let sup_ext = eval_concept(sup, world);
    if sub_ext.is_subset(&sup_ext) {
        return false;
    }
    axioms.iter().all(|(l, r)| eval_concept(l, world).is_subset(&eval_concept(r, world)))
}
