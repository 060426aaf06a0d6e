//! Shared fixtures, generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use dsr::parser::parse_model;
use dsr::reasoner::Prover;
use dsr::semantics::{eval_description, translate_description, World};
use dsr::{CardinalityModifier, Description, Model};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

pub const CONCEPTS: [&str; 2] = ["A", "B"];
pub const SLOTS: [&str; 2] = ["r", "s"];
pub const INDIVIDUALS: [&str; 2] = ["i", "j"];
/// Individuals a world may contain besides the named ones.
pub const ANONYMOUS: [&str; 2] = ["k", "l"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("cannot read fixture {}: {}", name, e))
}

pub fn load(name: &str) -> Model {
    parse_model(&fixture(name)).unwrap_or_else(|d| panic!("fixture {} does not parse: {:?}", name, d))
}

pub fn all_fixtures() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(fixture_path(""))
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".dsr"))
        .collect();
    names.sort();
    names
}

fn random_modifier(rng: &mut ChaCha8Rng) -> CardinalityModifier {
    match rng.gen_range(0..7) {
        0 | 1 => CardinalityModifier::ExactlyOne,
        2 => CardinalityModifier::Some,
        3 => CardinalityModifier::Only,
        4 => CardinalityModifier::AtLeast(rng.gen_range(1..=2)),
        5 => CardinalityModifier::AtMost(rng.gen_range(1..=2)),
        _ => CardinalityModifier::Exactly(rng.gen_range(1..=2)),
    }
}

fn random_leaf(rng: &mut ChaCha8Rng) -> Description {
    match rng.gen_range(0..8) {
        0 => Description::Thing,
        1 => Description::Nothing,
        2 => Description::individuals(&[*INDIVIDUALS.choose(rng).unwrap()]),
        3 => Description::individuals(&INDIVIDUALS),
        _ => Description::atomic(CONCEPTS.choose(rng).unwrap()),
    }
}

/// A random description over the small vocabulary with at most `depth` nested constructors.
pub fn random_description(rng: &mut ChaCha8Rng, depth: usize) -> Description {
    if depth == 0 || rng.gen_bool(0.25) {
        return random_leaf(rng);
    }
    let slot = *SLOTS.choose(rng).unwrap();
    match rng.gen_range(0..6) {
        0 => Description::and(random_description(rng, depth - 1), random_description(rng, depth - 1)),
        1 => Description::or(random_description(rng, depth - 1), random_description(rng, depth - 1)),
        2 => Description::minus(random_description(rng, depth - 1), random_description(rng, depth - 1)),
        3 => Description::inverse(random_description(rng, depth - 1), slot),
        _ => Description::slot(slot, random_modifier(rng), random_description(rng, depth - 1)),
    }
}

/// Candidate subsumption pairs, biased towards pairs the structural prover can decide.
pub fn random_pair(rng: &mut ChaCha8Rng) -> (Description, Description) {
    let c = random_description(rng, 2);
    let x = random_description(rng, 2);
    let slot = *SLOTS.choose(rng).unwrap();
    match rng.gen_range(0..9) {
        0 => (c.clone(), Description::or(c, x)),
        1 => (Description::and(c.clone(), x), c),
        2 => (Description::minus(c.clone(), x), c),
        3 => {
            let m = *[
                CardinalityModifier::ExactlyOne,
                CardinalityModifier::Some,
                CardinalityModifier::Only,
                CardinalityModifier::AtLeast(1),
                CardinalityModifier::AtLeast(2),
            ]
            .choose(rng)
            .unwrap();
            (Description::slot(slot, m, c.clone()), Description::slot(slot, m, Description::or(c, x)))
        }
        4 => {
            let n = rng.gen_range(1..=2);
            let m = CardinalityModifier::AtMost(n);
            (Description::slot(slot, m, Description::or(c.clone(), x)), Description::slot(slot, m, c))
        }
        5 => (Description::inverse(Description::and(c.clone(), x), slot), Description::inverse(c, slot)),
        6 => (
            Description::slot(slot, CardinalityModifier::ExactlyOne, c.clone()),
            Description::slot(slot, CardinalityModifier::Some, c),
        ),
        7 => (Description::individuals(&[INDIVIDUALS[0]]), Description::individuals(&INDIVIDUALS)),
        _ => (random_description(rng, 3), random_description(rng, 3)),
    }
}

/// Every world whose domain is one of `domains`, with every assignment of the vocabulary.
pub fn enumerate_worlds(domain: &[&str]) -> Vec<World> {
    let pairs: Vec<(&str, &str)> = domain.iter().flat_map(|a| domain.iter().map(move |b| (*a, *b))).collect();
    let concept_bits = CONCEPTS.len() * domain.len();
    let slot_bits = SLOTS.len() * pairs.len();
    let total_bits = concept_bits + slot_bits;
    let mut out = Vec::with_capacity(1 << total_bits);
    for mask in 0u64..(1u64 << total_bits) {
        let mut w = World::new();
        for id in domain {
            w.add_individual(id);
        }
        for (ci, c) in CONCEPTS.iter().enumerate() {
            for (di, id) in domain.iter().enumerate() {
                if mask & (1 << (ci * domain.len() + di)) != 0 {
                    w.assert_concept(c, id);
                }
            }
        }
        for (si, s) in SLOTS.iter().enumerate() {
            for (pi, (a, b)) in pairs.iter().enumerate() {
                if mask & (1 << (concept_bits + si * pairs.len() + pi)) != 0 {
                    w.assert_slot(s, a, b);
                }
            }
        }
        out.push(w);
    }
    out
}

/// All worlds with at most two individuals, over domains drawn from the named and anonymous individuals.
pub fn small_worlds() -> Vec<World> {
    let domains: [&[&str]; 8] = [&[], &["i"], &["j"], &["k"], &["i", "j"], &["i", "k"], &["j", "k"], &["k", "l"]];
    domains.iter().flat_map(|d| enumerate_worlds(d)).collect()
}

/// A random world with `size` individuals; named individuals are included with probability one half each.
pub fn random_world(rng: &mut ChaCha8Rng, size: usize) -> World {
    let mut pool: Vec<&str> = INDIVIDUALS.iter().chain(ANONYMOUS.iter()).copied().collect();
    pool.extend(["m", "n"]);
    pool.shuffle(rng);
    let domain: Vec<&str> = pool.into_iter().take(size).collect();
    let mut w = World::new();
    for id in &domain {
        w.add_individual(id);
    }
    for c in CONCEPTS {
        for id in &domain {
            if rng.gen_bool(0.5) {
                w.assert_concept(c, id);
            }
        }
    }
    for s in SLOTS {
        for a in &domain {
            for b in &domain {
                if rng.gen_bool(0.3) {
                    w.assert_slot(s, a, b);
                }
            }
        }
    }
    w
}

pub struct SoundnessReport {
    pub pairs: usize,
    pub proven_pairs: usize,
    pub cases: usize,
    pub violations: Vec<String>,
}

/// Checks every structurally proven pair against the set semantics on all small worlds and on
/// `sampled` random worlds of three or four individuals.
pub fn soundness_run(rng: &mut ChaCha8Rng, pairs: usize, sampled: usize) -> SoundnessReport {
    let prover = Prover::new(&[]);
    let small = small_worlds();
    let mut report = SoundnessReport { pairs, proven_pairs: 0, cases: 0, violations: Vec::new() };
    for _ in 0..pairs {
        let (c, d) = random_pair(rng);
        if !prover.proves(&translate_description(&c), &translate_description(&d)) {
            continue;
        }
        report.proven_pairs += 1;
        let large: Vec<World> = (0..sampled).map(|n| random_world(rng, 3 + n % 2)).collect();
        for w in small.iter().chain(large.iter()) {
            report.cases += 1;
            let sub = eval_description(&c, w);
            let sup = eval_description(&d, w);
            if !sub.is_subset(&sup) {
                report.violations.push(format!("{} ⊑ {} fails in {:?}", c, d, w));
                break;
            }
        }
    }
    report
}

const MODEL_CONCEPTS: [&str; 5] = ["Ticket", "Airline_ticket", "Person", "Manager", "Data_table"];
const MODEL_SLOTS: [&str; 4] = ["object", "actor", "means", "accessed_by"];
const MODEL_INDIVIDUALS: [&str; 3] = ["the_system", "u1", "d2"];

fn model_leaf(rng: &mut ChaCha8Rng) -> Description {
    match rng.gen_range(0..7) {
        0 => Description::Thing,
        1 => Description::Nothing,
        2 => {
            let n = rng.gen_range(1..=MODEL_INDIVIDUALS.len());
            let mut ids: Vec<&str> = MODEL_INDIVIDUALS.to_vec();
            ids.shuffle(rng);
            Description::individuals(&ids[..n])
        }
        _ => Description::atomic(MODEL_CONCEPTS.choose(rng).unwrap()),
    }
}

/// A random individual-level description over the model vocabulary.
pub fn model_description(rng: &mut ChaCha8Rng, depth: usize) -> Description {
    if depth == 0 || rng.gen_bool(0.3) {
        return model_leaf(rng);
    }
    let slot = *MODEL_SLOTS.choose(rng).unwrap();
    match rng.gen_range(0..7) {
        0 => Description::and(model_description(rng, depth - 1), model_description(rng, depth - 1)),
        1 => Description::or(model_description(rng, depth - 1), model_description(rng, depth - 1)),
        2 => Description::minus(model_description(rng, depth - 1), model_description(rng, depth - 1)),
        3 => Description::inverse(model_description(rng, depth - 1), slot),
        4 => Description::slot("age", random_modifier(rng), Description::Region(random_measurable_region(rng))),
        _ => Description::slot(slot, random_modifier(rng), model_description(rng, depth - 1)),
    }
}

fn random_decimal(rng: &mut ChaCha8Rng) -> dsr::Rational {
    let denominators = [1, 2, 4, 5, 10, 100];
    dsr::ratio(rng.gen_range(-50..500), *denominators.choose(rng).unwrap())
}

fn random_measurable_region(rng: &mut ChaCha8Rng) -> dsr::RegionExpr {
    match rng.gen_range(0..3) {
        0 => {
            let a = random_decimal(rng);
            let b = random_decimal(rng);
            let (low, high) = if a <= b { (a, b) } else { (b, a) };
            let unit = if rng.gen_bool(0.5) { Some("Sec") } else { None };
            dsr::RegionExpr::interval(low, high, unit)
        }
        1 => {
            let n = rng.gen_range(1..4);
            let values = (0..n)
                .map(|k| {
                    if rng.gen_bool(0.5) {
                        dsr::Value::Num(random_decimal(rng))
                    } else {
                        dsr::Value::Str(format!("v{}", k))
                    }
                })
                .collect();
            dsr::RegionExpr::ValueSet(values)
        }
        _ => dsr::RegionExpr::NamedRegion { name: "Short".to_string(), qualitative: false },
    }
}

fn random_text(rng: &mut ChaCha8Rng) -> String {
    let pieces = ["collect", "traffic", "info", "\"quoted\"", "back\\slash", "line\nbreak", "tab\there", "café", "real-time", ""];
    let n = rng.gen_range(1..5);
    (0..n).map(|_| *pieces.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

/// A random model that validates: natural-language goals, functions, subsumption and quality
/// elements, axioms, conflicts, acyclic applications, marks, prototype regions and a world.
pub fn random_model(rng: &mut ChaCha8Rng, index: usize) -> Model {
    use dsr::{
        Axiom, Element, ElementKind, MembershipSpec, OperatorApplication, OperatorKind, QualityStatement, RegionExpr,
        SlotD, Strength, UAnnotation,
    };
    let mut m = Model::new(&format!("generated_{}", index));
    let goals: usize = rng.gen_range(1..5);
    for g in 0..goals {
        m.add_element(Element::natural(&format!("G{}", g), ElementKind::Goal, &random_text(rng)));
    }
    for f in 0..rng.gen_range(0..3) {
        let slots = (0..rng.gen_range(0..3))
            .map(|_| SlotD {
                slot: MODEL_SLOTS.choose(rng).unwrap().to_string(),
                modifier: random_modifier(rng),
                filler: model_description(rng, 2),
            })
            .collect();
        m.add_element(Element::function(&format!("F{}", f), ["Book", "Collect", "Activate"].choose(rng).unwrap(), slots));
    }
    let sub_kinds = [ElementKind::FG, ElementKind::FC, ElementKind::CTG, ElementKind::SC, ElementKind::DA];
    for s in 0..rng.gen_range(0..4) {
        let kind = *sub_kinds.choose(rng).unwrap();
        let id = format!("{}{}", kind, s);
        m.add_element(Element::subsumption(&id, kind, model_description(rng, 2), model_description(rng, 2)));
    }
    for q in 0..rng.gen_range(0..4) {
        let qc = rng.gen_bool(0.5);
        let region = if qc || rng.gen_bool(0.3) {
            random_measurable_region(rng)
        } else {
            RegionExpr::named(["Fast", "Good", "Simple"].choose(rng).unwrap())
        };
        let mut st = QualityStatement::new(
            ["Processing_time", "Security", "Cost"].choose(rng).unwrap(),
            model_description(rng, 2),
            region,
        );
        if rng.gen_bool(0.3) {
            st.observers.push(model_description(rng, 1));
        }
        if rng.gen_bool(0.3) {
            let pct = [dsr::ratio(4, 5), dsr::ratio(1, 3), dsr::rat(1), dsr::ratio(805, 1000)].choose(rng).unwrap().clone();
            st.annotations.push(UAnnotation::new("X", &["inheres_in"], pct.clone()));
            if rng.gen_bool(0.3) {
                st.annotations.push(UAnnotation::new("Y", &["inheres_in", "means"], pct));
            }
        }
        let (kind, id) = if qc { (ElementKind::QC, format!("QC{}", q)) } else { (ElementKind::QG, format!("QG{}", q)) };
        m.add_element(Element::quality(&id, kind, st));
    }
    for _ in 0..rng.gen_range(0..3) {
        m.axioms.push(Axiom::new(model_description(rng, 2), model_description(rng, 2)));
    }
    let ids: Vec<String> = m.elements.keys().cloned().collect();
    if ids.len() >= 2 && rng.gen_bool(0.4) {
        let mut pick = ids.clone();
        pick.shuffle(rng);
        m.conflicts.push(pick[..2].iter().cloned().collect());
    }
    let strengths = [Strength::Strengthening, Strength::Weakening, Strength::Equating];
    for g in 0..goals.saturating_sub(1) {
        if rng.gen_bool(0.6) {
            let outs: Vec<String> = ((g + 1)..goals).filter(|_| rng.gen_bool(0.6)).map(|o| format!("G{}", o)).collect();
            if !outs.is_empty() {
                let out_refs: Vec<&str> = outs.iter().map(String::as_str).collect();
                let id = format!("G{}", g);
                m.applications.push(OperatorApplication::new(
                    OperatorKind::Reduce,
                    &[id.as_str()],
                    &out_refs,
                    *strengths.choose(rng).unwrap(),
                ));
            }
        }
    }
    if let Some(fg) = ids.iter().find(|id| id.starts_with("FG")) {
        let g = format!("G{}", goals - 1);
        m.applications.push(OperatorApplication::new(OperatorKind::Interpret, &[g.as_str()], &[fg.as_str()], Strength::Equating));
    }
    for id in &ids {
        if rng.gen_bool(0.2) {
            m.fulfilled_marks.insert(id.clone());
        }
    }
    if rng.gen_bool(0.3) {
        let mut regions = vec![dsr::membership::PrototypeRegion::interval("low", dsr::rat(1), dsr::rat(2))];
        if rng.gen_bool(0.5) {
            regions.push(dsr::membership::PrototypeRegion::points("high", vec![dsr::rat(5), dsr::ratio(13, 2)]));
        }
        m.membership_specs.push(MembershipSpec { quality: "Cost".to_string(), regions });
    }
    if rng.gen_bool(0.4) {
        let mut w = World::new();
        w.add_individual("a1");
        w.add_individual("m1");
        w.assert_concept("Manager", "m1");
        w.assert_slot("actor", "a1", "m1");
        if rng.gen_bool(0.5) {
            w.assert_data("age", "m1", dsr::Value::Num(random_decimal(rng)));
        }
        m.world = Some(w);
    }
    m
}

/// The first component in which two models differ, for failure messages.
pub fn model_difference(a: &Model, b: &Model) -> Option<String> {
    for (id, e) in &a.elements {
        if b.elements.get(id) != Some(e) {
            return Some(format!("element {}: {:?} vs {:?}", id, e, b.elements.get(id)));
        }
    }
    if a.elements.len() != b.elements.len() {
        return Some("element count".to_string());
    }
    if a.axioms != b.axioms {
        return Some(format!("axioms {:?} vs {:?}", a.axioms, b.axioms));
    }
    if a.applications != b.applications {
        return Some(format!("applications {:?} vs {:?}", a.applications, b.applications));
    }
    if a.conflicts != b.conflicts || a.fulfilled_marks != b.fulfilled_marks {
        return Some("conflicts or marks".to_string());
    }
    if a.membership_specs != b.membership_specs {
        return Some(format!("regions {:?} vs {:?}", a.membership_specs, b.membership_specs));
    }
    if a.world != b.world {
        return Some(format!("world {:?} vs {:?}", a.world, b.world));
    }
    if a.name != b.name {
        return Some("name".to_string());
    }
    None
}
