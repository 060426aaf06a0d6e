//! Acceptance checks: one PASS or FAIL line per criterion, non-zero exit when any fails.

mod common;

use dsr::membership::{
    derive_membership_function, membership_degrees, membership_interval_pair, membership_intervals, PrototypeRegion,
};
use dsr::parser::{parse_model, print_model};
use dsr::reasoner::{check_consistency, check_strength_tags, propagate_fulfillment, Consistency, Fulfillment, Prover};
use dsr::semantics::{translate_element, DlAxiom, DlConcept};
use dsr::value::to_f64;
use dsr::{
    parse_decimal, rat, ratio, Body, CardinalityModifier, Description, Element, ElementKind, Model, QualityStatement,
    Rational, RegionExpr, UAnnotation,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn ensure(cond: bool, message: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message.into())
    }
}

fn cost_intervals() -> Vec<PrototypeRegion> {
    vec![
        PrototypeRegion::interval("low", rat(500), rat(700)),
        PrototypeRegion::interval("medium", rat(800), rat(1000)),
        PrototypeRegion::interval("high", rat(1200), rat(1500)),
    ]
}

fn regions_of(model: &Model, quality: &str) -> Vec<PrototypeRegion> {
    model.membership_specs.iter().find(|s| s.quality == quality).expect("regions block").regions.clone()
}

fn criterion_1() -> Outcome {
    let regions = regions_of(&common::load("cost.dsr"), "Cost");
    ensure(regions == cost_intervals(), "fixture regions differ from low/medium/high intervals")?;
    let start = Instant::now();
    let d = membership_degrees(&rat(740), &regions).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expected = [("low", "0.595"), ("medium", "0.405"), ("high", "0")];
    for (name, value) in expected {
        ensure(d[name] == parse_decimal(value).unwrap(), format!("{} = {} instead of {}", name, d[name], value))?;
    }
    ensure(elapsed < Duration::from_millis(10), format!("took {:?}", elapsed))?;
    Ok(format!("low 0.595, medium 0.405, high 0 in {:?}", elapsed))
}

fn criterion_2() -> Outcome {
    let regions = regions_of(&common::load("cost_points.dsr"), "Cost");
    let start = Instant::now();
    let d = membership_degrees(&rat(740), &regions).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(d["low"] == ratio(6, 8), format!("low = {}", d["low"]))?;
    ensure(elapsed < Duration::from_millis(10), format!("took {:?}", elapsed))?;
    Ok(format!("low 6/8 in {:?}", elapsed))
}

/// Share of a 1000 x 1000 grid of prototype pairs (x, y) whose Voronoi boundary (x + y) / 2 lies above `p`.
fn grid_degree(p: f64, a: f64, b: f64, c: f64, d: f64) -> f64 {
    const N: usize = 1000;
    let ys: Vec<f64> = (0..N).map(|j| c + (j as f64 + 0.5) * (d - c) / N as f64).collect();
    let mut inside = 0usize;
    for i in 0..N {
        let x = a + (i as f64 + 0.5) * (b - a) / N as f64;
        let threshold = 2.0 * p - x;
        inside += N - ys.partition_point(|y| *y <= threshold);
    }
    inside as f64 / (N * N) as f64
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pairs = [
        (rat(500), rat(700), rat(800), rat(1000)),
        (rat(800), rat(1000), rat(1200), rat(1500)),
        (rat(0), rat(10), rat(12), rat(13)),
    ];
    let mut worst = 0.0f64;
    for k in 0..100 {
        let (a, b, c, d) = &pairs[k % pairs.len()];
        let span = to_f64(&(d - a));
        let offset = ratio(rng.gen_range(0..10_000), 10_000) * (d - a) * ratio(6, 5) - (d - a) * ratio(1, 10);
        let p = a + offset;
        let (m1, m2) = membership_interval_pair(&p, (a, b), (c, d)).map_err(|e| e.to_string())?;
        ensure(&m1 + &m2 == rat(1), "pair degrees do not sum to 1")?;
        let oracle = grid_degree(to_f64(&p), to_f64(a), to_f64(b), to_f64(c), to_f64(d));
        let diff = (to_f64(&m1) - oracle).abs();
        worst = worst.max(diff);
        ensure(diff <= 1e-3, format!("p = {} (span {}): closed form {} vs grid {}", p, span, to_f64(&m1), oracle))?;
    }

    let mut checked_breakpoints = 0;
    let mut region_sets = vec![cost_intervals()];
    for _ in 0..20 {
        let mut x = rng.gen_range(-100i64..100);
        let mut regions = Vec::new();
        for r in 0..rng.gen_range(1..5) {
            let a = x;
            let b = a + rng.gen_range(1i64..50);
            regions.push(PrototypeRegion::interval(&format!("r{}", r), rat(a), rat(b)));
            x = b + rng.gen_range(1i64..50);
        }
        region_sets.push(regions);
    }
    for regions in &region_sets {
        for f in derive_membership_function(regions).map_err(|e| e.to_string())? {
            for w in f.pieces.windows(2) {
                let bp = w[0].hi.clone().ok_or("piece without upper bound before another piece")?;
                ensure(w[1].lo.as_ref() == Some(&bp), "pieces are not contiguous")?;
                ensure(
                    w[0].eval(&bp) == w[1].eval(&bp),
                    format!("{} is discontinuous at {}", f.region, bp),
                )?;
                checked_breakpoints += 1;
            }
        }
    }

    for _ in 0..1000 {
        let regions = region_sets.choose(&mut rng).unwrap();
        let p = ratio(rng.gen_range(-20_000..200_000), 100);
        let sum: Rational = membership_intervals(&p, regions).map_err(|e| e.to_string())?.values().sum();
        ensure(sum == rat(1), format!("degrees sum to {} at {}", sum, p))?;
    }
    Ok(format!(
        "grid error at most {:.2e} over 100 points, {} breakpoints continuous, sums exact at 1000 points",
        worst, checked_breakpoints
    ))
}

fn criterion_4() -> Outcome {
    let model = parse_model(
        "func F1 := Activate <actor: Manager> <object: Debit_card>;\n\
         qc QC3 := Processing_time (File_search) :: [0, 30];\n\
         fc FC1 := Data_table :< <accessed_by: ONLY Manager>;",
    )
    .map_err(|d| format!("{:?}", d))?;
    let a = DlConcept::atomic;
    let (f1, _) = translate_element(model.element("F1").unwrap());
    let f1_expected = DlConcept::And(vec![
        a("Function"),
        a("Activate"),
        DlConcept::One("actor".into(), Box::new(a("Manager"))),
        DlConcept::One("object".into(), Box::new(a("Debit_card"))),
    ]);
    ensure(f1 == f1_expected, format!("F1 translates to {}", f1))?;
    ensure(f1.to_string().starts_with("Function ⊓ Activate"), format!("F1 renders as {}", f1))?;

    let (qc3, _) = translate_element(model.element("QC3").unwrap());
    let qc3_expected = DlConcept::And(vec![
        a("QC"),
        a("Processing_time"),
        DlConcept::Some("inheres_in".into(), Box::new(a("File_search"))),
        DlConcept::Some("has_value_in".into(), Box::new(DlConcept::DataRange(RegionExpr::interval(rat(0), rat(30), None)))),
    ]);
    ensure(qc3 == qc3_expected, format!("QC3 translates to {}", qc3))?;
    ensure(qc3.to_string().starts_with("QC ⊓ Processing_time"), format!("QC3 renders as {}", qc3))?;

    let (_, fc_axioms) = translate_element(model.element("FC1").unwrap());
    let fc_expected = DlAxiom::SubClassOf(a("Data_table"), DlConcept::Only("accessed_by".into(), Box::new(a("Manager"))));
    ensure(fc_axioms == vec![fc_expected.clone()], format!("FC1 axioms {:?}", fc_axioms))?;
    ensure(fc_expected.to_string() == "Data_table ⊑ ∀accessed_by.Manager", "FC1 axiom rendering")?;
    Ok(format!("{} | {} | {}", f1, qc3, fc_axioms[0]))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let report = common::soundness_run(&mut rng, 400, 200);
    let elapsed = start.elapsed();
    ensure(report.violations.is_empty(), format!("{} violations, first: {}", report.violations.len(), report.violations.first().cloned().unwrap_or_default()))?;
    ensure(report.cases >= 10_000, format!("only {} cases", report.cases))?;
    ensure(elapsed < Duration::from_secs(60), format!("took {:?}", elapsed))?;
    Ok(format!(
        "0 violations over {} cases ({} proven of {} pairs) in {:.1?}",
        report.cases, report.proven_pairs, report.pairs, elapsed
    ))
}

fn u_variant(base: &Element, path: &[&str], pct: &Rational) -> Element {
    let mut e = base.clone();
    if let Body::Quality(q) = &mut e.body {
        q.annotations = vec![UAnnotation::new("X", path, pct.clone())];
    }
    e
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let prover = Prover::new(&[]);
    let mut checks = 0;
    for n in 0..50 {
        let mut subject = common::model_description(&mut rng, 2);
        let nested = n % 2 == 1;
        if nested {
            subject = Description::and(
                subject,
                Description::slot("means", CardinalityModifier::ExactlyOne, common::model_description(&mut rng, 1)),
            );
        }
        let path: &[&str] = if nested { &["inheres_in", "means"] } else { &["inheres_in"] };
        let region = if rng.gen_bool(0.5) {
            RegionExpr::named("Fast")
        } else {
            RegionExpr::interval(rat(0), rat(rng.gen_range(1..100)), Some("Sec."))
        };
        let kind = if rng.gen_bool(0.5) { ElementKind::QG } else { ElementKind::QC };
        let base = Element::quality(&format!("Q{}", n), kind, QualityStatement::new("Processing_time", subject, region));
        for _ in 0..3 {
            let mut x = rng.gen_range(1..=100);
            let mut y = rng.gen_range(1..=100);
            while x == y {
                y = rng.gen_range(1..=100);
            }
            if x < y {
                std::mem::swap(&mut x, &mut y);
            }
            let (p1, p2) = (ratio(x, 100), ratio(y, 100));
            let (c1, _) = translate_element(&u_variant(&base, path, &p1));
            let (c2, _) = translate_element(&u_variant(&base, path, &p2));
            ensure(prover.proves(&c1, &c2), format!("U({}) ⋢ U({}) for {:?}", p1, p2, base))?;
            checks += 1;
        }
    }
    Ok(format!("{} pct pairs over 50 quality elements proven", checks))
}

fn states(model: &Model, threshold: Option<usize>) -> BTreeMap<String, Fulfillment> {
    propagate_fulfillment(model, threshold).states
}

fn expect_states(actual: &BTreeMap<String, Fulfillment>, expected: &[(&str, Fulfillment)]) -> Result<(), String> {
    let expected: BTreeMap<String, Fulfillment> = expected.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    ensure(*actual == expected, format!("got {:?}, expected {:?}", actual, expected))
}

fn criterion_7() -> Outcome {
    use Fulfillment::*;
    let mut model = common::load("fulfillment.dsr");
    model.fulfilled_marks = ["F3", "F4"].iter().map(|s| s.to_string()).collect();
    expect_states(&states(&model, None), &[("G1", Fulfilled), ("F2", Fulfilled), ("F3", Fulfilled), ("F4", Fulfilled)])?;
    model.fulfilled_marks = ["F3"].iter().map(|s| s.to_string()).collect();
    expect_states(&states(&model, None), &[("G1", Unknown), ("F2", Unknown), ("F3", Fulfilled), ("F4", Unknown)])?;

    let text = "fg FG1 := Trip :< Booked;\n\
                func F1 := Book <object: Ticket>;\n\
                func F2 := Pay <object: Ticket>;\n\
                func F3 := Confirm <object: Booking>;\n\
                func F4 := Notify <object: Traveller>;\n\
                operationalize FG1 -> F1, F2, F3, F4 [strengthen];\n\
                fulfilled F1, F2, F3;";
    let model = parse_model(text).map_err(|d| format!("{:?}", d))?;
    let three = states(&model, Some(3));
    expect_states(
        &three,
        &[("FG1", Fulfilled), ("F1", Fulfilled), ("F2", Fulfilled), ("F3", Fulfilled), ("F4", Unknown)],
    )?;
    ensure(states(&model, None)["FG1"] == Unknown, "without a threshold FG1 must stay unknown")?;
    ensure(states(&model, Some(4))["FG1"] == Unknown, "with k = 4 FG1 must stay unknown")?;
    Ok("F3+F4 marks fulfil G1; F3 alone leaves G1 unknown; 3 of 4 fulfil FG1 at k = 3".to_string())
}

fn without_disjointness(model: &Model) -> Model {
    let mut m = model.clone();
    m.axioms.retain(|a| a.subsumer != Description::Nothing);
    let disjoint: Vec<String> = m
        .elements
        .values()
        .filter(|e| matches!(&e.body, Body::Subsumption { subsumer: Description::Nothing, .. }))
        .map(|e| e.id.clone())
        .collect();
    for id in disjoint {
        m.elements.shift_remove(&id);
    }
    m
}

fn criterion_8() -> Outcome {
    let mut summary = Vec::new();
    for (name, axiom) in [("access.dsr", "DA1: Authorized ⊓ Unauthorized ⊑ ⊥"), ("users.dsr", "Information_entity ⊓ Real_world_entity ⊑ ⊥")] {
        let model = common::load(name);
        match check_consistency(&model, None) {
            Consistency::Inconsistent(ex) => {
                ensure(ex.clash.ends_with(axiom), format!("{}: clash is {}", name, ex.clash))?;
                summary.push(ex.clash);
            }
            other => return Err(format!("{}: expected Inconsistent, got {:?}", name, other)),
        }
        match check_consistency(&without_disjointness(&model), None) {
            Consistency::Consistent(_) => {}
            other => return Err(format!("{} without disjointness: expected Consistent, got {:?}", name, other)),
        }
    }
    Ok(format!("{} | {} | both consistent without the disjointness axiom", summary[0], summary[1]))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..200 {
        let model = common::random_model(&mut rng, i);
        let printed = print_model(&model);
        let parsed = parse_model(&printed).map_err(|d| format!("generated model {} rejected: {:?}\n{}", i, d, printed))?;
        ensure(parsed == model, format!("generated model {} changed by the round trip: {:?}\n{}", i, common::model_difference(&model, &parsed), printed))?;
    }
    let mut fixtures = 0;
    for name in common::all_fixtures() {
        let text = common::fixture(&name);
        if name == "syntax_error.dsr" {
            let diags = parse_model(&text).err().ok_or("syntax error fixture parsed")?;
            let d = &diags[0];
            ensure(d.span.line == 1 && d.span.column == 35, format!("diagnostic at {}", d))?;
            continue;
        }
        let model = parse_model(&text).map_err(|d| format!("{}: {:?}", name, d))?;
        let again = parse_model(&print_model(&model)).map_err(|d| format!("{} reprint: {:?}", name, d))?;
        ensure(again == model, format!("{} changed by the round trip", name))?;
        fixtures += 1;
    }
    Ok(format!("200 generated models and {} fixtures round-trip; syntax error reported at 1:35", fixtures))
}

fn criterion_10() -> Outcome {
    let text = common::fixture("worked_operators.dsr");
    let model = parse_model(&text).map_err(|d| format!("{:?}", d))?;
    let diags = check_strength_tags(&model, None);
    ensure(diags.is_empty(), format!("worked applications produce {:?}", diags))?;
    let mutants = [
        ("reduce F1 -> F1r [strengthen]", "reduce F1 -> F1r [weaken]"),
        ("scale_down QG1_1 -> QG1_2 [weaken]", "scale_up QG1_1 -> QG1_2 [weaken]"),
        ("scale_down QC2_1 -> QC2_2 [weaken]", "scale_down QC2_1 -> QC2_2 [strengthen]"),
        ("deuniv QG3_1 -> QG3_2 [weaken]", "deuniv QG3_1 -> QG3_2 [strengthen]"),
        ("focus QG4_1 -> QG4_2 [weaken]", "focus QG4_1 -> QG4_2 [strengthen]"),
        ("observe QG5_1 -> QC5_2 [strengthen]", "observe QG5_1 -> QC5_2 [weaken]"),
    ];
    for (from, to) in mutants {
        ensure(text.contains(from), format!("fixture lacks {}", from))?;
        let mutant = parse_model(&text.replace(from, to)).map_err(|d| format!("mutant {}: {:?}", to, d))?;
        let diags = check_strength_tags(&mutant, None);
        ensure(diags.len() == 1, format!("mutant {} gives {} diagnostics: {:?}", to, diags.len(), diags))?;
    }
    Ok(format!("6 worked applications clean; {} mutants with one diagnostic each", mutants.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("interval membership", criterion_1),
        ("point membership", criterion_2),
        ("membership oracle", criterion_3),
        ("translation goldens", criterion_4),
        ("structural soundness", criterion_5),
        ("U monotonicity", criterion_6),
        ("fulfillment", criterion_7),
        ("consistency walkthroughs", criterion_8),
        ("parser round trip", criterion_9),
        ("strength tags", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let text = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {}", text))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {}: {}", i + 1, name, detail),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL {}: {}", i + 1, name, detail);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
