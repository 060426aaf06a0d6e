//! Canonical text rendering of models and descriptions.

use crate::model::*;
use crate::semantics::World;
use crate::value::{format_rational, Rational, Value};
use num_bigint::BigInt;
use std::fmt::{self, Write};

/// Binding strength: difference 1, union 2, intersection 3, projection 4, atoms 5.
fn precedence(d: &Description) -> u8 {
    match d {
        Description::Difference(..) => 1,
        Description::Union(..) => 2,
        Description::Intersection(..) => 3,
        Description::InverseProjection(..) => 4,
        _ => 5,
    }
}

fn write_description(d: &Description, min: u8, out: &mut String) {
    let parens = precedence(d) < min;
    if parens {
        out.push('(');
    }
    match d {
        Description::Thing => out.push_str("Thing"),
        Description::Nothing => out.push_str("Nothing"),
        Description::AtomicConcept(n) => out.push_str(n),
        Description::Enumeration(ids) => {
            let _ = write!(out, "{{{}}}", ids.join(", "));
        }
        Description::Region(r) => match r {
            RegionExpr::NamedRegion { name, qualitative: true } => {
                let _ = write!(out, "region {}", name);
            }
            other => out.push_str(&print_region(other)),
        },
        Description::SlotRestriction(slot, modifier, filler) => {
            let _ = write!(out, "<{}: {}", slot, modifier_prefix(*modifier));
            write_description(filler, 1, out);
            out.push('>');
        }
        Description::InverseProjection(src, slot) => {
            write_description(src, 4, out);
            let _ = write!(out, ".{}", slot);
        }
        Description::Intersection(l, r) => {
            write_description(l, 3, out);
            out.push(' ');
            write_description(r, 4, out);
        }
        Description::Union(l, r) => {
            write_description(l, 2, out);
            out.push_str(" or ");
            write_description(r, 3, out);
        }
        Description::Difference(l, r) => {
            write_description(l, 1, out);
            out.push_str(" - ");
            write_description(r, 2, out);
        }
    }
    if parens {
        out.push(')');
    }
}

fn modifier_prefix(m: CardinalityModifier) -> String {
    match m {
        CardinalityModifier::ExactlyOne => String::new(),
        CardinalityModifier::AtMost(n) => format!("<={} ", n),
        CardinalityModifier::AtLeast(n) => format!(">={} ", n),
        CardinalityModifier::Exactly(n) => format!("{} ", n),
        CardinalityModifier::Some => "SOME ".to_string(),
        CardinalityModifier::Only => "ONLY ".to_string(),
    }
}

/// Renders a description in `.dsr` syntax.
pub fn print_description(d: &Description) -> String {
    let mut out = String::new();
    write_description(d, 1, &mut out);
    out
}

impl fmt::Display for Description {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_description(self))
    }
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            other => out.push(other),
        }
    }
    out.push('"');
    out
}

fn print_value(v: &Value) -> String {
    match v {
        Value::Num(n) => format_rational(n),
        Value::Str(s) => quote(s),
    }
}

/// Renders a region in the syntax accepted after `::`.
pub fn print_region(r: &RegionExpr) -> String {
    match r {
        RegionExpr::NamedRegion { name, qualitative: true } => name.clone(),
        RegionExpr::NamedRegion { name, qualitative: false } => format!("measurable {}", name),
        RegionExpr::Interval { low, high, unit } => {
            let unit = unit.as_ref().map(|u| format!(" ({})", u)).unwrap_or_default();
            format!("[{}, {}{}]", format_rational(low), format_rational(high), unit)
        }
        RegionExpr::ValueSet(values) => {
            let parts: Vec<String> = values.iter().map(print_value).collect();
            format!("{{{}}}", parts.join(", "))
        }
    }
}

fn print_pct(p: &Rational) -> String {
    let percent = p * Rational::from_integer(BigInt::from(100));
    let text = format_rational(&percent);
    if text.contains('/') {
        format_rational(p)
    } else {
        format!("{}%", text)
    }
}

fn print_annotation(a: &UAnnotation) -> String {
    let mut pattern = format!("?{}", a.var_id);
    for slot in a.path.iter().rev() {
        pattern = format!("<{}: {}>", slot, pattern);
    }
    format!("U(?{}, {}, {})", a.var_id, pattern, print_pct(&a.pct_low))
}

fn print_quality(q: &QualityStatement) -> String {
    let quality = match &q.quality {
        Description::AtomicConcept(n) => n.clone(),
        other => format!("({})", print_description(other)),
    };
    let mut out = format!("{} ({}) :: {}", quality, print_description(&q.subject), print_region(&q.region));
    for o in &q.observers {
        let _ = write!(out, " <observed_by: {}>", print_description(o));
    }
    for a in &q.annotations {
        let _ = write!(out, " with {}", print_annotation(a));
    }
    out
}

/// Renders an element body.
pub fn print_body(body: &Body) -> String {
    match body {
        Body::NaturalLanguage(text) => quote(text),
        Body::FunctionDesc { head, slots } => {
            let mut out = head.clone();
            for s in slots {
                out.push(' ');
                out.push_str(&print_description(&s.to_description()));
            }
            out
        }
        Body::Subsumption { subsumee, subsumer } => {
            format!("{} :< {}", print_description(subsumee), print_description(subsumer))
        }
        Body::Quality(q) => print_quality(q),
    }
}

fn print_application(app: &OperatorApplication) -> String {
    let keyword = match (&app.op, &app.args) {
        (OperatorKind::Scale, OperatorArgs::Scale { direction: ScaleDirection::Up, .. }) => "scale_up",
        (OperatorKind::Scale, _) => "scale_down",
        (OperatorKind::Reduce, _) => "reduce",
        (OperatorKind::Interpret, _) => "interpret",
        (OperatorKind::Operationalize, _) => "operationalize",
        (OperatorKind::Focus, _) => "focus",
        (OperatorKind::DeUniversalize, _) => "deuniv",
        (OperatorKind::Resolve, _) => "resolve",
        (OperatorKind::Observe, _) => "observe",
    };
    let mut out = format!("{} {} ->", keyword, app.inputs.join(", "));
    if !app.outputs.is_empty() {
        let _ = write!(out, " {}", app.outputs.join(", "));
    }
    let _ = write!(out, " [{}]", app.strength.keyword());
    match &app.args {
        OperatorArgs::Scale { factor: Some(ScaleFactor::Quantitative { low_factor, high_factor }), .. } => {
            let _ = write!(out, " by ({}, {})", format_rational(low_factor), format_rational(high_factor));
        }
        OperatorArgs::Scale { factor: Some(ScaleFactor::Qualitative { region_name }), .. } => {
            let _ = write!(out, " by {}", region_name);
        }
        OperatorArgs::Focus(targets) if !targets.is_empty() => {
            let parts: Vec<String> = targets
                .iter()
                .map(|t| match t {
                    FocusTarget::Subject(d) => format!("subject {}", print_description(d)),
                    FocusTarget::Quality(d) => format!("quality {}", print_description(d)),
                })
                .collect();
            let _ = write!(out, " on {}", parts.join(", "));
        }
        OperatorArgs::DeUniversalize(a) => {
            let _ = write!(out, " {}", print_annotation(a));
        }
        OperatorArgs::Observe(d) => {
            let _ = write!(out, " by {}", print_description(d));
        }
        _ => {}
    }
    out.push(';');
    out
}

fn print_world(world: &World, out: &mut String) {
    out.push_str("world {\n");
    for id in &world.individuals {
        let concepts: Vec<&str> = world
            .concept_extensions
            .iter()
            .filter(|(_, ext)| ext.contains(id))
            .map(|(c, _)| c.as_str())
            .collect();
        if concepts.is_empty() {
            let _ = writeln!(out, "  individual {};", id);
        } else {
            let _ = writeln!(out, "  individual {} : {};", id, concepts.join(", "));
        }
    }
    for (slot, tuples) in &world.slot_tuples {
        for (a, b) in tuples {
            let _ = writeln!(out, "  slot {}({}, {});", slot, a, b);
        }
    }
    for ((subject, slot), value) in &world.data_values {
        let _ = writeln!(out, "  data {}({}) = {};", slot, subject, print_value(value));
    }
    for (name, region) in &world.region_defs {
        let _ = writeln!(out, "  region {} = {};", name, print_region(region));
    }
    for r in &world.quality_records {
        let _ = write!(out, "  quality {} : {} inheres {} value {}", r.id, r.quality, r.bearer, print_value(&r.value));
        if let Some(u) = &r.unit {
            let _ = write!(out, " {}", u);
        }
        if !r.observers.is_empty() {
            let obs: Vec<&str> = r.observers.iter().map(String::as_str).collect();
            let _ = write!(out, " observed_by {{{}}}", obs.join(", "));
        }
        out.push_str(";\n");
    }
    out.push_str("}\n");
}

/// Canonical text of a model; declaration order is preserved.
pub fn print_model(model: &Model) -> String {
    let mut out = String::new();
    if !model.name.is_empty() {
        let _ = writeln!(out, "model {};", model.name);
    }
    for e in model.elements.values() {
        let _ = writeln!(out, "{} {} := {};", e.kind.keyword(), e.id, print_body(&e.body));
    }
    for a in &model.axioms {
        let _ = writeln!(out, "axiom {} :< {};", print_description(&a.subsumee), print_description(&a.subsumer));
    }
    for c in &model.conflicts {
        let ids: Vec<&str> = c.iter().map(String::as_str).collect();
        let _ = writeln!(out, "conflict {{{}}};", ids.join(", "));
    }
    for app in &model.applications {
        let _ = writeln!(out, "{}", print_application(app));
    }
    if !model.fulfilled_marks.is_empty() {
        let ids: Vec<&str> = model.fulfilled_marks.iter().map(String::as_str).collect();
        let _ = writeln!(out, "fulfilled {};", ids.join(", "));
    }
    for spec in &model.membership_specs {
        let _ = writeln!(out, "regions {} {{", spec.quality);
        for r in &spec.regions {
            match &r.prototypes {
                crate::membership::Prototypes::Points(v) => {
                    let parts: Vec<String> = v.iter().map(format_rational).collect();
                    let _ = writeln!(out, "  {} = points {{{}}};", r.name, parts.join(", "));
                }
                crate::membership::Prototypes::Interval(a, b) => {
                    let _ = writeln!(out, "  {} = interval [{}, {}];", r.name, format_rational(a), format_rational(b));
                }
            }
        }
        out.push_str("}\n");
    }
    if let Some(world) = &model.world {
        print_world(world, &mut out);
    }
    out
}
