//! Heuristic detection of requirements issues: unsatisfiable universals, unverifiable
//! regions, missing function slots, redundancy, multi-concern text, inconsistency and
//! ambiguity. Also a keyword-based kind classifier for natural-language requirements.

use crate::model::{free_symbols, normalize, Body, Description, Element, ElementKind, Model, OperatorKind, RegionExpr};
use crate::reasoner::{check_consistency, model_axioms, Consistency, Prover};
use crate::semantics::{DlAxiom, DlConcept};
use regex::Regex;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Issue {
    Incomplete,
    Ambiguous,
    Unverifiable,
    Unsatisfiable,
    Inconsistent,
    Unmodifiable,
    Redundant,
    /// Part of the taxonomy, but not decidable without stakeholders; no rule reports it.
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LintFinding {
    pub element: String,
    pub issue: Issue,
    pub detail: String,
    #[serde(rename = "suggestion", serialize_with = "op_name")]
    pub suggested_operator: Option<OperatorKind>,
    /// Source position of the element, when known.
    pub span: Option<String>,
}

fn op_name<S: serde::Serializer>(op: &Option<OperatorKind>, s: S) -> Result<S::Ok, S::Error> {
    match op {
        Some(op) => s.serialize_some(op.name()),
        None => s.serialize_none(),
    }
}

impl LintFinding {
    fn new(element: &str, issue: Issue, detail: String, suggested_operator: Option<OperatorKind>) -> Self {
        LintFinding { element: element.to_string(), issue, detail, suggested_operator, span: None }
    }
}

/// Trigger lexicons and slot profiles used by the rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LintConfig {
    /// Words signalling universal quantification.
    pub universal_tokens: Vec<String>,
    /// Required slots per function-head category; `default` applies to unlisted heads.
    pub required_slots: BTreeMap<String, Vec<String>>,
    /// Category of each known function head.
    pub head_categories: BTreeMap<String, String>,
    /// Words whose attachment in natural-language text is ambiguous.
    pub ambiguity_triggers: Vec<String>,
    /// Verbs that start a second concern after a conjunction.
    pub concern_verbs: Vec<String>,
    /// Concept names read as entities.
    pub entity_vocabulary: BTreeSet<String>,
    /// Concept names read as qualities.
    pub quality_vocabulary: BTreeSet<String>,
}

fn words(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

impl Default for LintConfig {
    fn default() -> Self {
        let mut required_slots = BTreeMap::new();
        required_slots.insert("default".to_string(), words(&["actor", "object"]));
        required_slots.insert("communicative".to_string(), words(&["actor", "object", "target"]));
        let head_categories = ["Send", "Notify", "Inform", "Email", "Message", "Announce", "Broadcast", "Forward", "Remind"]
            .iter()
            .map(|h| (h.to_string(), "communicative".to_string()))
            .collect();
        LintConfig {
            universal_tokens: words(&["all", "any", "every", "each", "100%"]),
            required_slots,
            head_categories,
            ambiguity_triggers: words(&["with", "for"]),
            concern_verbs: words(&[
                "shall", "should", "must", "will", "can", "allow", "send", "notify", "provide", "support", "display",
                "generate", "store", "record", "update", "create", "delete", "schedule", "book", "pay",
            ]),
            entity_vocabulary: BTreeSet::new(),
            quality_vocabulary: BTreeSet::new(),
        }
    }
}

impl LintConfig {
    /// Reads `key = v1, v2` lines over the defaults. Recognized keys: `universal`, `ambiguity`,
    /// `concern_verbs`, `entities`, `qualities`, `slots.<category>` and `head.<Head>`.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<LintConfig, String> {
        let mut config = LintConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected 'key = value'", n + 1))?;
            let key = key.trim();
            let values: Vec<String> =
                value.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
            match key {
                "universal" => config.universal_tokens = values,
                "ambiguity" => config.ambiguity_triggers = values,
                "concern_verbs" => config.concern_verbs = values,
                "entities" => config.entity_vocabulary = values.into_iter().collect(),
                "qualities" => config.quality_vocabulary = values.into_iter().collect(),
                _ => {
                    if let Some(category) = key.strip_prefix("slots.") {
                        config.required_slots.insert(category.to_string(), values);
                    } else if let Some(head) = key.strip_prefix("head.") {
                        let category = values.into_iter().next().ok_or_else(|| format!("line {}: missing category", n + 1))?;
                        config.head_categories.insert(head.to_string(), category);
                    } else {
                        return Err(format!("line {}: unknown key '{}'", n + 1, key));
                    }
                }
            }
        }
        Ok(config)
    }

    fn required_for(&self, head: &str) -> &[String] {
        let category = self.head_categories.get(head).map(String::as_str).unwrap_or("default");
        self.required_slots
            .get(category)
            .or_else(|| self.required_slots.get("default"))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

fn word_regex(tokens: &[String]) -> Option<Regex> {
    if tokens.is_empty() {
        return None;
    }
    let alternatives: Vec<String> = tokens.iter().map(|t| regex::escape(t)).collect();
    Regex::new(&format!(r"(?i)(^|[^A-Za-z0-9_])({})($|[^A-Za-z0-9_])", alternatives.join("|"))).ok()
}

fn has_successor(model: &Model, id: &str, ops: &[OperatorKind]) -> bool {
    model.applications_from(id).any(|a| ops.contains(&a.op))
}

fn mentions_enumeration(d: &Description) -> bool {
    match d {
        Description::Enumeration(_) => true,
        Description::SlotRestriction(_, _, f) => mentions_enumeration(f),
        Description::InverseProjection(s, _) => mentions_enumeration(s),
        Description::Intersection(l, r) | Description::Union(l, r) | Description::Difference(l, r) => {
            mentions_enumeration(l) || mentions_enumeration(r)
        }
        _ => false,
    }
}

fn text_of(e: &Element) -> Option<&str> {
    match &e.body {
        Body::NaturalLanguage(t) => Some(t),
        _ => None,
    }
}

fn rule_unsatisfiable(model: &Model, e: &Element, universal: Option<&Regex>, out: &mut Vec<LintFinding>) {
    if !e.kind.is_quality() || has_successor(model, &e.id, &[OperatorKind::DeUniversalize]) {
        return;
    }
    let hit = |s: &str| universal.is_some_and(|r| r.is_match(&s.replace('_', " ")));
    let detail = match (&e.body, text_of(e)) {
        (_, Some(text)) if hit(text) => Some("the text quantifies over every instance".to_string()),
        (Body::Quality(q), _) if q.annotations.is_empty() => {
            let subject = q.subject.to_string();
            if hit(&subject) {
                Some(format!("the subject {} quantifies over every instance", subject))
            } else if !mentions_enumeration(&q.subject) {
                Some(format!("every instance of {} must satisfy the requirement", subject))
            } else {
                None
            }
        }
        _ => None,
    };
    if let Some(detail) = detail {
        out.push(LintFinding::new(&e.id, Issue::Unsatisfiable, detail, Some(OperatorKind::DeUniversalize)));
    }
}

fn rule_unverifiable(model: &Model, e: &Element, out: &mut Vec<LintFinding>) {
    if e.kind != ElementKind::QG {
        return;
    }
    let Some(q) = e.quality_statement() else { return };
    if let RegionExpr::NamedRegion { name, qualitative: true } = &q.region {
        if !has_successor(model, &e.id, &[OperatorKind::Operationalize, OperatorKind::Observe]) {
            out.push(LintFinding::new(
                &e.id,
                Issue::Unverifiable,
                format!("the region {} is vague and no measurable constraint or observer is given", name),
                Some(OperatorKind::Operationalize),
            ));
        }
    }
}

fn slot_question(slot: &str, head: &str) -> String {
    let verb = head.to_lowercase();
    match slot {
        "actor" => format!("Who will {}?", verb),
        "object" => format!("What will be the object of {}?", verb),
        "target" => format!("To whom will {} deliver?", verb),
        other => format!("Which {} does {} have?", other, verb),
    }
}

fn rule_incomplete(model: &Model, e: &Element, config: &LintConfig, out: &mut Vec<LintFinding>) {
    let Body::FunctionDesc { head, slots } = &e.body else { return };
    if e.kind != ElementKind::F || has_successor(model, &e.id, &[OperatorKind::Reduce]) {
        return;
    }
    for required in config.required_for(head) {
        if !slots.iter().any(|s| s.slot == *required) {
            out.push(LintFinding::new(
                &e.id,
                Issue::Incomplete,
                format!("{} (missing <{}>)", slot_question(required, head), required),
                Some(OperatorKind::Reduce),
            ));
        }
    }
}

/// Canonical form of a body used for redundancy detection.
fn body_key(e: &Element) -> String {
    match &e.body {
        Body::NaturalLanguage(t) => format!("text:{}", t.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()),
        Body::FunctionDesc { head, slots } => {
            let mut parts: Vec<String> = slots.iter().map(|s| normalize(&s.to_description()).to_string()).collect();
            parts.sort();
            format!("func:{}:{}", head, parts.join(" "))
        }
        Body::Subsumption { subsumee, subsumer } => format!("sub:{}:{}", normalize(subsumee), normalize(subsumer)),
        Body::Quality(q) => {
            let mut observers: Vec<String> = q.observers.iter().map(|o| normalize(o).to_string()).collect();
            observers.sort();
            let annotations: Vec<String> =
                q.annotations.iter().map(|a| format!("{}@{:?}@{}", a.var_id, a.path, a.pct_low)).collect();
            format!(
                "quality:{}:{}:{}:{}:{}",
                normalize(&q.quality),
                normalize(&q.subject),
                crate::parser::print_region(&q.region),
                observers.join(","),
                annotations.join(",")
            )
        }
    }
}

fn rule_redundant(model: &Model, dropped: &BTreeSet<String>, out: &mut Vec<LintFinding>) {
    let mut seen: BTreeMap<(ElementKind, String), String> = BTreeMap::new();
    for e in model.elements.values().filter(|e| !dropped.contains(&e.id)) {
        match seen.get(&(e.kind, body_key(e))) {
            Some(first) => out.push(LintFinding::new(
                &e.id,
                Issue::Redundant,
                format!("same requirement as {}", first),
                Some(OperatorKind::Resolve),
            )),
            None => {
                seen.insert((e.kind, body_key(e)), e.id.clone());
            }
        }
    }
}

fn rule_unmodifiable(model: &Model, e: &Element, concern: Option<&Regex>, out: &mut Vec<LintFinding>) {
    let (Some(text), Some(concern)) = (text_of(e), concern) else { return };
    if has_successor(model, &e.id, &[OperatorKind::Reduce]) {
        return;
    }
    if concern.is_match(text) {
        out.push(LintFinding::new(
            &e.id,
            Issue::Unmodifiable,
            "the text joins several concerns; separate them".to_string(),
            Some(OperatorKind::Reduce),
        ));
    }
}

fn rule_inconsistent(model: &Model, dropped: &BTreeSet<String>, out: &mut Vec<LintFinding>) {
    if let Consistency::Inconsistent(explanation) = check_consistency(model, None) {
        let element = explanation
            .axioms
            .iter()
            .filter_map(|a| a.split_once(':').map(|(src, _)| src.to_string()))
            .find(|src| model.elements.contains_key(src))
            .unwrap_or_else(|| "model".to_string());
        out.push(LintFinding::new(&element, Issue::Inconsistent, format!("violates {}", explanation.clash), None));
    }
    let axioms: Vec<DlAxiom> = model_axioms(model, false).into_iter().map(|a| a.axiom).collect();
    if axioms.is_empty() {
        return;
    }
    let prover = Prover::new(&axioms);
    let mut clashing: Vec<String> = free_symbols(model)
        .concepts
        .into_iter()
        .filter(|c| prover.proves(&DlConcept::atomic(c), &DlConcept::Nothing))
        .collect();
    clashing.sort();
    for concept in clashing {
        let users: Vec<&Element> = model
            .elements
            .values()
            .filter(|e| !dropped.contains(&e.id) && crate::reasoner::element_description(e).is_some_and(|d| mentions(&d, &concept)))
            .collect();
        let detail = format!("{} is declared under disjoint classes", concept);
        if users.is_empty() {
            out.push(LintFinding::new("model", Issue::Inconsistent, detail.clone(), None));
        }
        for e in users {
            out.push(LintFinding::new(&e.id, Issue::Inconsistent, detail.clone(), None));
        }
    }
}

fn mentions(d: &Description, concept: &str) -> bool {
    match d {
        Description::AtomicConcept(n) => n == concept,
        Description::SlotRestriction(_, _, f) => mentions(f, concept),
        Description::InverseProjection(s, _) => mentions(s, concept),
        Description::Intersection(l, r) | Description::Union(l, r) | Description::Difference(l, r) => {
            mentions(l, concept) || mentions(r, concept)
        }
        _ => false,
    }
}

fn rule_ambiguous(model: &Model, e: &Element, config: &LintConfig, triggers: Option<&Regex>, out: &mut Vec<LintFinding>) {
    if has_successor(model, &e.id, &[OperatorKind::Interpret]) {
        return;
    }
    if let (Some(text), Some(triggers)) = (text_of(e), triggers) {
        if let Some(m) = triggers.captures(text) {
            out.push(LintFinding::new(
                &e.id,
                Issue::Ambiguous,
                format!("the phrase introduced by '{}' may attach to more than one part", m[2].to_lowercase()),
                Some(OperatorKind::Interpret),
            ));
        }
        return;
    }
    let Some(d) = crate::reasoner::element_description(e) else { return };
    let mut fillers = BTreeSet::new();
    collect_fillers(&d, &mut fillers);
    for name in fillers {
        if config.entity_vocabulary.contains(&name) && config.quality_vocabulary.contains(&name) {
            out.push(LintFinding::new(
                &e.id,
                Issue::Ambiguous,
                format!("{} reads both as an entity and as a quality", name),
                Some(OperatorKind::Interpret),
            ));
        }
    }
}

fn collect_fillers(d: &Description, out: &mut BTreeSet<String>) {
    match d {
        Description::SlotRestriction(_, _, f) => {
            if let Description::AtomicConcept(n) = f.as_ref() {
                out.insert(n.clone());
            }
            collect_fillers(f, out);
        }
        Description::InverseProjection(s, _) => collect_fillers(s, out),
        Description::Intersection(l, r) | Description::Union(l, r) | Description::Difference(l, r) => {
            collect_fillers(l, out);
            collect_fillers(r, out);
        }
        _ => {}
    }
}

/// Runs every rule over the model. Findings are ordered by rule, then by element order.
pub fn lint_model(model: &Model, config: &LintConfig) -> Vec<LintFinding> {
    let dropped = model.dropped_elements();
    let universal = word_regex(&config.universal_tokens);
    let triggers = word_regex(&config.ambiguity_triggers);
    let concern = (!config.concern_verbs.is_empty()).then(|| {
        let verbs: Vec<String> = config.concern_verbs.iter().map(|v| regex::escape(v)).collect();
        Regex::new(&format!(r"(?i)\b(and|or)\s+(also\s+)?({})\b", verbs.join("|"))).ok()
    });
    let concern = concern.flatten();
    let live: Vec<&Element> = model.elements.values().filter(|e| !dropped.contains(&e.id)).collect();
    let mut out = Vec::new();
    for e in &live {
        rule_unsatisfiable(model, e, universal.as_ref(), &mut out);
    }
    for e in &live {
        rule_unverifiable(model, e, &mut out);
    }
    for e in &live {
        rule_incomplete(model, e, config, &mut out);
    }
    rule_redundant(model, &dropped, &mut out);
    for e in &live {
        rule_unmodifiable(model, e, concern.as_ref(), &mut out);
    }
    rule_inconsistent(model, &dropped, &mut out);
    for e in &live {
        rule_ambiguous(model, e, config, triggers.as_ref(), &mut out);
    }
    out
}

/// One guessed element kind with its score and the phrases that triggered it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KindGuess {
    #[serde(serialize_with = "kind_name")]
    pub kind: ElementKind,
    pub score: u32,
    pub triggers: Vec<String>,
}

fn kind_name<S: serde::Serializer>(k: &ElementKind, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&k.to_string())
}

const HINTS: &[(ElementKind, u32, &str)] = &[
    (ElementKind::F, 3, r"\b(shall|should|must|will)\s+(allow|enable|let|permit)\b.*\bto\b"),
    (
        ElementKind::F,
        2,
        r"\b(shall|should|must|will)\s+(send|display|generate|provide|notify|search|book|pay|activate|calculate|print|schedule|collect)\b",
    ),
    (ElementKind::FG, 3, r"\bbe\s+[a-z]+ed\b"),
    (ElementKind::FG, 2, r"\b(be|been|is|are)\s+[a-z]+en\b"),
    (
        ElementKind::QG,
        3,
        r"\b(be|is|are)\s+(very\s+|highly\s+)?(fast|quick|secure|simple|easy|reliable|available|efficient|friendly|intuitive|good|accurate|robust|responsive|[a-z]+(able|ible|ful|ous))\b",
    ),
    (ElementKind::QC, 3, r"\bwithin\s+\d+(\.\d+)?\s*(ms|s|sec|secs|seconds?|minutes?|min|hours?)\b"),
    (ElementKind::CTG, 3, r"\b(shall|should|must|will)\s+(have|include|contain)\b"),
    (ElementKind::DA, 3, r"\b(is|are)\s+an?\s"),
    (ElementKind::DA, 3, r"\bwill\s+be\s+used\s+in\b"),
    (ElementKind::DA, 1, r"\b(always|usually|typically|assume[ds]?)\b"),
];

/// Ranks likely element kinds for a natural-language requirement. Purely advisory.
pub fn classify_hint(text: &str) -> Vec<KindGuess> {
    let lower = text.to_lowercase();
    let mut scores: BTreeMap<ElementKind, KindGuess> = BTreeMap::new();
    for (kind, weight, pattern) in HINTS {
        let re = Regex::new(pattern).expect("hint pattern");
        if let Some(m) = re.find(&lower) {
            let guess = scores.entry(*kind).or_insert(KindGuess { kind: *kind, score: 0, triggers: Vec::new() });
            guess.score += weight;
            guess.triggers.push(m.as_str().trim().to_string());
        }
    }
    let mut ranked: Vec<KindGuess> = scores.into_values().collect();
    ranked.sort_by(|a, b| b.score.cmp(&a.score).then(a.kind.cmp(&b.kind)));
    ranked
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        assert_eq!(classify_hint("airline tickets be booked")[0].kind, ElementKind::FG);
        assert_eq!(classify_hint("Tomcat is a web server")[0].kind, ElementKind::DA);
        assert!(classify_hint("").is_empty());
    }

    #[test]
    fn config_parsing() {
        let c = LintConfig::parse("# lexicon\nuniversal = all, every\nslots.default = actor\nhead.Ping = communicative\n").unwrap();
        assert_eq!(c.universal_tokens, vec!["all", "every"]);
        assert_eq!(c.required_for("Book"), ["actor".to_string()]);
        assert_eq!(c.required_for("Ping").len(), 3);
        assert!(LintConfig::parse("nonsense").is_err());
    }
}
