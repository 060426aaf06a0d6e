//! Description algebra, requirement elements, operator-application records and the model container.

use crate::membership::PrototypeRegion;
use crate::semantics::World;
use crate::value::{Rational, Value};
use indexmap::IndexMap;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// The recursive concept/slot/region expression language.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Description {
    AtomicConcept(String),
    /// Ordered, duplicate-free list of individual ids.
    Enumeration(Vec<String>),
    SlotRestriction(String, CardinalityModifier, Box<Description>),
    /// `D.s`: the s-successors of members of `D`.
    InverseProjection(Box<Description>, String),
    Intersection(Box<Description>, Box<Description>),
    Union(Box<Description>, Box<Description>),
    Difference(Box<Description>, Box<Description>),
    Region(RegionExpr),
    Thing,
    Nothing,
}

impl Description {
    pub fn atomic(name: &str) -> Self {
        Description::AtomicConcept(name.to_string())
    }

    pub fn individuals<S: AsRef<str>>(ids: &[S]) -> Self {
        Description::Enumeration(ids.iter().map(|s| s.as_ref().to_string()).collect())
    }

    pub fn slot(slot: &str, modifier: CardinalityModifier, filler: Description) -> Self {
        Description::SlotRestriction(slot.to_string(), modifier, Box::new(filler))
    }

    pub fn inverse(source: Description, slot: &str) -> Self {
        Description::InverseProjection(Box::new(source), slot.to_string())
    }

    pub fn and(left: Description, right: Description) -> Self {
        Description::Intersection(Box::new(left), Box::new(right))
    }

    pub fn or(left: Description, right: Description) -> Self {
        Description::Union(Box::new(left), Box::new(right))
    }

    pub fn minus(left: Description, right: Description) -> Self {
        Description::Difference(Box::new(left), Box::new(right))
    }

    /// Left-nested intersection of the given parts; `Thing` when empty.
    pub fn and_all(parts: Vec<Description>) -> Self {
        let mut iter = parts.into_iter();
        match iter.next() {
            None => Description::Thing,
            Some(first) => iter.fold(first, Description::and),
        }
    }

    /// Left-nested union of the given parts; `Nothing` when empty.
    pub fn or_all(parts: Vec<Description>) -> Self {
        let mut iter = parts.into_iter();
        match iter.next() {
            None => Description::Nothing,
            Some(first) => iter.fold(first, Description::or),
        }
    }

    /// True for the region sub-language (regions and set operations over regions).
    pub fn is_region_level(&self) -> bool {
        match self {
            Description::Region(_) => true,
            Description::Intersection(l, r) | Description::Union(l, r) | Description::Difference(l, r) => {
                l.is_region_level() && r.is_region_level()
            }
            _ => false,
        }
    }

    /// Direct conjuncts of a (possibly nested) intersection.
    pub fn conjuncts(&self) -> Vec<&Description> {
        match self {
            Description::Intersection(l, r) => {
                let mut out = l.conjuncts();
                out.extend(r.conjuncts());
                out
            }
            other => vec![other],
        }
    }

    /// Nesting depth, counting leaves as depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Description::SlotRestriction(_, _, f) => 1 + f.depth(),
            Description::InverseProjection(s, _) => 1 + s.depth(),
            Description::Intersection(l, r) | Description::Union(l, r) | Description::Difference(l, r) => {
                1 + l.depth().max(r.depth())
            }
            _ => 1,
        }
    }
}

/// Cardinality modifier of a slot restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CardinalityModifier {
    /// Bare filler `<s: D>`.
    ExactlyOne,
    AtMost(u32),
    AtLeast(u32),
    Exactly(u32),
    Some,
    Only,
}

/// Quality region expressions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionExpr {
    NamedRegion { name: String, qualitative: bool },
    Interval { low: Rational, high: Rational, unit: Option<String> },
    /// Non-empty value list.
    ValueSet(Vec<Value>),
}

impl RegionExpr {
    pub fn named(name: &str) -> Self {
        RegionExpr::NamedRegion { name: name.to_string(), qualitative: true }
    }

    pub fn interval(low: Rational, high: Rational, unit: Option<&str>) -> Self {
        RegionExpr::Interval { low, high, unit: unit.map(str::to_string) }
    }

    /// True when the region is measurable (interval, value set, or non-qualitative name).
    pub fn is_measurable(&self) -> bool {
        !matches!(self, RegionExpr::NamedRegion { qualitative: true, .. })
    }
}

/// The nine requirement kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    Goal,
    FG,
    F,
    FC,
    QG,
    QC,
    CTG,
    SC,
    DA,
}

impl ElementKind {
    pub const ALL: [ElementKind; 9] = [
        ElementKind::Goal,
        ElementKind::FG,
        ElementKind::F,
        ElementKind::FC,
        ElementKind::QG,
        ElementKind::QC,
        ElementKind::CTG,
        ElementKind::SC,
        ElementKind::DA,
    ];

    /// Declaration keyword used in `.dsr` files.
    pub fn keyword(self) -> &'static str {
        match self {
            ElementKind::Goal => "goal",
            ElementKind::FG => "fg",
            ElementKind::F => "func",
            ElementKind::FC => "fc",
            ElementKind::QG => "qg",
            ElementKind::QC => "qc",
            ElementKind::CTG => "ctg",
            ElementKind::SC => "sc",
            ElementKind::DA => "da",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        ElementKind::ALL.into_iter().find(|k| k.keyword() == word)
    }

    pub fn is_quality(self) -> bool {
        matches!(self, ElementKind::QG | ElementKind::QC)
    }

    /// Specification kinds (F, FC, QC, SC).
    pub fn is_specification(self) -> bool {
        matches!(self, ElementKind::F | ElementKind::FC | ElementKind::QC | ElementKind::SC)
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ElementKind::Goal => "Goal",
            ElementKind::FG => "FG",
            ElementKind::F => "F",
            ElementKind::FC => "FC",
            ElementKind::QG => "QG",
            ElementKind::QC => "QC",
            ElementKind::CTG => "CTG",
            ElementKind::SC => "SC",
            ElementKind::DA => "DA",
        };
        f.write_str(name)
    }
}

/// One slot restriction of a function description.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SlotD {
    pub slot: String,
    pub modifier: CardinalityModifier,
    pub filler: Description,
}

impl SlotD {
    pub fn new(slot: &str, filler: Description) -> Self {
        SlotD { slot: slot.to_string(), modifier: CardinalityModifier::ExactlyOne, filler }
    }

    pub fn to_description(&self) -> Description {
        Description::SlotRestriction(self.slot.clone(), self.modifier, Box::new(self.filler.clone()))
    }
}

/// A de-universalization annotation `U(?X, path, pct)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UAnnotation {
    pub var_id: String,
    /// Slot path from the quality root, e.g. `[inheres_in]` or `[inheres_in, run_of]`.
    pub path: Vec<String>,
    pub pct_low: Rational,
}

impl UAnnotation {
    pub fn new(var_id: &str, path: &[&str], pct_low: Rational) -> Self {
        UAnnotation { var_id: var_id.to_string(), path: path.iter().map(|s| s.to_string()).collect(), pct_low }
    }

    /// Upper end of the percentage region, always 100%.
    pub fn pct_high(&self) -> Rational {
        Rational::one()
    }
}

/// Body of a quality goal or constraint: `Q (Subject) :: Region`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QualityStatement {
    /// Quality type; atomic unless widened by a quality-type focus.
    pub quality: Description,
    pub subject: Description,
    pub region: RegionExpr,
    pub observers: Vec<Description>,
    pub annotations: Vec<UAnnotation>,
}

impl QualityStatement {
    pub fn new(quality: &str, subject: Description, region: RegionExpr) -> Self {
        QualityStatement {
            quality: Description::atomic(quality),
            subject,
            region,
            observers: Vec::new(),
            annotations: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Body {
    NaturalLanguage(String),
    FunctionDesc { head: String, slots: Vec<SlotD> },
    Subsumption { subsumee: Description, subsumer: Description },
    Quality(QualityStatement),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element {
    pub id: String,
    pub kind: ElementKind,
    pub body: Body,
}

impl Element {
    pub fn new(id: &str, kind: ElementKind, body: Body) -> Self {
        Element { id: id.to_string(), kind, body }
    }

    pub fn natural(id: &str, kind: ElementKind, text: &str) -> Self {
        Element::new(id, kind, Body::NaturalLanguage(text.to_string()))
    }

    pub fn function(id: &str, head: &str, slots: Vec<SlotD>) -> Self {
        Element::new(id, ElementKind::F, Body::FunctionDesc { head: head.to_string(), slots })
    }

    pub fn subsumption(id: &str, kind: ElementKind, subsumee: Description, subsumer: Description) -> Self {
        Element::new(id, kind, Body::Subsumption { subsumee, subsumer })
    }

    pub fn quality(id: &str, kind: ElementKind, statement: QualityStatement) -> Self {
        Element::new(id, kind, Body::Quality(statement))
    }

    pub fn is_structured(&self) -> bool {
        !matches!(self.body, Body::NaturalLanguage(_))
    }

    pub fn quality_statement(&self) -> Option<&QualityStatement> {
        match &self.body {
            Body::Quality(q) => Some(q),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorKind {
    Reduce,
    Interpret,
    Focus,
    Scale,
    DeUniversalize,
    Resolve,
    Operationalize,
    Observe,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 8] = [
        OperatorKind::Reduce,
        OperatorKind::Interpret,
        OperatorKind::Focus,
        OperatorKind::Scale,
        OperatorKind::DeUniversalize,
        OperatorKind::Resolve,
        OperatorKind::Operationalize,
        OperatorKind::Observe,
    ];

    /// One-to-one operators propagate fulfillment from their single output.
    pub fn is_one_to_one(self) -> bool {
        matches!(
            self,
            OperatorKind::Interpret | OperatorKind::Scale | OperatorKind::DeUniversalize | OperatorKind::Observe
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Reduce => "Reduce",
            OperatorKind::Interpret => "Interpret",
            OperatorKind::Focus => "Focus",
            OperatorKind::Scale => "Scale",
            OperatorKind::DeUniversalize => "DeUniversalize",
            OperatorKind::Resolve => "Resolve",
            OperatorKind::Operationalize => "Operationalize",
            OperatorKind::Observe => "Observe",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strength {
    Strengthening,
    Weakening,
    Equating,
}

impl Strength {
    pub fn keyword(self) -> &'static str {
        match self {
            Strength::Strengthening => "strengthen",
            Strength::Weakening => "weaken",
            Strength::Equating => "equate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScaleDirection {
    Up,
    Down,
}

/// Scaling factor: a pair of bound multipliers or a qualitative modifier such as `Nearly`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ScaleFactor {
    Quantitative { low_factor: Rational, high_factor: Rational },
    Qualitative { region_name: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FocusTarget {
    Subject(Description),
    Quality(Description),
}

/// Operator-specific payload of an application record.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OperatorArgs {
    None,
    Scale { direction: ScaleDirection, factor: Option<ScaleFactor> },
    Focus(Vec<FocusTarget>),
    DeUniversalize(UAnnotation),
    Observe(Description),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OperatorApplication {
    pub op: OperatorKind,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub strength: Strength,
    pub args: OperatorArgs,
}

impl OperatorApplication {
    pub fn new(op: OperatorKind, inputs: &[&str], outputs: &[&str], strength: Strength) -> Self {
        OperatorApplication {
            op,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            strength,
            args: OperatorArgs::None,
        }
    }
}

/// Domain axiom `subsumee :< subsumer`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Axiom {
    pub subsumee: Description,
    pub subsumer: Description,
}

impl Axiom {
    pub fn new(subsumee: Description, subsumer: Description) -> Self {
        Axiom { subsumee, subsumer }
    }
}

/// Prototype regions over one quality dimension, e.g. `regions Cost { low = ...; }`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipSpec {
    pub quality: String,
    pub regions: Vec<PrototypeRegion>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Model {
    pub name: String,
    pub elements: IndexMap<String, Element>,
    pub applications: Vec<OperatorApplication>,
    pub conflicts: Vec<BTreeSet<String>>,
    pub axioms: Vec<Axiom>,
    pub fulfilled_marks: BTreeSet<String>,
    pub world: Option<World>,
    pub membership_specs: Vec<MembershipSpec>,
}

impl Model {
    pub fn new(name: &str) -> Self {
        Model { name: name.to_string(), ..Model::default() }
    }

    /// Inserts or replaces an element.
    pub fn add_element(&mut self, element: Element) {
        self.elements.insert(element.id.clone(), element);
    }

    pub fn element(&self, id: &str) -> Option<&Element> {
        self.elements.get(id)
    }

    /// Elements excluded by Resolve applications (inputs that are not kept as outputs).
    pub fn dropped_elements(&self) -> BTreeSet<String> {
        let mut dropped = BTreeSet::new();
        for app in self.applications.iter().filter(|a| a.op == OperatorKind::Resolve) {
            for input in &app.inputs {
                if !app.outputs.contains(input) {
                    dropped.insert(input.clone());
                }
            }
        }
        dropped
    }

    /// Applications whose single input is `id`.
    pub fn applications_from<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a OperatorApplication> + 'a {
        self.applications.iter().filter(move |a| a.inputs.iter().any(|i| i == id))
    }

    /// Returns an id not yet used in the model, starting from `base`.
    pub fn fresh_id(&self, base: &str) -> String {
        if !self.elements.contains_key(base) {
            return base.to_string();
        }
        (2..).map(|n| format!("{}_{}", base, n)).find(|c| !self.elements.contains_key(c)).unwrap()
    }
}

/// Slots used internally by the reasoning encodings.
pub const INTERNAL_SLOTS: [&str; 9] = [
    "relate_to",
    "relate_to_one",
    "relate_to_many",
    "interpret_to",
    "reduce_to",
    "operationalize_to",
    "pct",
    "subsumee",
    "subsumer",
];

/// All reserved slot names.
pub const RESERVED_SLOTS: [&str; 18] = [
    "inheres_in",
    "has_value_in",
    "observed_by",
    "pct",
    "subsumee",
    "subsumer",
    "exhibited_by",
    "has_function",
    "has_quality",
    "relate_to",
    "relate_to_one",
    "relate_to_many",
    "interpret_to",
    "reduce_to",
    "operationalize_to",
    "focus_to",
    "object",
    "actor",
];

/// Rule violated by a validation diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValidationRule {
    KindBody,
    RegionKind,
    DescriptionShape,
    Annotation,
    ReservedSlot,
    DanglingReference,
    Arity,
    OutputKind,
    Cycle,
    Conflict,
    DroppedMarked,
    World,
    MembershipSpec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationDiagnostic {
    /// Element id, `app#N` for the N-th application, or a model-level tag.
    pub subject: String,
    pub rule: ValidationRule,
    pub message: String,
}

impl fmt::Display for ValidationDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}: {}", self.subject, self.rule, self.message)
    }
}

/// Checks every model invariant and returns one diagnostic per violation.
pub fn validate_model(model: &Model) -> Vec<ValidationDiagnostic> {
    let mut out = Vec::new();
    let mut push = |subject: &str, rule: ValidationRule, message: String| {
        out.push(ValidationDiagnostic { subject: subject.to_string(), rule, message });
    };

    for (key, element) in &model.elements {
        if key != &element.id {
            push(key, ValidationRule::KindBody, format!("element stored under key {} has id {}", key, element.id));
        }
        validate_element(element, &mut push);
    }

    for (index, axiom) in model.axioms.iter().enumerate() {
        let tag = format!("axiom#{}", index);
        for d in [&axiom.subsumee, &axiom.subsumer] {
            validate_description(d, &tag, &mut push);
        }
    }

    let dropped = model.dropped_elements();
    for (index, app) in model.applications.iter().enumerate() {
        validate_application(model, index, app, &mut push);
    }
    if has_cycle(model) {
        push("model", ValidationRule::Cycle, "operator applications form a cycle".to_string());
    }

    for (index, conflict) in model.conflicts.iter().enumerate() {
        let tag = format!("conflict#{}", index);
        if conflict.len() < 2 {
            push(&tag, ValidationRule::Conflict, "a conflict set needs at least two elements".to_string());
        }
        for id in conflict {
            if !model.elements.contains_key(id) {
                push(&tag, ValidationRule::DanglingReference, format!("unknown element {}", id));
            }
        }
    }

    for id in &model.fulfilled_marks {
        if !model.elements.contains_key(id) {
            push(id, ValidationRule::DanglingReference, format!("fulfilled mark references unknown element {}", id));
        } else if dropped.contains(id) {
            push(id, ValidationRule::DroppedMarked, "element dropped by Resolve is marked fulfilled".to_string());
        }
    }

    if let Some(world) = &model.world {
        for problem in world.check_invariants() {
            push("world", ValidationRule::World, problem);
        }
    }

    for spec in &model.membership_specs {
        let tag = format!("regions {}", spec.quality);
        let mut seen = BTreeSet::new();
        for region in &spec.regions {
            if !seen.insert(region.name.clone()) {
                push(&tag, ValidationRule::MembershipSpec, format!("duplicate region {}", region.name));
            }
            if let Err(problem) = region.check() {
                push(&tag, ValidationRule::MembershipSpec, problem);
            }
        }
    }
    out
}

fn validate_element(element: &Element, push: &mut impl FnMut(&str, ValidationRule, String)) {
    let id = element.id.as_str();
    let kind = element.kind;
    let compatible = matches!(
        (&element.body, kind),
        (Body::NaturalLanguage(_), _)
            | (_, ElementKind::Goal)
            | (Body::FunctionDesc { .. }, ElementKind::F)
            | (Body::Subsumption { .. }, ElementKind::FG | ElementKind::FC | ElementKind::CTG | ElementKind::SC | ElementKind::DA)
            | (Body::Quality(_), ElementKind::QG | ElementKind::QC)
    );
    if !compatible {
        push(id, ValidationRule::KindBody, format!("kind {} cannot carry this body", kind));
    }
    match &element.body {
        Body::NaturalLanguage(_) => {}
        Body::FunctionDesc { head, slots } => {
            if head.is_empty() {
                push(id, ValidationRule::DescriptionShape, "function head is empty".to_string());
            }
            for slot in slots {
                validate_description(&slot.to_description(), id, push);
            }
        }
        Body::Subsumption { subsumee, subsumer } => {
            validate_description(subsumee, id, push);
            validate_description(subsumer, id, push);
        }
        Body::Quality(q) => {
            validate_description(&q.quality, id, push);
            validate_description(&q.subject, id, push);
            for o in &q.observers {
                validate_description(o, id, push);
            }
            if q.quality.is_region_level() || q.subject.is_region_level() {
                push(id, ValidationRule::DescriptionShape, "quality and subject must be individual-level".to_string());
            }
            validate_region(&q.region, id, push);
            if kind == ElementKind::QC && !q.region.is_measurable() && q.observers.is_empty() {
                push(
                    id,
                    ValidationRule::RegionKind,
                    "a QC needs a measurable region or an observer".to_string(),
                );
            }
            let mut paths = BTreeSet::new();
            for ann in &q.annotations {
                if ann.path.is_empty() {
                    push(id, ValidationRule::Annotation, "annotation path is empty".to_string());
                }
                if ann.pct_low <= Rational::zero() || ann.pct_low > Rational::one() {
                    push(id, ValidationRule::Annotation, "annotation percentage must lie in (0, 1]".to_string());
                }
                if !paths.insert(ann.path.clone()) {
                    push(id, ValidationRule::Annotation, format!("two annotations share path {:?}", ann.path));
                }
            }
        }
    }
}

fn validate_region(region: &RegionExpr, subject: &str, push: &mut impl FnMut(&str, ValidationRule, String)) {
    match region {
        RegionExpr::Interval { low, high, .. } if low > high => {
            push(subject, ValidationRule::DescriptionShape, "interval low bound exceeds high bound".to_string())
        }
        RegionExpr::ValueSet(values) if values.is_empty() => {
            push(subject, ValidationRule::DescriptionShape, "value set is empty".to_string())
        }
        _ => {}
    }
}

fn validate_description(d: &Description, subject: &str, push: &mut impl FnMut(&str, ValidationRule, String)) {
    match d {
        Description::Enumeration(ids) => {
            let unique: BTreeSet<_> = ids.iter().collect();
            if ids.is_empty() || unique.len() != ids.len() {
                push(subject, ValidationRule::DescriptionShape, "enumeration must be non-empty and duplicate-free".to_string());
            }
        }
        Description::SlotRestriction(slot, modifier, filler) => {
            if INTERNAL_SLOTS.contains(&slot.as_str()) {
                push(subject, ValidationRule::ReservedSlot, format!("slot {} is reserved for internal use", slot));
            }
            if let CardinalityModifier::AtMost(n) | CardinalityModifier::AtLeast(n) | CardinalityModifier::Exactly(n) = modifier {
                if *n == 0 {
                    push(subject, ValidationRule::DescriptionShape, "cardinality must be at least 1".to_string());
                }
            }
            validate_description(filler, subject, push);
        }
        Description::InverseProjection(source, slot) => {
            if INTERNAL_SLOTS.contains(&slot.as_str()) {
                push(subject, ValidationRule::ReservedSlot, format!("slot {} is reserved for internal use", slot));
            }
            validate_description(source, subject, push);
        }
        Description::Intersection(l, r) | Description::Union(l, r) | Description::Difference(l, r) => {
            let l_region = matches!(**l, Description::Region(_)) || l.is_region_level();
            let r_region = matches!(**r, Description::Region(_)) || r.is_region_level();
            let l_neutral = matches!(**l, Description::Thing | Description::Nothing);
            let r_neutral = matches!(**r, Description::Thing | Description::Nothing);
            if l_region != r_region && !l_neutral && !r_neutral {
                push(subject, ValidationRule::DescriptionShape, "regions combine only with regions".to_string());
            }
            validate_description(l, subject, push);
            validate_description(r, subject, push);
        }
        Description::Region(region) => validate_region(region, subject, push),
        Description::AtomicConcept(_) | Description::Thing | Description::Nothing => {}
    }
}

/// Allowed output kinds for an operationalized input kind.
pub fn operationalize_targets(kind: ElementKind) -> &'static [ElementKind] {
    match kind {
        ElementKind::FG => &[ElementKind::F, ElementKind::FC, ElementKind::DA],
        ElementKind::QG => &[ElementKind::QC, ElementKind::F, ElementKind::FC, ElementKind::DA],
        ElementKind::CTG => &[ElementKind::SC, ElementKind::DA],
        ElementKind::Goal => &[ElementKind::DA],
        _ => &[],
    }
}

/// Checks the output kinds of one application against the operator signatures.
pub fn output_kind_problem(op: OperatorKind, input: ElementKind, output: ElementKind) -> Option<String> {
    let ok = match op {
        OperatorKind::Reduce => output == input || output == ElementKind::DA,
        OperatorKind::Interpret => input == ElementKind::Goal || output == input,
        OperatorKind::Focus | OperatorKind::Scale | OperatorKind::DeUniversalize => input.is_quality() && output == input,
        OperatorKind::Observe => input.is_quality() && output == ElementKind::QC,
        OperatorKind::Operationalize => operationalize_targets(input).contains(&output),
        OperatorKind::Resolve => true,
    };
    if ok {
        None
    } else {
        Some(format!("{} cannot turn a {} into a {}", op, input, output))
    }
}

fn validate_application(
    model: &Model,
    index: usize,
    app: &OperatorApplication,
    push: &mut impl FnMut(&str, ValidationRule, String),
) {
    let tag = format!("app#{}", index);
    let single_input = app.op != OperatorKind::Resolve;
    if single_input && app.inputs.len() != 1 {
        push(&tag, ValidationRule::Arity, format!("{} takes exactly one input, got {}", app.op, app.inputs.len()));
    }
    if !single_input && app.inputs.len() < 2 {
        push(&tag, ValidationRule::Arity, "Resolve takes at least two inputs".to_string());
    }
    if app.op.is_one_to_one() && app.outputs.len() != 1 {
        push(&tag, ValidationRule::Arity, format!("{} produces exactly one output, got {}", app.op, app.outputs.len()));
    }
    if app.op != OperatorKind::Resolve && app.outputs.is_empty() {
        push(&tag, ValidationRule::Arity, format!("{} needs at least one output", app.op));
    }
    for id in app.inputs.iter().chain(app.outputs.iter()) {
        if !model.elements.contains_key(id) {
            push(&tag, ValidationRule::DanglingReference, format!("unknown element {}", id));
        }
    }
    if app.op == OperatorKind::Resolve {
        let inputs: BTreeSet<String> = app.inputs.iter().cloned().collect();
        if !model.conflicts.contains(&inputs) {
            push(&tag, ValidationRule::Conflict, "Resolve inputs are not a declared conflict".to_string());
        }
        return;
    }
    if let Some(input) = app.inputs.first().and_then(|i| model.element(i)) {
        for output in app.outputs.iter().filter_map(|o| model.element(o)) {
            if let Some(problem) = output_kind_problem(app.op, input.kind, output.kind) {
                push(&tag, ValidationRule::OutputKind, problem);
            }
        }
        if app.op == OperatorKind::Interpret && app.strength == Strength::Weakening {
            push(&tag, ValidationRule::OutputKind, "Interpret is never a weakening".to_string());
        }
    }
}

fn has_cycle(model: &Model) -> bool {
    let mut edges: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for app in &model.applications {
        for i in &app.inputs {
            for o in &app.outputs {
                if i != o {
                    edges.entry(i.as_str()).or_default().push(o.as_str());
                }
            }
        }
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state: BTreeMap<&str, u8> = BTreeMap::new();
    fn visit<'a>(n: &'a str, edges: &BTreeMap<&'a str, Vec<&'a str>>, state: &mut BTreeMap<&'a str, u8>) -> bool {
        match state.get(n) {
            Some(1) => return true,
            Some(2) => return false,
            _ => {}
        }
        state.insert(n, 1);
        for next in edges.get(n).into_iter().flatten() {
            if visit(next, edges, state) {
                return true;
            }
        }
        state.insert(n, 2);
        false
    }
    let nodes: Vec<&str> = edges.keys().copied().collect();
    nodes.into_iter().any(|n| visit(n, &edges, &mut state))
}

/// Identifiers appearing in the model's descriptions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Symbols {
    pub concepts: BTreeSet<String>,
    pub slots: BTreeSet<String>,
    pub regions: BTreeSet<String>,
    pub individuals: BTreeSet<String>,
}

impl Symbols {
    /// Adds every identifier occurring in `d`.
    pub fn collect(&mut self, d: &Description) {
        match d {
            Description::AtomicConcept(n) => {
                self.concepts.insert(n.clone());
            }
            Description::Enumeration(ids) => self.individuals.extend(ids.iter().cloned()),
            Description::SlotRestriction(s, _, f) => {
                self.slots.insert(s.clone());
                self.collect(f);
            }
            Description::InverseProjection(src, s) => {
                self.slots.insert(s.clone());
                self.collect(src);
            }
            Description::Intersection(l, r) | Description::Union(l, r) | Description::Difference(l, r) => {
                self.collect(l);
                self.collect(r);
            }
            Description::Region(r) => self.collect_region(r),
            Description::Thing | Description::Nothing => {}
        }
    }

    pub fn collect_region(&mut self, r: &RegionExpr) {
        if let RegionExpr::NamedRegion { name, .. } = r {
            self.regions.insert(name.clone());
        }
    }
}

/// The exact sets of concept, slot, region and individual names used in the model.
pub fn free_symbols(model: &Model) -> Symbols {
    let mut sym = Symbols::default();
    for element in model.elements.values() {
        match &element.body {
            Body::NaturalLanguage(_) => {}
            Body::FunctionDesc { head, slots } => {
                sym.concepts.insert(head.clone());
                for slot in slots {
                    sym.collect(&slot.to_description());
                }
            }
            Body::Subsumption { subsumee, subsumer } => {
                sym.collect(subsumee);
                sym.collect(subsumer);
            }
            Body::Quality(q) => {
                sym.collect(&q.quality);
                sym.collect(&q.subject);
                sym.collect_region(&q.region);
                for o in &q.observers {
                    sym.collect(o);
                }
            }
        }
    }
    for axiom in &model.axioms {
        sym.collect(&axiom.subsumee);
        sym.collect(&axiom.subsumer);
    }
    for app in &model.applications {
        match &app.args {
            OperatorArgs::Focus(targets) => {
                for t in targets {
                    match t {
                        FocusTarget::Subject(d) | FocusTarget::Quality(d) => sym.collect(d),
                    }
                }
            }
            OperatorArgs::Observe(d) => sym.collect(d),
            _ => {}
        }
    }
    sym
}

/// Canonical form: flattened, sorted, de-duplicated intersections and unions with unit/zero laws.
pub fn normalize(d: &Description) -> Description {
    match d {
        Description::AtomicConcept(_) | Description::Thing | Description::Nothing => d.clone(),
        Description::Enumeration(ids) => {
            let set: BTreeSet<String> = ids.iter().cloned().collect();
            Description::Enumeration(set.into_iter().collect())
        }
        Description::Region(RegionExpr::ValueSet(values)) => {
            let set: BTreeSet<Value> = values.iter().cloned().collect();
            Description::Region(RegionExpr::ValueSet(set.into_iter().collect()))
        }
        Description::Region(_) => d.clone(),
        Description::SlotRestriction(s, m, f) => Description::SlotRestriction(s.clone(), *m, Box::new(normalize(f))),
        Description::InverseProjection(src, s) => {
            let src = normalize(src);
            if src == Description::Nothing {
                Description::Nothing
            } else {
                Description::InverseProjection(Box::new(src), s.clone())
            }
        }
        Description::Intersection(_, _) => {
            let mut parts = BTreeSet::new();
            collect_flat(d, true, &mut parts);
            if parts.contains(&Description::Nothing) {
                return Description::Nothing;
            }
            parts.remove(&Description::Thing);
            Description::and_all(parts.into_iter().collect())
        }
        Description::Union(_, _) => {
            let mut parts = BTreeSet::new();
            collect_flat(d, false, &mut parts);
            if parts.contains(&Description::Thing) {
                return Description::Thing;
            }
            parts.remove(&Description::Nothing);
            Description::or_all(parts.into_iter().collect())
        }
        Description::Difference(l, r) => {
            let l = normalize(l);
            let r = normalize(r);
            if l == Description::Nothing || r == Description::Thing || l == r {
                Description::Nothing
            } else if r == Description::Nothing {
                l
            } else if let Description::Difference(inner_l, inner_r) = &l {
                // (A - B) - C  ==  A - (B or C)
                let merged = normalize(&Description::or((**inner_r).clone(), r));
                normalize(&Description::minus((**inner_l).clone(), merged))
            } else {
                Description::minus(l, r)
            }
        }
    }
}

fn collect_flat(d: &Description, intersection: bool, out: &mut BTreeSet<Description>) {
    match (d, intersection) {
        (Description::Intersection(l, r), true) | (Description::Union(l, r), false) => {
            collect_flat(l, intersection, out);
            collect_flat(r, intersection, out);
        }
        _ => {
            let n = normalize(d);
            match (&n, intersection) {
                (Description::Intersection(_, _), true) | (Description::Union(_, _), false) => {
                    collect_flat(&n, intersection, out)
                }
                _ => {
                    out.insert(n);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Description {
        Description::atomic(n)
    }

    #[test]
    fn normalize_units_and_commutativity() {
        assert_eq!(normalize(&Description::and(a("A"), Description::Thing)), a("A"));
        assert_eq!(normalize(&Description::and(a("B"), a("A"))), normalize(&Description::and(a("A"), a("B"))));
        assert_eq!(normalize(&Description::minus(a("Ticket"), a("Ticket"))), Description::Nothing);
        assert_eq!(normalize(&Description::or(a("D"), a("D"))), a("D"));
        assert_eq!(normalize(&Description::and(a("D"), Description::Nothing)), Description::Nothing);
    }

    #[test]
    fn normalize_is_idempotent_on_nested_input() {
        let d = Description::minus(
            Description::minus(Description::and(a("C"), Description::and(a("A"), a("C"))), a("B")),
            Description::or(a("E"), Description::or(a("B"), Description::Nothing)),
        );
        let once = normalize(&d);
        assert_eq!(normalize(&once), once);
    }

    #[test]
    fn empty_model_validates() {
        assert!(validate_model(&Model::new("m")).is_empty());
    }

    #[test]
    fn dangling_reference_is_reported() {
        let mut m = Model::new("m");
        m.add_element(Element::natural("G1", ElementKind::Goal, "x"));
        m.applications.push(OperatorApplication::new(OperatorKind::Reduce, &["G1"], &["G9"], Strength::Strengthening));
        let diags = validate_model(&m);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].rule, ValidationRule::DanglingReference);
    }

    #[test]
    fn reduce_with_two_inputs_is_an_arity_violation() {
        let mut m = Model::new("m");
        for id in ["G1", "G2", "G3"] {
            m.add_element(Element::natural(id, ElementKind::Goal, "x"));
        }
        m.applications.push(OperatorApplication::new(OperatorKind::Reduce, &["G1", "G2"], &["G3"], Strength::Equating));
        let diags = validate_model(&m);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].rule, ValidationRule::Arity);
    }

    #[test]
    fn free_symbols_of_a_function() {
        let mut m = Model::new("m");
        m.add_element(Element::function("F1", "Activate", vec![SlotD::new("actor", a("Manager"))]));
        let sym = free_symbols(&m);
        assert_eq!(sym.concepts, ["Activate", "Manager"].iter().map(|s| s.to_string()).collect());
        assert_eq!(sym.slots, ["actor".to_string()].into_iter().collect());
        assert!(sym.individuals.is_empty() && sym.regions.is_empty());
        assert_eq!(free_symbols(&Model::new("e")), Symbols::default());
    }

    #[test]
    fn enumeration_individuals_are_collected() {
        let mut m = Model::new("m");
        m.add_element(Element::subsumption(
            "SC1",
            ElementKind::SC,
            a("Database"),
            Description::individuals(&["MySQL", "Oracle"]),
        ));
        let sym = free_symbols(&m);
        assert_eq!(sym.individuals, ["MySQL", "Oracle"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn reserved_internal_slot_is_rejected() {
        let mut m = Model::new("m");
        m.add_element(Element::subsumption(
            "DA1",
            ElementKind::DA,
            a("A"),
            Description::slot("subsumee", CardinalityModifier::Some, a("B")),
        ));
        let diags = validate_model(&m);
        assert_eq!(diags[0].rule, ValidationRule::ReservedSlot);
    }
}
