//! Recursive-descent parser for the `.dsr` textual format, with span-carrying diagnostics,
//! statement-level error recovery and a canonical pretty-printer.

pub mod lexer;
pub mod printer;

pub use printer::{print_description, print_model, print_region};

use crate::membership::PrototypeRegion;
use crate::model::*;
use crate::semantics::{QualityRecord, World};
use crate::value::{parse_decimal, Rational, Value};
use lexer::{tokenize, Tok, Token};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

/// Position of a token in the source text. Lines and columns are 1-based, offsets are byte offsets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub file: Option<PathBuf>,
    pub line: usize,
    pub column: usize,
    pub offset: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(path) => write!(f, "{}:{}:{}", path.display(), self.line, self.column),
            None => write!(f, "{}:{}", self.line, self.column),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub span: SourceSpan,
    pub severity: Severity,
    pub message: String,
    /// Description of the tokens that would have been accepted.
    pub expected: Option<String>,
}

impl ParseDiagnostic {
    pub fn error(span: SourceSpan, message: &str, expected: Option<String>) -> Self {
        ParseDiagnostic { span, severity: Severity::Error, message: message.to_string(), expected }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {}: {}", self.span, level, self.message)
    }
}

/// Parses a whole model. Either every statement parses and the model validates, or diagnostics are returned.
pub fn parse_model(text: &str) -> Result<Model, Vec<ParseDiagnostic>> {
    parse_model_in(text, None)
}

/// As [`parse_model`], attaching `file` to every diagnostic span.
pub fn parse_model_in(text: &str, file: Option<&Path>) -> Result<Model, Vec<ParseDiagnostic>> {
    parse_model_with_spans(text, file).map(|(model, _)| model)
}

/// As [`parse_model_in`], also returning the start span of every statement keyed by element
/// id, `app#N`, `axiom#N`, `conflict#N`, `world` or `regions Q`.
pub fn parse_model_with_spans(
    text: &str,
    file: Option<&Path>,
) -> Result<(Model, HashMap<String, SourceSpan>), Vec<ParseDiagnostic>> {
    let result = (|| {
        let tokens = tokenize(text)?;
        let mut parser = Parser::new(tokens);
        let model = parser.model();
        if !parser.diags.is_empty() {
            return Err(parser.diags);
        }
        let problems = validate_model(&model);
        if problems.is_empty() {
            let mut spans = std::mem::take(&mut parser.spans);
            if let Some(path) = file {
                for span in spans.values_mut() {
                    span.file = Some(path.to_path_buf());
                }
            }
            return Ok((model, spans));
        }
        let fallback = parser.tokens[0].span.clone();
        Err(problems
            .into_iter()
            .map(|p| {
                let span = parser.spans.get(&p.subject).cloned().unwrap_or_else(|| fallback.clone());
                ParseDiagnostic::error(span, &p.to_string(), None)
            })
            .collect())
    })();
    result.map_err(|mut diags| {
        if let Some(path) = file {
            for d in &mut diags {
                d.span.file = Some(path.to_path_buf());
            }
        }
        diags
    })
}

/// Parses a single description.
pub fn parse_description(text: &str) -> Result<Description, Vec<ParseDiagnostic>> {
    let tokens = tokenize(text)?;
    let mut parser = Parser::new(tokens);
    let result = parser.description();
    if let Ok(d) = result {
        if parser.at_eof() {
            return Ok(d);
        }
        let _: PResult<()> = parser.unexpected("end of description");
    }
    Err(parser.diags)
}

type PResult<T> = Result<T, ()>;

const DESCRIPTION_KEYWORDS: [&str; 7] = ["Thing", "Nothing", "or", "region", "measurable", "SOME", "ONLY"];

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<ParseDiagnostic>,
    /// Spans keyed by validation subject (element id, `app#N`, `axiom#N`, ...).
    spans: HashMap<String, SourceSpan>,
}

fn number_value(text: &str) -> Option<Rational> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => parse_decimal(text),
    }
}

fn app_keyword(word: &str) -> Option<(OperatorKind, Option<ScaleDirection>)> {
    Some(match word {
        "reduce" => (OperatorKind::Reduce, None),
        "interpret" => (OperatorKind::Interpret, None),
        "operationalize" => (OperatorKind::Operationalize, None),
        "focus" => (OperatorKind::Focus, None),
        "scale_up" => (OperatorKind::Scale, Some(ScaleDirection::Up)),
        "scale_down" => (OperatorKind::Scale, Some(ScaleDirection::Down)),
        "deuniv" => (OperatorKind::DeUniversalize, None),
        "resolve" => (OperatorKind::Resolve, None),
        "observe" => (OperatorKind::Observe, None),
        _ => return None,
    })
}

/// Strength recorded when an application line carries no tag.
pub fn default_strength(op: OperatorKind, direction: Option<ScaleDirection>) -> Strength {
    match (op, direction) {
        (OperatorKind::Scale, Some(ScaleDirection::Up)) => Strength::Strengthening,
        (OperatorKind::Focus | OperatorKind::DeUniversalize | OperatorKind::Resolve | OperatorKind::Scale, _) => {
            Strength::Weakening
        }
        _ => Strength::Strengthening,
    }
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Self {
        Parser { tokens, pos: 0, diags: Vec::new(), spans: HashMap::new() }
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> SourceSpan {
        self.tokens[self.pos].span.clone()
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == w)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected<T>(&mut self, expected: &str) -> PResult<T> {
        let found = self.peek().describe();
        let span = self.span();
        self.diags.push(ParseDiagnostic::error(
            span,
            &format!("expected {} but found {}", expected, found),
            Some(expected.to_string()),
        ));
        Err(())
    }

    fn error_here<T>(&mut self, message: &str) -> PResult<T> {
        let span = self.span();
        self.diags.push(ParseDiagnostic::error(span, message, None));
        Err(())
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.unexpected(&format!("'{}'", s))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            self.unexpected(&format!("'{}'", w))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn ident_list(&mut self) -> PResult<Vec<String>> {
        let mut out = vec![self.ident()?];
        while self.eat_sym(",") {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    /// Skips to the end of the current statement after an error.
    fn recover(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Sym(";") if depth == 0 => {
                    self.bump();
                    return;
                }
                Tok::Sym("}") if depth == 0 => return,
                Tok::Sym("{") => depth += 1,
                Tok::Sym("}") => depth -= 1,
                _ => {}
            }
            self.bump();
        }
    }

    fn model(&mut self) -> Model {
        let mut model = Model::new("");
        self.spans.insert("model".to_string(), self.span());
        if self.is_word("model") {
            let header = (|| {
                self.bump();
                let name = self.ident()?;
                self.expect_sym(";")?;
                Ok(name)
            })();
            match header {
                Ok(name) => model.name = name,
                Err(()) => self.recover(),
            }
        }
        while !self.at_eof() {
            if self.is_sym("}") {
                let _: PResult<()> = self.error_here("unexpected '}'");
                self.bump();
                continue;
            }
            if self.statement(&mut model).is_err() {
                self.recover();
            }
        }
        model
    }

    fn statement(&mut self, model: &mut Model) -> PResult<()> {
        let start = self.span();
        let word = match self.peek() {
            Tok::Ident(w) => w.clone(),
            _ => return self.unexpected("a declaration or statement"),
        };
        if let Some(kind) = ElementKind::from_keyword(&word) {
            self.bump();
            let id = self.ident()?;
            self.expect_sym(":=")?;
            let body = self.body(kind)?;
            self.expect_sym(";")?;
            if model.elements.contains_key(&id) {
                self.diags.push(ParseDiagnostic::error(start, &format!("duplicate element id {}", id), None));
                return Ok(());
            }
            self.spans.insert(id.clone(), start);
            model.add_element(Element::new(&id, kind, body));
            return Ok(());
        }
        if let Some((op, direction)) = app_keyword(&word) {
            self.bump();
            let app = self.application(op, direction)?;
            self.spans.insert(format!("app#{}", model.applications.len()), start);
            model.applications.push(app);
            return Ok(());
        }
        match word.as_str() {
            "axiom" => {
                self.bump();
                let sub = self.description()?;
                self.expect_sym(":<")?;
                let sup = self.description()?;
                self.expect_sym(";")?;
                self.spans.insert(format!("axiom#{}", model.axioms.len()), start);
                model.axioms.push(Axiom::new(sub, sup));
            }
            "conflict" => {
                self.bump();
                self.expect_sym("{")?;
                let ids = self.ident_list()?;
                self.expect_sym("}")?;
                self.expect_sym(";")?;
                self.spans.insert(format!("conflict#{}", model.conflicts.len()), start);
                model.conflicts.push(ids.into_iter().collect());
            }
            "fulfilled" => {
                self.bump();
                let ids = self.ident_list()?;
                self.expect_sym(";")?;
                for id in ids {
                    self.spans.entry(id.clone()).or_insert_with(|| start.clone());
                    model.fulfilled_marks.insert(id);
                }
            }
            "regions" => {
                self.bump();
                let quality = self.ident()?;
                self.spans.insert(format!("regions {}", quality), start);
                self.expect_sym("{")?;
                let mut regions = Vec::new();
                while !self.is_sym("}") && !self.at_eof() {
                    match self.prototype_region() {
                        Ok(r) => regions.push(r),
                        Err(()) => self.recover(),
                    }
                }
                self.expect_sym("}")?;
                model.membership_specs.push(MembershipSpec { quality, regions });
            }
            "world" => {
                self.bump();
                self.spans.insert("world".to_string(), start);
                self.expect_sym("{")?;
                let mut world = model.world.take().unwrap_or_default();
                while !self.is_sym("}") && !self.at_eof() {
                    if self.world_statement(&mut world).is_err() {
                        self.recover();
                    }
                }
                self.expect_sym("}")?;
                model.world = Some(world);
            }
            _ => return self.unexpected("a declaration or statement"),
        }
        Ok(())
    }

    fn prototype_region(&mut self) -> PResult<PrototypeRegion> {
        let name = self.ident()?;
        self.expect_sym("=")?;
        let region = if self.eat_word("points") {
            self.expect_sym("{")?;
            let mut values = vec![self.signed_number()?];
            while self.eat_sym(",") {
                values.push(self.signed_number()?);
            }
            self.expect_sym("}")?;
            PrototypeRegion::points(&name, values)
        } else if self.eat_word("interval") {
            self.expect_sym("[")?;
            let a = self.signed_number()?;
            self.expect_sym(",")?;
            let b = self.signed_number()?;
            self.expect_sym("]")?;
            PrototypeRegion::interval(&name, a, b)
        } else {
            return self.unexpected("'points' or 'interval'");
        };
        self.expect_sym(";")?;
        Ok(region)
    }

    fn world_statement(&mut self, world: &mut World) -> PResult<()> {
        let word = self.ident()?;
        match word.as_str() {
            "individual" => {
                let id = self.ident()?;
                world.add_individual(&id);
                if self.eat_sym(":") {
                    for c in self.ident_list()? {
                        world.assert_concept(&c, &id);
                    }
                }
            }
            "slot" => {
                let slot = self.ident()?;
                self.expect_sym("(")?;
                let a = self.ident()?;
                self.expect_sym(",")?;
                let b = self.ident()?;
                self.expect_sym(")")?;
                world.assert_slot(&slot, &a, &b);
            }
            "data" => {
                let slot = self.ident()?;
                self.expect_sym("(")?;
                let a = self.ident()?;
                self.expect_sym(")")?;
                self.expect_sym("=")?;
                let v = self.value()?;
                world.assert_data(&slot, &a, v);
            }
            "quality" => {
                let id = self.ident()?;
                self.expect_sym(":")?;
                let quality = self.ident()?;
                self.expect_word("inheres")?;
                let bearer = self.ident()?;
                self.expect_word("value")?;
                let value = self.value()?;
                let unit = match self.peek() {
                    Tok::Ident(u) if u != "observed_by" => {
                        let u = u.clone();
                        self.bump();
                        Some(u)
                    }
                    _ => None,
                };
                let mut observers = BTreeSet::new();
                if self.eat_word("observed_by") {
                    self.expect_sym("{")?;
                    observers.extend(self.ident_list()?);
                    self.expect_sym("}")?;
                }
                world.add_quality_record(QualityRecord { id, quality, bearer, value, unit, observers });
            }
            "region" => {
                let name = self.ident()?;
                self.expect_sym("=")?;
                let region = self.region()?;
                world.region_defs.insert(name, region);
            }
            _ => {
                self.pos -= 1;
                return self.unexpected("'individual', 'slot', 'data', 'quality' or 'region'");
            }
        }
        self.expect_sym(";")
    }

    fn signed_number(&mut self) -> PResult<Rational> {
        let negative = self.eat_sym("-");
        let value = match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                number_value(&n)
            }
            Tok::Percent(n) => {
                self.bump();
                number_value(&n).map(|v| v / Rational::from_integer(BigInt::from(100)))
            }
            _ => return self.unexpected("a number"),
        };
        match value {
            Some(v) => Ok(if negative { -v } else { v }),
            None => self.error_here("malformed number"),
        }
    }

    fn value(&mut self) -> PResult<Value> {
        if let Tok::Str(s) = self.peek().clone() {
            self.bump();
            return Ok(Value::Str(s));
        }
        self.signed_number().map(Value::Num)
    }

    fn count(&mut self) -> PResult<u32> {
        match self.peek().clone() {
            Tok::Number(n) => match n.parse::<u32>() {
                Ok(v) => {
                    self.bump();
                    Ok(v)
                }
                Err(_) => self.error_here("expected a whole number"),
            },
            _ => self.unexpected("a whole number"),
        }
    }

    fn body(&mut self, kind: ElementKind) -> PResult<Body> {
        if let Tok::Str(s) = self.peek().clone() {
            self.bump();
            return Ok(Body::NaturalLanguage(s));
        }
        match kind {
            ElementKind::F => {
                let head = self.ident()?;
                let mut slots = Vec::new();
                while self.is_sym("<") {
                    let (slot, modifier, filler) = self.slot_restriction()?;
                    slots.push(SlotD { slot, modifier, filler });
                }
                Ok(Body::FunctionDesc { head, slots })
            }
            ElementKind::QG | ElementKind::QC => Ok(Body::Quality(self.quality_statement()?)),
            ElementKind::Goal => {
                if self.statement_has_sym("::") {
                    return Ok(Body::Quality(self.quality_statement()?));
                }
                let d = self.description()?;
                if self.eat_sym(":<") {
                    let sup = self.description()?;
                    return Ok(Body::Subsumption { subsumee: d, subsumer: sup });
                }
                match function_shape(&d) {
                    Some((head, slots)) => Ok(Body::FunctionDesc { head, slots }),
                    None => self.error_here("a goal body must be text, a subsumption, a quality statement or a function"),
                }
            }
            _ => {
                let sub = self.description()?;
                self.expect_sym(":<")?;
                let sup = self.description()?;
                Ok(Body::Subsumption { subsumee: sub, subsumer: sup })
            }
        }
    }

    fn statement_has_sym(&self, s: &str) -> bool {
        self.tokens[self.pos..]
            .iter()
            .take_while(|t| !matches!(t.tok, Tok::Sym(";") | Tok::Eof))
            .any(|t| matches!(t.tok, Tok::Sym(x) if x == s))
    }

    fn quality_statement(&mut self) -> PResult<QualityStatement> {
        let quality = if self.eat_sym("(") {
            let q = self.description()?;
            self.expect_sym(")")?;
            q
        } else {
            Description::AtomicConcept(self.ident()?)
        };
        self.expect_sym("(")?;
        let subject = self.description()?;
        self.expect_sym(")")?;
        self.expect_sym("::")?;
        let region = self.region()?;
        let mut observers = Vec::new();
        while self.is_sym("<") {
            self.bump();
            self.expect_word("observed_by")?;
            self.expect_sym(":")?;
            observers.push(self.description()?);
            self.expect_sym(">")?;
        }
        let mut annotations = Vec::new();
        while self.eat_word("with") {
            annotations.push(self.annotation()?);
        }
        Ok(QualityStatement { quality, subject, region, observers, annotations })
    }

    /// `U(?X, <inheres_in: <run_of: ?X>>, 80%)`
    fn annotation(&mut self) -> PResult<UAnnotation> {
        self.expect_word("U")?;
        self.expect_sym("(")?;
        let var_id = match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                v
            }
            _ => return self.unexpected("a variable such as ?X"),
        };
        self.expect_sym(",")?;
        let mut path = Vec::new();
        let mut depth = 0;
        loop {
            self.expect_sym("<")?;
            path.push(self.ident()?);
            self.expect_sym(":")?;
            depth += 1;
            match self.peek().clone() {
                Tok::Var(v) => {
                    self.bump();
                    if v != var_id {
                        return self.error_here(&format!("path must end in ?{}", var_id));
                    }
                    break;
                }
                Tok::Sym("<") => continue,
                _ => return self.unexpected("'<' or the annotation variable"),
            }
        }
        for _ in 0..depth {
            self.expect_sym(">")?;
        }
        self.expect_sym(",")?;
        let pct_low = self.signed_number()?;
        self.expect_sym(")")?;
        Ok(UAnnotation { var_id, path, pct_low })
    }

    fn region(&mut self) -> PResult<RegionExpr> {
        match self.peek().clone() {
            Tok::Sym("[") => self.interval(),
            Tok::Sym("{") => self.value_set(),
            Tok::Ident(w) if w == "measurable" => {
                self.bump();
                Ok(RegionExpr::NamedRegion { name: self.ident()?, qualitative: false })
            }
            Tok::Ident(w) => {
                self.bump();
                Ok(RegionExpr::NamedRegion { name: w, qualitative: true })
            }
            _ => self.unexpected("a region"),
        }
    }

    fn interval(&mut self) -> PResult<RegionExpr> {
        self.expect_sym("[")?;
        let low = self.signed_number()?;
        self.expect_sym(",")?;
        let high = self.signed_number()?;
        let mut unit = None;
        if self.eat_sym("(") {
            unit = Some(self.ident()?);
            self.eat_sym(".");
            self.expect_sym(")")?;
        }
        self.expect_sym("]")?;
        Ok(RegionExpr::Interval { low, high, unit })
    }

    fn value_set(&mut self) -> PResult<RegionExpr> {
        self.expect_sym("{")?;
        let mut values = vec![self.value()?];
        while self.eat_sym(",") {
            values.push(self.value()?);
        }
        self.expect_sym("}")?;
        Ok(RegionExpr::ValueSet(values))
    }

    fn application(&mut self, op: OperatorKind, direction: Option<ScaleDirection>) -> PResult<OperatorApplication> {
        let inputs = self.ident_list()?;
        self.expect_sym("->")?;
        let outputs = if matches!(self.peek(), Tok::Ident(_)) { self.ident_list()? } else { Vec::new() };
        let mut strength = default_strength(op, direction);
        if self.eat_sym("[") {
            let word = self.ident()?;
            strength = match word.as_str() {
                "strengthen" => Strength::Strengthening,
                "weaken" => Strength::Weakening,
                "equate" => Strength::Equating,
                _ => {
                    self.pos -= 1;
                    return self.unexpected("'strengthen', 'weaken' or 'equate'");
                }
            };
            self.expect_sym("]")?;
        }
        let args = match op {
            OperatorKind::Scale => {
                let direction = direction.unwrap_or(ScaleDirection::Down);
                let factor = if self.eat_word("by") {
                    if self.eat_sym("(") {
                        let low_factor = self.signed_number()?;
                        self.expect_sym(",")?;
                        let high_factor = self.signed_number()?;
                        self.expect_sym(")")?;
                        Some(ScaleFactor::Quantitative { low_factor, high_factor })
                    } else {
                        Some(ScaleFactor::Qualitative { region_name: self.ident()? })
                    }
                } else {
                    None
                };
                OperatorArgs::Scale { direction, factor }
            }
            OperatorKind::Focus if self.eat_word("on") => {
                let mut targets = vec![self.focus_target()?];
                while self.eat_sym(",") {
                    targets.push(self.focus_target()?);
                }
                OperatorArgs::Focus(targets)
            }
            OperatorKind::DeUniversalize if self.is_word("U") => OperatorArgs::DeUniversalize(self.annotation()?),
            OperatorKind::Observe if self.eat_word("by") => OperatorArgs::Observe(self.description()?),
            _ => OperatorArgs::None,
        };
        self.expect_sym(";")?;
        Ok(OperatorApplication { op, inputs, outputs, strength, args })
    }

    fn focus_target(&mut self) -> PResult<FocusTarget> {
        if self.eat_word("subject") {
            Ok(FocusTarget::Subject(self.description()?))
        } else if self.eat_word("quality") {
            Ok(FocusTarget::Quality(self.description()?))
        } else {
            self.unexpected("'subject' or 'quality'")
        }
    }

    // Descriptions: difference < union < adjacency < postfix projection.

    fn description(&mut self) -> PResult<Description> {
        let mut left = self.union()?;
        while self.eat_sym("-") {
            let right = self.union()?;
            left = Description::minus(left, right);
        }
        Ok(left)
    }

    fn union(&mut self) -> PResult<Description> {
        let mut left = self.intersection()?;
        while self.eat_word("or") || self.eat_sym("∨") {
            let right = self.intersection()?;
            left = Description::or(left, right);
        }
        Ok(left)
    }

    fn starts_primary(&self) -> bool {
        match self.peek() {
            Tok::Ident(w) => w != "or",
            Tok::Sym(s) => matches!(*s, "(" | "{" | "[" | "<"),
            _ => false,
        }
    }

    fn intersection(&mut self) -> PResult<Description> {
        let mut left = self.postfix()?;
        while self.starts_primary() {
            let right = self.postfix()?;
            left = Description::and(left, right);
        }
        Ok(left)
    }

    fn postfix(&mut self) -> PResult<Description> {
        let mut d = self.primary()?;
        while self.is_sym(".") && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.bump();
            let slot = self.ident()?;
            d = Description::inverse(d, &slot);
        }
        Ok(d)
    }

    fn primary(&mut self) -> PResult<Description> {
        match self.peek().clone() {
            Tok::Ident(w) => match w.as_str() {
                "Thing" => {
                    self.bump();
                    Ok(Description::Thing)
                }
                "Nothing" => {
                    self.bump();
                    Ok(Description::Nothing)
                }
                "region" => {
                    self.bump();
                    Ok(Description::Region(RegionExpr::NamedRegion { name: self.ident()?, qualitative: true }))
                }
                "measurable" => {
                    self.bump();
                    Ok(Description::Region(RegionExpr::NamedRegion { name: self.ident()?, qualitative: false }))
                }
                _ if DESCRIPTION_KEYWORDS.contains(&w.as_str()) => self.unexpected("a description"),
                _ => {
                    self.bump();
                    Ok(Description::AtomicConcept(w))
                }
            },
            Tok::Sym("(") => {
                self.bump();
                let d = self.description()?;
                self.expect_sym(")")?;
                Ok(d)
            }
            Tok::Sym("[") => Ok(Description::Region(self.interval()?)),
            Tok::Sym("{") => {
                if matches!(self.peek_at(1), Tok::Ident(_)) {
                    self.bump();
                    let ids = self.ident_list()?;
                    self.expect_sym("}")?;
                    Ok(Description::Enumeration(ids))
                } else {
                    Ok(Description::Region(self.value_set()?))
                }
            }
            Tok::Sym("<") => {
                let (slot, modifier, filler) = self.slot_restriction()?;
                Ok(Description::SlotRestriction(slot, modifier, Box::new(filler)))
            }
            _ => self.unexpected("a description"),
        }
    }

    /// `<slot: [modifier] D>`
    fn slot_restriction(&mut self) -> PResult<(String, CardinalityModifier, Description)> {
        self.expect_sym("<")?;
        let slot = self.ident()?;
        self.expect_sym(":")?;
        let modifier = match self.peek().clone() {
            Tok::Sym("<=") => {
                self.bump();
                CardinalityModifier::AtMost(self.count()?)
            }
            Tok::Sym(">=") => {
                self.bump();
                CardinalityModifier::AtLeast(self.count()?)
            }
            Tok::Number(_) => CardinalityModifier::Exactly(self.count()?),
            Tok::Ident(w) if w == "SOME" => {
                self.bump();
                CardinalityModifier::Some
            }
            Tok::Ident(w) if w == "ONLY" => {
                self.bump();
                CardinalityModifier::Only
            }
            _ => CardinalityModifier::ExactlyOne,
        };
        let filler = self.description()?;
        self.expect_sym(">")?;
        Ok((slot, modifier, filler))
    }
}

/// Reads `Head <s: D> ...` back from a parsed description.
fn function_shape(d: &Description) -> Option<(String, Vec<SlotD>)> {
    let mut parts = Vec::new();
    flatten_and(d, &mut parts);
    let (first, rest) = parts.split_first()?;
    let Description::AtomicConcept(head) = first else {
        return None;
    };
    let mut slots = Vec::new();
    for p in rest {
        match p {
            Description::SlotRestriction(slot, modifier, filler) => {
                slots.push(SlotD { slot: slot.clone(), modifier: *modifier, filler: (**filler).clone() })
            }
            _ => return None,
        }
    }
    Some((head.clone(), slots))
}

fn flatten_and<'a>(d: &'a Description, out: &mut Vec<&'a Description>) {
    match d {
        Description::Intersection(l, r) => {
            flatten_and(l, out);
            flatten_and(r, out);
        }
        other => out.push(other),
    }
}
