//! The line-oriented `.ea` text format for finite effect algebras.
//!
//! ```text
//! algebra c2
//! elements 0 h 1
//! sum h h = 1
//! sum 0 1 = 1   # comments run to the end of the line
//! ```
//!
//! Clauses `sum 0 x = x` are implied for every element.

pub mod scenario;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::algebra::{AlgebraError, EffectAlgebra, ElementId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Note,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Related {
    pub span: Span,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub line: usize,
    pub column: usize,
    pub related: Vec<Related>,
}

impl Diagnostic {
    fn error(span: Span, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            message: message.into(),
            line: span.line,
            column: span.column,
            related: Vec::new(),
        }
    }

    fn with_related(mut self, span: Span, message: impl Into<String>) -> Self {
        self.related.push(Related { span, message: message.into() });
        self
    }

    pub fn span(&self) -> Span {
        Span { line: self.line, column: self.column }
    }

    /// `origin:line:column: error: message`, then one line per related span.
    pub fn render(&self, origin: &str) -> String {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Note => "note",
        };
        let mut out = format!("{origin}:{}:{}: {sev}: {}", self.line, self.column, self.message);
        for r in &self.related {
            out.push_str(&format!("\n{origin}:{}: note: {}", r.span, r.message));
        }
        out
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumClause {
    pub a: String,
    pub b: String,
    pub c: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EaDocument {
    pub name: String,
    pub labels: Vec<String>,
    pub label_spans: Vec<Span>,
    pub clauses: Vec<SumClause>,
}

struct Token<'a> {
    text: &'a str,
    span: Span,
}

fn tokens(line_no: usize, line: &str) -> Vec<Token<'_>> {
    let code = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in code.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((byte, col)),
            (true, Some((b, c))) => {
                out.push(Token { text: &code[b..byte], span: Span { line: line_no, column: c + 1 } });
                start = None;
            }
            _ => {}
        }
    }
    if let Some((b, c)) = start {
        out.push(Token { text: &code[b..], span: Span { line: line_no, column: c + 1 } });
    }
    out
}

fn end_of_line(line_no: usize, line: &str) -> Span {
    let code = line.split('#').next().unwrap_or("");
    Span { line: line_no, column: code.trim_end().chars().count() + 1 }
}

fn valid_label(s: &str) -> bool {
    !s.is_empty() && !s.contains('=')
}

/// Where `sum <a> <b> = <c>` first goes wrong, if it does.
fn clause_shape_error(toks: &[Token<'_>], eol: Span) -> Option<Span> {
    for k in 1..=4 {
        match toks.get(k) {
            None => return Some(eol),
            Some(t) if (k == 3) != (t.text == "=") => return Some(t.span),
            Some(_) => {}
        }
    }
    toks.get(5).map(|t| t.span)
}

/// Parses `.ea` source, reporting every problem found.
pub fn parse_ea(text: &str) -> Result<EaDocument, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut name: Option<String> = None;
    let mut labels: Vec<String> = Vec::new();
    let mut label_spans: Vec<Span> = Vec::new();
    let mut elements_span: Option<Span> = None;
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut clauses: Vec<SumClause> = Vec::new();
    // unordered pair -> (result, clause span)
    let mut seen: BTreeMap<(usize, usize), (usize, Span)> = BTreeMap::new();
    let mut last_line = 0;

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let toks = tokens(line_no, line);
        let Some(head) = toks.first() else { continue };
        match head.text {
            "algebra" => {
                if name.is_some() {
                    diags.push(Diagnostic::error(head.span, "duplicate `algebra` header"));
                } else if toks.len() != 2 {
                    let at = toks.get(2).map_or_else(|| end_of_line(line_no, line), |t| t.span);
                    diags.push(Diagnostic::error(at, "expected `algebra <name>`"));
                    name = Some(toks.get(1).map_or(String::new(), |t| t.text.to_string()));
                } else {
                    name = Some(toks[1].text.to_string());
                }
            }
            _ if name.is_none() => {
                diags.push(Diagnostic::error(head.span, "missing `algebra <name>` header"));
                return Err(diags);
            }
            "elements" => {
                if elements_span.is_some() {
                    diags.push(Diagnostic::error(head.span, "duplicate `elements` line"));
                    continue;
                }
                elements_span = Some(head.span);
                if toks.len() == 1 {
                    diags.push(Diagnostic::error(end_of_line(line_no, line), "expected at least one element label"));
                }
                for t in &toks[1..] {
                    if !valid_label(t.text) {
                        diags.push(Diagnostic::error(t.span, format!("invalid element label `{}`", t.text)));
                    } else if let Some(&prev) = index.get(t.text) {
                        diags.push(
                            Diagnostic::error(t.span, format!("duplicate element label `{}`", t.text))
                                .with_related(label_spans[prev], "first declared here"),
                        );
                    } else {
                        index.insert(t.text.to_string(), labels.len());
                        labels.push(t.text.to_string());
                        label_spans.push(t.span);
                    }
                }
                for required in ["0", "1"] {
                    if !index.contains_key(required) {
                        diags.push(Diagnostic::error(head.span, format!("element `{required}` must be declared")));
                    }
                }
            }
            "sum" => {
                if elements_span.is_none() {
                    diags.push(Diagnostic::error(head.span, "`sum` before the `elements` line"));
                    continue;
                }
                if let Some(at) = clause_shape_error(&toks, end_of_line(line_no, line)) {
                    diags.push(Diagnostic::error(at, "expected `sum <a> <b> = <c>`"));
                    continue;
                }
                let mut ids = [0usize; 3];
                let mut ok = true;
                for (slot, t) in ids.iter_mut().zip([&toks[1], &toks[2], &toks[4]]) {
                    match index.get(t.text) {
                        Some(&k) => *slot = k,
                        None => {
                            diags.push(Diagnostic::error(t.span, format!("unknown element `{}`", t.text)));
                            ok = false;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let key = (ids[0].min(ids[1]), ids[0].max(ids[1]));
                match seen.get(&key) {
                    Some(&(c, first)) if c != ids[2] => {
                        diags.push(
                            Diagnostic::error(
                                head.span,
                                format!(
                                    "contradictory clause: {} + {} = {} but an earlier clause gives {}",
                                    toks[1].text, toks[2].text, toks[4].text, labels[c]
                                ),
                            )
                            .with_related(first, "earlier clause here"),
                        );
                        continue;
                    }
                    Some(_) => {}
                    None => {
                        seen.insert(key, (ids[2], head.span));
                    }
                }
                clauses.push(SumClause {
                    a: toks[1].text.to_string(),
                    b: toks[2].text.to_string(),
                    c: toks[4].text.to_string(),
                    span: head.span,
                });
            }
            other => diags.push(Diagnostic::error(head.span, format!("unknown statement `{other}`"))),
        }
    }

    let Some(name) = name else {
        diags.push(Diagnostic::error(Span { line: 1, column: 1 }, "missing `algebra <name>` header"));
        return Err(diags);
    };
    if elements_span.is_none() {
        diags.push(Diagnostic::error(Span { line: last_line.max(1) + 1, column: 1 }, "missing `elements` line"));
    }
    if diags.is_empty() {
        Ok(EaDocument { name, labels, label_spans, clauses })
    } else {
        diags.sort_by_key(|d| d.span());
        Err(diags)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LowerError {
    /// An explicit clause disagrees with the implied `0 + x = x`.
    Contradiction(Diagnostic),
    Algebra(AlgebraError),
}

impl fmt::Display for LowerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Contradiction(d) => write!(f, "{d}"),
            Self::Algebra(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LowerError {}

/// Builds the sum table, adding `0 + x = x` for every element.
pub fn lower(doc: &EaDocument) -> Result<EffectAlgebra, LowerError> {
    let id = |l: &str| ElementId(doc.labels.iter().position(|x| x == l).expect("labels checked by the parser"));
    let zero = id("0");
    let one = id("1");
    let mut clauses: Vec<(ElementId, ElementId, ElementId)> = Vec::new();
    for c in &doc.clauses {
        let (a, b, r) = (id(&c.a), id(&c.b), id(&c.c));
        let other = if a == zero {
            Some(b)
        } else if b == zero {
            Some(a)
        } else {
            None
        };
        if let Some(x) = other {
            if r != x {
                return Err(LowerError::Contradiction(Diagnostic::error(
                    c.span,
                    format!(
                        "clause {} + {} = {} contradicts the implied 0 + {} = {}",
                        c.a, c.b, c.c, doc.labels[x.0], doc.labels[x.0]
                    ),
                )));
            }
        }
        clauses.push((a, b, r));
    }
    for k in 0..doc.labels.len() {
        clauses.push((zero, ElementId(k), ElementId(k)));
    }
    EffectAlgebra::from_clauses(doc.name.clone(), doc.labels.clone(), zero, one, &clauses).map_err(LowerError::Algebra)
}

/// The canonical text: header, elements in carrier order, then one clause per
/// defined unordered pair `i <= j` with neither side zero.
pub fn to_ea_string(alg: &EffectAlgebra) -> String {
    let mut out = format!("algebra {}\nelements {}\n", alg.name(), alg.labels().join(" "));
    let zero = alg.zero();
    for a in alg.elements() {
        for b in alg.elements().filter(|b| b.0 >= a.0) {
            if a == zero || b == zero {
                continue;
            }
            let forward = alg.sum(a, b);
            let reverse = alg.sum(b, a);
            if let Some(c) = forward.or(reverse) {
                out.push_str(&format!("sum {} {} = {}\n", alg.label(a), alg.label(b), alg.label(c)));
            }
        }
    }
    out
}

/// Parse and lower in one step, with lowering failures turned into diagnostics.
pub fn load_ea(text: &str) -> Result<EffectAlgebra, Vec<Diagnostic>> {
    let doc = parse_ea(text)?;
    lower(&doc).map_err(|e| match e {
        LowerError::Contradiction(d) => vec![d],
        LowerError::Algebra(e) => vec![Diagnostic::error(Span { line: 1, column: 1 }, e.to_string())],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first(text: &str) -> Diagnostic {
        parse_ea(text).unwrap_err().remove(0)
    }

    #[test]
    fn two_element_algebra() {
        let doc = parse_ea("algebra two\nelements 0 1\nsum 0 1 = 1\nsum 0 0 = 0").unwrap();
        assert_eq!(doc.name, "two");
        let alg = lower(&doc).unwrap();
        assert!(alg.validate().is_ok());
    }

    #[test]
    fn c2_with_comments() {
        let src = "# three-element chain\nalgebra c2\n\nelements 0 h 1  # h is one half\nsum h h = 1\n";
        let alg = lower(&parse_ea(src).unwrap()).unwrap();
        assert_eq!(alg.len(), 3);
        assert!(alg.clone().validate().is_ok());
        assert_eq!(to_ea_string(&alg), "algebra c2\nelements 0 h 1\nsum h h = 1\n");
    }

    #[test]
    fn unknown_label_position() {
        let d = first("algebra x\nelements 0 1\nsum 1  q = 1\n");
        assert_eq!((d.line, d.column), (3, 8));
        assert!(d.message.contains("`q`"));
    }

    #[test]
    fn missing_header() {
        let d = first("\n  elements 0 1\n");
        assert_eq!((d.line, d.column), (2, 3));
        assert_eq!(first("").span(), Span { line: 1, column: 1 });
    }

    #[test]
    fn missing_one() {
        let d = first("algebra x\n elements 0 a\n");
        assert_eq!((d.line, d.column), (2, 2));
        assert!(d.message.contains("`1`"));
    }

    #[test]
    fn contradiction_in_either_orientation() {
        for second in ["sum a b = a", "sum b a = a"] {
            let src = format!("algebra x\nelements 0 a b 1\nsum a b = 1\n{second}\n");
            let d = first(&src);
            assert_eq!((d.line, d.column), (4, 1));
            assert_eq!(d.related[0].span, Span { line: 3, column: 1 });
        }
        // the same clause twice is not a contradiction
        assert!(parse_ea("algebra x\nelements 0 a 1\nsum a a = 1\nsum a a = 1\n").is_ok());
    }

    #[test]
    fn malformed_clause() {
        assert_eq!(first("algebra x\nelements 0 1\nsum 1 0 1\n").span(), Span { line: 3, column: 9 });
        assert_eq!(first("algebra x\nelements 0 1\nsum 1 0\n").span(), Span { line: 3, column: 8 });
        assert_eq!(first("algebra x\nelements 0 1\nsum 1 0 = 1 0\n").span(), Span { line: 3, column: 13 });
    }

    #[test]
    fn implicit_zero_contradiction() {
        let doc = parse_ea("algebra x\nelements 0 h 1\nsum 0 h = 1\n").unwrap();
        match lower(&doc) {
            Err(LowerError::Contradiction(d)) => assert_eq!(d.span(), Span { line: 3, column: 1 }),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn render_includes_related() {
        let d = first("algebra x\nelements 0 a 1\nsum a a = 1\nsum a a = a\n");
        assert_eq!(d.render("f.ea"), "f.ea:4:1: error: contradictory clause: a + a = a but an earlier clause gives 1\nf.ea:3:1: note: earlier clause here");
    }
}
