//! Finite effect algebras given by an explicit partial-sum table.
//!
//! An [`EffectAlgebra`] is only a table until it has been checked against the
//! four effect algebra axioms. [`EffectAlgebra::validate`] turns it into a
//! [`ValidatedAlgebra`], which carries the derived order and orthosupplement
//! and is the only type the order-theoretic queries accept.

mod standard;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use standard::{corpus, horizontal_sum, standard_algebra, standard_algebra_with_cap, StandardKind};

/// Carriers larger than this are rejected; the associativity scan is cubic.
pub const DEFAULT_CARRIER_CAP: usize = 256;

/// Dense index of a carrier element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub usize);

impl ElementId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("carrier is empty")]
    EmptyCarrier,
    #[error("carrier has {size} elements, above the cap of {cap}")]
    CarrierTooLarge { size: usize, cap: usize },
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("element index {index} is outside the carrier of size {size}")]
    UnknownElement { index: usize, size: usize },
    #[error("zero and one must be distinct elements")]
    ZeroEqualsOne,
    #[error("sum table has {found} entries, expected {expected}")]
    TableShape { found: usize, expected: usize },
    #[error("{0}")]
    ConflictingClause(Box<ClauseConflict>),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("algebra `{name}` is not an effect algebra ({} axiom violations)", .report.violations.len())]
    NotValid { name: String, report: Box<ValidationReport> },
}

/// Two clauses assigning different results to the same ordered pair.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("conflicting sums: {a} + {b} = {first} but {c} + {d} = {second}")]
pub struct ClauseConflict {
    pub a: String,
    pub b: String,
    pub first: String,
    pub c: String,
    pub d: String,
    pub second: String,
}

/// A finite carrier with a partial binary operation, zero and one.
///
/// Structural well-formedness (indices in range, unique labels, `0 != 1`) is
/// enforced at construction; the axioms are not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectAlgebra {
    name: String,
    labels: Vec<String>,
    zero: ElementId,
    one: ElementId,
    table: Vec<Option<ElementId>>,
}

impl EffectAlgebra {
    /// Builds an algebra from a row-major `n * n` table, stored exactly as given.
    pub fn from_table(
        name: impl Into<String>,
        labels: Vec<String>,
        zero: ElementId,
        one: ElementId,
        table: Vec<Option<ElementId>>,
    ) -> Result<Self, AlgebraError> {
        let n = labels.len();
        check_carrier(&labels, zero, one, DEFAULT_CARRIER_CAP)?;
        if table.len() != n * n {
            return Err(AlgebraError::TableShape { found: table.len(), expected: n * n });
        }
        for entry in table.iter().flatten() {
            if entry.0 >= n {
                return Err(AlgebraError::UnknownElement { index: entry.0, size: n });
            }
        }
        Ok(Self { name: name.into(), labels, zero, one, table })
    }

    /// Builds an algebra from `a + b = c` clauses, mirroring each clause.
    ///
    /// A clause may be listed in either orientation or both; two clauses that
    /// assign different results to the same unordered pair are rejected.
    pub fn from_clauses(
        name: impl Into<String>,
        labels: Vec<String>,
        zero: ElementId,
        one: ElementId,
        clauses: &[(ElementId, ElementId, ElementId)],
    ) -> Result<Self, AlgebraError> {
        Self::from_clauses_with_cap(name, labels, zero, one, clauses, DEFAULT_CARRIER_CAP)
    }

    pub fn from_clauses_with_cap(
        name: impl Into<String>,
        labels: Vec<String>,
        zero: ElementId,
        one: ElementId,
        clauses: &[(ElementId, ElementId, ElementId)],
        cap: usize,
    ) -> Result<Self, AlgebraError> {
        let n = labels.len();
        check_carrier(&labels, zero, one, cap)?;
        let mut table: Vec<Option<ElementId>> = vec![None; n * n];
        // origin of each stored entry, for conflict messages
        let mut origin: BTreeMap<(usize, usize), (ElementId, ElementId)> = BTreeMap::new();
        for &(a, b, c) in clauses {
            for id in [a, b, c] {
                if id.0 >= n {
                    return Err(AlgebraError::UnknownElement { index: id.0, size: n });
                }
            }
            for (x, y) in [(a, b), (b, a)] {
                let slot = &mut table[x.0 * n + y.0];
                match *slot {
                    Some(existing) if existing != c => {
                        let (pa, pb) = origin[&(x.0, y.0)];
                        return Err(AlgebraError::ConflictingClause(Box::new(ClauseConflict {
                            a: labels[pa.0].clone(),
                            b: labels[pb.0].clone(),
                            first: labels[existing.0].clone(),
                            c: labels[a.0].clone(),
                            d: labels[b.0].clone(),
                            second: labels[c.0].clone(),
                        })));
                    }
                    Some(_) => {}
                    None => {
                        *slot = Some(c);
                        origin.insert((x.0, y.0), (a, b));
                    }
                }
            }
        }
        Ok(Self { name: name.into(), labels, zero, one, table })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, id: ElementId) -> &str {
        &self.labels[id.0]
    }

    pub fn id_of(&self, label: &str) -> Option<ElementId> {
        self.labels.iter().position(|l| l == label).map(ElementId)
    }

    pub fn zero(&self) -> ElementId {
        self.zero
    }

    pub fn one(&self) -> ElementId {
        self.one
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.len()).map(ElementId)
    }

    /// `a + b`, or `None` where the operation is undefined.
    pub fn sum(&self, a: ElementId, b: ElementId) -> Option<ElementId> {
        self.table[a.0 * self.len() + b.0]
    }

    /// Every defined entry `(a, b, a + b)` in row-major order.
    pub fn defined_sums(&self) -> impl Iterator<Item = (ElementId, ElementId, ElementId)> + '_ {
        let n = self.len();
        self.table.iter().enumerate().filter_map(move |(k, c)| c.map(|c| (ElementId(k / n), ElementId(k % n), c)))
    }

    pub fn contains(&self, id: ElementId) -> bool {
        id.0 < self.len()
    }

    /// Returns a copy with one table entry replaced; used to build corrupted fixtures.
    pub fn with_entry(&self, a: ElementId, b: ElementId, value: Option<ElementId>) -> Self {
        let mut out = self.clone();
        let n = out.len();
        out.table[a.0 * n + b.0] = value;
        out
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn validate(self) -> Result<ValidatedAlgebra, AlgebraError> {
        let report = validate_axioms(&self);
        if !report.is_valid() {
            return Err(AlgebraError::NotValid { name: self.name.clone(), report: Box::new(report) });
        }
        let order = compute_order(&self);
        Ok(ValidatedAlgebra { algebra: self, order })
    }
}

fn check_carrier(labels: &[String], zero: ElementId, one: ElementId, cap: usize) -> Result<(), AlgebraError> {
    let n = labels.len();
    if n == 0 {
        return Err(AlgebraError::EmptyCarrier);
    }
    if n > cap {
        return Err(AlgebraError::CarrierTooLarge { size: n, cap });
    }
    for id in [zero, one] {
        if id.0 >= n {
            return Err(AlgebraError::UnknownElement { index: id.0, size: n });
        }
    }
    if zero == one {
        return Err(AlgebraError::ZeroEqualsOne);
    }
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(AlgebraError::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axiom {
    /// A1: `a + b` defined implies `b + a` defined and equal.
    #[serde(rename = "A1")]
    Commutativity,
    /// A2: associativity whenever the left bracketing is defined.
    #[serde(rename = "A2")]
    Associativity,
    /// A3: every element has exactly one orthosupplement.
    #[serde(rename = "A3")]
    Orthosupplement,
    /// A4: `a + 1` defined only for `a = 0`.
    #[serde(rename = "A4")]
    ZeroOneLaw,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Commutativity => "A1",
            Axiom::Associativity => "A2",
            Axiom::Orthosupplement => "A3",
            Axiom::ZeroOneLaw => "A4",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<ElementId>,
    pub witness_labels: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub algebra: String,
    pub carrier_size: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations_of(&self, axiom: Axiom) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.axiom == axiom)
    }
}

/// Checks A1 to A4 by exhaustive enumeration and lists every violated instance.
pub fn validate_axioms(alg: &EffectAlgebra) -> ValidationReport {
    let mut violations = Vec::new();
    let lbl = |x: ElementId| alg.label(x).to_string();
    let mut push = |axiom: Axiom, witness: Vec<ElementId>, detail: String| {
        let witness_labels = witness.iter().map(|&w| lbl(w)).collect();
        violations.push(Violation { axiom, witness, witness_labels, detail });
    };

    for a in alg.elements() {
        for b in alg.elements() {
            let ab = alg.sum(a, b);
            let ba = alg.sum(b, a);
            if ab.is_some() && ab != ba && (ba.is_none() || a < b) {
                push(
                    Axiom::Commutativity,
                    vec![a, b],
                    format!(
                        "{} + {} is {} but {} + {} is {}",
                        lbl(a),
                        lbl(b),
                        show(alg, ab),
                        lbl(b),
                        lbl(a),
                        show(alg, ba)
                    ),
                );
            }
        }
    }

    for a in alg.elements() {
        for b in alg.elements() {
            let Some(ab) = alg.sum(a, b) else { continue };
            for c in alg.elements() {
                let Some(left) = alg.sum(ab, c) else { continue };
                let right = alg.sum(b, c).and_then(|bc| alg.sum(a, bc));
                if right != Some(left) {
                    push(
                        Axiom::Associativity,
                        vec![a, b, c],
                        format!(
                            "({} + {}) + {} = {} but {} + ({} + {}) is {}",
                            lbl(a),
                            lbl(b),
                            lbl(c),
                            lbl(left),
                            lbl(a),
                            lbl(b),
                            lbl(c),
                            show(alg, right)
                        ),
                    );
                }
            }
        }
    }

    for a in alg.elements() {
        let complements: Vec<ElementId> = alg.elements().filter(|&b| alg.sum(a, b) == Some(alg.one())).collect();
        if complements.len() != 1 {
            let detail = format!("{} has {} orthosupplements", lbl(a), complements.len());
            let mut witness = vec![a];
            witness.extend(complements);
            push(Axiom::Orthosupplement, witness, detail);
        }
    }

    for a in alg.elements() {
        if a != alg.zero() {
            if let Some(c) = alg.sum(a, alg.one()) {
                push(Axiom::ZeroOneLaw, vec![a], format!("{} + {} = {} is defined", lbl(a), lbl(alg.one()), lbl(c)));
            }
        }
    }

    ValidationReport { algebra: alg.name().to_string(), carrier_size: alg.len(), violations }
}

fn show(alg: &EffectAlgebra, x: Option<ElementId>) -> String {
    x.map_or_else(|| "undefined".to_string(), |x| alg.label(x).to_string())
}

/// The order `a <= b iff a + c = b for some c`, with the orthosupplement map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedOrder {
    n: usize,
    leq: Vec<bool>,
    ortho: Vec<ElementId>,
}

impl DerivedOrder {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn leq(&self, a: ElementId, b: ElementId) -> bool {
        self.leq[a.0 * self.n + b.0]
    }

    pub fn lt(&self, a: ElementId, b: ElementId) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn ortho(&self, a: ElementId) -> ElementId {
        self.ortho[a.0]
    }

    /// Checks every stated property of the derived structure; returns the failures.
    pub fn check_invariants(&self, alg: &EffectAlgebra) -> Vec<String> {
        let mut bad = Vec::new();
        let ids: Vec<ElementId> = (0..self.n).map(ElementId).collect();
        for &a in &ids {
            if !self.leq(a, a) {
                bad.push(format!("not reflexive at {}", alg.label(a)));
            }
            if !self.leq(alg.zero(), a) || !self.leq(a, alg.one()) {
                bad.push(format!("{} is not between 0 and 1", alg.label(a)));
            }
            if self.ortho(self.ortho(a)) != a {
                bad.push(format!("orthosupplement is not an involution at {}", alg.label(a)));
            }
            for &b in &ids {
                if a != b && self.leq(a, b) && self.leq(b, a) {
                    bad.push(format!("not antisymmetric at ({}, {})", alg.label(a), alg.label(b)));
                }
                if self.leq(a, b) && !self.leq(self.ortho(b), self.ortho(a)) {
                    bad.push(format!("orthosupplement not antitone at ({}, {})", alg.label(a), alg.label(b)));
                }
                if alg.sum(a, b).is_some() != self.leq(a, self.ortho(b)) {
                    bad.push(format!("orthogonality mismatch at ({}, {})", alg.label(a), alg.label(b)));
                }
                for &c in &ids {
                    if self.leq(a, b) && self.leq(b, c) && !self.leq(a, c) {
                        bad.push(format!("not transitive at ({}, {}, {})", alg.label(a), alg.label(b), alg.label(c)));
                    }
                }
            }
        }
        bad
    }
}

fn compute_order(alg: &EffectAlgebra) -> DerivedOrder {
    let n = alg.len();
    let mut leq = vec![false; n * n];
    for (a, _, c) in alg.defined_sums() {
        leq[a.0 * n + c.0] = true;
    }
    let ortho = alg
        .elements()
        .map(|a| {
            alg.elements().find(|&b| alg.sum(a, b) == Some(alg.one())).expect("validated algebra has orthosupplements")
        })
        .collect();
    DerivedOrder { n, leq, ortho }
}

/// Derives the order of an algebra, failing if it is not a valid effect algebra.
pub fn derive_order(alg: &EffectAlgebra) -> Result<DerivedOrder, AlgebraError> {
    let report = validate_axioms(alg);
    if !report.is_valid() {
        return Err(AlgebraError::NotValid { name: alg.name().to_string(), report: Box::new(report) });
    }
    Ok(compute_order(alg))
}

/// An effect algebra that has passed [`validate_axioms`], with its order cached.
#[derive(Clone, Debug)]
pub struct ValidatedAlgebra {
    algebra: EffectAlgebra,
    order: DerivedOrder,
}

impl std::ops::Deref for ValidatedAlgebra {
    type Target = EffectAlgebra;

    fn deref(&self) -> &EffectAlgebra {
        &self.algebra
    }
}

impl ValidatedAlgebra {
    pub fn algebra(&self) -> &EffectAlgebra {
        &self.algebra
    }

    pub fn into_algebra(self) -> EffectAlgebra {
        self.algebra
    }

    pub fn order(&self) -> &DerivedOrder {
        &self.order
    }

    pub fn leq(&self, a: ElementId, b: ElementId) -> bool {
        self.order.leq(a, b)
    }

    pub fn ortho(&self, a: ElementId) -> ElementId {
        self.order.ortho(a)
    }

    pub fn perp(&self, a: ElementId, b: ElementId) -> bool {
        self.algebra.sum(a, b).is_some()
    }

    pub fn common_lower_bounds(&self, a: ElementId, b: ElementId) -> Vec<ElementId> {
        self.elements().filter(|&x| self.leq(x, a) && self.leq(x, b)).collect()
    }

    pub fn common_upper_bounds(&self, a: ElementId, b: ElementId) -> Vec<ElementId> {
        self.elements().filter(|&x| self.leq(a, x) && self.leq(b, x)).collect()
    }

    /// The greatest common lower bound, if one exists. No lattice structure is assumed.
    pub fn meet(&self, a: ElementId, b: ElementId) -> Option<ElementId> {
        let lower = self.common_lower_bounds(a, b);
        lower.iter().copied().find(|&m| lower.iter().all(|&x| self.leq(x, m)))
    }

    pub fn join(&self, a: ElementId, b: ElementId) -> Option<ElementId> {
        let upper = self.common_upper_bounds(a, b);
        upper.iter().copied().find(|&m| upper.iter().all(|&x| self.leq(m, x)))
    }

    /// `a` is sharp when the only common lower bound of `a` and `a'` is 0.
    pub fn is_sharp(&self, a: ElementId) -> bool {
        self.common_lower_bounds(a, self.ortho(a)) == [self.zero()]
    }

    /// Covering pairs `(a, b)`, sorted by index.
    pub fn hasse_diagram(&self) -> Vec<(ElementId, ElementId)> {
        let mut edges = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                if self.order.lt(a, b) && !self.elements().any(|c| self.order.lt(a, c) && self.order.lt(c, b)) {
                    edges.push((a, b));
                }
            }
        }
        edges
    }

    pub fn hasse_record(&self) -> HasseRecord {
        HasseRecord {
            algebra: self.name().to_string(),
            elements: self.labels().to_vec(),
            edges: self
                .hasse_diagram()
                .into_iter()
                .map(|(a, b)| (self.label(a).to_string(), self.label(b).to_string()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HasseRecord {
    pub algebra: String,
    pub elements: Vec<String>,
    pub edges: Vec<(String, String)>,
}

impl HasseRecord {
    /// Graphviz rendering with edges pointing upward in the order.
    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph \"{}\" {{\n  rankdir=BT;\n", escape(&self.algebra));
        for e in &self.elements {
            out.push_str(&format!("  \"{}\";\n", escape(e)));
        }
        for (a, b) in &self.edges {
            out.push_str(&format!("  \"{}\" -> \"{}\";\n", escape(a), escape(b)));
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
