//! Generators for the standard test corpus of finite effect algebras.

use super::{AlgebraError, EffectAlgebra, ElementId, DEFAULT_CARRIER_CAP};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardKind {
    /// The MV-chain `{0, 1/n, ..., 1}` with truncated addition defined when the sum is at most 1.
    Chain(usize),
    /// The Boolean algebra of subsets of `k` atoms; `a + b` defined for disjoint sets.
    Boolean(usize),
    /// `{0, a, b, 1}` with `a + a = 1`, `b + b = 1` and `a`, `b` incomparable.
    Diamond,
    /// Components glued along their 0 and 1; sums only within a component.
    HorizontalSum(Vec<StandardKind>),
}

impl StandardKind {
    pub fn name(&self) -> String {
        match self {
            StandardKind::Chain(n) => format!("chain{n}"),
            StandardKind::Boolean(k) => format!("boolean{k}"),
            StandardKind::Diamond => "diamond".to_string(),
            StandardKind::HorizontalSum(parts) => {
                let names: Vec<String> = parts.iter().map(|p| p.name()).collect();
                format!("hsum({})", names.join(","))
            }
        }
    }

    fn size(&self) -> Option<usize> {
        match self {
            StandardKind::Chain(n) => n.checked_add(1),
            StandardKind::Boolean(k) => 1usize.checked_shl(u32::try_from(*k).ok()?),
            StandardKind::Diamond => Some(4),
            StandardKind::HorizontalSum(parts) => {
                parts.iter().try_fold(2usize, |acc, p| p.size().and_then(|s| acc.checked_add(s.checked_sub(2)?)))
            }
        }
    }
}

pub fn standard_algebra(kind: &StandardKind) -> Result<EffectAlgebra, AlgebraError> {
    standard_algebra_with_cap(kind, DEFAULT_CARRIER_CAP)
}

pub fn standard_algebra_with_cap(kind: &StandardKind, cap: usize) -> Result<EffectAlgebra, AlgebraError> {
    let size = kind.size().ok_or_else(|| AlgebraError::InvalidParameter(format!("{} is too large", kind.name())))?;
    if size > cap {
        return Err(AlgebraError::CarrierTooLarge { size, cap });
    }
    match kind {
        StandardKind::Chain(n) => chain(*n, cap),
        StandardKind::Boolean(k) => boolean(*k, cap),
        StandardKind::Diamond => diamond(),
        StandardKind::HorizontalSum(parts) => {
            if parts.is_empty() {
                return Err(AlgebraError::InvalidParameter("horizontal sum needs at least one component".into()));
            }
            let algebras = parts.iter().map(|p| standard_algebra_with_cap(p, cap)).collect::<Result<Vec<_>, _>>()?;
            horizontal_sum(kind.name(), &algebras)
        }
    }
}

fn chain(n: usize, cap: usize) -> Result<EffectAlgebra, AlgebraError> {
    if n == 0 {
        return Err(AlgebraError::InvalidParameter("chain(0) would have 0 = 1".into()));
    }
    let labels = (0..=n)
        .map(|i| match i {
            0 => "0".to_string(),
            i if i == n => "1".to_string(),
            i => format!("{i}/{n}"),
        })
        .collect();
    let mut clauses = Vec::new();
    for i in 0..=n {
        for j in i..=n - i {
            clauses.push((ElementId(i), ElementId(j), ElementId(i + j)));
        }
    }
    EffectAlgebra::from_clauses_with_cap(format!("chain{n}"), labels, ElementId(0), ElementId(n), &clauses, cap)
}

fn boolean(k: usize, cap: usize) -> Result<EffectAlgebra, AlgebraError> {
    if k == 0 {
        return Err(AlgebraError::InvalidParameter("boolean(0) would have 0 = 1".into()));
    }
    let full = (1usize << k) - 1;
    let labels = (0..=full)
        .map(|mask| match mask {
            0 => "0".to_string(),
            m if m == full => "1".to_string(),
            m => (0..k).filter(|b| m & (1 << b) != 0).map(|b| format!("a{}", b + 1)).collect::<Vec<_>>().join("+"),
        })
        .collect();
    let mut clauses = Vec::new();
    for a in 0..=full {
        for b in a..=full {
            if a & b == 0 {
                clauses.push((ElementId(a), ElementId(b), ElementId(a | b)));
            }
        }
    }
    EffectAlgebra::from_clauses_with_cap(format!("boolean{k}"), labels, ElementId(0), ElementId(full), &clauses, cap)
}

fn diamond() -> Result<EffectAlgebra, AlgebraError> {
    let (z, a, b, o) = (ElementId(0), ElementId(1), ElementId(2), ElementId(3));
    let labels = ["0", "a", "b", "1"].iter().map(|s| s.to_string()).collect();
    let clauses = [(z, z, z), (z, a, a), (z, b, b), (z, o, o), (a, a, o), (b, b, o)];
    EffectAlgebra::from_clauses("diamond", labels, z, o, &clauses)
}

/// Glues components along their zero and one. Non-extremal labels are prefixed `c<i>.`.
pub fn horizontal_sum(name: impl Into<String>, parts: &[EffectAlgebra]) -> Result<EffectAlgebra, AlgebraError> {
    let zero = ElementId(0);
    let one = ElementId(1);
    let mut labels = vec!["0".to_string(), "1".to_string()];
    let mut clauses = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        let mut map = vec![zero; part.len()];
        for e in part.elements() {
            map[e.0] = if e == part.zero() {
                zero
            } else if e == part.one() {
                one
            } else {
                labels.push(format!("c{i}.{}", part.label(e)));
                ElementId(labels.len() - 1)
            };
        }
        clauses.extend(part.defined_sums().map(|(a, b, c)| (map[a.0], map[b.0], map[c.0])));
    }
    EffectAlgebra::from_clauses(name, labels, zero, one, &clauses)
}

/// The fixed corpus: chains up to 64, Boolean algebras up to 4 atoms, the
/// diamond and three horizontal sums.
pub fn corpus() -> Vec<EffectAlgebra> {
    let mut kinds: Vec<StandardKind> = (1..=64).map(StandardKind::Chain).collect();
    kinds.extend((1..=4).map(StandardKind::Boolean));
    kinds.push(StandardKind::Diamond);
    kinds.extend(corpus_horizontal_sums());
    kinds.iter().map(|k| standard_algebra(k).expect("corpus parameters are within limits")).collect()
}

fn corpus_horizontal_sums() -> Vec<StandardKind> {
    use StandardKind::*;
    vec![
        HorizontalSum(vec![Chain(2), Chain(3)]),
        HorizontalSum(vec![Boolean(2), Boolean(2)]),
        HorizontalSum(vec![Chain(2), Boolean(2), Chain(4)]),
    ]
}
