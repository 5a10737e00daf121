//! Order convergence, the order topology and the interval topology on finite
//! effect algebras.
//!
//! Topologies are represented by their closed sets. Subsets of the carrier are
//! bit masks, so carriers are limited to [`DEFAULT_POWERSET_CAP`] elements.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{ElementId, ValidatedAlgebra};

pub const DEFAULT_POWERSET_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("lasso cycle must be non-empty")]
    EmptyCycle,
    #[error("element {0} is not in the carrier")]
    UnknownElement(ElementId),
    #[error("carrier has {size} elements; power-set enumeration is capped at {cap}")]
    CarrierTooLarge { size: usize, cap: usize },
    #[error("families live on carriers of different sizes ({left} and {right})")]
    CarrierMismatch { left: usize, right: usize },
}

/// The eventually periodic sequence `prefix . cycle . cycle . ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LassoSequence {
    prefix: Vec<ElementId>,
    cycle: Vec<ElementId>,
}

impl LassoSequence {
    pub fn new(prefix: Vec<ElementId>, cycle: Vec<ElementId>) -> Result<Self, TopologyError> {
        if cycle.is_empty() {
            return Err(TopologyError::EmptyCycle);
        }
        Ok(Self { prefix, cycle })
    }

    pub fn constant(a: ElementId) -> Self {
        Self { prefix: Vec::new(), cycle: vec![a] }
    }

    pub fn prefix(&self) -> &[ElementId] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[ElementId] {
        &self.cycle
    }

    /// The `k`-th term (0-based).
    pub fn at(&self, k: usize) -> ElementId {
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.cycle[(k - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn values(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.prefix.iter().chain(self.cycle.iter()).copied()
    }

    pub fn support_mask(&self) -> u32 {
        self.values().fold(0, |m, e| m | (1 << e.0))
    }
}

fn check_element(alg: &ValidatedAlgebra, e: ElementId) -> Result<(), TopologyError> {
    if alg.contains(e) {
        Ok(())
    } else {
        Err(TopologyError::UnknownElement(e))
    }
}

/// Whether `seq` order converges to `a`.
///
/// Bounding sequences `u_n` increasing to `a` and `v_n` decreasing to `a`
/// are eventually constant at `a` in a finite poset, which squeezes the
/// sequence itself. Conversely a sequence that is eventually `a` is bounded by
/// `0, ..., 0, a, a, ...` and `1, ..., 1, a, a, ...`. So the criterion is that
/// every term of the cycle equals `a`.
pub fn order_converges(alg: &ValidatedAlgebra, seq: &LassoSequence, a: ElementId) -> Result<bool, TopologyError> {
    check_element(alg, a)?;
    for e in seq.values() {
        check_element(alg, e)?;
    }
    Ok(seq.cycle.iter().all(|&c| c == a))
}

/// A topology on `{0, ..., n-1}` by its closed sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedSetFamily {
    labels: Vec<String>,
    closed: Vec<u32>,
}

impl ClosedSetFamily {
    /// Normalises (sorts, dedups) the given sets. Does not close them.
    pub fn new(labels: Vec<String>, sets: impl IntoIterator<Item = u32>) -> Result<Self, TopologyError> {
        let n = labels.len();
        if n > DEFAULT_POWERSET_CAP {
            return Err(TopologyError::CarrierTooLarge { size: n, cap: DEFAULT_POWERSET_CAP });
        }
        let full = full_mask(n);
        let closed: BTreeSet<u32> = sets.into_iter().map(|s| s & full).collect();
        Ok(Self { labels, closed: closed.into_iter().collect() })
    }

    pub fn discrete(labels: Vec<String>) -> Result<Self, TopologyError> {
        let n = labels.len();
        if n > DEFAULT_POWERSET_CAP {
            return Err(TopologyError::CarrierTooLarge { size: n, cap: DEFAULT_POWERSET_CAP });
        }
        Self::new(labels, 0..=full_mask(n))
    }

    pub fn indiscrete(labels: Vec<String>) -> Result<Self, TopologyError> {
        let full = full_mask(labels.len());
        Self::new(labels, [0, full])
    }

    pub fn carrier_size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn closed_sets(&self) -> &[u32] {
        &self.closed
    }

    pub fn len(&self) -> usize {
        self.closed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closed.is_empty()
    }

    pub fn is_closed(&self, set: u32) -> bool {
        self.closed.binary_search(&set).is_ok()
    }

    pub fn is_discrete(&self) -> bool {
        self.closed.len() == 1usize << self.carrier_size()
    }

    pub fn is_subfamily_of(&self, other: &Self) -> bool {
        self.closed.iter().all(|&s| other.is_closed(s))
    }

    /// Empty set, full carrier, and closure under pairwise union and intersection.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let full = full_mask(self.carrier_size());
        if !self.is_closed(0) {
            bad.push("empty set is not closed".to_string());
        }
        if !self.is_closed(full) {
            bad.push("carrier is not closed".to_string());
        }
        if self.is_discrete() {
            return bad;
        }
        for (i, &a) in self.closed.iter().enumerate() {
            for &b in &self.closed[i + 1..] {
                if !self.is_closed(a | b) {
                    bad.push(format!("union of {a:#b} and {b:#b} is not closed"));
                }
                if !self.is_closed(a & b) {
                    bad.push(format!("intersection of {a:#b} and {b:#b} is not closed"));
                }
            }
        }
        bad
    }

    pub fn to_record(&self) -> ClosedSetRecord {
        ClosedSetRecord {
            carrier: self.labels.clone(),
            closed_sets: self
                .closed
                .iter()
                .map(|&s| {
                    (0..self.carrier_size()).filter(|i| s & (1 << i) != 0).map(|i| self.labels[i].clone()).collect()
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedSetRecord {
    pub carrier: Vec<String>,
    pub closed_sets: Vec<Vec<String>>,
}

fn full_mask(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

fn check_cap(alg: &ValidatedAlgebra, cap: usize) -> Result<(), TopologyError> {
    let cap = cap.min(DEFAULT_POWERSET_CAP);
    if alg.len() > cap {
        return Err(TopologyError::CarrierTooLarge { size: alg.len(), cap });
    }
    Ok(())
}

/// Lengths of the lasso sequences enumerated when computing the order topology.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LassoBounds {
    pub max_prefix: usize,
    pub max_cycle: usize,
}

impl Default for LassoBounds {
    fn default() -> Self {
        Self { max_prefix: 2, max_cycle: 2 }
    }
}

/// Every lasso with `|prefix| <= max_prefix` and `1 <= |cycle| <= max_cycle` over `n` elements.
pub fn enumerate_lassos(n: usize, bounds: LassoBounds) -> impl Iterator<Item = LassoSequence> {
    (0..=bounds.max_prefix).flat_map(move |p| {
        (1..=bounds.max_cycle).flat_map(move |c| {
            words(n, p)
                .flat_map(move |prefix| words(n, c).map(move |cycle| LassoSequence { prefix: prefix.clone(), cycle }))
        })
    })
}

fn words(n: usize, len: usize) -> impl Iterator<Item = Vec<ElementId>> + Clone {
    let total = n.checked_pow(len as u32).unwrap_or(0);
    (0..total).map(move |mut code| {
        let mut w = Vec::with_capacity(len);
        for _ in 0..len {
            w.push(ElementId(code % n));
            code /= n;
        }
        w
    })
}

pub fn order_topology(alg: &ValidatedAlgebra) -> Result<ClosedSetFamily, TopologyError> {
    order_topology_with(alg, LassoBounds::default(), DEFAULT_POWERSET_CAP)
}

/// The closed sets are the subsets `F` such that every order-convergent lasso
/// with all terms in `F` has its limit in `F`.
///
/// Each convergent pair `(sequence, limit)` is reduced to its support mask;
/// only supports that are minimal for their limit constrain anything.
pub fn order_topology_with(
    alg: &ValidatedAlgebra,
    bounds: LassoBounds,
    cap: usize,
) -> Result<ClosedSetFamily, TopologyError> {
    check_cap(alg, cap)?;
    let n = alg.len();
    let mut witnesses: HashSet<(u32, usize)> = HashSet::new();
    for seq in enumerate_lassos(n, bounds) {
        for a in alg.elements() {
            if order_converges(alg, &seq, a)? {
                witnesses.insert((seq.support_mask(), a.0));
            }
        }
    }
    let mut minimal: Vec<(u32, u32)> = Vec::new();
    for &(support, limit) in &witnesses {
        let dominated = witnesses.iter().any(|&(s, l)| l == limit && s != support && s & support == s);
        if !dominated {
            minimal.push((support, 1 << limit));
        }
    }
    minimal.sort_unstable();
    let closed = (0..=full_mask(n))
        .filter(|&f| minimal.iter().all(|&(support, limit)| support & f != support || limit & f != 0));
    ClosedSetFamily::new(alg.labels().to_vec(), closed)
}

/// Mask of `[a, b] = {x : a <= x <= b}`.
pub fn interval_mask(alg: &ValidatedAlgebra, a: ElementId, b: ElementId) -> u32 {
    alg.elements().filter(|&x| alg.leq(a, x) && alg.leq(x, b)).fold(0, |m, x| m | (1 << x.0))
}

pub fn interval_topology(alg: &ValidatedAlgebra) -> Result<ClosedSetFamily, TopologyError> {
    interval_topology_with(alg, DEFAULT_POWERSET_CAP)
}

/// Closed sets generated by the closed intervals `[a, b]`, `a <= b`, together
/// with the empty set and the carrier.
///
/// The subbasis is first closed under intersection; closing that under finite
/// union then yields a family that is also intersection-closed, because union
/// distributes over intersection.
pub fn interval_topology_with(alg: &ValidatedAlgebra, cap: usize) -> Result<ClosedSetFamily, TopologyError> {
    check_cap(alg, cap)?;
    let n = alg.len();
    let full = full_mask(n);
    let mut subbasis: BTreeSet<u32> = [0, full].into_iter().collect();
    for a in alg.elements() {
        for b in alg.elements() {
            if alg.leq(a, b) {
                subbasis.insert(interval_mask(alg, a, b));
            }
        }
    }

    let mut meets: BTreeSet<u32> = subbasis.clone();
    let mut frontier: Vec<u32> = meets.iter().copied().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &x in &frontier {
            for &g in &subbasis {
                let y = x & g;
                if meets.insert(y) {
                    next.push(y);
                }
            }
        }
        frontier = next;
    }

    let generators: Vec<u32> = meets.iter().copied().collect();
    let mut seen = vec![false; full as usize + 1];
    let mut queue: VecDeque<u32> = VecDeque::new();
    for &g in &generators {
        if !seen[g as usize] {
            seen[g as usize] = true;
            queue.push_back(g);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &g in &generators {
            let y = x | g;
            if !seen[y as usize] {
                seen[y as usize] = true;
                queue.push_back(y);
            }
        }
    }
    let closed = seen.iter().enumerate().filter(|(_, &s)| s).map(|(m, _)| m as u32);
    ClosedSetFamily::new(alg.labels().to_vec(), closed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyComparison {
    /// The first family has strictly more closed sets.
    Finer,
    Coarser,
    Equal,
    Incomparable,
}

pub fn compare_topologies(t1: &ClosedSetFamily, t2: &ClosedSetFamily) -> Result<TopologyComparison, TopologyError> {
    if t1.carrier_size() != t2.carrier_size() {
        return Err(TopologyError::CarrierMismatch { left: t1.carrier_size(), right: t2.carrier_size() });
    }
    let forward = t2.is_subfamily_of(t1);
    let backward = t1.is_subfamily_of(t2);
    Ok(match (forward, backward) {
        (true, true) => TopologyComparison::Equal,
        (true, false) => TopologyComparison::Finer,
        (false, true) => TopologyComparison::Coarser,
        (false, false) => TopologyComparison::Incomparable,
    })
}
