//! Reference implementations used as oracles by the integration tests.
//!
//! Each one recomputes a library result straight from its definition, with
//! no shared code beyond the raw table accessors.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use quantum_effects::algebra::{Axiom, EffectAlgebra, ElementId, Violation};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

/// `a <= b` iff `a + c = b` for some `c`, read off the table.
pub fn leq(alg: &EffectAlgebra, a: ElementId, b: ElementId) -> bool {
    alg.elements().any(|c| alg.sum(a, c) == Some(b))
}

/// Whether the reported instance really breaks its axiom, evaluated directly.
pub fn witness_breaks_axiom(alg: &EffectAlgebra, v: &Violation) -> bool {
    let w = &v.witness;
    match v.axiom {
        Axiom::Commutativity => {
            w.len() == 2 && alg.sum(w[0], w[1]).is_some() && alg.sum(w[0], w[1]) != alg.sum(w[1], w[0])
        }
        Axiom::Associativity => {
            if w.len() != 3 {
                return false;
            }
            let (a, b, c) = (w[0], w[1], w[2]);
            let left = alg.sum(a, b).and_then(|ab| alg.sum(ab, c));
            let right = alg.sum(b, c).and_then(|bc| alg.sum(a, bc));
            left.is_some() && left != right
        }
        Axiom::Orthosupplement => {
            let a = w[0];
            alg.elements().filter(|&b| alg.sum(a, b) == Some(alg.one())).count() != 1
        }
        Axiom::ZeroOneLaw => w.len() == 1 && w[0] != alg.zero() && alg.sum(w[0], alg.one()).is_some(),
    }
}

/// The lasso `prefix cycle cycle ...` unrolled to `len` terms.
pub fn unroll(prefix: &[ElementId], cycle: &[ElementId], len: usize) -> Vec<ElementId> {
    (0..len).map(|k| if k < prefix.len() { prefix[k] } else { cycle[(k - prefix.len()) % cycle.len()] }).collect()
}

/// Brute-force search for bounding sequences.
///
/// Monotone sequences on a finite carrier are eventually constant, so a
/// candidate `u` is explored term by term over an unrolled horizon long
/// enough for every strictly increasing run, and then held at its last value.
/// The set of reachable last values is computed by forward search; those that
/// also bound every cycle term are the possible suprema. `v` is handled
/// dually. `a` is an order limit iff it is both a supremum and an infimum.
pub fn order_limits_by_search(alg: &EffectAlgebra, prefix: &[ElementId], cycle: &[ElementId]) -> BTreeSet<ElementId> {
    OrderOracle::new(alg).limits(prefix, cycle)
}

/// The derived order as bitmasks, computed once per algebra.
pub struct OrderOracle {
    n: usize,
    /// `down[x]`: elements below `x`.
    down: Vec<u64>,
    up: Vec<u64>,
}

impl OrderOracle {
    pub fn new(alg: &EffectAlgebra) -> Self {
        let n = alg.len();
        assert!(n <= 64);
        let mut down = vec![0u64; n];
        let mut up = vec![0u64; n];
        for x in alg.elements() {
            for y in alg.elements() {
                if leq(alg, y, x) {
                    down[x.0] |= 1 << y.0;
                    up[y.0] |= 1 << x.0;
                }
            }
        }
        Self { n, down, up }
    }

    pub fn limits(&self, prefix: &[ElementId], cycle: &[ElementId]) -> BTreeSet<ElementId> {
        let horizon = prefix.len() + cycle.len() * (self.n + 1);
        let seq = unroll(prefix, cycle, horizon);
        let both =
            self.bound_values(&seq, cycle, &self.down, &self.up) & self.bound_values(&seq, cycle, &self.up, &self.down);
        (0..self.n).filter(|i| both & (1 << i) != 0).map(ElementId).collect()
    }

    /// With `inside = down`: last values of increasing `u` with `u_k <= a_k`
    /// that also sit below every cycle term. With `inside = up`, the dual.
    fn bound_values(&self, seq: &[ElementId], cycle: &[ElementId], inside: &[u64], before: &[u64]) -> u64 {
        let mut reach = inside[seq[0].0];
        for a in &seq[1..] {
            let mut next = 0;
            for x in 0..self.n {
                // x admissible at this term and some reachable predecessor precedes it
                if inside[a.0] & (1 << x) != 0 && reach & before_mask(before, x) != 0 {
                    next |= 1 << x;
                }
            }
            reach = next;
        }
        cycle.iter().fold(reach, |m, c| m & inside[c.0])
    }
}

/// Elements `p` with `p -> x` allowed as a step: `p <= x` for `u`, `p >= x` for `v`.
fn before_mask(before: &[u64], x: usize) -> u64 {
    let mut m = 0;
    for (p, &b) in before.iter().enumerate() {
        if b & (1 << x) != 0 {
            m |= 1 << p;
        }
    }
    m
}

/// All lassos with `|prefix| <= max_prefix` and `1 <= |cycle| <= max_cycle`.
pub fn all_lassos(n: usize, max_prefix: usize, max_cycle: usize) -> Vec<(Vec<ElementId>, Vec<ElementId>)> {
    let words = |len: usize| -> Vec<Vec<ElementId>> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..n).map(move |e| {
                        let mut w = w.clone();
                        w.push(ElementId(e));
                        w
                    })
                })
                .collect();
        }
        out
    };
    let mut out = Vec::new();
    for p in 0..=max_prefix {
        for c in 1..=max_cycle {
            for prefix in words(p) {
                for cycle in words(c) {
                    out.push((prefix.clone(), cycle));
                }
            }
        }
    }
    out
}

/// Eigenvalues of the real symmetric `[[a, b], [b, d]]`, ascending.
pub fn eig2(a: f64, b: f64, d: f64) -> (f64, f64) {
    let mid = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    (mid - rad, mid + rad)
}

/// `(line, column)` from a `# expect: L:C` first line.
pub fn expected_position(src: &str) -> Option<(usize, usize)> {
    let rest = src.lines().next()?.strip_prefix("# expect:")?.trim();
    let (l, c) = rest.split_once(':')?;
    Some((l.trim().parse().ok()?, c.trim().parse().ok()?))
}

pub struct Mutation {
    pub name: &'static str,
    pub algebra: EffectAlgebra,
    pub expected: Axiom,
}

fn mutate(
    name: &'static str,
    kind: quantum_effects::algebra::StandardKind,
    entries: &[(&str, &str, Option<&str>)],
    expected: Axiom,
) -> Mutation {
    let mut alg = quantum_effects::algebra::standard_algebra(&kind).expect("corpus algebra");
    for &(a, b, c) in entries {
        let id = |l: &str| alg.id_of(l).unwrap_or_else(|| panic!("{name}: no label {l}"));
        let (a, b, c) = (id(a), id(b), c.map(id));
        alg = alg.with_entry(a, b, c);
    }
    Mutation { name, algebra: alg, expected }
}

/// Ten corpus tables, each with one clause corrupted.
pub fn mutated_corpus() -> Vec<Mutation> {
    use quantum_effects::algebra::StandardKind::*;
    vec![
        mutate("chain2: 1/2 + 1/2 = 1/2", Chain(2), &[("1/2", "1/2", Some("1/2"))], Axiom::Orthosupplement),
        mutate("chain3: only one orientation of 1/3 + 2/3", Chain(3), &[("2/3", "1/3", None)], Axiom::Commutativity),
        mutate("chain4: 1/4 + 1/4 = 3/4", Chain(4), &[("1/4", "1/4", Some("3/4"))], Axiom::Associativity),
        mutate(
            "boolean2: a1 + 1 defined",
            Boolean(2),
            &[("a1", "1", Some("1")), ("1", "a1", Some("1"))],
            Axiom::ZeroOneLaw,
        ),
        mutate("diamond: a + b = 1", Diamond, &[("a", "b", Some("1")), ("b", "a", Some("1"))], Axiom::Orthosupplement),
        mutate(
            "chain5: 2/5 + 3/5 undefined",
            Chain(5),
            &[("2/5", "3/5", None), ("3/5", "2/5", None)],
            Axiom::Orthosupplement,
        ),
        mutate("boolean3: a1 + a2 = a1+a3 one way", Boolean(3), &[("a1", "a2", Some("a1+a3"))], Axiom::Commutativity),
        mutate(
            "hsum: atoms of different blocks sum to 1",
            HorizontalSum(vec![Chain(2), Chain(3)]),
            &[("c0.1/2", "c1.1/3", Some("1")), ("c1.1/3", "c0.1/2", Some("1"))],
            Axiom::Orthosupplement,
        ),
        mutate(
            "chain6: 0 + 1/6 = 2/6",
            Chain(6),
            &[("0", "1/6", Some("2/6")), ("1/6", "0", Some("2/6"))],
            Axiom::Associativity,
        ),
        mutate("boolean4: 0 + 0 undefined", Boolean(4), &[("0", "0", None)], Axiom::Associativity),
    ]
}
