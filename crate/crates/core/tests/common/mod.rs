//! Oracles shared by the integration tests. None of them call into the
//! move or canonical-form code they check.

#![allow(dead_code)]

pub mod bracket;

use reidemeister::diagram::{CrossingSign, Edge, Port, TangleDiagram};

/// Brute-force isomorphism: some bijection of crossing ids carries the
/// edge set of `a` onto that of `b`. Legs and slots are intrinsic, so no
/// other relabeling is allowed.
pub fn isomorphic(a: &TangleDiagram, b: &TangleDiagram) -> bool {
    if a.legs() != b.legs() || a.crossing_count() != b.crossing_count() || a.edges().len() != b.edges().len() {
        return false;
    }
    let target: std::collections::BTreeSet<Edge> = b.edges().iter().copied().collect();
    let mut perm: Vec<u32> = b.crossings().to_vec();
    permutations(&mut perm, 0, &mut |image| {
        let map = |p: Port| match p {
            Port::Slot(c, s) => {
                let i = a.crossings().iter().position(|&x| x == c).unwrap();
                Port::Slot(image[i], s)
            }
            leg => leg,
        };
        a.edges().iter().all(|e| target.contains(&Edge::new(map(e.from), map(e.to))))
    })
}

fn permutations(v: &mut Vec<u32>, k: usize, f: &mut dyn FnMut(&[u32]) -> bool) -> bool {
    if k == v.len() {
        return f(v);
    }
    for i in k..v.len() {
        v.swap(k, i);
        if permutations(v, k + 1, f) {
            v.swap(k, i);
            return true;
        }
        v.swap(k, i);
    }
    false
}

/// Renames crossing ids by `perm` (a permutation of the existing ids).
pub fn relabel(d: &TangleDiagram, perm: &[u32]) -> TangleDiagram {
    let map = |p: Port| match p {
        Port::Slot(c, s) => Port::Slot(perm[d.crossings().iter().position(|&x| x == c).unwrap()], s),
        leg => leg,
    };
    TangleDiagram::from_parts(
        d.legs().to_vec(),
        perm.iter().copied(),
        d.edges().iter().map(|e| Edge::new(map(e.from), map(e.to))),
    )
}

/// Exchanges over and under at crossing `c` only.
pub fn flip_crossing(d: &TangleDiagram, c: u32) -> TangleDiagram {
    let r = match d.crossing_sign(c).unwrap() {
        CrossingSign::Positive => 1,
        CrossingSign::Negative => 3,
    };
    let map = |p: Port| match p {
        Port::Slot(x, s) if x == c => Port::Slot(x, (s + r) % 4),
        other => other,
    };
    TangleDiagram::from_parts(
        d.legs().to_vec(),
        d.crossings().iter().copied(),
        d.edges().iter().map(|e| Edge::new(map(e.from), map(e.to))),
    )
}
