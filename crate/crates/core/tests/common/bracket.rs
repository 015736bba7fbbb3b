//! Kauffman bracket of a tangle, valued in Laurent polynomials indexed by
//! the crossingless matching of the legs. It is invariant under type-2 and
//! type-3 moves, so it checks the rewrites without sharing their code.

use std::collections::BTreeMap;

use reidemeister::diagram::{Port, TangleDiagram};

/// Exponent of A mapped to its coefficient.
pub type Laurent = BTreeMap<i32, i64>;

/// Sorted leg pairs of a smoothing, mapped to its polynomial.
pub type Bracket = BTreeMap<Vec<(u32, u32)>, Laurent>;

fn add_scaled(acc: &mut Laurent, p: &Laurent, shift: i32) {
    for (e, c) in p {
        *acc.entry(e + shift).or_default() += c;
    }
}

fn loop_power(n: usize) -> Laurent {
    // (-A^2 - A^-2)^n
    let mut p: Laurent = [(0, 1)].into();
    for _ in 0..n {
        let mut q = Laurent::new();
        add_scaled(&mut q, &p, 2);
        add_scaled(&mut q, &p, -2);
        p = q.into_iter().map(|(e, c)| (e, -c)).collect();
    }
    p
}

pub fn bracket(d: &TangleDiagram) -> Bracket {
    // Nodes: every port. Edges join their ends; each smoothed crossing
    // joins two slot pairs.
    let crossings = d.crossings().to_vec();
    let idx = |p: Port| -> usize {
        match p {
            Port::Leg(i) => i as usize - 1,
            Port::Slot(c, s) => {
                d.leg_count() + 4 * crossings.iter().position(|&x| x == c).unwrap() + s as usize
            }
        }
    };
    let n = d.leg_count() + 4 * crossings.len();
    let mut base = vec![usize::MAX; n];
    for e in d.edges() {
        let (a, b) = (idx(e.from), idx(e.to));
        base[a] = b;
        base[b] = a;
    }
    let mut out = Bracket::new();
    for state in 0u32..(1 << crossings.len()) {
        let mut partner = vec![usize::MAX; n];
        let mut a_count = 0i32;
        for k in 0..crossings.len() {
            let o = d.leg_count() + 4 * k;
            let pairs = if state >> k & 1 == 0 {
                a_count += 1;
                [(0, 1), (2, 3)]
            } else {
                a_count -= 1;
                [(0, 3), (1, 2)]
            };
            for (x, y) in pairs {
                partner[o + x] = o + y;
                partner[o + y] = o + x;
            }
        }
        // Walk: alternate edge hops and smoothing hops.
        let mut seen = vec![false; n];
        let mut matching = Vec::new();
        for leg in 0..d.leg_count() {
            if seen[leg] {
                continue;
            }
            let mut p = leg;
            seen[p] = true;
            loop {
                let q = base[p];
                seen[q] = true;
                if q < d.leg_count() {
                    let (a, b) = (leg as u32 + 1, q as u32 + 1);
                    matching.push((a.min(b), a.max(b)));
                    break;
                }
                p = partner[q];
                seen[p] = true;
            }
        }
        let mut loops = 0;
        for start in d.leg_count()..n {
            if seen[start] {
                continue;
            }
            loops += 1;
            let mut p = start;
            loop {
                seen[p] = true;
                let q = base[p];
                seen[q] = true;
                p = partner[q];
                if p == start {
                    break;
                }
            }
        }
        matching.sort();
        let entry = out.entry(matching).or_default();
        add_scaled(entry, &loop_power(loops), a_count);
    }
    for p in out.values_mut() {
        p.retain(|_, c| *c != 0);
    }
    out.retain(|_, p| !p.is_empty());
    out
}
