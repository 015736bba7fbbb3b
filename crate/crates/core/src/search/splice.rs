//! Substituting derivations of R3 moves into a certificate.
//!
//! A dictionary certificate for a move starts at a 6-leg tangle with one
//! coherent triangle and ends at its flip. To replace a host step, the host
//! triangle's disk is cut out and every diagram of the dictionary
//! certificate is glued into the hole. The six half-edges leaving a
//! triangle are matched by walking counterclockwise from the start of the
//! top side, which is intrinsic to the triangle code.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::{verify_certificate, Certificate, Step, VerifyError};
use crate::diagram::{Edge, Port, TangleDiagram};
use crate::moves::{r3_flip, sole_triangle, triangles, MoveName, MoveSet, TriangleSite};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpliceError {
    #[error("step {step}: no dictionary entry for {name}")]
    MissingEntry { step: usize, name: MoveName },
    #[error("dictionary entry for {name} is not a single-triangle derivation")]
    BadEntry { name: MoveName },
    #[error("dictionary entry for {name} uses moves outside the target basis")]
    EntryBasis { name: MoveName },
    #[error("step {step}: no embedding of {name} found")]
    EmbeddingNotFound { step: usize, name: MoveName },
    #[error("spliced certificate fails verification: {0}")]
    Verify(#[from] VerifyError),
}

/// The six ports leaving the triangle at `site`, counterclockwise from the
/// start of the top side.
fn external_ports(d: &TangleDiagram, site: &TriangleSite) -> [Port; 6] {
    let mut out = [Port::Leg(0); 6];
    for (k, &c) in site.corners.iter().enumerate() {
        let mut internal = [false; 4];
        for side in site.sides {
            let e = d.edges()[side.edge];
            for p in [e.from, e.to] {
                if let Port::Slot(x, s) = p {
                    if x == c {
                        internal[s as usize] = true;
                    }
                }
            }
        }
        let first = (0..4)
            .find(|&i| internal[i] && internal[(i + 1) % 4])
            .expect("two adjacent internal slots");
        out[2 * k] = Port::Slot(c, ((first + 2) % 4) as u8);
        out[2 * k + 1] = Port::Slot(c, ((first + 3) % 4) as u8);
    }
    out
}

/// A prepared dictionary entry: the certificate and, for each external
/// position, the template leg it leads to.
struct Template<'a> {
    cert: &'a Certificate,
    legs: [u32; 6],
}

fn prepare(name: MoveName, cert: &Certificate) -> Result<Template<'_>, SpliceError> {
    let bad = || SpliceError::BadEntry { name };
    let t = &cert.start;
    if t.leg_count() != 6 || t.crossing_count() != 3 {
        return Err(bad());
    }
    let site = sole_triangle(t).ok_or_else(bad)?;
    let ext = external_ports(t, &site);
    let mut legs = [0u32; 6];
    for (k, p) in ext.iter().enumerate() {
        let e = t.edges().iter().find(|e| e.from == *p || e.to == *p).ok_or_else(bad)?;
        let other = if e.from == *p { e.to } else { e.from };
        let Port::Leg(l) = other else { return Err(bad()) };
        legs[k] = l;
    }
    Ok(Template { cert, legs })
}

/// Embeds template diagram `inner` into `host` in place of the triangle at
/// `site`.
fn embed(host: &TangleDiagram, site: &TriangleSite, ext: &[Port; 6], tpl: &Template, inner: &TangleDiagram) -> TangleDiagram {
    // Marker k stands for external position k, encoded as a leg id far
    // beyond any real leg.
    const BASE: u32 = 1_000_000;
    let marker = |k: usize| Port::Leg(BASE + k as u32);
    let is_marker = |p: Port| matches!(p, Port::Leg(i) if i >= BASE);
    let corner = |p: Port| matches!(p, Port::Slot(c, _) if site.corners.contains(&c));
    let side_edges: Vec<usize> = site.sides.iter().map(|s| s.edge).collect();
    let offset = host.crossings().last().copied().unwrap_or(0);

    let mut edges: Vec<Edge> = Vec::new();
    for (i, e) in host.edges().iter().enumerate() {
        if side_edges.contains(&i) {
            continue;
        }
        let map = |p: Port| {
            if corner(p) {
                marker(ext.iter().position(|x| *x == p).expect("external port"))
            } else {
                p
            }
        };
        edges.push(Edge::new(map(e.from), map(e.to)));
    }
    let leg_pos: HashMap<u32, usize> = tpl.legs.iter().enumerate().map(|(k, &l)| (l, k)).collect();
    for e in inner.edges() {
        let map = |p: Port| match p {
            Port::Leg(l) => marker(leg_pos[&l]),
            Port::Slot(c, s) => Port::Slot(c + offset, s),
        };
        edges.push(Edge::new(map(e.from), map(e.to)));
    }
    // Join the two halves of every marker.
    let out_of: HashMap<Port, Port> = edges
        .iter()
        .filter(|e| is_marker(e.from))
        .map(|e| (e.from, e.to))
        .collect();
    let joined = edges.iter().filter(|e| !is_marker(e.from)).map(|e| {
        let mut to = e.to;
        while is_marker(to) {
            to = out_of[&to];
        }
        Edge::new(e.from, to)
    });
    let joined: Vec<Edge> = joined.collect();
    let crossings = host
        .crossings()
        .iter()
        .copied()
        .filter(|c| !site.corners.contains(c))
        .chain(inner.crossings().iter().map(|c| c + offset));
    TangleDiagram::from_parts(host.legs().to_vec(), crossings, joined)
}

/// Replaces every step of `outer` whose move is not in `target` by the
/// dictionary derivation for that move, embedded at the step's triangle.
/// The result is verified against `target`.
pub fn splice(
    outer: &Certificate,
    dictionary: &BTreeMap<MoveName, Certificate>,
    target: &MoveSet,
) -> Result<Certificate, SpliceError> {
    let mut templates = BTreeMap::new();
    for (name, cert) in dictionary {
        if !cert.basis.is_subset(target) {
            return Err(SpliceError::EntryBasis { name: *name });
        }
        templates.insert(*name, prepare(*name, cert)?);
    }
    let mut out = Certificate::trivial(target.clone(), outer.start.clone());
    let mut prev = &outer.start;
    for (i, step) in outer.steps.iter().enumerate() {
        let number = i + 1;
        if target.contains(&step.name) {
            out.steps.push(step.clone());
            prev = &step.result;
            continue;
        }
        let tpl = templates.get(&step.name).ok_or(SpliceError::MissingEntry {
            step: number,
            name: step.name,
        })?;
        let want = step.result.canonical_key();
        let code = sole_triangle(&tpl.cert.start).map(|s| s.code);
        let site = triangles(prev)
            .into_iter()
            .filter(|s| Some(s.code) == code)
            .find(|s| r3_flip(prev, s).canonical_key() == want)
            .ok_or(SpliceError::EmbeddingNotFound {
                step: number,
                name: step.name,
            })?;
        let ext = external_ports(prev, &site);
        let start_ok = embed(prev, &site, &ext, tpl, &tpl.cert.start).canonical_key() == prev.canonical_key();
        let end_ok = embed(prev, &site, &ext, tpl, tpl.cert.end()).canonical_key() == want;
        if !start_ok || !end_ok {
            return Err(SpliceError::EmbeddingNotFound {
                step: number,
                name: step.name,
            });
        }
        for s in &tpl.cert.steps {
            out.steps.push(Step {
                name: s.name,
                result: embed(prev, &site, &ext, tpl, &s.result).canonical_form(),
            });
        }
        // Keep the host's own labelling of the step result.
        if let Some(last) = out.steps.last_mut() {
            last.result = step.result.clone();
        }
        prev = &step.result;
    }
    verify_certificate(&out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::{basis_with, build_triangle, r3_image, Letter, TriangleCode};
    use crate::search::{derive, reverse_certificate, SearchBounds};

    #[test]
    fn empty_substitution_keeps_outer() {
        let s = build_triangle(TriangleCode::up(Letter::b));
        let t = r3_image(&s, sole_triangle(&s).unwrap().face).unwrap();
        let basis = basis_with(&[Letter::b]);
        let c = derive(&s, &t, &basis, SearchBounds::for_start(&s)).unwrap();
        let out = splice(&c, &BTreeMap::new(), &basis).unwrap();
        assert_eq!(out, c);
    }

    #[test]
    fn triangle_step_is_replaced_by_a_derivation() {
        // x = a, derived with b moves; splice it into a one-step a-move.
        let s = build_triangle(TriangleCode::up(Letter::a));
        let t = r3_image(&s, sole_triangle(&s).unwrap().face).unwrap();
        let with_b = basis_with(&[Letter::b]);
        let lemma = derive(&s, &t, &with_b, SearchBounds::for_start(&s).with_max_crossings(5)).unwrap();
        assert!(lemma.len() <= 3);
        let direct = derive(&s, &t, &basis_with(&[Letter::a]), SearchBounds::for_start(&s)).unwrap();
        let [dn, up] = MoveName::r3_both(Letter::a);
        let dict: BTreeMap<_, _> = [(dn, lemma.clone()), (up, reverse_certificate(&lemma))].into();
        let out = splice(&direct, &dict, &with_b).unwrap();
        assert_eq!(out.len(), lemma.len());
        // The reversed direction goes through the up entry.
        let back = splice(&reverse_certificate(&direct), &dict, &with_b).unwrap();
        assert_eq!(back.len(), lemma.len());
    }
}
