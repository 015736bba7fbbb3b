//! Bounded breadth-first derivation search and the certificates it
//! produces.
//!
//! A [`Certificate`] is a replayable derivation: a start diagram and a list
//! of steps, each naming a move and recording the diagram it produced.
//! [`verify_certificate`] replays it independently of the search.

mod splice;

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::diagram::TangleDiagram;
use crate::moves::{raw_applications, MoveName, MoveSet};

pub use splice::{splice, SpliceError};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub name: MoveName,
    pub result: TangleDiagram,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Certificate {
    pub basis: MoveSet,
    pub start: TangleDiagram,
    pub steps: Vec<Step>,
}

impl Certificate {
    pub fn trivial(basis: MoveSet, start: TangleDiagram) -> Self {
        Certificate {
            basis,
            start,
            steps: Vec::new(),
        }
    }

    pub fn end(&self) -> &TangleDiagram {
        self.steps.last().map_or(&self.start, |s| &s.result)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Start followed by every step result.
    pub fn diagrams(&self) -> impl Iterator<Item = &TangleDiagram> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|s| &s.result))
    }

    /// Each R3 letter used, in order of first use.
    pub fn r3_letters(&self) -> Vec<crate::moves::Letter> {
        let mut out = Vec::new();
        for s in &self.steps {
            if let Some(l) = s.name.r3_letter() {
                if !out.contains(&l) {
                    out.push(l);
                }
            }
        }
        out
    }

    /// The same derivation with every diagram mirrored and every move
    /// renamed accordingly.
    pub fn mirrored(&self) -> Certificate {
        Certificate {
            basis: self.basis.iter().map(|m| m.mirrored()).collect(),
            start: self.start.mirror().canonical_form(),
            steps: self
                .steps
                .iter()
                .map(|s| Step {
                    name: s.name.mirrored(),
                    result: s.result.mirror().canonical_form(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_crossings: usize,
    pub max_depth: usize,
    pub max_states: usize,
}

impl SearchBounds {
    /// Four crossings of headroom over `start`, depth 24, five million
    /// states.
    pub fn for_start(start: &TangleDiagram) -> Self {
        SearchBounds {
            max_crossings: start.crossing_count() + 4,
            max_depth: 24,
            max_states: 5_000_000,
        }
    }

    pub fn with_max_crossings(mut self, n: usize) -> Self {
        self.max_crossings = n;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Limit {
    Depth,
    States,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("leg signatures differ: {start} vs {goal}")]
    LegSignatureMismatch { start: String, goal: String },
    #[error("invalid {which} diagram: {detail}")]
    InvalidInput { which: &'static str, detail: String },
    #[error("search space exhausted after {states} states (max {max_crossings} crossings)")]
    Exhausted { states: usize, max_crossings: usize },
    #[error("{limit:?} bound hit after {states} states at depth {depth} ({bounds:?})")]
    BoundsHit {
        limit: Limit,
        states: usize,
        depth: usize,
        bounds: SearchBounds,
    },
}

/// Statistics of a successful search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub states: usize,
    pub depth: usize,
}

/// Shortest derivation from `start` to `goal` using moves in `basis`.
pub fn derive(
    start: &TangleDiagram,
    goal: &TangleDiagram,
    basis: &MoveSet,
    bounds: SearchBounds,
) -> Result<Certificate, SearchError> {
    derive_with_stats(start, goal, basis, bounds).map(|(c, _)| c)
}

const CHUNK: usize = 512;

pub fn derive_with_stats(
    start: &TangleDiagram,
    goal: &TangleDiagram,
    basis: &MoveSet,
    bounds: SearchBounds,
) -> Result<(Certificate, SearchStats), SearchError> {
    for (which, d) in [("start", start), ("goal", goal)] {
        let v = d.validate();
        if !v.is_empty() {
            return Err(SearchError::InvalidInput {
                which,
                detail: format!("{v:?}"),
            });
        }
    }
    if start.leg_signature() != goal.leg_signature() {
        return Err(SearchError::LegSignatureMismatch {
            start: start.leg_signature(),
            goal: goal.leg_signature(),
        });
    }
    let goal_key = goal.canonical_key();
    let start_key = start.canonical_key();
    if start_key == goal_key {
        return Ok((Certificate::trivial(basis.clone(), start.clone()), SearchStats::default()));
    }

    // Node i: (parent, move). The root is its own parent.
    let mut nodes: Vec<(u32, Option<MoveName>)> = vec![(0, None)];
    let mut visited: HashMap<Box<[u8]>, u32> = HashMap::new();
    visited.insert(start_key, 0);
    let mut frontier: Vec<(u32, TangleDiagram)> = vec![(0, start.canonical_form())];
    let mut depth = 0;

    while !frontier.is_empty() {
        if depth >= bounds.max_depth {
            return Err(SearchError::BoundsHit {
                limit: Limit::Depth,
                states: visited.len(),
                depth,
                bounds,
            });
        }
        depth += 1;
        let mut next = Vec::new();
        for chunk in frontier.chunks(CHUNK) {
            let expanded: Vec<Vec<Successor>> = chunk
                .par_iter()
                .map(|(_, d)| successors(d, basis, bounds.max_crossings, &visited))
                .collect();
            for ((parent, _), succ) in chunk.iter().zip(expanded) {
                for (name, key, diagram) in succ {
                    if visited.contains_key(&key) {
                        continue;
                    }
                    let id = nodes.len() as u32;
                    nodes.push((*parent, Some(name)));
                    let found = key == goal_key;
                    visited.insert(key, id);
                    if found {
                        let stats = SearchStats {
                            states: visited.len(),
                            depth,
                        };
                        let cert = reconstruct(start, basis, &nodes, &visited, id);
                        return Ok((cert, stats));
                    }
                    if visited.len() >= bounds.max_states {
                        return Err(SearchError::BoundsHit {
                            limit: Limit::States,
                            states: visited.len(),
                            depth,
                            bounds,
                        });
                    }
                    next.push((id, diagram));
                }
            }
        }
        frontier = next;
    }
    Err(SearchError::Exhausted {
        states: visited.len(),
        max_crossings: bounds.max_crossings,
    })
}

/// Distinct unvisited successors of `d` in enumeration order.
/// A move, the canonical key of its result, and the result.
type Successor = (MoveName, Box<[u8]>, TangleDiagram);

fn successors(
    d: &TangleDiagram,
    basis: &MoveSet,
    max_crossings: usize,
    visited: &HashMap<Box<[u8]>, u32>,
) -> Vec<Successor> {
    let mut seen = HashSet::new();
    raw_applications(d, basis)
        .into_iter()
        .filter(|(_, _, r)| r.crossing_count() <= max_crossings)
        .filter_map(|(name, _, r)| {
            let c = r.canonical_form();
            let key = c.canonical_key();
            (!visited.contains_key(&key) && seen.insert(key.clone())).then_some((name, key, c))
        })
        .collect()
}

fn reconstruct(
    start: &TangleDiagram,
    basis: &MoveSet,
    nodes: &[(u32, Option<MoveName>)],
    visited: &HashMap<Box<[u8]>, u32>,
    goal: u32,
) -> Certificate {
    let mut chain = vec![goal];
    while let Some(&last) = chain.last() {
        if last == 0 {
            break;
        }
        chain.push(nodes[last as usize].0);
    }
    chain.reverse();
    let wanted: HashSet<u32> = chain.iter().copied().collect();
    let keys: HashMap<u32, &Box<[u8]>> = visited
        .iter()
        .filter(|(_, id)| wanted.contains(id))
        .map(|(k, id)| (*id, k))
        .collect();

    let mut cert = Certificate::trivial(basis.clone(), start.clone());
    let mut current = start.clone();
    for &id in &chain[1..] {
        let name = nodes[id as usize].1.expect("non-root node has a move");
        let only: MoveSet = [name].into_iter().collect();
        let key = keys[&id];
        let result = raw_applications(&current, &only)
            .into_iter()
            .map(|(_, _, r)| r.canonical_form())
            .find(|r| &r.canonical_key() == key)
            .expect("recorded move replays");
        cert.steps.push(Step {
            name,
            result: result.clone(),
        });
        current = result;
    }
    cert
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyFailure {
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("move {0} is not in the certificate basis")]
    NotInBasis(MoveName),
    #[error("no application of {0} yields the recorded diagram")]
    NoMatchingApplication(MoveName),
}

/// A failed check; `step` 0 refers to the start diagram.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("step {step}: {failure}")]
pub struct VerifyError {
    pub step: usize,
    pub failure: VerifyFailure,
}

/// Replays every step of `c`, reporting the first failure.
pub fn verify_certificate(c: &Certificate) -> Result<(), VerifyError> {
    let check_valid = |d: &TangleDiagram, step: usize| {
        let v = d.validate();
        if v.is_empty() {
            Ok(())
        } else {
            let tags: Vec<&str> = v.iter().map(|x| x.tag()).collect();
            Err(VerifyError {
                step,
                failure: VerifyFailure::InvalidDiagram(tags.join(", ")),
            })
        }
    };
    check_valid(&c.start, 0)?;
    let mut prev = &c.start;
    for (i, s) in c.steps.iter().enumerate() {
        let step = i + 1;
        if !c.basis.contains(&s.name) {
            return Err(VerifyError {
                step,
                failure: VerifyFailure::NotInBasis(s.name),
            });
        }
        check_valid(&s.result, step)?;
        let only: MoveSet = [s.name].into_iter().collect();
        let want = s.result.canonical_key();
        let ok = raw_applications(prev, &only)
            .iter()
            .any(|(_, _, r)| r.canonical_key() == want);
        if !ok {
            return Err(VerifyError {
                step,
                failure: VerifyFailure::NoMatchingApplication(s.name),
            });
        }
        prev = &s.result;
    }
    Ok(())
}

/// The derivation run backwards with inverse moves.
pub fn reverse_certificate(c: &Certificate) -> Certificate {
    let diagrams: Vec<&TangleDiagram> = c.diagrams().collect();
    let steps = c
        .steps
        .iter()
        .enumerate()
        .rev()
        .map(|(i, s)| Step {
            name: s.name.inverse(),
            result: diagrams[i].clone(),
        })
        .collect();
    Certificate {
        basis: c.basis.iter().map(|m| m.inverse()).collect(),
        start: c.end().clone(),
        steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::{basis_with, build_triangle, r3_image, sole_triangle, Letter, TriangleCode};

    fn lemma_ends(x: Letter) -> (TangleDiagram, TangleDiagram) {
        let s = build_triangle(TriangleCode::up(x));
        let t = r3_image(&s, sole_triangle(&s).unwrap().face).unwrap();
        (s, t)
    }

    #[test]
    fn same_diagram_gives_empty_certificate() {
        let d = build_triangle(TriangleCode::up(Letter::b));
        let basis = basis_with(&[Letter::a]);
        let c = derive(&d, &d, &basis, SearchBounds::for_start(&d)).unwrap();
        assert!(c.is_empty());
        assert_eq!(reverse_certificate(&c), c);
    }

    #[test]
    fn direct_move_is_one_step() {
        let (s, t) = lemma_ends(Letter::C);
        let c = derive(&s, &t, &basis_with(&[Letter::C]), SearchBounds::for_start(&s)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.steps[0].name.to_string(), "r3-C-dn");
        verify_certificate(&c).unwrap();
        let r = reverse_certificate(&c);
        verify_certificate(&r).unwrap();
        assert_eq!(r.steps[0].name.to_string(), "r3-C-up");
        assert_eq!(reverse_certificate(&r), c);
    }

    #[test]
    fn mismatched_legs_are_rejected() {
        let s = TangleDiagram::single_strand();
        let t = build_triangle(TriangleCode::up(Letter::a));
        assert!(matches!(
            derive(&s, &t, &MoveSet::new(), SearchBounds::for_start(&s)),
            Err(SearchError::LegSignatureMismatch { .. })
        ));
    }

    #[test]
    fn exhausted_versus_bounds_hit() {
        let (s, t) = lemma_ends(Letter::a);
        // Without R2 moves nothing applies to an a-triangle except R3 a.
        let basis: MoveSet = MoveName::r3_both(Letter::b).into_iter().collect();
        assert!(matches!(
            derive(&s, &t, &basis, SearchBounds::for_start(&s)),
            Err(SearchError::Exhausted { .. })
        ));
        let tight = SearchBounds {
            max_crossings: 5,
            max_depth: 1,
            max_states: 1000,
        };
        assert!(matches!(
            derive(&s, &t, &basis_with(&[Letter::b]), tight),
            Err(SearchError::BoundsHit { limit: Limit::Depth, .. })
        ));
    }

    #[test]
    fn basis_violation_and_tampering_are_caught() {
        let (s, t) = lemma_ends(Letter::d);
        let c = derive(&s, &t, &basis_with(&[Letter::d]), SearchBounds::for_start(&s)).unwrap();
        let mut narrow = c.clone();
        narrow.basis = basis_with(&[Letter::a]);
        let err = verify_certificate(&narrow).unwrap_err();
        assert_eq!(err.step, 1);
        assert!(matches!(err.failure, VerifyFailure::NotInBasis(_)));

        let mut bent = c.clone();
        bent.steps[0].result = bent.steps[0].result.mirror();
        let err = verify_certificate(&bent).unwrap_err();
        assert_eq!(err.step, 1);
    }
}
