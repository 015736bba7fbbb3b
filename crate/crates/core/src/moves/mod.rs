//! Oriented Reidemeister moves of types 2 and 3 as local rewrites.
//!
//! Move names as they appear in certificates and on the command line:
//!
//! | name                    | meaning                                         |
//! |-------------------------|-------------------------------------------------|
//! | `r2-par-over-expand`    | create a parallel digon, left-lying over-strand |
//! | `r2-par-under-expand`   | create a parallel digon, right-lying over-strand|
//! | `r2-anti-over-expand`   | create an antiparallel digon, counterclockwise  |
//! | `r2-anti-under-expand`  | create an antiparallel digon, clockwise         |
//! | `r2-…-reduce`           | remove a digon of the named kind                |
//! | `r3-<x>-dn`             | flip a triangle coded `x↑` into `x↓`            |
//! | `r3-<x>-up`             | flip a triangle coded `x↓` into `x↑`            |
//!
//! The R2 kind is read off the digon: `par`/`anti` is the relative
//! orientation of its two strands, and `over` means the digon lies to the
//! left of the over-strand (`under`: to its right). For antiparallel strands
//! both strands see the digon on the same side, so the flavour records the
//! circulation around it.

pub mod triangle;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::diagram::{
    is_over_slot, straight_through, Edge, EdgeSide, Port, TangleDiagram,
};
pub use triangle::{
    build_triangle, classify_triangle, locate_triangle, mirror_code, r3_flip, r3_image,
    sole_triangle, triangles, Arrow, Flag, Letter, TriangleCode, TriangleError, TriangleSite,
};

/// In and out ports of both threaded crossings.
type PortPairs = ((Port, Port), (Port, Port));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum R2Variant {
    ParallelOver,
    ParallelUnder,
    AntiOver,
    AntiUnder,
}

impl R2Variant {
    pub const ALL: [R2Variant; 4] = [
        R2Variant::ParallelOver,
        R2Variant::ParallelUnder,
        R2Variant::AntiOver,
        R2Variant::AntiUnder,
    ];

    fn from_parts(parallel: bool, over_flavour: bool) -> Self {
        match (parallel, over_flavour) {
            (true, true) => R2Variant::ParallelOver,
            (true, false) => R2Variant::ParallelUnder,
            (false, true) => R2Variant::AntiOver,
            (false, false) => R2Variant::AntiUnder,
        }
    }

    fn label(self) -> &'static str {
        match self {
            R2Variant::ParallelOver => "par-over",
            R2Variant::ParallelUnder => "par-under",
            R2Variant::AntiOver => "anti-over",
            R2Variant::AntiUnder => "anti-under",
        }
    }

    /// The variant of the over/under-exchanged digon. Exchanging moves the
    /// over role to the other strand, which sees the digon on the opposite
    /// side only when the strands are parallel.
    pub fn mirrored(self) -> Self {
        match self {
            R2Variant::ParallelOver => R2Variant::ParallelUnder,
            R2Variant::ParallelUnder => R2Variant::ParallelOver,
            anti => anti,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum R2Direction {
    Expand,
    Reduce,
}

/// `Down` is `x↑ -> x↓`, `Up` is `x↓ -> x↑`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum R3Direction {
    Down,
    Up,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveName {
    R2(R2Variant, R2Direction),
    R3(Letter, R3Direction),
}

impl MoveName {
    pub fn inverse(self) -> MoveName {
        match self {
            MoveName::R2(v, R2Direction::Expand) => MoveName::R2(v, R2Direction::Reduce),
            MoveName::R2(v, R2Direction::Reduce) => MoveName::R2(v, R2Direction::Expand),
            MoveName::R3(l, R3Direction::Down) => MoveName::R3(l, R3Direction::Up),
            MoveName::R3(l, R3Direction::Up) => MoveName::R3(l, R3Direction::Down),
        }
    }

    /// The name of the same move after exchanging over and under everywhere.
    pub fn mirrored(self) -> MoveName {
        match self {
            MoveName::R2(v, d) => MoveName::R2(v.mirrored(), d),
            MoveName::R3(l, d) => {
                let source_flag = match d {
                    R3Direction::Down => Flag::Up,
                    R3Direction::Up => Flag::Down,
                };
                let m = mirror_code(TriangleCode::new(l, source_flag));
                let dir = match m.flag {
                    Flag::Up => R3Direction::Down,
                    Flag::Down => R3Direction::Up,
                };
                MoveName::R3(m.letter, dir)
            }
        }
    }

    /// All eight R2 names (4 variants, both directions).
    pub fn all_r2() -> Vec<MoveName> {
        R2Variant::ALL
            .iter()
            .flat_map(|&v| {
                [
                    MoveName::R2(v, R2Direction::Expand),
                    MoveName::R2(v, R2Direction::Reduce),
                ]
            })
            .collect()
    }

    /// Both directions of the type-3 move `letter`.
    pub fn r3_both(letter: Letter) -> [MoveName; 2] {
        [
            MoveName::R3(letter, R3Direction::Down),
            MoveName::R3(letter, R3Direction::Up),
        ]
    }

    pub fn r3_letter(self) -> Option<Letter> {
        match self {
            MoveName::R3(l, _) => Some(l),
            MoveName::R2(..) => None,
        }
    }
}

impl fmt::Display for MoveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveName::R2(v, d) => {
                let d = match d {
                    R2Direction::Expand => "expand",
                    R2Direction::Reduce => "reduce",
                };
                write!(f, "r2-{}-{}", v.label(), d)
            }
            MoveName::R3(l, d) => {
                let d = match d {
                    R3Direction::Down => "dn",
                    R3Direction::Up => "up",
                };
                write!(f, "r3-{l}-{d}")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown move name {0:?}")]
pub struct UnknownMove(pub String);

impl FromStr for MoveName {
    type Err = UnknownMove;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || UnknownMove(s.to_string());
        if let Some(rest) = s.strip_prefix("r3-") {
            let (l, d) = rest.split_once('-').ok_or_else(err)?;
            let l: Letter = l.parse().map_err(|_| err())?;
            let d = match d {
                "dn" => R3Direction::Down,
                "up" => R3Direction::Up,
                _ => return Err(err()),
            };
            return Ok(MoveName::R3(l, d));
        }
        let rest = s.strip_prefix("r2-").ok_or_else(err)?;
        let (v, d) = rest.rsplit_once('-').ok_or_else(err)?;
        let v = R2Variant::ALL
            .into_iter()
            .find(|x| x.label() == v)
            .ok_or_else(err)?;
        let d = match d {
            "expand" => R2Direction::Expand,
            "reduce" => R2Direction::Reduce,
            _ => return Err(err()),
        };
        Ok(MoveName::R2(v, d))
    }
}

/// A set of allowed moves.
pub type MoveSet = BTreeSet<MoveName>;

/// All R2 moves plus both directions of the listed type-3 moves.
pub fn basis_with(letters: &[Letter]) -> MoveSet {
    let mut s: MoveSet = MoveName::all_r2().into_iter().collect();
    for &l in letters {
        s.extend(MoveName::r3_both(l));
    }
    s
}

/// Where a move acts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    /// Digon face and its two crossings.
    R2Reduce { face: usize, crossings: [u32; 2] },
    /// Two edge-sides of one face; `first_over` says which strand passes over.
    R2Expand {
        face: usize,
        sides: [EdgeSide; 2],
        first_over: bool,
    },
    /// Triangular face and its corners.
    R3 { face: usize, corners: [u32; 3] },
}

impl Location {
    fn face(&self) -> usize {
        match self {
            Location::R2Reduce { face, .. }
            | Location::R2Expand { face, .. }
            | Location::R3 { face, .. } => *face,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveApplication {
    pub name: MoveName,
    pub location: Location,
    pub source_code: String,
    pub result: TangleDiagram,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("stale application: source diagram does not match")]
    Stale,
}

impl MoveApplication {
    /// The recorded result, after checking the application belongs to
    /// `source`.
    pub fn apply(&self, source: &TangleDiagram) -> Result<TangleDiagram, MoveError> {
        if source.canonical_code_unchecked() != self.source_code {
            return Err(MoveError::Stale);
        }
        Ok(self.result.clone())
    }
}

/// Removes `gone` crossings, joining each strand straight through them.
fn remove_crossings(d: &TangleDiagram, gone: &[u32]) -> TangleDiagram {
    let removed = |p: Port| matches!(p, Port::Slot(c, _) if gone.contains(&c));
    let mut edges = Vec::with_capacity(d.edges().len());
    for e in d.edges() {
        if removed(e.from) {
            continue;
        }
        let mut to = e.to;
        let mut guard = 0;
        while let Port::Slot(c, s) = to {
            if !gone.contains(&c) || guard > gone.len() * 4 {
                break;
            }
            let next = d
                .edge_out_of(Port::Slot(c, straight_through(s)))
                .expect("valid diagram");
            to = d.edges()[next].to;
            guard += 1;
        }
        edges.push(Edge::new(e.from, to));
    }
    TangleDiagram::from_parts(
        d.legs().to_vec(),
        d.crossings().iter().copied().filter(|c| !gone.contains(c)),
        edges,
    )
}

fn slot(p: Port) -> Option<u8> {
    match p {
        Port::Slot(_, s) => Some(s),
        Port::Leg(_) => None,
    }
}

/// A removable digon: its face, crossings and variant.
fn digon_variant(d: &TangleDiagram, sides: &[EdgeSide]) -> Option<([u32; 2], R2Variant)> {
    let [g, h] = sides else { return None };
    let x = d.side_start(*g);
    let y = d.side_end(*g);
    let (Port::Slot(cx, _), Port::Slot(cy, _)) = (x, y) else {
        return None;
    };
    if cx == cy || g.edge == h.edge {
        return None;
    }
    let level = |s: &EdgeSide| {
        let e = d.edges()[s.edge];
        (slot(e.from).map(is_over_slot), slot(e.to).map(is_over_slot))
    };
    let over = match (level(g), level(h)) {
        ((Some(true), Some(true)), (Some(false), Some(false))) => g,
        ((Some(false), Some(false)), (Some(true), Some(true))) => h,
        _ => return None,
    };
    if d.sign_unchecked(cx) == d.sign_unchecked(cy) {
        return None;
    }
    let parallel = g.forward != h.forward;
    // A forward side has the face on its right.
    let over_flavour = !over.forward;
    let mut cs = [cx, cy];
    cs.sort();
    Some((cs, R2Variant::from_parts(parallel, over_flavour)))
}

/// Pushes a finger of side `e` across side `f` inside their common face.
///
/// Drawn with the face between them, `e` below and `f` above. A forward
/// side has the face on its right, so `e` runs west when forward and `f`
/// runs east when forward. The finger rises across `f` at `x = 2` and comes
/// back down at `x = 1` (for a westward `e`).
fn expand_at(d: &TangleDiagram, e: EdgeSide, f: EdgeSide, e_over: bool) -> (TangleDiagram, R2Variant) {
    let e_west = e.forward;
    let f_east = f.forward;
    let c1 = d.next_crossing_id();
    let c2 = c1 + 1;
    // Directions at the crossings (x = 1 is c1, x = 2 is c2).
    let e_dir = |c: u32| -> (f64, f64) {
        let rising = (c == c2) == e_west;
        if rising {
            (0.0, 1.0)
        } else {
            (0.0, -1.0)
        }
    };
    let f_dir = if f_east { (1.0, 0.0) } else { (-1.0, 0.0) };
    // (in, out) ports of e and of f at crossing c.
    let ports = |c: u32| {
        let (ed, fd) = (e_dir(c), f_dir);
        let (u, o) = if e_over { (fd, ed) } else { (ed, fd) };
        let positive = u.0 * o.1 - u.1 * o.0 < 0.0;
        let under = (Port::Slot(c, 0), Port::Slot(c, 2));
        let over = if positive {
            (Port::Slot(c, 3), Port::Slot(c, 1))
        } else {
            (Port::Slot(c, 1), Port::Slot(c, 3))
        };
        if e_over {
            (over, under)
        } else {
            (under, over)
        }
    };
    let e_order = if e_west { [c2, c1] } else { [c1, c2] };
    let f_order = if f_east { [c1, c2] } else { [c2, c1] };
    let ee = d.edges()[e.edge];
    let fe = d.edges()[f.edge];
    let mut edges: Vec<Edge> = d
        .edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != e.edge && *i != f.edge)
        .map(|(_, x)| *x)
        .collect();
    let mut thread = |orig: Edge, order: [u32; 2], pick: fn(PortPairs) -> (Port, Port)| {
        let (in0, out0) = pick(ports(order[0]));
        let (in1, out1) = pick(ports(order[1]));
        edges.push(Edge::new(orig.from, in0));
        edges.push(Edge::new(out0, in1));
        edges.push(Edge::new(out1, orig.to));
    };
    thread(ee, e_order, |p| p.0);
    thread(fe, f_order, |p| p.1);
    let mut crossings: Vec<u32> = d.crossings().to_vec();
    crossings.extend([c1, c2]);
    let parallel = e.forward != f.forward;
    // The new digon lies on the far side of both strands from the face, so
    // it is left of the over-strand exactly when that side was forward.
    let over_flavour = if e_over { e.forward } else { f.forward };
    (
        TangleDiagram::from_parts(d.legs().to_vec(), crossings, edges),
        R2Variant::from_parts(parallel, over_flavour),
    )
}

/// Every application of an allowed move, in face order, deduplicated by the
/// canonical code of the outcome.
pub fn enumerate_applications(d: &TangleDiagram, allowed: &MoveSet) -> Vec<MoveApplication> {
    let source_code = d.canonical_code_unchecked();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (name, location, result) in raw_applications(d, allowed) {
        let code = result.canonical_code_unchecked();
        if seen.insert(code) {
            out.push(MoveApplication {
                name,
                location,
                source_code: source_code.clone(),
                result,
            });
        }
    }
    out
}

/// Every application of an allowed move without deduplication.
pub(crate) fn raw_applications(
    d: &TangleDiagram,
    allowed: &MoveSet,
) -> Vec<(MoveName, Location, TangleDiagram)> {
    let wants_expand = allowed
        .iter()
        .any(|m| matches!(m, MoveName::R2(_, R2Direction::Expand)));
    let wants_reduce = allowed
        .iter()
        .any(|m| matches!(m, MoveName::R2(_, R2Direction::Reduce)));
    let wants_r3 = allowed.iter().any(|m| matches!(m, MoveName::R3(..)));

    let faces = d.faces_unchecked();
    let mut out = Vec::new();
    for (fi, face) in faces.iter().enumerate() {
        if wants_reduce && face.len() == 2 {
            if let Some((cs, v)) = digon_variant(d, &face.sides) {
                let name = MoveName::R2(v, R2Direction::Reduce);
                if allowed.contains(&name) {
                    out.push((
                        name,
                        Location::R2Reduce { face: fi, crossings: cs },
                        remove_crossings(d, &cs),
                    ));
                }
            }
        }
        if wants_r3 && face.len() == 3 {
            if let Ok(site) = locate_triangle(d, fi, face) {
                let dir = match site.code.flag {
                    Flag::Up => R3Direction::Down,
                    Flag::Down => R3Direction::Up,
                };
                let name = MoveName::R3(site.code.letter, dir);
                if allowed.contains(&name) {
                    out.push((
                        name,
                        Location::R3 { face: fi, corners: site.corners },
                        r3_flip(d, &site),
                    ));
                }
            }
        }
        if wants_expand {
            for i in 0..face.len() {
                for j in i + 1..face.len() {
                    let (e, f) = (face.sides[i], face.sides[j]);
                    if e.edge == f.edge {
                        continue;
                    }
                    for first_over in [true, false] {
                        let (result, v) = expand_at(d, e, f, first_over);
                        let name = MoveName::R2(v, R2Direction::Expand);
                        if allowed.contains(&name) {
                            out.push((
                                name,
                                Location::R2Expand {
                                    face: fi,
                                    sides: [e, f],
                                    first_over,
                                },
                                result,
                            ));
                        }
                    }
                }
            }
        }
    }
    debug_assert!(out.windows(2).all(|w| w[0].1.face() <= w[1].1.face()));
    out
}

/// Classifies every removable digon of `d`.
pub fn digons(d: &TangleDiagram) -> Vec<(usize, [u32; 2], R2Variant)> {
    d.faces_unchecked()
        .iter()
        .enumerate()
        .filter(|(_, f)| f.len() == 2)
        .filter_map(|(i, f)| digon_variant(d, &f.sides).map(|(c, v)| (i, c, v)))
        .collect()
}
