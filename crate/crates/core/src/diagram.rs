//! Oriented tangle diagrams in a disk, stored as planar combinatorial maps.
//!
//! A crossing has four ports in counterclockwise slot order `0, 1, 2, 3`
//! (west, south, east, north). The under-strand enters slot 0 and leaves
//! slot 2. The over-strand runs `3 -> 1` on a positive crossing and `1 -> 3`
//! on a negative one.
//!
//! Boundary legs are numbered `1..=2n` counterclockwise around the disk. For
//! face tracing the boundary is collapsed to a single virtual vertex whose
//! counterclockwise rotation visits the legs in decreasing order (the disk
//! boundary is seen from outside).

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LegFlag {
    /// The strand enters the disk here.
    In,
    /// The strand leaves the disk here.
    Out,
}

/// One end of an edge: a boundary leg (1-based) or a crossing slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Port {
    Leg(u32),
    Slot(u32, u8),
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Port::Leg(i) => write!(f, "b{i}"),
            Port::Slot(c, s) => write!(f, "c{c}.{s}"),
        }
    }
}

/// Directed edge from an out-port to an in-port.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: Port,
    pub to: Port,
}

impl Edge {
    pub fn new(from: Port, to: Port) -> Self {
        Edge { from, to }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CrossingSign {
    Positive,
    Negative,
}

impl CrossingSign {
    pub fn value(self) -> i32 {
        match self {
            CrossingSign::Positive => 1,
            CrossingSign::Negative => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            CrossingSign::Positive => CrossingSign::Negative,
            CrossingSign::Negative => CrossingSign::Positive,
        }
    }
}

/// The slot a strand leaves through after entering at `slot`.
pub fn straight_through(slot: u8) -> u8 {
    (slot + 2) % 4
}

/// True when `slot` belongs to the over-strand.
pub fn is_over_slot(slot: u8) -> bool {
    slot % 2 == 1
}

/// One side of an edge, as traversed by a face walk. `forward` means the
/// walk runs along the edge direction; the face then lies to the right of
/// the edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSide {
    pub edge: usize,
    pub forward: bool,
}

/// A face of the map, as a clockwise walk of edge-sides (the face is on the
/// right of every step).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub sides: Vec<EdgeSide>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }
}

/// Machine-readable validation failures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A port is used by more than one edge, or by none.
    PortReuse(Port),
    PortUnused(Port),
    /// An edge references a leg or crossing that does not exist.
    UnknownPort(Port),
    /// An edge leaves an in-port or enters an out-port.
    OrientationMismatch(Edge),
    /// Leg count odd or in/out legs unbalanced.
    LegBalance,
    /// Euler characteristic of the capped map is not 2.
    Genus { euler: i64 },
    /// Some edges lie on a loop that never reaches the boundary.
    ClosedComponent,
}

impl Violation {
    pub fn tag(&self) -> &'static str {
        match self {
            Violation::PortReuse(_) => "port-reuse",
            Violation::PortUnused(_) => "port-unused",
            Violation::UnknownPort(_) => "unknown-port",
            Violation::OrientationMismatch(_) => "orientation-mismatch",
            Violation::LegBalance => "leg-balance",
            Violation::Genus { .. } => "genus",
            Violation::ClosedComponent => "closed-component",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PortReuse(p) => write!(f, "port-reuse: {p}"),
            Violation::PortUnused(p) => write!(f, "port-unused: {p}"),
            Violation::UnknownPort(p) => write!(f, "unknown-port: {p}"),
            Violation::OrientationMismatch(e) => {
                write!(f, "orientation-mismatch: {} -> {}", e.from, e.to)
            }
            Violation::LegBalance => write!(f, "leg-balance"),
            Violation::Genus { euler } => write!(f, "genus: euler characteristic {euler}"),
            Violation::ClosedComponent => write!(f, "closed-component"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("invalid diagram: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("unknown crossing {0}")]
    UnknownCrossing(u32),
}

/// A strand: a maximal directed path from an in-leg to an out-leg.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strand {
    pub from_leg: u32,
    pub to_leg: u32,
    /// Edge indices in travel order.
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TangleDiagram {
    legs: Vec<LegFlag>,
    crossings: Vec<u32>,
    edges: Vec<Edge>,
}

impl TangleDiagram {
    /// Builds a diagram without validating it. Crossing ids and edges are
    /// stored sorted, so structural equality ignores input order.
    pub fn from_parts(
        legs: Vec<LegFlag>,
        crossings: impl IntoIterator<Item = u32>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Self {
        let crossings: BTreeSet<u32> = crossings.into_iter().collect();
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        edges.sort();
        TangleDiagram {
            legs,
            crossings: crossings.into_iter().collect(),
            edges,
        }
    }

    /// Builds a diagram and rejects it unless it validates.
    pub fn new(
        legs: Vec<LegFlag>,
        crossings: impl IntoIterator<Item = u32>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, DiagramError> {
        let d = Self::from_parts(legs, crossings, edges);
        let v = d.validate();
        if v.is_empty() {
            Ok(d)
        } else {
            Err(DiagramError::Invalid(v))
        }
    }

    /// A single strand entering at leg 1 and leaving at leg 2.
    pub fn single_strand() -> Self {
        Self::from_parts(
            vec![LegFlag::In, LegFlag::Out],
            [],
            [Edge::new(Port::Leg(1), Port::Leg(2))],
        )
    }

    pub fn legs(&self) -> &[LegFlag] {
        &self.legs
    }

    pub fn leg_count(&self) -> usize {
        self.legs.len()
    }

    pub fn crossings(&self) -> &[u32] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub(crate) fn crossing_pos(&self, id: u32) -> Option<usize> {
        self.crossings.binary_search(&id).ok()
    }

    pub(crate) fn next_crossing_id(&self) -> u32 {
        self.crossings.last().map_or(1, |m| m + 1)
    }

    pub(crate) fn port_count(&self) -> usize {
        self.legs.len() + 4 * self.crossings.len()
    }

    /// Dense index of a port, or `None` if it refers to nothing.
    pub(crate) fn port_index(&self, p: Port) -> Option<usize> {
        match p {
            Port::Leg(i) if i >= 1 && (i as usize) <= self.legs.len() => Some(i as usize - 1),
            Port::Leg(_) => None,
            Port::Slot(c, s) if s < 4 => self
                .crossing_pos(c)
                .map(|pos| self.legs.len() + 4 * pos + s as usize),
            Port::Slot(..) => None,
        }
    }

    pub(crate) fn port_at(&self, idx: usize) -> Port {
        let n = self.legs.len();
        if idx < n {
            Port::Leg(idx as u32 + 1)
        } else {
            let k = idx - n;
            Port::Slot(self.crossings[k / 4], (k % 4) as u8)
        }
    }

    /// Every violated invariant; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n_in = self.legs.iter().filter(|f| **f == LegFlag::In).count();
        if !self.legs.len().is_multiple_of(2) || 2 * n_in != self.legs.len() {
            out.push(Violation::LegBalance);
        }

        let mut uses = vec![0usize; self.port_count()];
        let mut heads_at = vec![false; self.port_count()];
        for e in &self.edges {
            for (p, is_head) in [(e.from, false), (e.to, true)] {
                match self.port_index(p) {
                    Some(i) => {
                        uses[i] += 1;
                        heads_at[i] = is_head;
                    }
                    None => out.push(Violation::UnknownPort(p)),
                }
            }
        }
        for (i, &u) in uses.iter().enumerate() {
            if u > 1 {
                out.push(Violation::PortReuse(self.port_at(i)));
            } else if u == 0 {
                out.push(Violation::PortUnused(self.port_at(i)));
            }
        }

        for e in &self.edges {
            if !self.is_out_port(e.from) || !self.is_in_port(e.to) {
                out.push(Violation::OrientationMismatch(*e));
            }
        }
        // Over-strand slots 1 and 3 must be one in, one out.
        if out.is_empty() {
            for &c in &self.crossings {
                let h1 = heads_at[self.port_index(Port::Slot(c, 1)).unwrap()];
                let h3 = heads_at[self.port_index(Port::Slot(c, 3)).unwrap()];
                if h1 == h3 {
                    let p = if h1 { Port::Slot(c, 1) } else { Port::Slot(c, 3) };
                    let e = self.edges.iter().find(|e| e.to == p || e.from == p).copied();
                    if let Some(e) = e {
                        out.push(Violation::OrientationMismatch(e));
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }

        let euler = self.euler_characteristic();
        if euler != 2 {
            out.push(Violation::Genus { euler });
        }
        if self.trace_strands().1 {
            out.push(Violation::ClosedComponent);
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn is_out_port(&self, p: Port) -> bool {
        match p {
            Port::Leg(i) => self.legs.get(i as usize - 1) == Some(&LegFlag::In),
            Port::Slot(_, s) => s != 0,
        }
    }

    fn is_in_port(&self, p: Port) -> bool {
        match p {
            Port::Leg(i) => self.legs.get(i as usize - 1) == Some(&LegFlag::Out),
            Port::Slot(_, s) => s != 2,
        }
    }

    fn euler_characteristic(&self) -> i64 {
        let v = self.crossings.len() + usize::from(!self.legs.is_empty());
        let e = self.edges.len();
        let f = self.faces_unchecked().len();
        v as i64 - e as i64 + f as i64
    }

    /// For each dense port index, the edge touching it (assumes validity).
    pub(crate) fn incidence(&self) -> Vec<usize> {
        let mut at = vec![usize::MAX; self.port_count()];
        for (i, e) in self.edges.iter().enumerate() {
            if let Some(p) = self.port_index(e.from) {
                at[p] = i;
            }
            if let Some(p) = self.port_index(e.to) {
                at[p] = i;
            }
        }
        at
    }

    /// The edge whose head is at `p`.
    pub(crate) fn edge_into(&self, p: Port) -> Option<usize> {
        self.edges.iter().position(|e| e.to == p)
    }

    /// The edge whose tail is at `p`.
    pub(crate) fn edge_out_of(&self, p: Port) -> Option<usize> {
        self.edges.iter().position(|e| e.from == p)
    }

    /// Faces of the map; every edge contributes exactly two sides.
    pub fn faces(&self) -> Result<Vec<Face>, DiagramError> {
        let v = self.validate();
        if !v.is_empty() {
            return Err(DiagramError::Invalid(v));
        }
        Ok(self.faces_unchecked())
    }

    pub(crate) fn faces_unchecked(&self) -> Vec<Face> {
        let at = self.incidence();
        let n = self.legs.len();
        let dart_port = |d: usize| {
            let e = &self.edges[d / 2];
            if d.is_multiple_of(2) {
                e.from
            } else {
                e.to
            }
        };
        let dart_at = |p: Port| -> Option<usize> {
            let idx = self.port_index(p)?;
            let ei = *at.get(idx)?;
            if ei == usize::MAX {
                return None;
            }
            let e = &self.edges[ei];
            Some(if e.from == p { 2 * ei } else { 2 * ei + 1 })
        };
        // Counterclockwise successor at the dart's vertex.
        let sigma = |d: usize| -> Option<usize> {
            let next = match dart_port(d) {
                Port::Leg(i) => Port::Leg(if i == 1 { n as u32 } else { i - 1 }),
                Port::Slot(c, s) => Port::Slot(c, (s + 1) % 4),
            };
            dart_at(next)
        };

        let total = 2 * self.edges.len();
        let mut seen = vec![false; total];
        let mut faces = Vec::new();
        for start in 0..total {
            if seen[start] {
                continue;
            }
            let mut sides = Vec::new();
            let mut d = start;
            loop {
                if seen[d] {
                    break;
                }
                seen[d] = true;
                sides.push(EdgeSide {
                    edge: d / 2,
                    forward: d % 2 == 0,
                });
                match sigma(d ^ 1) {
                    Some(nd) => d = nd,
                    None => break,
                }
            }
            faces.push(Face { sides });
        }
        faces
    }

    /// The vertex a side's walk starts from.
    pub(crate) fn side_start(&self, s: EdgeSide) -> Port {
        let e = &self.edges[s.edge];
        if s.forward {
            e.from
        } else {
            e.to
        }
    }

    /// The vertex a side's walk ends at.
    pub(crate) fn side_end(&self, s: EdgeSide) -> Port {
        let e = &self.edges[s.edge];
        if s.forward {
            e.to
        } else {
            e.from
        }
    }

    pub fn crossing_sign(&self, c: u32) -> Result<CrossingSign, DiagramError> {
        if self.crossing_pos(c).is_none() {
            return Err(DiagramError::UnknownCrossing(c));
        }
        Ok(self.sign_unchecked(c))
    }

    pub(crate) fn sign_unchecked(&self, c: u32) -> CrossingSign {
        if self.edges.iter().any(|e| e.to == Port::Slot(c, 3)) {
            CrossingSign::Positive
        } else {
            CrossingSign::Negative
        }
    }

    pub fn writhe(&self) -> i32 {
        self.crossings
            .iter()
            .map(|&c| self.sign_unchecked(c).value())
            .sum()
    }

    /// Returns strands from each in-leg, and whether edges were left over
    /// (a closed component).
    fn trace_strands(&self) -> (Vec<Strand>, bool) {
        let mut out_of: HashMap<Port, usize> = HashMap::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            out_of.insert(e.from, i);
        }
        let mut used = vec![false; self.edges.len()];
        let mut strands = Vec::new();
        for (li, flag) in self.legs.iter().enumerate() {
            if *flag != LegFlag::In {
                continue;
            }
            let from_leg = li as u32 + 1;
            let mut path = Vec::new();
            let mut cur = Port::Leg(from_leg);
            let to_leg = loop {
                let Some(&ei) = out_of.get(&cur) else {
                    break None;
                };
                if used[ei] {
                    break None;
                }
                used[ei] = true;
                path.push(ei);
                match self.edges[ei].to {
                    Port::Leg(j) => break Some(j),
                    Port::Slot(c, s) => cur = Port::Slot(c, straight_through(s)),
                }
            };
            if let Some(to_leg) = to_leg {
                strands.push(Strand {
                    from_leg,
                    to_leg,
                    edges: path,
                });
            }
        }
        let leftover = used.iter().any(|u| !u);
        (strands, leftover)
    }

    /// Leg-to-leg strands, ordered by entry leg.
    pub fn strands(&self) -> Result<Vec<Strand>, DiagramError> {
        let (s, leftover) = self.trace_strands();
        if leftover {
            return Err(DiagramError::Invalid(vec![Violation::ClosedComponent]));
        }
        Ok(s)
    }

    /// Pairs `(in-leg, out-leg)` sorted by in-leg.
    pub fn strand_pairing(&self) -> Vec<(u32, u32)> {
        self.trace_strands()
            .0
            .iter()
            .map(|s| (s.from_leg, s.to_leg))
            .collect()
    }

    /// Over/under exchanged at every crossing. Slots are rotated so the old
    /// over-strand enters slot 0, which keeps the rotation system intact.
    pub fn mirror(&self) -> TangleDiagram {
        let shift: HashMap<u32, u8> = self
            .crossings
            .iter()
            .map(|&c| {
                let s = match self.sign_unchecked(c) {
                    CrossingSign::Positive => 1,
                    CrossingSign::Negative => 3,
                };
                (c, s)
            })
            .collect();
        let map = |p: Port| match p {
            Port::Slot(c, s) => Port::Slot(c, (s + shift[&c]) % 4),
            leg => leg,
        };
        TangleDiagram::from_parts(
            self.legs.clone(),
            self.crossings.iter().copied(),
            self.edges.iter().map(|e| Edge::new(map(e.from), map(e.to))),
        )
    }

    /// Relabels leg `i` as leg `i + k` (cyclically).
    pub fn rotate_boundary(&self, k: i64) -> TangleDiagram {
        let n = self.legs.len() as i64;
        if n == 0 {
            return self.clone();
        }
        let relabel = |i: u32| ((i as i64 - 1 + k).rem_euclid(n) + 1) as u32;
        let mut legs = vec![LegFlag::In; self.legs.len()];
        for (i, f) in self.legs.iter().enumerate() {
            legs[relabel(i as u32 + 1) as usize - 1] = *f;
        }
        let map = |p: Port| match p {
            Port::Leg(i) => Port::Leg(relabel(i)),
            s => s,
        };
        TangleDiagram::from_parts(
            legs,
            self.crossings.iter().copied(),
            self.edges.iter().map(|e| Edge::new(map(e.from), map(e.to))),
        )
    }

    /// Relabels crossings `1..=k` in breadth-first order from leg 1, visiting
    /// ports in slot order. Legs keep their numbers.
    pub fn canonical_form(&self) -> TangleDiagram {
        let at = self.incidence();
        let mut label: HashMap<u32, u32> = HashMap::with_capacity(self.crossings.len());
        let mut queue = VecDeque::new();
        let visit = |p: Port, label: &mut HashMap<u32, u32>, queue: &mut VecDeque<u32>| {
            let Some(idx) = self.port_index(p) else { return };
            let ei = at[idx];
            if ei == usize::MAX {
                return;
            }
            let e = &self.edges[ei];
            let other = if e.from == p { e.to } else { e.from };
            if let Port::Slot(c, _) = other {
                if !label.contains_key(&c) {
                    let next = label.len() as u32 + 1;
                    label.insert(c, next);
                    queue.push_back(c);
                }
            }
        };
        for i in 1..=self.legs.len() as u32 {
            visit(Port::Leg(i), &mut label, &mut queue);
            while let Some(c) = queue.pop_front() {
                for s in 0..4 {
                    visit(Port::Slot(c, s), &mut label, &mut queue);
                }
            }
        }
        // Unreachable crossings only occur in invalid diagrams; keep them
        // after the reachable ones in id order.
        for &c in &self.crossings {
            if !label.contains_key(&c) {
                let next = label.len() as u32 + 1;
                label.insert(c, next);
            }
        }
        let map = |p: Port| match p {
            Port::Slot(c, s) => Port::Slot(*label.get(&c).unwrap_or(&c), s),
            leg => leg,
        };
        TangleDiagram::from_parts(
            self.legs.clone(),
            self.crossings.iter().map(|c| label[c]),
            self.edges.iter().map(|e| Edge::new(map(e.from), map(e.to))),
        )
    }

    /// Deterministic code; equal iff the diagrams are isomorphic as
    /// leg-labeled maps with the same crossing data.
    pub fn canonical_code(&self) -> Result<String, DiagramError> {
        let v = self.validate();
        if !v.is_empty() {
            return Err(DiagramError::Invalid(v));
        }
        Ok(self.canonical_code_unchecked())
    }

    pub(crate) fn canonical_code_unchecked(&self) -> String {
        self.canonical_form().compact_code()
    }

    /// Compact byte form of the canonical code, used as a hash key by the
    /// search. Equal keys mean equal canonical codes.
    pub(crate) fn canonical_key(&self) -> Box<[u8]> {
        let c = self.canonical_form();
        if c.port_count() > usize::from(u8::MAX) {
            return c.compact_code().into_bytes().into_boxed_slice();
        }
        let mut key = Vec::with_capacity(1 + c.legs.len() + 2 * c.edges.len());
        key.push(c.crossings.len() as u8);
        key.extend(c.legs.iter().map(|f| u8::from(*f == LegFlag::In)));
        for e in &c.edges {
            key.push(c.port_index(e.from).unwrap_or(usize::from(u8::MAX)) as u8);
            key.push(c.port_index(e.to).unwrap_or(usize::from(u8::MAX)) as u8);
        }
        key.into_boxed_slice()
    }

    /// Single-line rendering of the stored labels (no relabeling).
    pub(crate) fn compact_code(&self) -> String {
        let mut s = String::with_capacity(8 + 10 * self.edges.len());
        for f in &self.legs {
            s.push(if *f == LegFlag::In { 'i' } else { 'o' });
        }
        s.push('|');
        s.push_str(&self.crossings.len().to_string());
        for e in &self.edges {
            s.push('|');
            s.push_str(&e.from.to_string());
            s.push('>');
            s.push_str(&e.to.to_string());
        }
        s
    }

    /// Legs flags as a string like `ioioio`.
    pub fn leg_signature(&self) -> String {
        self.legs
            .iter()
            .map(|f| if *f == LegFlag::In { 'i' } else { 'o' })
            .collect()
    }
}
