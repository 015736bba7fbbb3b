//! The 3-arrow encoding of triangular regions and the oriented type-3 move.
//!
//! A coherent triangle has a top side (over at both its corners), a middle
//! side (over once) and a bottom side (under at both). It is read after
//! rotating the top side horizontal with the triangle above it, so the top
//! arrow is `→` exactly when the triangle lies to the left of the top strand.
//!
//! # Canonical triangle tangle
//!
//! `build_triangle` draws the top strand as the horizontal base of a Δ and
//! the other two as its slanted sides, extended to the disk boundary. Legs
//! are numbered counterclockwise starting at the west end of the base:
//!
//! | leg | position                         |
//! |-----|----------------------------------|
//! | 1   | west end of the base             |
//! | 2   | lower end of the left side line  |
//! | 3   | lower end of the right side line |
//! | 4   | east end of the base             |
//! | 5   | upper end of the left side line  |
//! | 6   | upper end of the right side line |

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::diagram::{
    is_over_slot, straight_through, Edge, EdgeSide, Face, Port, TangleDiagram,
};
use crate::geometry::tangle_from_polylines;

#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    a,
    b,
    c,
    d,
    A,
    B,
    C,
    D,
}

impl Letter {
    pub const ALL: [Letter; 8] = [
        Letter::a,
        Letter::b,
        Letter::c,
        Letter::d,
        Letter::A,
        Letter::B,
        Letter::C,
        Letter::D,
    ];

    pub fn as_char(self) -> char {
        match self {
            Letter::a => 'a',
            Letter::b => 'b',
            Letter::c => 'c',
            Letter::d => 'd',
            Letter::A => 'A',
            Letter::B => 'B',
            Letter::C => 'C',
            Letter::D => 'D',
        }
    }

    pub fn from_char(ch: char) -> Option<Letter> {
        Letter::ALL.into_iter().find(|l| l.as_char() == ch)
    }

    pub fn is_lower(self) -> bool {
        self.as_char().is_ascii_lowercase()
    }

    pub fn swap_case(self) -> Letter {
        let ch = self.as_char();
        let swapped = if ch.is_ascii_lowercase() {
            ch.to_ascii_uppercase()
        } else {
            ch.to_ascii_lowercase()
        };
        Letter::from_char(swapped).unwrap()
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut buf = [0u8; 4];
        f.pad(self.as_char().encode_utf8(&mut buf))
    }
}

impl FromStr for Letter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next().and_then(Letter::from_char), chars.next()) {
            (Some(l), None) => Ok(l),
            _ => Err(format!("unknown letter {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flag {
    Up,
    Down,
}

impl Flag {
    pub fn flip(self) -> Flag {
        match self {
            Flag::Up => Flag::Down,
            Flag::Down => Flag::Up,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Flag::Up => '↑',
            Flag::Down => '↓',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arrow {
    E,
    W,
    NE,
    NW,
    SW,
    SE,
}

impl Arrow {
    pub fn reversed(self) -> Arrow {
        match self {
            Arrow::E => Arrow::W,
            Arrow::W => Arrow::E,
            Arrow::NE => Arrow::SW,
            Arrow::SW => Arrow::NE,
            Arrow::NW => Arrow::SE,
            Arrow::SE => Arrow::NW,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Arrow::E => '→',
            Arrow::W => '←',
            Arrow::NE => '↗',
            Arrow::NW => '↖',
            Arrow::SW => '↙',
            Arrow::SE => '↘',
        }
    }

    /// Left side of the Δ for `↗`/`↙`, right side for `↖`/`↘`.
    fn on_left_side(self) -> bool {
        matches!(self, Arrow::NE | Arrow::SW)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriangleCode {
    pub letter: Letter,
    pub flag: Flag,
}

use Arrow::*;

/// The `↑` rows of the encoding table: (top, middle, bottom).
const UP_ROWS: [(Letter, [Arrow; 3]); 8] = [
    (Letter::a, [E, NE, NW]),
    (Letter::b, [E, NW, NE]),
    (Letter::c, [E, SW, NW]),
    (Letter::d, [E, SE, NE]),
    (Letter::A, [E, SE, SW]),
    (Letter::B, [E, NE, SE]),
    (Letter::C, [E, NW, SW]),
    (Letter::D, [E, SW, SE]),
];

impl TriangleCode {
    pub fn new(letter: Letter, flag: Flag) -> Self {
        TriangleCode { letter, flag }
    }

    pub fn up(letter: Letter) -> Self {
        Self::new(letter, Flag::Up)
    }

    pub fn down(letter: Letter) -> Self {
        Self::new(letter, Flag::Down)
    }

    /// All 16 codes: `a↑ a↓ b↑ b↓ ...`.
    pub fn all() -> Vec<TriangleCode> {
        Letter::ALL
            .iter()
            .flat_map(|&l| [Self::up(l), Self::down(l)])
            .collect()
    }

    pub fn arrows(self) -> [Arrow; 3] {
        let row = UP_ROWS.iter().find(|(l, _)| *l == self.letter).unwrap().1;
        match self.flag {
            Flag::Up => row,
            Flag::Down => row.map(Arrow::reversed),
        }
    }

    pub fn from_arrows(arrows: [Arrow; 3]) -> Option<TriangleCode> {
        Self::all().into_iter().find(|c| c.arrows() == arrows)
    }

    pub fn flipped(self) -> Self {
        Self::new(self.letter, self.flag.flip())
    }

    pub fn arrow_string(self) -> String {
        self.arrows().iter().map(|a| a.symbol()).collect()
    }
}

impl fmt::Display for TriangleCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.letter, self.flag.symbol())
    }
}

/// Parses `a↑` or `a↓`.
impl FromStr for TriangleCode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        let letter = chars.next().and_then(Letter::from_char);
        let flag = match chars.next() {
            Some('↑') => Some(Flag::Up),
            Some('↓') => Some(Flag::Down),
            _ => None,
        };
        match (letter, flag, chars.next()) {
            (Some(l), Some(f), None) => Ok(TriangleCode::new(l, f)),
            _ => Err(format!("not a triangle code: {s:?}")),
        }
    }
}

/// Over/under exchange: case swap, plus a flag swap on `{b, d, B, D}`.
pub fn mirror_code(code: TriangleCode) -> TriangleCode {
    let letter = code.letter.swap_case();
    let flag = match code.letter {
        Letter::a | Letter::c | Letter::A | Letter::C => code.flag,
        _ => code.flag.flip(),
    };
    TriangleCode::new(letter, flag)
}

/// The canonical 6-leg, 3-crossing tangle for `code`.
pub fn build_triangle(code: TriangleCode) -> TangleDiagram {
    let [top, middle, bottom] = code.arrows();
    let base = match top {
        E => vec![(-3.0, 0.0), (3.0, 0.0)],
        _ => vec![(3.0, 0.0), (-3.0, 0.0)],
    };
    // Left side through (-1, 0) and the apex (0, 1.7); right side mirrored.
    let side = |a: Arrow| match a {
        NE => vec![(-2.0, -1.7), (1.0, 3.4)],
        SW => vec![(1.0, 3.4), (-2.0, -1.7)],
        NW => vec![(2.0, -1.7), (-1.0, 3.4)],
        SE => vec![(-1.0, 3.4), (2.0, -1.7)],
        E | W => unreachable!("side arrows are diagonal"),
    };
    debug_assert_ne!(middle.on_left_side(), bottom.on_left_side());
    // Strand order doubles as height: top over middle over bottom.
    let strands = vec![base, side(middle), side(bottom)];
    tangle_from_polylines(&strands, |i, j| i < j, PI)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriangleError {
    #[error("face is not a triangle between three distinct crossings")]
    NotTriangular,
    #[error("incoherent triangle: over/under order is cyclic, no type-3 move applies")]
    Incoherent,
}

/// A coherent triangular face located in a diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleSite {
    pub face: usize,
    pub code: TriangleCode,
    /// Sides in counterclockwise order, starting with the top side.
    pub sides: [EdgeSide; 3],
    /// Corners in counterclockwise order; the top side runs from corner 0
    /// to corner 1.
    pub corners: [u32; 3],
}

fn crossing_of(p: Port) -> Option<u32> {
    match p {
        Port::Slot(c, _) => Some(c),
        Port::Leg(_) => None,
    }
}

fn slot_of(p: Port) -> u8 {
    match p {
        Port::Slot(_, s) => s,
        Port::Leg(_) => unreachable!(),
    }
}

/// Classifies the triangle bounded by `face` (a face of `d` with index
/// `face_index`).
pub fn locate_triangle(
    d: &TangleDiagram,
    face_index: usize,
    face: &Face,
) -> Result<TriangleSite, TriangleError> {
    if face.len() != 3 {
        return Err(TriangleError::NotTriangular);
    }
    let s: [EdgeSide; 3] = [face.sides[0], face.sides[1], face.sides[2]];
    let mut corners = [0u32; 3];
    for (k, side) in s.iter().enumerate() {
        corners[k] = crossing_of(d.side_start(*side)).ok_or(TriangleError::NotTriangular)?;
    }
    if corners[0] == corners[1] || corners[1] == corners[2] || corners[0] == corners[2] {
        return Err(TriangleError::NotTriangular);
    }
    if s[0].edge == s[1].edge || s[1].edge == s[2].edge || s[0].edge == s[2].edge {
        return Err(TriangleError::NotTriangular);
    }
    let overs = s.map(|side| {
        let e = &d.edges()[side.edge];
        usize::from(is_over_slot(slot_of(e.from))) + usize::from(is_over_slot(slot_of(e.to)))
    });
    let top = overs.iter().position(|&o| o == 2).ok_or(TriangleError::Incoherent)?;
    // The walk is clockwise: after the top comes the left side, then the right.
    let left = (top + 1) % 3;
    let right = (top + 2) % 3;
    let ccw = |k: usize| !s[k].forward;
    let top_arrow = if ccw(top) { E } else { W };
    let right_arrow = if ccw(right) { NW } else { SE };
    let left_arrow = if ccw(left) { SW } else { NE };
    let (middle_arrow, bottom_arrow) = if overs[left] == 1 {
        (left_arrow, right_arrow)
    } else {
        (right_arrow, left_arrow)
    };
    let code = TriangleCode::from_arrows([top_arrow, middle_arrow, bottom_arrow])
        .expect("every coherent reading appears in the table");
    // Counterclockwise: top, right, left. Corner 0 is where the top side
    // starts in counterclockwise direction (the end of its clockwise side).
    let sides = [s[top], s[right], s[left]];
    let corners = [
        crossing_of(d.side_end(s[top])).unwrap(),
        crossing_of(d.side_start(s[top])).unwrap(),
        crossing_of(d.side_start(s[right])).unwrap(),
    ];
    Ok(TriangleSite {
        face: face_index,
        code,
        sides,
        corners,
    })
}

/// Classifies the triangle bounded by face `face_index` of `d`.
pub fn classify_triangle(d: &TangleDiagram, face_index: usize) -> Result<TriangleCode, TriangleError> {
    let faces = d.faces_unchecked();
    let face = faces.get(face_index).ok_or(TriangleError::NotTriangular)?;
    locate_triangle(d, face_index, face).map(|t| t.code)
}

/// Every coherent triangle of `d`, by face index.
pub fn triangles(d: &TangleDiagram) -> Vec<TriangleSite> {
    d.faces_unchecked()
        .iter()
        .enumerate()
        .filter_map(|(i, f)| locate_triangle(d, i, f).ok())
        .collect()
}

/// Flips the triangle at `site`: along every side strand the order of its
/// two triangle crossings is reversed. Each crossing keeps its over-strand
/// and sign, hence its slot usage.
pub fn r3_flip(d: &TangleDiagram, site: &TriangleSite) -> TangleDiagram {
    let mut edges: Vec<Edge> = d.edges().to_vec();
    for side in site.sides {
        let mid = d.edges()[side.edge];
        let out_a = mid.from;
        let in_b = mid.to;
        let in_a = match out_a {
            Port::Slot(c, s) => Port::Slot(c, straight_through(s)),
            leg => leg,
        };
        let out_b = match in_b {
            Port::Slot(c, s) => Port::Slot(c, straight_through(s)),
            leg => leg,
        };
        let e_in = d.edge_into(in_a).expect("valid diagram");
        let e_out = d.edge_out_of(out_b).expect("valid diagram");
        edges[e_in].to = in_b;
        edges[e_out].from = out_a;
        edges[side.edge] = Edge::new(out_b, in_a);
    }
    TangleDiagram::from_parts(d.legs().to_vec(), d.crossings().iter().copied(), edges)
}

/// The type-3 image of the triangle bounded by face `face_index`.
pub fn r3_image(d: &TangleDiagram, face_index: usize) -> Result<TangleDiagram, TriangleError> {
    let faces = d.faces_unchecked();
    let face = faces.get(face_index).ok_or(TriangleError::NotTriangular)?;
    let site = locate_triangle(d, face_index, face)?;
    Ok(r3_flip(d, &site))
}

/// The single coherent triangle of a 3-crossing tangle such as
/// `build_triangle` output.
pub fn sole_triangle(d: &TangleDiagram) -> Option<TriangleSite> {
    let mut t = triangles(d);
    (t.len() == 1).then(|| t.remove(0))
}
