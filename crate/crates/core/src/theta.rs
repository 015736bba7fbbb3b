//! Θ-configurations: a consistent digon crossed by a consistent strand.
//!
//! The digon is drawn vertical, with crossings at its top and bottom and
//! arcs on the left and right, and the transversal strand runs horizontally
//! from east to west across both arcs. Legs are numbered counterclockwise
//! from the east end of the transversal:
//!
//! | leg | position                          |
//! |-----|-----------------------------------|
//! | 1   | east end of the transversal       |
//! | 2   | upper end of the left-arc strand  |
//! | 3   | upper end of the right-arc strand |
//! | 4   | west end of the transversal       |
//! | 5   | lower end of the right-arc strand |
//! | 6   | lower end of the left-arc strand  |
//!
//! The left-arc strand leaves the digon towards the east above and below
//! it (its ends sit at legs 2 and 6), and the right-arc strand towards the
//! west.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::diagram::{CrossingSign, Port, TangleDiagram};
use crate::geometry::tangle_with_crossing_points;
use crate::moves::{
    build_triangle, locate_triangle, r3_flip, raw_applications, sole_triangle, triangles,
    Flag, Letter, MoveName, MoveSet, R2Direction, R3Direction, TriangleCode, TriangleSite,
};
use crate::search::{Certificate, Step};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArcSide {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransversalLevel {
    OverBoth,
    UnderBoth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArcDirection {
    Up,
    Down,
}

/// One point of the 2 × 2 × 4 parameter grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThetaParams {
    pub over_arc: ArcSide,
    pub transversal: TransversalLevel,
    pub left: ArcDirection,
    pub right: ArcDirection,
}

impl ThetaParams {
    /// The grid in sort order.
    pub fn grid() -> Vec<ThetaParams> {
        let mut out = Vec::with_capacity(16);
        for over_arc in [ArcSide::Left, ArcSide::Right] {
            for transversal in [TransversalLevel::OverBoth, TransversalLevel::UnderBoth] {
                for left in [ArcDirection::Up, ArcDirection::Down] {
                    for right in [ArcDirection::Up, ArcDirection::Down] {
                        out.push(ThetaParams {
                            over_arc,
                            transversal,
                            left,
                            right,
                        });
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for ThetaParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s| match s {
            ArcSide::Left => "left",
            ArcSide::Right => "right",
        };
        let dir = |d| match d {
            ArcDirection::Up => "up",
            ArcDirection::Down => "down",
        };
        let level = match self.transversal {
            TransversalLevel::OverBoth => "over",
            TransversalLevel::UnderBoth => "under",
        };
        write!(
            f,
            "over-arc={} transversal={} left={} right={}",
            side(self.over_arc),
            level,
            dir(self.left),
            dir(self.right)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaConfig {
    pub params: ThetaParams,
    pub tangle: TangleDiagram,
    /// Digon crossings (top, bottom).
    pub digon: [u32; 2],
    /// Transversal crossings (with the left arc, with the right arc).
    pub transversal: [u32; 2],
    /// Triangle above the transversal.
    pub upper: TriangleSite,
    /// Triangle below the transversal.
    pub lower: TriangleSite,
}

impl ThetaConfig {
    pub fn upper_code(&self) -> TriangleCode {
        self.upper.code
    }

    pub fn lower_code(&self) -> TriangleCode {
        self.lower.code
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ThetaError {
    #[error("{params}: digon crossings have equal signs")]
    InconsistentDigon { params: ThetaParams },
    #[error("{params}: transversal is not over or under both arcs")]
    InconsistentStrand { params: ThetaParams },
    #[error("{params}: triangular region missing or incoherent")]
    MissingTriangle { params: ThetaParams },
    #[error("expected 16 distinct configurations, found {0}")]
    Count(usize),
    #[error("factoring {x}: construction failed at step {step}")]
    Construction { x: Letter, step: usize },
}

/// Draws the Θ-configuration for `params`.
pub fn build_theta(params: ThetaParams) -> Result<ThetaConfig, ThetaError> {
    let mut left = vec![(2.0, -4.0), (-1.0, -1.0), (-1.0, 1.0), (2.0, 4.0)];
    let mut right = vec![(-2.0, -4.0), (1.0, -1.0), (1.0, 1.0), (-2.0, 4.0)];
    if params.left == ArcDirection::Down {
        left.reverse();
    }
    if params.right == ArcDirection::Down {
        right.reverse();
    }
    let transversal = vec![(4.0, 0.0), (-4.0, 0.0)];
    // Heights: larger passes over.
    let arc_heights = match params.over_arc {
        ArcSide::Left => [1, 0],
        ArcSide::Right => [0, 1],
    };
    let t_height = match params.transversal {
        TransversalLevel::OverBoth => 2,
        TransversalLevel::UnderBoth => -1,
    };
    let heights = [arc_heights[0], arc_heights[1], t_height];
    let (tangle, points) =
        tangle_with_crossing_points(&[left, right, transversal], |i, j| heights[i] > heights[j], 0.0);

    let id_near = |x: f64, y: f64| {
        points
            .iter()
            .position(|p| (p.0 - x).abs() < 1e-6 && (p.1 - y).abs() < 1e-6)
            .map(|k| k as u32 + 1)
            .expect("crossing drawn")
    };
    let digon = [id_near(0.0, 2.0), id_near(0.0, -2.0)];
    let trans = [id_near(-1.0, 0.0), id_near(1.0, 0.0)];

    if tangle.sign_unchecked(digon[0]) == tangle.sign_unchecked(digon[1]) {
        return Err(ThetaError::InconsistentDigon { params });
    }
    let t_over = |c: u32| {
        // The transversal enters through slot 0 when it is the under-strand.
        tangle
            .edges()
            .iter()
            .find(|e| matches!(e.to, Port::Slot(x, _) if x == c) && is_transversal_edge(&tangle, e.to))
            .map(|e| matches!(e.to, Port::Slot(_, s) if s % 2 == 1))
    };
    let levels = [t_over(trans[0]), t_over(trans[1])];
    if levels[0].is_none() || levels[0] != levels[1] {
        return Err(ThetaError::InconsistentStrand { params });
    }

    let faces = tangle.faces_unchecked();
    let site_with = |corner: u32| {
        faces.iter().enumerate().find_map(|(i, f)| {
            locate_triangle(&tangle, i, f)
                .ok()
                .filter(|t| t.corners.contains(&corner))
        })
    };
    let upper = site_with(digon[0]).ok_or(ThetaError::MissingTriangle { params })?;
    let lower = site_with(digon[1]).ok_or(ThetaError::MissingTriangle { params })?;
    Ok(ThetaConfig {
        params,
        tangle,
        digon,
        transversal: trans,
        upper,
        lower,
    })
}

/// True when the in-port `p` lies on the strand entering at leg 1.
fn is_transversal_edge(d: &TangleDiagram, p: Port) -> bool {
    let strands = d.strands().expect("valid diagram");
    let t = strands.iter().find(|s| s.from_leg == 1).expect("transversal enters at leg 1");
    t.edges.iter().any(|&e| d.edges()[e].to == p)
}

/// All 16 Θ-configurations in parameter order.
pub fn enumerate_theta_configs() -> Result<Vec<ThetaConfig>, ThetaError> {
    let configs = ThetaParams::grid()
        .into_iter()
        .map(build_theta)
        .collect::<Result<Vec<_>, _>>()?;
    let codes: BTreeSet<String> = configs
        .iter()
        .map(|c| c.tangle.canonical_code_unchecked())
        .collect();
    if codes.len() != 16 {
        return Err(ThetaError::Count(codes.len()));
    }
    Ok(configs)
}

pub fn digon_signs(c: &ThetaConfig) -> [CrossingSign; 2] {
    c.digon.map(|x| c.tangle.sign_unchecked(x))
}

/// Ordered letter pairs `(x, y)` such that the configuration has a
/// triangle coded `x↑` and its other triangle has letter `y`. These are the
/// pairs for which the configuration factors the move `x↑ → x↓` through a
/// move of letter `y`.
pub fn related_pairs(c: &ThetaConfig) -> Vec<(Letter, Letter)> {
    let (u, l) = (c.upper_code(), c.lower_code());
    let mut out = Vec::new();
    if u.flag == Flag::Up {
        out.push((u.letter, l.letter));
    }
    if l.flag == Flag::Up {
        out.push((l.letter, u.letter));
    }
    out
}

/// The Θ-relation read off all 16 configurations.
pub type ThetaRelation = BTreeSet<(Letter, Letter)>;

pub fn theta_relation(configs: &[ThetaConfig]) -> ThetaRelation {
    configs.iter().flat_map(related_pairs).collect()
}

/// Pairs whose reverse is missing; empty when the relation is symmetric.
pub fn asymmetric_pairs(r: &ThetaRelation) -> Vec<(Letter, Letter)> {
    r.iter().filter(|(x, y)| !r.contains(&(*y, *x))).copied().collect()
}

/// One line per configuration in parameter order:
/// `<params> → <upper code> , <lower code>`.
pub fn thetas_text(configs: &[ThetaConfig]) -> String {
    configs
        .iter()
        .map(|c| format!("{} → {} , {}\n", c.params, c.upper_code(), c.lower_code()))
        .collect()
}

/// A configuration containing `x↑` together with a triangle of letter `y`.
pub fn config_for_pair(configs: &[ThetaConfig], x: Letter, y: Letter) -> Option<&ThetaConfig> {
    configs.iter().find(|c| related_pairs(c).contains(&(x, y)))
}

/// The local source and target of the move `x↑ → x↓`.
pub fn move_ends(x: Letter) -> (TangleDiagram, TangleDiagram) {
    let s = build_triangle(TriangleCode::up(x));
    let site = sole_triangle(&s).expect("one triangle");
    let t = r3_flip(&s, &site).canonical_form();
    (s, t)
}

/// Factors `x↑ → x↓` as in `t`: a type-2 expansion that completes the
/// Θ-configuration of `t` around the `x↑` triangle, the type-3 move at its
/// `y` triangle, and a type-2 reduction.
pub fn factor_via_theta(t: &ThetaConfig, x: Letter) -> Result<Certificate, ThetaError> {
    let pair = related_pairs(t)
        .into_iter()
        .find(|p| p.0 == x)
        .ok_or(ThetaError::Construction { x, step: 0 })?;
    let y = pair.1;
    let y_code = if t.upper_code() == TriangleCode::up(x) {
        t.lower_code()
    } else {
        t.upper_code()
    };
    let (source, target) = move_ends(x);
    let target_key = target.canonical_code_unchecked();
    let expand: MoveSet = MoveName::all_r2()
        .into_iter()
        .filter(|m| matches!(m, MoveName::R2(_, R2Direction::Expand)))
        .collect();
    let reduce: MoveSet = MoveName::all_r2()
        .into_iter()
        .filter(|m| matches!(m, MoveName::R2(_, R2Direction::Reduce)))
        .collect();
    let mut reached_theta = false;
    for (e_name, _, s1) in raw_applications(&source, &expand) {
        let tris = triangles(&s1);
        let Some(lower) = theta_partner(&s1, &tris, TriangleCode::up(x), y_code) else {
            continue;
        };
        reached_theta = true;
        let y_move = MoveName::R3(
            y,
            match y_code.flag {
                Flag::Up => R3Direction::Down,
                Flag::Down => R3Direction::Up,
            },
        );
        let s2 = r3_flip(&s1, lower);
        for (r_name, _, s3) in raw_applications(&s2, &reduce) {
            if s3.canonical_code_unchecked() == target_key {
                let mut basis = MoveName::all_r2().into_iter().collect::<MoveSet>();
                basis.extend(MoveName::r3_both(y));
                return Ok(Certificate {
                    basis,
                    start: source,
                    steps: vec![
                        Step { name: e_name, result: s1.canonical_form() },
                        Step { name: y_move, result: s2.canonical_form() },
                        Step { name: r_name, result: target },
                    ],
                });
            }
        }
    }
    Err(ThetaError::Construction {
        x,
        step: if reached_theta { 3 } else { 1 },
    })
}

/// The `y_code` triangle forming a Θ-configuration with an `x_code`
/// triangle. The two share a side lying on the transversal, and their
/// opposite corners are the crossings of the digon, so they carry opposite
/// signs. The transversal cuts the digon in two, so it is not a face.
fn theta_partner<'a>(
    d: &TangleDiagram,
    tris: &'a [TriangleSite],
    x_code: TriangleCode,
    y_code: TriangleCode,
) -> Option<&'a TriangleSite> {
    for u in tris.iter().filter(|t| t.code == x_code) {
        for v in tris.iter().filter(|t| t.code == y_code && t.face != u.face) {
            let shares_side = u
                .sides
                .iter()
                .any(|s| v.sides.iter().any(|t| t.edge == s.edge));
            let a = u.corners.iter().find(|c| !v.corners.contains(c));
            let b = v.corners.iter().find(|c| !u.corners.contains(c));
            let (Some(&a), Some(&b)) = (a, b) else { continue };
            if shares_side && d.sign_unchecked(a) != d.sign_unchecked(b) {
                return Some(v);
            }
        }
    }
    None
}
