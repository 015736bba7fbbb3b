//! Builds tangle diagrams from straight-segment drawings in the plane.
//!
//! Each strand is a polyline directed from its first point to its last; its
//! endpoints lie on the disk boundary. Crossing slots are assigned from the
//! actual segment directions, so the resulting rotation system is the one
//! the drawing has.

use std::f64::consts::TAU;

use crate::diagram::{Edge, LegFlag, Port, TangleDiagram};

pub type Point = (f64, f64);

fn cross(a: Point, b: Point) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

fn sub(a: Point, b: Point) -> Point {
    (a.0 - b.0, a.1 - b.1)
}

/// Proper intersection of segments `p0p1` and `q0q1`, as parameters along
/// each segment.
fn segment_hit(p0: Point, p1: Point, q0: Point, q1: Point) -> Option<(f64, f64)> {
    let r = sub(p1, p0);
    let s = sub(q1, q0);
    let denom = cross(r, s);
    if denom.abs() < 1e-12 {
        return None;
    }
    let qp = sub(q0, p0);
    let t = cross(qp, s) / denom;
    let u = cross(qp, r) / denom;
    const EPS: f64 = 1e-9;
    (t > EPS && t < 1.0 - EPS && u > EPS && u < 1.0 - EPS).then_some((t, u))
}

struct Hit {
    at: Point,
    strands: [usize; 2],
    params: [f64; 2],
    dirs: [Point; 2],
}

/// Builds the tangle drawn by `strands`. `over(i, j)` says whether strand
/// `i` passes over strand `j` where they cross. Legs are numbered
/// counterclockwise starting at the endpoint whose polar angle is closest
/// at or after `first_leg_angle`.
pub fn tangle_from_polylines(
    strands: &[Vec<Point>],
    over: impl Fn(usize, usize) -> bool,
    first_leg_angle: f64,
) -> TangleDiagram {
    tangle_with_crossing_points(strands, over, first_leg_angle).0
}

/// As [`tangle_from_polylines`], also returning the position of crossing
/// `k + 1` at index `k`.
pub fn tangle_with_crossing_points(
    strands: &[Vec<Point>],
    over: impl Fn(usize, usize) -> bool,
    first_leg_angle: f64,
) -> (TangleDiagram, Vec<Point>) {
    let mut hits: Vec<Hit> = Vec::new();
    for i in 0..strands.len() {
        for j in i + 1..strands.len() {
            for (si, w) in strands[i].windows(2).enumerate() {
                for (sj, v) in strands[j].windows(2).enumerate() {
                    if let Some((t, u)) = segment_hit(w[0], w[1], v[0], v[1]) {
                        hits.push(Hit {
                            at: (w[0].0 + t * (w[1].0 - w[0].0), w[0].1 + t * (w[1].1 - w[0].1)),
                            strands: [i, j],
                            params: [si as f64 + t, sj as f64 + u],
                            dirs: [sub(w[1], w[0]), sub(v[1], v[0])],
                        });
                    }
                }
            }
        }
    }
    hits.sort_by(|a, b| {
        (a.strands[0], a.params[0])
            .partial_cmp(&(b.strands[0], b.params[0]))
            .unwrap()
    });

    // (in port, out port) per hit per side.
    let mut ports: Vec<[(Port, Port); 2]> = Vec::with_capacity(hits.len());
    for (k, h) in hits.iter().enumerate() {
        let id = k as u32 + 1;
        let (under, over_side) = if over(h.strands[0], h.strands[1]) {
            (1, 0)
        } else {
            (0, 1)
        };
        let positive = cross(h.dirs[under], h.dirs[over_side]) < 0.0;
        let (oi, oo) = if positive { (3, 1) } else { (1, 3) };
        let mut pair = [(Port::Leg(0), Port::Leg(0)); 2];
        pair[under] = (Port::Slot(id, 0), Port::Slot(id, 2));
        pair[over_side] = (Port::Slot(id, oi), Port::Slot(id, oo));
        ports.push(pair);
    }

    // Legs by angle.
    let mut ends: Vec<(f64, usize, LegFlag)> = Vec::new();
    for (i, s) in strands.iter().enumerate() {
        for (p, flag) in [(s[0], LegFlag::In), (*s.last().unwrap(), LegFlag::Out)] {
            let a = (p.1.atan2(p.0) - first_leg_angle).rem_euclid(TAU);
            let a = if a > TAU - 1e-9 { 0.0 } else { a };
            ends.push((a, i, flag));
        }
    }
    ends.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut leg_of = vec![[0u32; 2]; strands.len()];
    let mut legs = Vec::with_capacity(ends.len());
    for (k, (_, i, flag)) in ends.iter().enumerate() {
        legs.push(*flag);
        leg_of[*i][usize::from(*flag == LegFlag::Out)] = k as u32 + 1;
    }

    let mut edges = Vec::new();
    for (i, legs) in leg_of.iter().enumerate().take(strands.len()) {
        let mut along: Vec<(f64, usize, usize)> = hits
            .iter()
            .enumerate()
            .filter_map(|(k, h)| {
                h.strands
                    .iter()
                    .position(|&s| s == i)
                    .map(|side| (h.params[side], k, side))
            })
            .collect();
        along.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut prev = Port::Leg(legs[0]);
        for (_, k, side) in along {
            let (pin, pout) = ports[k][side];
            edges.push(Edge::new(prev, pin));
            prev = pout;
        }
        edges.push(Edge::new(prev, Port::Leg(legs[1])));
    }

    let points = hits.iter().map(|h| h.at).collect();
    (
        TangleDiagram::from_parts(legs, 1..=hits.len() as u32, edges),
        points,
    )
}
