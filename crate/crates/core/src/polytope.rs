//! Newton polytope of the weighted exponent data: the unbounded convex hull
//! of the diagram points translated by the positive orthant. Its faces with
//! normals (a, b, 1), a, b >= 0, drive the slope formula; the dual picture
//! is the partition of the scaling quadrant into dominance regions.
//!
//! Everything is exact rational arithmetic. Diagram sizes are tiny, so the
//! algorithms favor robustness over asymptotics: candidate normals come
//! from point triples and axis-constrained pairs, and regions come from
//! brute-force half-plane intersection.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, Signed, Zero};

use crate::diagram::NewtonDiagram;
use crate::hull::doubled_hull_area;
use crate::symbols::ExponentPair;
use crate::Rat;

fn rq(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// One face {a p + b r + q = d} of the Newton polytope, with every diagram
/// point on the plane listed as a member (not only the vertices).
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub normal_a: Rat,
    pub normal_b: Rat,
    pub offset: Rat,
    pub member_indices: Vec<usize>,
}

impl Face {
    /// Height a p_j + b r_j + q_j of a diagram point over the face plane.
    pub fn height(&self, diagram: &NewtonDiagram, index: usize) -> Rat {
        let pt = &diagram.points()[index];
        &self.normal_a * rq(pt.p) + &self.normal_b * rq(pt.r) + pt.q.clone()
    }
}

/// The polytope: nontrivial faces (offset > 0), the flagged zero-offset
/// supporting planes (a degenerate boundary case that contributes nothing,
/// kept for diagnostics), and a vertex flag per diagram point.
#[derive(Clone, Debug)]
pub struct NewtonPolytope {
    diagram: NewtonDiagram,
    faces: Vec<Face>,
    zero_offset_faces: Vec<Face>,
    vertex_flags: Vec<bool>,
}

impl NewtonPolytope {
    pub fn diagram(&self) -> &NewtonDiagram {
        &self.diagram
    }

    /// Nontrivial faces, sorted by normal.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Supporting planes with offset 0; they contribute nothing to the
    /// slope and are reported in diagnostics.
    pub fn zero_offset_faces(&self) -> &[Face] {
        &self.zero_offset_faces
    }

    /// True exactly for diagram points whose dominance region has nonempty
    /// interior.
    pub fn vertex_flags(&self) -> &[bool] {
        &self.vertex_flags
    }
}

/// All indices on the face plane, by exact height test.
pub fn face_members(face: &Face, diagram: &NewtonDiagram) -> Vec<usize> {
    (0..diagram.len())
        .filter(|&j| face.height(diagram, j) == face.offset)
        .collect()
}

/// A face plane must be two-dimensional inside the polytope. For strictly
/// positive normals that means three non-collinear members; a vanishing
/// normal component adds a recession direction, so two members suffice if
/// they differ in the complementary exponent.
fn face_is_two_dimensional(a: &Rat, b: &Rat, members: &[usize], diagram: &NewtonDiagram) -> bool {
    let exps: Vec<ExponentPair> = members.iter().map(|&j| diagram.exponent_pair(j)).collect();
    match (a.is_positive(), b.is_positive()) {
        (true, true) => doubled_hull_area(&exps) > 0,
        (true, false) => {
            exps.len() >= 2 && exps.iter().any(|e| e.p != exps[0].p)
        }
        (false, true) => {
            exps.len() >= 2 && exps.iter().any(|e| e.r != exps[0].r)
        }
        (false, false) => !exps.is_empty(),
    }
}

/// Build the Newton polytope: enumerate candidate normals (a, b) >= 0 from
/// point triples, axis-constrained pairs and the origin, take the exact
/// argmin of a p + b r + q as the member set, and keep the candidates whose
/// face is genuinely two-dimensional.
pub fn lower_hull(diagram: &NewtonDiagram) -> NewtonPolytope {
    let n = diagram.len();
    let pts = diagram.points();
    let mut candidates: Vec<(Rat, Rat)> = vec![(rq(0), rq(0))];

    for i in 0..n {
        for j in i + 1..n {
            let dp = pts[i].p - pts[j].p;
            let dr = pts[i].r - pts[j].r;
            let dq = pts[j].q.clone() - &pts[i].q;
            // b = 0: a dp = dq
            if dp != 0 {
                candidates.push((dq.clone() / rq(dp), rq(0)));
            }
            // a = 0: b dr = dq
            if dr != 0 {
                candidates.push((rq(0), dq / rq(dr)));
            }
            for k in j + 1..n {
                let dp2 = pts[i].p - pts[k].p;
                let dr2 = pts[i].r - pts[k].r;
                let det = dp * dr2 - dp2 * dr;
                if det == 0 {
                    continue;
                }
                let dq1 = pts[j].q.clone() - &pts[i].q;
                let dq2 = pts[k].q.clone() - &pts[i].q;
                let a = (dq1.clone() * rq(dr2) - dq2.clone() * rq(dr)) / rq(det);
                let b = (dq2 * rq(dp) - dq1 * rq(dp2)) / rq(det);
                candidates.push((a, b));
            }
        }
    }

    let mut by_normal: BTreeMap<(Rat, Rat), Face> = BTreeMap::new();
    for (a, b) in candidates {
        if a.is_negative() || b.is_negative() {
            continue;
        }
        if by_normal.contains_key(&(a.clone(), b.clone())) {
            continue;
        }
        let heights: Vec<Rat> = (0..n)
            .map(|j| a.clone() * rq(pts[j].p) + b.clone() * rq(pts[j].r) + pts[j].q.clone())
            .collect();
        let d = heights.iter().min().unwrap().clone();
        let members: Vec<usize> = (0..n).filter(|&j| heights[j] == d).collect();
        if !face_is_two_dimensional(&a, &b, &members, diagram) {
            continue;
        }
        by_normal.insert(
            (a.clone(), b.clone()),
            Face {
                normal_a: a,
                normal_b: b,
                offset: d,
                member_indices: members,
            },
        );
    }

    let mut faces = Vec::new();
    let mut zero_offset_faces = Vec::new();
    for (_, face) in by_normal {
        if face.offset.is_positive() {
            faces.push(face);
        } else {
            zero_offset_faces.push(face);
        }
    }

    let vertex_flags = (0..n)
        .map(|i| region_geometry(diagram, i).is_two_dimensional())
        .collect();

    NewtonPolytope {
        diagram: diagram.clone(),
        faces,
        zero_offset_faces,
        vertex_flags,
    }
}

/// Dominance region of one diagram point: the set of scaling directions
/// (alpha, beta) in the closed quadrant where its term is smallest.
#[derive(Clone, Debug)]
pub struct DominanceRegion {
    pub vertex_index: usize,
    /// Polygon corners, counterclockwise.
    pub corners: Vec<[Rat; 2]>,
    /// Extreme recession directions (primitive integer vectors) for
    /// unbounded regions; empty when the region is bounded.
    pub rays: Vec<[i64; 2]>,
}

/// Regions of all vertex-flagged points. Their union tiles the quadrant and
/// their corners are the face normals incident to the vertex.
pub fn dominance_regions(polytope: &NewtonPolytope) -> Vec<DominanceRegion> {
    let diagram = polytope.diagram();
    (0..diagram.len())
        .filter_map(|i| {
            let geo = region_geometry(diagram, i);
            if geo.is_two_dimensional() {
                Some(DominanceRegion {
                    vertex_index: i,
                    corners: geo.corners,
                    rays: geo.rays,
                })
            } else {
                None
            }
        })
        .collect()
}

/// Constraint u alpha + v beta >= w.
struct Constraint {
    u: i64,
    v: i64,
    w: Rat,
}

pub(crate) struct RegionGeometry {
    pub corners: Vec<[Rat; 2]>,
    pub rays: Vec<[i64; 2]>,
}

impl RegionGeometry {
    /// The region is conv(corners) + cone(rays); it has nonempty interior
    /// exactly when that set contains three affinely independent points.
    pub fn is_two_dimensional(&self) -> bool {
        let mut pts: Vec<[Rat; 2]> = self.corners.clone();
        if let Some(c) = self.corners.first() {
            for ray in &self.rays {
                pts.push([c[0].clone() + rq(ray[0]), c[1].clone() + rq(ray[1])]);
            }
            if self.rays.len() == 2 {
                pts.push([
                    c[0].clone() + rq(self.rays[0][0]) + rq(self.rays[1][0]),
                    c[1].clone() + rq(self.rays[0][1]) + rq(self.rays[1][1]),
                ]);
            }
        }
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                for k in j + 1..pts.len() {
                    let ux = pts[j][0].clone() - &pts[i][0];
                    let uy = pts[j][1].clone() - &pts[i][1];
                    let vx = pts[k][0].clone() - &pts[i][0];
                    let vy = pts[k][1].clone() - &pts[i][1];
                    if !(ux * vy - uy * vx).is_zero() {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// Exact half-plane intersection for the region of point `i`.
pub(crate) fn region_geometry(diagram: &NewtonDiagram, i: usize) -> RegionGeometry {
    let pts = diagram.points();
    let mut cons: Vec<Constraint> = vec![
        Constraint { u: 1, v: 0, w: rq(0) },
        Constraint { u: 0, v: 1, w: rq(0) },
    ];
    for (j, pt) in pts.iter().enumerate() {
        if j == i {
            continue;
        }
        cons.push(Constraint {
            u: pt.p - pts[i].p,
            v: pt.r - pts[i].r,
            w: pts[i].q.clone() - &pt.q,
        });
    }

    // Corners: feasible intersections of constraint boundary pairs.
    let mut corners: Vec<[Rat; 2]> = Vec::new();
    for s in 0..cons.len() {
        for t in s + 1..cons.len() {
            let det = cons[s].u * cons[t].v - cons[t].u * cons[s].v;
            if det == 0 {
                continue;
            }
            let alpha = (cons[s].w.clone() * rq(cons[t].v) - cons[t].w.clone() * rq(cons[s].v))
                / rq(det);
            let beta = (cons[t].w.clone() * rq(cons[s].u) - cons[s].w.clone() * rq(cons[t].u))
                / rq(det);
            let feasible = cons
                .iter()
                .all(|c| rq(c.u) * &alpha + rq(c.v) * &beta >= c.w);
            if feasible && !corners.contains(&[alpha.clone(), beta.clone()]) {
                corners.push([alpha, beta]);
            }
        }
    }
    sort_ccw(&mut corners);

    // Extreme recession rays: tight directions of the cone u d >= 0.
    let mut dirs: Vec<[i64; 2]> = Vec::new();
    for c in &cons {
        for d in [[-c.v, c.u], [c.v, -c.u]] {
            if d == [0, 0] {
                continue;
            }
            let g = num::integer::gcd(d[0].abs(), d[1].abs());
            let d = [d[0] / g, d[1] / g];
            if d[0] < 0 || d[1] < 0 {
                continue;
            }
            if cons.iter().all(|c| c.u * d[0] + c.v * d[1] >= 0) && !dirs.contains(&d) {
                dirs.push(d);
            }
        }
    }
    // Directions live in the first quadrant: sort by angle and keep extremes.
    dirs.sort_by(|x, y| (y[0] * x[1]).cmp(&(x[0] * y[1])));
    let rays = match dirs.len() {
        0 | 1 => dirs,
        _ => vec![dirs[0], dirs[dirs.len() - 1]],
    };
    let rays = if corners.is_empty() { Vec::new() } else { rays };

    RegionGeometry { corners, rays }
}

/// Counterclockwise sort around the centroid, exact comparisons.
fn sort_ccw(points: &mut [[Rat; 2]]) {
    if points.len() < 3 {
        return;
    }
    let nf = rq(points.len() as i64);
    let cx: Rat = points.iter().map(|p| p[0].clone()).sum::<Rat>() / nf.clone();
    let cy: Rat = points.iter().map(|p| p[1].clone()).sum::<Rat>() / nf;
    let half = |dx: &Rat, dy: &Rat| -> u8 {
        if dy.is_positive() || (dy.is_zero() && dx.is_positive()) {
            0
        } else {
            1
        }
    };
    points.sort_by(|p, q| {
        let (px, py) = (p[0].clone() - &cx, p[1].clone() - &cy);
        let (qx, qy) = (q[0].clone() - &cx, q[1].clone() - &cy);
        let (hp, hq) = (half(&px, &py), half(&qx, &qy));
        if hp != hq {
            return hp.cmp(&hq);
        }
        let cross = px * &qy - py * &qx;
        if cross.is_positive() {
            std::cmp::Ordering::Less
        } else if cross.is_negative() {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
}
