//! Small exact-arithmetic 2D hull helpers shared by the diagram and
//! quadrature layers.

use crate::symbols::ExponentPair;

/// Monotone-chain convex hull of integer points, counterclockwise, without
/// collinear points on the boundary. Returns fewer than 3 points when the
/// input is degenerate (empty, a point, or a segment).
pub(crate) fn convex_hull(points: &[ExponentPair]) -> Vec<ExponentPair> {
    let mut pts: Vec<ExponentPair> = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: ExponentPair, a: ExponentPair, b: ExponentPair| -> i64 {
        (a.p - o.p) * (b.r - o.r) - (a.r - o.r) * (b.p - o.p)
    };
    let mut lower: Vec<ExponentPair> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<ExponentPair> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        // all input points collinear
        let mut seg = vec![*pts.first().unwrap(), *pts.last().unwrap()];
        seg.dedup();
        return seg;
    }
    lower
}

/// Twice the Euclidean area of the convex hull (shoelace; 0 when degenerate).
pub(crate) fn doubled_hull_area(points: &[ExponentPair]) -> i64 {
    let hull = convex_hull(points);
    if hull.len() < 3 {
        return 0;
    }
    let mut s = 0i64;
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        s += a.p * b.r - b.p * a.r;
    }
    s
}

/// Exact test that the rational point (num_p/4, num_r/4) lies strictly
/// inside the convex hull of `points`. False whenever the hull is not
/// two-dimensional.
pub(crate) fn quarter_point_strictly_inside(
    points: &[ExponentPair],
    num_p: i64,
    num_r: i64,
) -> bool {
    let hull = convex_hull(points);
    if hull.len() < 3 {
        return false;
    }
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        // CCW edge a->b: interior satisfies cross(b-a, x-a) > 0; scale x by 4.
        let c = (b.p - a.p) * (num_r - 4 * a.r) - (b.r - a.r) * (num_p - 4 * a.p);
        if c <= 0 {
            return false;
        }
    }
    true
}

/// Smallest strict-interiority margin of (num_p/4, num_r/4) over the hull's
/// edge directions, i.e. the exponential decay rate of the transformed face
/// integrand. Positive exactly when the point is strictly inside.
pub(crate) fn interiority_margin(points: &[ExponentPair], num_p: i64, num_r: i64) -> f64 {
    let hull = convex_hull(points);
    if hull.len() < 3 {
        return 0.0;
    }
    let mut margin = f64::INFINITY;
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        // outward normal of CCW edge a->b
        let n = (b.r - a.r, -(b.p - a.p));
        let support = hull
            .iter()
            .map(|v| n.0 * v.p + n.1 * v.r)
            .max()
            .unwrap_or(0);
        let gap = (4 * support - (n.0 * num_p + n.1 * num_r)) as f64;
        let len = ((n.0 * n.0 + n.1 * n.1) as f64).sqrt();
        margin = margin.min(gap / len);
    }
    margin
}
