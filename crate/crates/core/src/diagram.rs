//! The polarized toric surface and its weighted monomial data: lattice
//! polygon, section basis, nonnegative weights, centered weights.
//!
//! Everything here is exact rational arithmetic; no floating point enters
//! before the quadrature layer.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, FromPrimitive, Signed, Zero};

use crate::hull::doubled_hull_area;
use crate::symbols::ExponentPair;
use crate::{Error, Rat, Result};

/// Convex lattice polygon in the closed first quadrant, counterclockwise,
/// containing the origin. Its lattice points index the monomial sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolygon {
    vertices: Vec<[i64; 2]>,
}

impl LatticePolygon {
    pub fn new(vertices: Vec<[i64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon("polygon has no interior".into()));
        }
        let n = vertices.len();
        let mut doubled_area = 0i64;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            doubled_area += a[0] * b[1] - b[0] * a[1];
        }
        if doubled_area == 0 {
            return Err(Error::InvalidPolygon("polygon has no interior".into()));
        }
        if doubled_area < 0 {
            return Err(Error::InvalidPolygon(
                "vertices must be listed counterclockwise".into(),
            ));
        }
        for i in 0..n {
            let o = vertices[i];
            let a = vertices[(i + 1) % n];
            let b = vertices[(i + 2) % n];
            let cross = (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
            if cross <= 0 {
                return Err(Error::InvalidPolygon(format!(
                    "vertices {:?}, {:?}, {:?} are not strictly convex",
                    o, a, b
                )));
            }
        }
        if vertices.iter().any(|v| v[0] < 0 || v[1] < 0) {
            return Err(Error::InvalidPolygon(
                "vertices must lie in the closed first quadrant".into(),
            ));
        }
        // keeps lattice enumeration and all i64 cross products comfortable
        if vertices.iter().any(|v| v[0] > 2000 || v[1] > 2000) {
            return Err(Error::InvalidPolygon(
                "vertex coordinates must be at most 2000".into(),
            ));
        }
        let poly = Self { vertices };
        if !poly.contains(0, 0) {
            return Err(Error::InvalidPolygon(
                "polygon must contain the origin".into(),
            ));
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[[i64; 2]] {
        &self.vertices
    }

    /// Closed-polygon membership, exact.
    pub fn contains(&self, p: i64, r: i64) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let cross = (b[0] - a[0]) * (r - a[1]) - (b[1] - a[1]) * (p - a[0]);
            if cross < 0 {
                return false;
            }
        }
        true
    }
}

/// All lattice points of the closed polygon, scanline by row (sorted by r,
/// then p): the order in which the sections are indexed.
pub fn enumerate_lattice_points(polygon: &LatticePolygon) -> Vec<[i64; 2]> {
    let rmin = polygon.vertices().iter().map(|v| v[1]).min().unwrap();
    let rmax = polygon.vertices().iter().map(|v| v[1]).max().unwrap();
    let pmin = polygon.vertices().iter().map(|v| v[0]).min().unwrap();
    let pmax = polygon.vertices().iter().map(|v| v[0]).max().unwrap();
    let mut out = Vec::new();
    for r in rmin..=rmax {
        for p in pmin..=pmax {
            if polygon.contains(p, r) {
                out.push([p, r]);
            }
        }
    }
    out
}

/// Normalized volume V = 2 x Euclidean area (an integer for lattice
/// polygons), returned exactly.
pub fn polygon_volume(polygon: &LatticePolygon) -> Rat {
    let n = polygon.vertices().len();
    let mut doubled = 0i64;
    for i in 0..n {
        let a = polygon.vertices()[i];
        let b = polygon.vertices()[(i + 1) % n];
        doubled += a[0] * b[1] - b[0] * a[1];
    }
    BigRational::from_integer(BigInt::from(doubled))
}

/// One section: exponent pair plus its nonnegative weight.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPoint {
    pub p: i64,
    pub r: i64,
    pub q: Rat,
}

/// The weighted exponent data of a test configuration, normalized so the
/// smallest weight is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonDiagram {
    points: Vec<WeightedPoint>,
    volume: Rat,
    normalization_shift: Rat,
}

impl NewtonDiagram {
    /// Build directly from weighted points. Validates distinct nonnegative
    /// exponents, nonnegative weights and the minimum-zero normalization
    /// (weights with positive minimum are shifted down uniformly and the
    /// shift recorded). The volume is twice the hull area of the exponents.
    pub fn from_weighted_points(points: Vec<WeightedPoint>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidWeights(format!(
                "a diagram needs at least 3 points, got {}",
                points.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for pt in &points {
            if pt.p < 0 || pt.r < 0 {
                return Err(Error::InvalidWeights(format!(
                    "exponent ({}, {}) outside the first quadrant",
                    pt.p, pt.r
                )));
            }
            if !seen.insert((pt.p, pt.r)) {
                return Err(Error::InvalidWeights(format!(
                    "repeated exponent pair ({}, {})",
                    pt.p, pt.r
                )));
            }
            if pt.q.is_negative() {
                return Err(Error::InvalidWeights(format!(
                    "negative weight {} at ({}, {})",
                    pt.q, pt.p, pt.r
                )));
            }
        }
        let shift = points.iter().map(|pt| pt.q.clone()).min().unwrap();
        let mut points = points;
        if !shift.is_zero() {
            for pt in &mut points {
                pt.q -= &shift;
            }
        }
        let exps: Vec<ExponentPair> = points
            .iter()
            .map(|pt| ExponentPair::new(pt.p, pt.r))
            .collect();
        let doubled = doubled_hull_area(&exps);
        if doubled <= 0 {
            return Err(Error::InvalidWeights(
                "exponent pairs are collinear: the diagram spans no area".into(),
            ));
        }
        Ok(Self {
            points,
            volume: BigRational::from_integer(BigInt::from(doubled)),
            normalization_shift: shift,
        })
    }

    pub fn points(&self) -> &[WeightedPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Normalized volume V (twice the polygon area).
    pub fn volume(&self) -> &Rat {
        &self.volume
    }

    /// Uniform shift subtracted from the supplied weights, zero when the
    /// input was already normalized.
    pub fn normalization_shift(&self) -> &Rat {
        &self.normalization_shift
    }

    pub fn exponent_pair(&self, index: usize) -> ExponentPair {
        ExponentPair::new(self.points[index].p, self.points[index].r)
    }

    pub fn exponent_pairs(&self) -> Vec<ExponentPair> {
        (0..self.len()).map(|i| self.exponent_pair(i)).collect()
    }

    /// Exact mean of the normalized weights.
    pub fn mean_weight(&self) -> Rat {
        let sum: Rat = self.points.iter().map(|pt| pt.q.clone()).sum();
        sum / BigRational::from_integer(BigInt::from(self.points.len() as i64))
    }
}

/// Bind a weight map to a polygon's lattice points.
///
/// The map must assign exactly one nonnegative weight to every lattice point
/// of the closed polygon; missing or extra keys are reported by name.
pub fn build_diagram(
    polygon: &LatticePolygon,
    weights: &BTreeMap<(i64, i64), Rat>,
) -> Result<NewtonDiagram> {
    let lattice = enumerate_lattice_points(polygon);
    let mut missing = Vec::new();
    let mut points = Vec::with_capacity(lattice.len());
    for &[p, r] in &lattice {
        match weights.get(&(p, r)) {
            Some(q) => points.push(WeightedPoint {
                p,
                r,
                q: q.clone(),
            }),
            None => missing.push((p, r)),
        }
    }
    let extra: Vec<(i64, i64)> = weights
        .keys()
        .filter(|k| !lattice.contains(&[k.0, k.1]))
        .cloned()
        .collect();
    if !missing.is_empty() || !extra.is_empty() {
        let mut msg = String::new();
        if !missing.is_empty() {
            msg.push_str(&format!("missing weights for lattice points {missing:?}"));
        }
        if !extra.is_empty() {
            if !msg.is_empty() {
                msg.push_str("; ");
            }
            msg.push_str(&format!("weights for points outside the polygon {extra:?}"));
        }
        return Err(Error::InvalidWeights(msg));
    }
    let diagram = NewtonDiagram::from_weighted_points(points)?;
    debug_assert_eq!(diagram.volume(), &polygon_volume(polygon));
    Ok(diagram)
}

/// Centered weights a_j with sum zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralWeights {
    pub a: Vec<Rat>,
}

/// a_j = q_j - mean(q); then sum a_j = 0 and a_j - min_k a_k = q_j exactly.
pub fn central_weights(diagram: &NewtonDiagram) -> CentralWeights {
    let mean = diagram.mean_weight();
    CentralWeights {
        a: diagram
            .points()
            .iter()
            .map(|pt| pt.q.clone() - &mean)
            .collect(),
    }
}

/// Convenience for tests and the CLI: exact rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational from an f64 (every finite f64 is dyadic).
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    BigRational::from_f64(x)
}
