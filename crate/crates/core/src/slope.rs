//! Slope assembly: the trivial lowest-weight term minus the Newton-polytope
//! face sum
//!
//!   mu = 2 mean(q) - (1/(3V)) sum_faces 16 d_c sum_selections D4 * I.
//!
//! Identical integrals are detected through their canonical form and
//! evaluated once; all orderings are fixed by content (face
//! normals, then sorted member exponents), so permuting the diagram's point
//! list reproduces mu bit for bit.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, Signed, ToPrimitive};

use crate::diagram::{central_weights, NewtonDiagram};
use crate::polytope::{lower_hull, Face};
use crate::quadrature::{convergence_check, face_integral, FaceIntegralSpec, QuadratureResult};
use crate::symbols::{enumerate_selections, ExponentPair, IndexSelection};
use crate::{Error, Rat, Result};

/// One evaluated selection on a face.
#[derive(Clone, Debug)]
pub struct SelectionTerm {
    /// The selection, with indices into the diagram's point list (sorted).
    pub diagram_indices: [usize; 4],
    pub selection: IndexSelection,
    pub integral: f64,
    pub integral_error: f64,
    /// D4 * I.
    pub weighted: f64,
}

/// Contribution 16 d_c sum(D4 * I) of one face.
#[derive(Clone, Debug)]
pub struct FaceContribution {
    pub face: Face,
    pub selection_terms: Vec<SelectionTerm>,
    pub subtotal: f64,
    pub abs_error: f64,
}

/// Normalization shifts, dropped zero-offset planes, and accumulated
/// quadrature error bounds.
#[derive(Clone, Debug, Default)]
pub struct Diagnostics {
    pub normalization_shift: Option<Rat>,
    pub zero_offset_faces: usize,
    pub quadrature_error_bound: f64,
    pub cached_integrals: usize,
    pub evaluated_integrals: usize,
}

/// The assembled slope and everything that went into it.
#[derive(Clone, Debug)]
pub struct SlopeReport {
    /// -2 a_N = 2 mean(q), exact.
    pub trivial_term: Rat,
    /// (1/(3V)) sum of face subtotals.
    pub nontrivial_total: f64,
    /// trivial - nontrivial.
    pub mu: f64,
    pub per_face: Vec<FaceContribution>,
    pub diagnostics: Diagnostics,
}

type IntegralCache = BTreeMap<(i64, i64, Vec<ExponentPair>), QuadratureResult>;

fn cached_integral(
    spec: &FaceIntegralSpec,
    rel_tol: f64,
    cache: &mut IntegralCache,
    fresh: &mut usize,
) -> Result<QuadratureResult> {
    let canon = spec.canonical();
    let key = (canon.sum_p, canon.sum_r, canon.denom_pairs.clone());
    if let Some(hit) = cache.get(&key) {
        return Ok(*hit);
    }
    let res = face_integral(&canon, rel_tol)?;
    *fresh += 1;
    cache.insert(key, res);
    Ok(res)
}

fn face_contribution_cached(
    face: &Face,
    diagram: &NewtonDiagram,
    rel_tol: f64,
    cache: &mut IntegralCache,
    fresh: &mut usize,
) -> Result<FaceContribution> {
    // order members by exponent content so the summation order does not
    // depend on how the diagram's points happen to be listed
    let mut members: Vec<usize> = face.member_indices.clone();
    members.sort_by_key(|&j| diagram.exponent_pair(j));
    let pairs: Vec<ExponentPair> = members.iter().map(|&j| diagram.exponent_pair(j)).collect();

    let mut terms = Vec::new();
    let mut weighted_sum = 0.0;
    let mut error_sum = 0.0;
    for sel in enumerate_selections(&pairs) {
        let spec = FaceIntegralSpec::new(sel.sum_p, sel.sum_r, pairs.clone());
        if !convergence_check(&spec) {
            return Err(Error::Consistency(format!(
                "selection {:?} on face ({}, {}) fails the convergence check",
                sel.indices, face.normal_a, face.normal_b
            )));
        }
        let res = cached_integral(&spec, rel_tol, cache, fresh)?;
        let d4 = sel.d4.to_f64().unwrap();
        let weighted = d4 * res.value;
        weighted_sum += weighted;
        error_sum += d4 * res.abs_error_estimate;
        let mut diagram_indices = sel.indices.map(|t| members[t]);
        diagram_indices.sort_unstable();
        terms.push(SelectionTerm {
            diagram_indices,
            selection: sel,
            integral: res.value,
            integral_error: res.abs_error_estimate,
            weighted,
        });
    }
    let d_c = face.offset.to_f64().unwrap();
    debug_assert!(d_c > 0.0 || terms.is_empty());
    Ok(FaceContribution {
        face: face.clone(),
        selection_terms: terms,
        subtotal: 16.0 * d_c * weighted_sum,
        abs_error: 16.0 * d_c * error_sum,
    })
}

/// Evaluate one face's contribution 16 d_c sum(D4 * I).
pub fn face_contribution(
    face: &Face,
    diagram: &NewtonDiagram,
    rel_tol: f64,
) -> Result<FaceContribution> {
    let mut cache = IntegralCache::new();
    let mut fresh = 0;
    face_contribution_cached(face, diagram, rel_tol, &mut cache, &mut fresh)
}

/// Assemble the asymptotic slope of the energy along the geodesic defined
/// by the diagram's weights.
pub fn compute_slope(diagram: &NewtonDiagram, rel_tol: f64) -> Result<SlopeReport> {
    let hull = lower_hull(diagram);
    let cw = central_weights(diagram);
    let min_a = cw.a.iter().min().cloned().unwrap();
    let trivial_term: Rat = -BigRational::from_integer(BigInt::from(2)) * min_a;
    debug_assert!(!trivial_term.is_negative());

    let mut cache = IntegralCache::new();
    let mut fresh = 0;
    let mut per_face = Vec::new();
    let mut subtotal_sum = 0.0;
    let mut error_sum = 0.0;
    for face in hull.faces() {
        let contrib = face_contribution_cached(face, diagram, rel_tol, &mut cache, &mut fresh)?;
        subtotal_sum += contrib.subtotal;
        error_sum += contrib.abs_error;
        per_face.push(contrib);
    }
    let volume = diagram.volume().to_f64().unwrap();
    let nontrivial_total = subtotal_sum / (3.0 * volume);
    let mu = trivial_term.to_f64().unwrap() - nontrivial_total;

    let total_integrals: usize = per_face.iter().map(|c| c.selection_terms.len()).sum();
    Ok(SlopeReport {
        trivial_term,
        nontrivial_total,
        mu,
        per_face,
        diagnostics: Diagnostics {
            normalization_shift: if diagram.normalization_shift().is_negative()
                || diagram.normalization_shift().is_positive()
            {
                Some(diagram.normalization_shift().clone())
            } else {
                None
            },
            zero_offset_faces: hull.zero_offset_faces().len(),
            quadrature_error_bound: error_sum / (3.0 * volume),
            cached_integrals: total_integrals - fresh,
            evaluated_integrals: fresh,
        },
    })
}
