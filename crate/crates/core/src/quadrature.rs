//! Convergent singular face integrals
//!
//!   I = int_0^inf int_0^inf x^(2P-1) y^(2R-1) / (sum_a x^(2p_a) y^(2r_a))^4 dx dy
//!
//! evaluated through the exact change of variables u = x^2, v = y^2,
//! s = log u, w = log v, which turns the singular improper integral into
//!
//!   I = (1/4) int_{R^2} exp(P s + R w - 4 LSE(s, w)) ds dw,
//!
//! a smooth positive integrand decaying exponentially in every direction as
//! long as (P/4, R/4) lies strictly inside the Newton region of the
//! denominator. The decay rate is the exact interiority margin, which sizes
//! the truncation box; adaptive tensor-Gauss panels do the rest.

use crate::hull::{interiority_margin, quarter_point_strictly_inside};
use crate::symbols::ExponentPair;
use crate::{Error, Result};

/// Value, conservative error bound, and work counter of one integration.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: u64,
}

/// Numerator exponents and face-denominator data of one face integral.
/// The denominator power is fixed at 4 (two curvature factors in complex
/// dimension two).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceIntegralSpec {
    /// P = p_i + p_j + p_k + p_l of the selection.
    pub sum_p: i64,
    /// R = r_i + r_j + r_k + r_l of the selection.
    pub sum_r: i64,
    /// Exponent pairs of all face members, pairwise distinct.
    pub denom_pairs: Vec<ExponentPair>,
}

impl FaceIntegralSpec {
    pub fn new(sum_p: i64, sum_r: i64, denom_pairs: Vec<ExponentPair>) -> Self {
        Self { sum_p, sum_r, denom_pairs }
    }

    /// Strip the common monomial factor of the denominator (an exact
    /// substitution identity leaving the integral unchanged): shifts every
    /// pair so the componentwise minima are zero and adjusts (P, R) by four
    /// times the shift. Also sorts the pairs, giving a canonical cache key.
    pub fn canonical(&self) -> FaceIntegralSpec {
        let cp = self.denom_pairs.iter().map(|e| e.p).min().unwrap_or(0);
        let cr = self.denom_pairs.iter().map(|e| e.r).min().unwrap_or(0);
        let mut pairs: Vec<ExponentPair> = self
            .denom_pairs
            .iter()
            .map(|e| ExponentPair::new(e.p - cp, e.r - cr))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        FaceIntegralSpec {
            sum_p: self.sum_p - 4 * cp,
            sum_r: self.sum_r - 4 * cr,
            denom_pairs: pairs,
        }
    }
}

/// Exact convergence test: (P/4, R/4) strictly inside the convex hull of
/// the denominator exponents.
pub fn convergence_check(spec: &FaceIntegralSpec) -> bool {
    quarter_point_strictly_inside(&spec.denom_pairs, spec.sum_p, spec.sum_r)
}

/// Evaluate the face integral to the requested relative tolerance.
pub fn face_integral(spec: &FaceIntegralSpec, rel_tol: f64) -> Result<QuadratureResult> {
    assert!(rel_tol > 0.0 && rel_tol < 1.0, "rel_tol must be in (0, 1)");
    let spec = spec.canonical();
    if !convergence_check(&spec) {
        return Err(Error::DivergentIntegral);
    }
    let delta = interiority_margin(&spec.denom_pairs, spec.sum_p, spec.sum_r);
    debug_assert!(delta > 0.0);
    let half_width = ((1.0 / rel_tol).ln() + 40.0) / delta;

    let pf: Vec<(f64, f64)> = spec
        .denom_pairs
        .iter()
        .map(|e| (e.p as f64, e.r as f64))
        .collect();
    let (np, nr) = (spec.sum_p as f64, spec.sum_r as f64);
    let f = move |s: f64, w: f64| -> f64 {
        let mut m = f64::NEG_INFINITY;
        for &(p, r) in &pf {
            let t = p * s + r * w;
            if t > m {
                m = t;
            }
        }
        let mut z = 0.0;
        for &(p, r) in &pf {
            z += (p * s + r * w - m).exp();
        }
        (np * s + nr * w - 4.0 * (m + z.ln())).exp()
    };

    let integrator = BoxIntegrator::new(rel_tol);
    let raw = integrator.integrate(
        &f,
        Rect { x0: -half_width, x1: half_width, y0: -half_width, y1: half_width },
    )?;
    Ok(QuadratureResult {
        value: 0.25 * raw.value,
        abs_error_estimate: 0.25 * raw.abs_error_estimate,
        evaluations: raw.evaluations,
    })
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    fn quadrants(&self) -> [Rect; 4] {
        let xm = 0.5 * (self.x0 + self.x1);
        let ym = 0.5 * (self.y0 + self.y1);
        [
            Rect { x0: self.x0, x1: xm, y0: self.y0, y1: ym },
            Rect { x0: xm, x1: self.x1, y0: self.y0, y1: ym },
            Rect { x0: self.x0, x1: xm, y0: ym, y1: self.y1 },
            Rect { x0: xm, x1: self.x1, y0: ym, y1: self.y1 },
        ]
    }
}

/// Deterministic adaptive tensor-product Gauss-Legendre integrator over a
/// rectangle. Panels whose coarse/bisected estimates disagree beyond their
/// area-proportional share of the budget are split; summation order is the
/// fixed traversal order of the panel tree.
pub(crate) struct BoxIntegrator {
    rule: GaussRule,
    rel_tol: f64,
    max_evals: u64,
    initial_grid: usize,
}

impl BoxIntegrator {
    pub fn new(rel_tol: f64) -> Self {
        Self {
            rule: GaussRule::new(12),
            rel_tol,
            max_evals: 200_000_000,
            initial_grid: 16,
        }
    }

    pub fn with_grid(rel_tol: f64, initial_grid: usize) -> Self {
        Self { initial_grid, ..Self::new(rel_tol) }
    }

    fn panel<F: Fn(f64, f64) -> f64>(&self, f: &F, rect: &Rect) -> (f64, f64) {
        let r = &self.rule;
        let hx = 0.5 * (rect.x1 - rect.x0);
        let cx = 0.5 * (rect.x1 + rect.x0);
        let hy = 0.5 * (rect.y1 - rect.y0);
        let cy = 0.5 * (rect.y1 + rect.y0);
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        for (xi, wi) in r.nodes.iter().zip(&r.weights) {
            let x = cx + hx * xi;
            let mut row = 0.0;
            let mut row_abs = 0.0;
            for (yj, wj) in r.nodes.iter().zip(&r.weights) {
                let v = f(x, cy + hy * yj);
                row += wj * v;
                row_abs += wj * v.abs();
            }
            sum += wi * row;
            abs_sum += wi * row_abs;
        }
        (sum * hx * hy, abs_sum * hx * hy)
    }

    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: &F, rect: Rect) -> Result<QuadratureResult> {
        let n = self.initial_grid;
        let evals_per_panel = (self.rule.nodes.len() * self.rule.nodes.len()) as u64;
        let mut evals: u64 = 0;

        // Rough pass fixes the absolute budget for the refinement.
        let mut cells = Vec::with_capacity(n * n);
        let mut rough = 0.0;
        let mut rough_abs = 0.0;
        for i in 0..n {
            for j in 0..n {
                let cell = Rect {
                    x0: rect.x0 + (rect.x1 - rect.x0) * i as f64 / n as f64,
                    x1: rect.x0 + (rect.x1 - rect.x0) * (i + 1) as f64 / n as f64,
                    y0: rect.y0 + (rect.y1 - rect.y0) * j as f64 / n as f64,
                    y1: rect.y0 + (rect.y1 - rect.y0) * (j + 1) as f64 / n as f64,
                };
                let (v, va) = self.panel(f, &cell);
                evals += evals_per_panel;
                rough += v;
                rough_abs += va;
                cells.push((cell, v));
            }
        }
        let scale = rough.abs().max(0.01 * rough_abs).max(f64::MIN_POSITIVE);
        let density = self.rel_tol * scale / rect.area();

        let mut value = 0.0;
        let mut err = 0.0;
        // Depth-first over the fixed cell order keeps the summation
        // deterministic.
        let mut stack: Vec<(Rect, f64, u32)> = Vec::new();
        for (cell, coarse) in cells.into_iter().rev() {
            stack.push((cell, coarse, 0));
        }
        while let Some((cell, coarse, depth)) = stack.pop() {
            let children = cell.quadrants();
            let mut fine = 0.0;
            let mut child_vals = [0.0; 4];
            for (t, child) in children.iter().enumerate() {
                let (v, _) = self.panel(f, child);
                child_vals[t] = v;
                fine += v;
            }
            evals += 4 * evals_per_panel;
            if evals > self.max_evals {
                return Err(Error::QuadratureBudget {
                    value: value + fine,
                    error_bound: err + (coarse - fine).abs(),
                    evaluations: evals,
                });
            }
            let disc = (coarse - fine).abs();
            if disc <= density * cell.area() || depth >= 42 {
                value += fine;
                err += disc;
            } else {
                for (t, child) in children.into_iter().enumerate().rev() {
                    stack.push((child, child_vals[t], depth + 1));
                }
            }
        }
        Ok(QuadratureResult { value, abs_error_estimate: err, evaluations: evals })
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub(crate) struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        nodes.reverse();
        weights.reverse();
        Self { nodes, weights }
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ep(p: i64, r: i64) -> ExponentPair {
        ExponentPair::new(p, r)
    }

    fn triangle() -> Vec<ExponentPair> {
        vec![ep(0, 0), ep(1, 0), ep(0, 1)]
    }

    /// Closed form on the simplex denominator 1 + u + v: iterated Beta
    /// integrals give I = B(R, 4-R) B(P, 4-P-R) / 4, exact rationals for
    /// integer arguments.
    fn beta_reference(p: i64, r: i64) -> f64 {
        fn fact(k: i64) -> f64 {
            (1..=k).map(|t| t as f64).product()
        }
        fn beta(a: i64, b: i64) -> f64 {
            fact(a - 1) * fact(b - 1) / fact(a + b - 1)
        }
        beta(r, 4 - r) * beta(p, 4 - p - r) / 4.0
    }

    #[test]
    fn gauss_rule_integrates_polynomials() {
        let rule = GaussRule::new(12);
        let wsum: f64 = rule.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
        // degree-22 monomial is exact for a 12-point rule
        let val: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x.powi(22))
            .sum();
        assert!((val - 2.0 / 23.0).abs() < 1e-13, "{val}");
    }

    #[test]
    fn convergence_examples() {
        assert!(convergence_check(&FaceIntegralSpec::new(1, 1, triangle())));
        assert!(!convergence_check(&FaceIntegralSpec::new(4, 0, triangle())));
        assert!(convergence_check(&FaceIntegralSpec::new(2, 1, triangle())));
    }

    #[test]
    fn divergent_spec_is_an_error() {
        let err = face_integral(&FaceIntegralSpec::new(4, 0, triangle()), 1e-10).unwrap_err();
        assert!(matches!(err, Error::DivergentIntegral));
    }

    #[test]
    fn simplex_integrals_match_beta_closed_form() {
        for (p, r) in [(1, 1), (2, 1), (1, 2)] {
            let res = face_integral(&FaceIntegralSpec::new(p, r, triangle()), 1e-10).unwrap();
            let reference = beta_reference(p, r);
            assert!(
                (res.value - reference).abs() <= 1e-10 * reference,
                "({p},{r}): {} vs {reference}",
                res.value
            );
            // all three interior cases equal 1/24
            assert!((res.value - 1.0 / 24.0).abs() < 1e-11);
        }
    }

    #[test]
    fn shifted_denominator_is_invariant() {
        // denominator x^2 (1 + y^2 + x^2): same integral as the simplex case
        let spec = FaceIntegralSpec::new(5, 1, vec![ep(1, 0), ep(1, 1), ep(2, 0)]);
        let res = face_integral(&spec, 1e-10).unwrap();
        assert!((res.value - 1.0 / 24.0).abs() < 1e-11, "{}", res.value);
        assert_eq!(spec.canonical(), FaceIntegralSpec::new(1, 1, triangle()).canonical());
    }

    #[test]
    fn transpose_symmetry() {
        let pairs = vec![ep(0, 0), ep(2, 0), ep(0, 1), ep(1, 1)];
        let transposed: Vec<ExponentPair> = pairs.iter().map(|e| ep(e.r, e.p)).collect();
        let a = face_integral(&FaceIntegralSpec::new(2, 1, pairs), 1e-10).unwrap();
        let b = face_integral(&FaceIntegralSpec::new(1, 2, transposed), 1e-10).unwrap();
        assert!((a.value - b.value).abs() <= 2e-10 * a.value.abs());
    }

    #[test]
    fn halving_tolerance_does_not_hurt() {
        let quad_pairs = vec![ep(0, 0), ep(1, 0), ep(2, 0), ep(0, 1), ep(1, 1)];
        let s3 = 3.0f64.sqrt() * std::f64::consts::PI;
        let cases = [
            (FaceIntegralSpec::new(1, 1, triangle()), 1.0 / 24.0),
            (FaceIntegralSpec::new(2, 1, quad_pairs), (6.0 - s3) / 108.0),
        ];
        for (spec, reference) in cases {
            let mut last = f64::INFINITY;
            for tol in [1e-6, 5e-7, 2.5e-7, 1e-8, 1e-10] {
                let res = face_integral(&spec, tol).unwrap();
                let gap = (res.value - reference).abs();
                assert!(gap <= last.max(1e-13), "tol {tol}: {gap} > {last}");
                last = gap;
            }
        }
    }
}
