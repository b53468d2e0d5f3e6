//! Direct numeric evaluation of the energy functionals along the geodesic,
//! reduced to logarithmic coordinates on the dense torus.
//!
//! With s = log|x|^2, w = log|y|^2 the Kähler potentials become
//! g_u(s, w) = log sum_j exp(-2 u a_j + p_j s + r_j w), and a wedge of two
//! curvature forms pushes down to the mixed discriminant of the two
//! Hessians times ds dw; integrating the angular variables contributes no
//! further constant, as the volume identity iint MD(H, H)/2 = V/2 pins
//! exactly (checked in the tests, not assumed). The energy then reads
//!
//!   F0(u) = (1/(3V)) iint (g_u - g_0) [MD(H0,H0) + MD(H0,Hu) + MD(Hu,Hu)]
//!
//! and the slope in u of F0 is the quantity the face formula predicts.

use crate::diagram::{central_weights, NewtonDiagram};
use crate::quadrature::{BoxIntegrator, Rect};
use crate::symbols::ExponentPair;
use crate::{Error, Result};
use num::ToPrimitive;

/// g(s, w) = log sum_j c_j exp(p_j s + r_j w), kept as log-coefficients so
/// the evaluation stays in exponent space throughout.
#[derive(Clone, Debug)]
pub struct LogPotential {
    exponents: Vec<ExponentPair>,
    log_coeffs: Vec<f64>,
}

/// Gradient and Hessian of a log potential at one point. The Hessian is the
/// covariance of the exponent vectors under the softmax weights, hence
/// positive semidefinite; the gradient lies in the exponent hull.
#[derive(Clone, Copy, Debug)]
pub struct HessianSample {
    pub g_ss: f64,
    pub g_sw: f64,
    pub g_ww: f64,
    pub grad: [f64; 2],
}

impl LogPotential {
    pub fn new(coefficients: &[f64], exponents: Vec<ExponentPair>) -> Self {
        assert_eq!(coefficients.len(), exponents.len());
        assert!(coefficients.iter().all(|&c| c > 0.0));
        Self {
            log_coeffs: coefficients.iter().map(|c| c.ln()).collect(),
            exponents,
        }
    }

    /// The reference potential: coefficient 1 on every section.
    pub fn reference(diagram: &NewtonDiagram) -> Self {
        Self {
            exponents: diagram.exponent_pairs(),
            log_coeffs: vec![0.0; diagram.len()],
        }
    }

    /// The geodesic at parameter u: coefficients |t|^(2 a_j) = exp(-2 u a_j).
    pub fn geodesic(diagram: &NewtonDiagram, u: f64) -> Self {
        let cw = central_weights(diagram);
        Self {
            exponents: diagram.exponent_pairs(),
            log_coeffs: cw.a.iter().map(|a| -2.0 * u * a.to_f64().unwrap()).collect(),
        }
    }

    /// Potential value and derivatives in one shifted softmax pass.
    pub fn eval(&self, s: f64, w: f64) -> (f64, HessianSample) {
        let mut m = f64::NEG_INFINITY;
        for (e, lc) in self.exponents.iter().zip(&self.log_coeffs) {
            let t = lc + e.p as f64 * s + e.r as f64 * w;
            if t > m {
                m = t;
            }
        }
        let (mut z, mut mp, mut mr) = (0.0, 0.0, 0.0);
        let (mut mpp, mut mpr, mut mrr) = (0.0, 0.0, 0.0);
        for (e, lc) in self.exponents.iter().zip(&self.log_coeffs) {
            let (p, r) = (e.p as f64, e.r as f64);
            let x = (lc + p * s + r * w - m).exp();
            z += x;
            mp += p * x;
            mr += r * x;
            mpp += p * p * x;
            mpr += p * r * x;
            mrr += r * r * x;
        }
        let gs = mp / z;
        let gw = mr / z;
        (
            m + z.ln(),
            HessianSample {
                g_ss: mpp / z - gs * gs,
                g_sw: mpr / z - gs * gw,
                g_ww: mrr / z - gw * gw,
                grad: [gs, gw],
            },
        )
    }

    pub fn value(&self, s: f64, w: f64) -> f64 {
        self.eval(s, w).0
    }
}

/// Softmax gradient and covariance Hessian of the potential.
pub fn potential_derivs(pot: &LogPotential, s: f64, w: f64) -> HessianSample {
    pot.eval(s, w).1
}

/// Mixed discriminant of two 2x2 Hessians: the bilinear polarization of the
/// determinant, MD(H, H) = 2 det H. This is the fiber-wise image of the
/// wedge product of the two curvature forms.
pub fn mixed_discriminant(a: &HessianSample, b: &HessianSample) -> f64 {
    a.g_ss * b.g_ww + a.g_ww * b.g_ss - 2.0 * a.g_sw * b.g_sw
}

fn rank_one(grad: [f64; 2]) -> HessianSample {
    HessianSample {
        g_ss: grad[0] * grad[0],
        g_sw: grad[0] * grad[1],
        g_ww: grad[1] * grad[1],
        grad: [0.0, 0.0],
    }
}

/// Quadrature parameters for the oracle integrals.
#[derive(Clone, Copy, Debug)]
pub struct QuadParams {
    pub rel_tol: f64,
    /// Initial uniform grid of the adaptive pass.
    pub initial_grid: usize,
}

impl Default for QuadParams {
    fn default() -> Self {
        Self { rel_tol: 1e-8, initial_grid: 24 }
    }
}

/// Truncation box half-width: the dominance corners sit at distance O(u),
/// so the box grows linearly with u with a generous margin.
fn box_half_width(diagram: &NewtonDiagram, u: f64) -> f64 {
    let me = diagram
        .points()
        .iter()
        .map(|pt| pt.p.abs() + pt.r.abs() + 1)
        .max()
        .unwrap() as f64;
    (4.0 * (u + 1.0) * me).max(30.0)
}

fn integrate_torus<F: Fn(f64, f64) -> f64>(
    f: F,
    half_width: f64,
    quad: &QuadParams,
) -> Result<(f64, f64)> {
    let integrator = BoxIntegrator::with_grid(quad.rel_tol, quad.initial_grid);
    let rect = Rect { x0: -half_width, x1: half_width, y0: -half_width, y1: half_width };
    let res = integrator.integrate(&f, rect)?;

    // tail monitor: the integrand decays exponentially off the dominance
    // complex, so the boundary maximum scaled by the perimeter bounds the
    // truncation error to within its decay length
    let mut boundary_max: f64 = 0.0;
    let n = 64;
    for k in 0..=n {
        let t = -half_width + 2.0 * half_width * k as f64 / n as f64;
        for (s, w) in [(t, -half_width), (t, half_width), (-half_width, t), (half_width, t)] {
            boundary_max = boundary_max.max(f64::abs(f(s, w)));
        }
    }
    let tail = boundary_max * 8.0 * half_width;
    if tail > 1e3 * quad.rel_tol * (res.value.abs() + 1.0) {
        return Err(Error::TruncationTail(format!(
            "boundary residual {tail:.3e} at half-width {half_width} exceeds the tolerance"
        )));
    }
    Ok((res.value, res.abs_error_estimate + tail))
}

/// The energy F0(u) by direct quadrature. F0(0) is exactly zero.
pub fn aubin_yau_numeric(diagram: &NewtonDiagram, u: f64, quad: &QuadParams) -> Result<f64> {
    assert!(u >= 0.0);
    let g0 = LogPotential::reference(diagram);
    let gu = LogPotential::geodesic(diagram, u);
    let volume = diagram.volume().to_f64().unwrap();
    let f = |s: f64, w: f64| {
        let (v0, h0) = g0.eval(s, w);
        let (vu, hu) = gu.eval(s, w);
        (vu - v0)
            * (mixed_discriminant(&h0, &h0)
                + mixed_discriminant(&h0, &hu)
                + mixed_discriminant(&hu, &hu))
    };
    let (value, _) = integrate_torus(f, box_half_width(diagram, u), quad)?;
    Ok(value / (3.0 * volume))
}

/// (1/V) iint phi MD(H_a, H_b) with (a, b) = (0,0), (0,u), (u,u) for
/// i = 2, 1, 0: the three mixed energies whose sum is 3 F0.
pub fn mixed_energy_numeric(
    diagram: &NewtonDiagram,
    u: f64,
    i: usize,
    quad: &QuadParams,
) -> Result<f64> {
    assert!(i <= 2, "i must be 0, 1 or 2");
    assert!(u >= 0.0);
    let g0 = LogPotential::reference(diagram);
    let gu = LogPotential::geodesic(diagram, u);
    let volume = diagram.volume().to_f64().unwrap();
    let f = |s: f64, w: f64| {
        let (v0, h0) = g0.eval(s, w);
        let (vu, hu) = gu.eval(s, w);
        let md = match i {
            2 => mixed_discriminant(&h0, &h0),
            1 => mixed_discriminant(&h0, &hu),
            _ => mixed_discriminant(&hu, &hu),
        };
        (vu - v0) * md
    };
    let (value, _) = integrate_torus(f, box_half_width(diagram, u), quad)?;
    Ok(value / volume)
}

/// The gradient-energy functional
/// J = (1/V) iint [ (1/3) MD(G, Hu) + (2/3) MD(G, H0) ], with G the
/// rank-one form of grad phi. The coefficients are pinned by the identity
/// F0 + J = (1/V) iint phi MD(H0, H0), which the tests verify.
pub fn j_functional_numeric(diagram: &NewtonDiagram, u: f64, quad: &QuadParams) -> Result<f64> {
    assert!(u >= 0.0);
    let g0 = LogPotential::reference(diagram);
    let gu = LogPotential::geodesic(diagram, u);
    let volume = diagram.volume().to_f64().unwrap();
    let f = |s: f64, w: f64| {
        let (_, h0) = g0.eval(s, w);
        let (_, hu) = gu.eval(s, w);
        let g = rank_one([hu.grad[0] - h0.grad[0], hu.grad[1] - h0.grad[1]]);
        (mixed_discriminant(&g, &hu) + 2.0 * mixed_discriminant(&g, &h0)) / 3.0
    };
    let (value, _) = integrate_torus(f, box_half_width(diagram, u), quad)?;
    Ok(value / volume)
}

/// iint MD(H_a, H_b)/2 ds dw for geodesic parameters u_a, u_b (0 gives the
/// reference potential). Cohomology makes this V/2 for every pair; the
/// conservation tests drive this identity.
pub fn wedge_volume(
    diagram: &NewtonDiagram,
    u_a: f64,
    u_b: f64,
    quad: &QuadParams,
) -> Result<f64> {
    let ga = LogPotential::geodesic(diagram, u_a);
    let gb = LogPotential::geodesic(diagram, u_b);
    let u = u_a.max(u_b);
    let f = |s: f64, w: f64| {
        let (_, ha) = ga.eval(s, w);
        let (_, hb) = gb.eval(s, w);
        0.5 * mixed_discriminant(&ha, &hb)
    };
    let (value, _) = integrate_torus(f, box_half_width(diagram, u), quad)?;
    Ok(value)
}

/// Slope estimate from energy samples: the last difference quotient, with
/// the spread of the final three quotients as the uncertainty. The O(1)
/// part of the energy cancels in differences; residual decay is monitored
/// through the non-monotonicity flag rather than assumed.
#[derive(Clone, Copy, Debug)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub non_monotone: bool,
}

pub fn slope_fit(samples: &[(f64, f64)]) -> Result<SlopeFit> {
    if samples.len() < 3 {
        return Err(Error::SlopeFit("need at least 3 samples".into()));
    }
    if samples.windows(2).any(|p| p[1].0 <= p[0].0) {
        return Err(Error::SlopeFit("u values must be strictly increasing".into()));
    }
    let max_u = samples.last().unwrap().0;
    if max_u < 8.0 {
        return Err(Error::SlopeFit(format!(
            "largest u is {max_u}, need at least 8 for the asymptotic regime"
        )));
    }
    let quotients: Vec<f64> = samples
        .windows(2)
        .map(|p| (p[1].1 - p[0].1) / (p[1].0 - p[0].0))
        .collect();
    let tail = &quotients[quotients.len().saturating_sub(3)..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let var = tail.iter().map(|q| (q - mean) * (q - mean)).sum::<f64>() / tail.len() as f64;
    let stderr = var.sqrt();
    // direction changes below the quadrature noise floor are not decay
    // violations
    let non_monotone = if tail.len() == 3 {
        let d1 = tail[1] - tail[0];
        let d2 = tail[2] - tail[1];
        d1 * d2 < 0.0 && d1.abs().min(d2.abs()) > 1e-8 * (1.0 + mean.abs())
    } else {
        false
    };
    Ok(SlopeFit { slope: *quotients.last().unwrap(), stderr, non_monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{rat, WeightedPoint};

    fn wp(p: i64, r: i64, qn: i64, qd: i64) -> WeightedPoint {
        WeightedPoint { p, r, q: rat(qn, qd) }
    }

    fn p2_diagram(qn: i64, qd: i64) -> NewtonDiagram {
        NewtonDiagram::from_weighted_points(vec![
            wp(0, 0, 1, 1),
            wp(1, 0, 0, 1),
            wp(0, 1, qn, qd),
        ])
        .unwrap()
    }

    fn hirzebruch_single_face() -> NewtonDiagram {
        let exps = [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1)];
        let q = [(1, 1), (1, 2), (0, 1), (1, 2), (0, 1)];
        NewtonDiagram::from_weighted_points(
            exps.iter()
                .zip(q.iter())
                .map(|(&(p, r), &(n, d))| wp(p, r, n, d))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn derivs_single_term() {
        let pot = LogPotential::new(&[1.0], vec![ExponentPair::new(3, 2)]);
        let h = potential_derivs(&pot, 0.7, -1.3);
        assert_eq!(h.grad, [3.0, 2.0]);
        assert_eq!((h.g_ss, h.g_sw, h.g_ww), (0.0, 0.0, 0.0));
    }

    #[test]
    fn derivs_two_equal_terms_midpoint() {
        let pot = LogPotential::new(
            &[1.0, 1.0],
            vec![ExponentPair::new(0, 0), ExponentPair::new(2, 4)],
        );
        let h = potential_derivs(&pot, 0.0, 0.0);
        assert!((h.grad[0] - 1.0).abs() < 1e-15);
        assert!((h.grad[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn derivs_reference_simplex_at_origin() {
        let pot = LogPotential::reference(&p2_diagram(1, 2));
        let h = potential_derivs(&pot, 0.0, 0.0);
        assert!((h.grad[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((h.grad[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn derivs_stable_far_out() {
        let pot = LogPotential::reference(&hirzebruch_single_face());
        for (s, w) in [(2e4, -3e4), (-4e4, 4e4), (5e4, 5e4)] {
            let (v, h) = pot.eval(s, w);
            assert!(v.is_finite());
            assert!(h.g_ss.is_finite() && h.g_ww.is_finite());
            assert!(h.g_ss >= 0.0 && h.g_ww >= 0.0);
        }
    }

    #[test]
    fn hessian_psd_and_gradient_in_hull() {
        let pot = LogPotential::geodesic(&hirzebruch_single_face(), 3.0);
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 2001) as f64 / 100.0 - 10.0
        };
        for _ in 0..10_000 {
            let (s, w) = (next(), next());
            let h = potential_derivs(&pot, s, w);
            assert!(h.g_ss >= -1e-12 && h.g_ww >= -1e-12);
            let det = h.g_ss * h.g_ww - h.g_sw * h.g_sw;
            assert!(det >= -1e-12, "hessian must be PSD, det {det}");
            // gradient inside the exponent hull p + r <= 2, p, r >= 0
            assert!(h.grad[0] >= -1e-12 && h.grad[1] >= -1e-12);
            assert!(h.grad[0] + h.grad[1] <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn derivs_match_finite_differences() {
        let pot = LogPotential::geodesic(&p2_diagram(1, 2), 2.0);
        let eps = 1e-5;
        let mut state = 0xb5026f5aa96619e9u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 1201) as f64 / 100.0 - 6.0
        };
        for _ in 0..50 {
            let (s, w) = (next(), next());
            let h = potential_derivs(&pot, s, w);
            let fds = (pot.value(s + eps, w) - pot.value(s - eps, w)) / (2.0 * eps);
            let fdw = (pot.value(s, w + eps) - pot.value(s, w - eps)) / (2.0 * eps);
            assert!((h.grad[0] - fds).abs() < 1e-6 * (1.0 + fds.abs()));
            assert!((h.grad[1] - fdw).abs() < 1e-6 * (1.0 + fdw.abs()));
            let hss = (pot.value(s + eps, w) - 2.0 * pot.value(s, w) + pot.value(s - eps, w))
                / (eps * eps);
            let hww = (pot.value(s, w + eps) - 2.0 * pot.value(s, w) + pot.value(s, w - eps))
                / (eps * eps);
            assert!((h.g_ss - hss).abs() < 1e-4 * (1.0 + hss.abs()));
            assert!((h.g_ww - hww).abs() < 1e-4 * (1.0 + hww.abs()));
        }
    }

    #[test]
    fn mixed_discriminant_identities() {
        let id = HessianSample { g_ss: 1.0, g_sw: 0.0, g_ww: 1.0, grad: [0.0, 0.0] };
        assert_eq!(mixed_discriminant(&id, &id), 2.0);
        let mut state = 0xda3e39cb94b95bdbu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 1000) as f64 / 250.0 - 2.0
        };
        for _ in 0..200 {
            // random PSD: M = A^T A
            let (a, b, c, d) = (next(), next(), next(), next());
            let m1 = HessianSample {
                g_ss: a * a + c * c,
                g_sw: a * b + c * d,
                g_ww: b * b + d * d,
                grad: [0.0, 0.0],
            };
            let (a, b, c, d) = (next(), next(), next(), next());
            let m2 = HessianSample {
                g_ss: a * a + c * c,
                g_sw: a * b + c * d,
                g_ww: b * b + d * d,
                grad: [0.0, 0.0],
            };
            let det = |m: &HessianSample| m.g_ss * m.g_ww - m.g_sw * m.g_sw;
            // MD(H, H) = 2 det H
            assert!((mixed_discriminant(&m1, &m1) - 2.0 * det(&m1)).abs() < 1e-12);
            // polarization oracle: MD(A, B) = det(A+B) - det A - det B
            let sum = HessianSample {
                g_ss: m1.g_ss + m2.g_ss,
                g_sw: m1.g_sw + m2.g_sw,
                g_ww: m1.g_ww + m2.g_ww,
                grad: [0.0, 0.0],
            };
            let pol = det(&sum) - det(&m1) - det(&m2);
            assert!((mixed_discriminant(&m1, &m2) - pol).abs() < 1e-10);
            assert!(
                (mixed_discriminant(&m1, &m2) - mixed_discriminant(&m2, &m1)).abs() == 0.0
            );
        }
    }

    #[test]
    fn energy_vanishes_at_zero() {
        let quad = QuadParams { rel_tol: 1e-6, initial_grid: 12 };
        let d = p2_diagram(1, 2);
        assert_eq!(aubin_yau_numeric(&d, 0.0, &quad).unwrap(), 0.0);
        for i in 0..3 {
            assert_eq!(mixed_energy_numeric(&d, 0.0, i, &quad).unwrap(), 0.0);
        }
        assert_eq!(j_functional_numeric(&d, 0.0, &quad).unwrap(), 0.0);
    }

    #[test]
    fn volume_conservation() {
        let quad = QuadParams { rel_tol: 1e-7, initial_grid: 16 };
        let d = p2_diagram(1, 2);
        for u in [0.0, 2.0, 5.0, 10.0] {
            let pure = wedge_volume(&d, u, u, &quad).unwrap();
            let mixed = wedge_volume(&d, 0.0, u, &quad).unwrap();
            assert!((pure - 0.5).abs() < 1e-6, "u={u}: {pure}");
            assert!((mixed - 0.5).abs() < 1e-6, "u={u} mixed: {mixed}");
        }
    }

    #[test]
    fn j_nonnegative_and_identity() {
        let quad = QuadParams { rel_tol: 1e-7, initial_grid: 16 };
        let d = p2_diagram(1, 2);
        for u in [1.0, 2.0] {
            let j = j_functional_numeric(&d, u, &quad).unwrap();
            assert!(j >= 0.0);
            let f0 = aubin_yau_numeric(&d, u, &quad).unwrap();
            let e2 = mixed_energy_numeric(&d, u, 2, &quad).unwrap();
            assert!((f0 + j - e2).abs() < 1e-6, "identity residual {}", f0 + j - e2);
        }
    }

    #[test]
    fn energy_is_convex_in_u() {
        let quad = QuadParams { rel_tol: 1e-7, initial_grid: 16 };
        let d = hirzebruch_single_face();
        let vals: Vec<f64> = [0.0, 1.0, 2.0, 3.0, 4.0]
            .iter()
            .map(|&u| aubin_yau_numeric(&d, u, &quad).unwrap())
            .collect();
        for k in 2..vals.len() {
            let second = vals[k] - 2.0 * vals[k - 1] + vals[k - 2];
            assert!(second >= -1e-5, "second difference {second}");
        }
    }

    #[test]
    fn slope_fit_examples() {
        let line: Vec<(f64, f64)> = (0..5).map(|k| (8.0 + k as f64, 3.0 * (8.0 + k as f64) + 7.0)).collect();
        let fit = slope_fit(&line).unwrap();
        assert_eq!(fit.slope, 3.0);
        assert_eq!(fit.stderr, 0.0);
        assert!(!fit.non_monotone);

        let decaying: Vec<(f64, f64)> = [8.0f64, 10.0, 12.0, 14.0, 16.0]
            .iter()
            .map(|&u| (u, 3.0 * u + 7.0 + (-u).exp()))
            .collect();
        let fit = slope_fit(&decaying).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-5);
        assert!(!fit.non_monotone);

        assert!(slope_fit(&line[..2]).is_err());
        assert!(slope_fit(&[(1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]).is_err(), "max u too small");
        assert!(slope_fit(&[(8.0, 0.0), (8.0, 0.0), (9.0, 0.0)]).is_err());

        let oscillating = [(8.0, 0.0), (9.0, 1.0), (10.0, 0.0), (11.0, 1.0)];
        assert!(slope_fit(&oscillating).unwrap().non_monotone);
    }

    /// Affine weights make the geodesic a torus reparametrization, so the
    /// energy is flat: an exact reference point for the oracle.
    #[test]
    fn oracle_slope_on_reparametrization_families() {
        let quad = QuadParams { rel_tol: 1e-7, initial_grid: 20 };
        // projective plane, weights (1, 1/2, 0): F0 identically zero
        let d = p2_diagram(1, 2);
        let samples: Vec<(f64, f64)> = [8.0, 10.0, 12.0]
            .iter()
            .map(|&u| (u, aubin_yau_numeric(&d, u, &quad).unwrap()))
            .collect();
        let fit = slope_fit(&samples).unwrap();
        assert!(fit.slope.abs() < 1e-4, "slope {}", fit.slope);

        // Hirzebruch with affine weights: slope exactly 1/45
        let d = hirzebruch_single_face();
        let samples: Vec<(f64, f64)> = [8.0, 10.0, 12.0]
            .iter()
            .map(|&u| (u, aubin_yau_numeric(&d, u, &quad).unwrap()))
            .collect();
        let fit = slope_fit(&samples).unwrap();
        assert!(
            (fit.slope - 1.0 / 45.0).abs() < 1e-4,
            "slope {} vs 1/45",
            fit.slope
        );
    }
}
