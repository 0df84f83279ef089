//! Closed-form photon statistics and critical parameters for displaced
//! squeezed thermal states (DSTS) and their pure special case (SCS).
//!
//! For rho = D(alpha) S(xi) rho_th(n_th) S^dag D^dag with
//! alpha = abar e^{i phi} and xi = r e^{i theta}, the mode operator splits
//! as a = alpha + delta with delta a zero-mean Gaussian fluctuation whose
//! second moments are
//!
//!   nt = <delta^dag delta> = (n_th + 1/2) cosh(2r) - 1/2,
//!   mt = <delta delta>     = -(n_th + 1/2) sinh(2r) e^{i theta}.
//!
//! Factorial moments then follow from Gaussian moment factorization
//! (Wick's theorem with nonzero mean). With
//!
//!   N  = abar^2 + nt                      (mean photon number),
//!   C  = cos(2 phi - theta) sinh(2r),
//!   R  = 2 Re(alpha*^2 mt) = -(2 n_th + 1) abar^2 C,
//!
//! the derived expressions are
//!
//!   N^2 g2 = abar^4 + 4 abar^2 nt + R + 2 nt^2 + |mt|^2,
//!   N^3 g3 = abar^6 + 9 abar^4 nt + 3 abar^2 R
//!            + 9 abar^2 (2 nt^2 + |mt|^2) + 9 nt R + 6 nt^3 + 9 nt |mt|^2.
//!
//! These match the Fock-space oracle to machine precision (see tests); the
//! fourth order is deliberately left to the numeric oracle.

use crate::error::{Error, Result};
use crate::fock::{GaussianParams, TAU_DIV};
use num_complex::Complex64;

/// Second moments of the fluctuation part of a DSTS.
#[derive(Debug, Clone, Copy)]
pub struct GaussianMoments {
    pub alpha: Complex64,
    /// <delta^dag delta>
    pub n_tilde: f64,
    /// <delta delta>
    pub m_tilde: Complex64,
}

impl GaussianMoments {
    pub fn from_params(p: &GaussianParams) -> Self {
        let half = p.n_th + 0.5;
        let n_tilde = half * (2.0 * p.sq_mag).cosh() - 0.5;
        let m_tilde =
            -Complex64::from_polar(half * (2.0 * p.sq_mag).sinh(), p.sq_phase);
        Self {
            alpha: p.alpha(),
            n_tilde,
            m_tilde,
        }
    }
}

/// Mean photon number: abar^2 + [(1 + 2 n_th) cosh(2r) - 1] / 2.
pub fn dsts_mean_n(p: &GaussianParams) -> f64 {
    crate::fock::dsts_mean_n_estimate(p)
}

fn second_factorial_moment(m: &GaussianMoments) -> f64 {
    let a2 = m.alpha.norm_sqr();
    let r_term = 2.0 * (m.alpha.conj().powi(2) * m.m_tilde).re;
    a2 * a2 + 4.0 * a2 * m.n_tilde + r_term + 2.0 * m.n_tilde.powi(2) + m.m_tilde.norm_sqr()
}

fn third_factorial_moment(m: &GaussianMoments) -> f64 {
    let a2 = m.alpha.norm_sqr();
    let nt = m.n_tilde;
    let mt2 = m.m_tilde.norm_sqr();
    let r_term = 2.0 * (m.alpha.conj().powi(2) * m.m_tilde).re;
    a2.powi(3)
        + 9.0 * a2 * a2 * nt
        + 3.0 * a2 * r_term
        + 9.0 * a2 * (2.0 * nt * nt + mt2)
        + 9.0 * nt * r_term
        + 6.0 * nt.powi(3)
        + 9.0 * nt * mt2
}

/// Second-order equal-time correlation g2(0) of a DSTS.
pub fn dsts_g2(p: &GaussianParams) -> Result<f64> {
    p.validate()?;
    let n = dsts_mean_n(p);
    if n < TAU_DIV {
        return Err(Error::EmptyCavity(n));
    }
    let m = GaussianMoments::from_params(p);
    Ok(second_factorial_moment(&m) / (n * n))
}

/// Third-order equal-time correlation g3(0) of a DSTS.
pub fn dsts_g3(p: &GaussianParams) -> Result<f64> {
    p.validate()?;
    let n = dsts_mean_n(p);
    if n < TAU_DIV {
        return Err(Error::EmptyCavity(n));
    }
    let m = GaussianMoments::from_params(p);
    Ok(third_factorial_moment(&m) / (n * n * n))
}

/// Thermal-state correlation g(k) = k!.
pub fn thermal_gk(k: usize) -> f64 {
    assert!(k >= 1, "correlation order must be >= 1");
    (1..=k).map(|j| j as f64).product()
}

/// Critical squeezing below which a DSTS stays classical:
/// r_0 = ln(1 + 2 n_th) / 2.
pub fn critical_r0(n_th: f64) -> f64 {
    0.5 * (1.0 + 2.0 * n_th).ln()
}

/// Principal-quadrature squeezing variance of the DSTS and its truncated
/// (nonpositive) normally ordered part:
///
///   variance  = exp[-2 (r - r_0)] / 4,
///   truncated = min(0, variance - 1/4).
///
/// Both are independent of the displacement and the squeezing phase.
pub fn squeezing_variance(p: &GaussianParams) -> (f64, f64) {
    let variance = 0.25 * (-2.0 * (p.sq_mag - critical_r0(p.n_th))).exp();
    let normally_ordered = variance - 0.25;
    (variance, normally_ordered.min(0.0))
}

/// Displacement-amplitude boundaries of the photon-correlation regimes of
/// the SCS at fixed squeezing r (principal orientation theta = 2 phi):
///
/// - below `alpha0`:            1 < g2 < g3    (three-photon tunneling)
/// - `alpha0` .. `alpha1`:      g2 < 1 < g3    (nonstandard 1PB, type 2)
/// - `alpha1` .. `alpha2`:      g2 < g3 < 1    (nonstandard 1PB, type 3)
/// - above `alpha2`:            g3 < g2 < 1    (1PB, type 1)
#[derive(Debug, Clone, Copy)]
pub struct CriticalAlphas {
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-10 {
            return mid;
        }
        let fm = f(mid);
        if (flo <= 0.0) == (fm <= 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn bracket(f: &impl Fn(f64) -> f64, lo: f64, hi0: f64, what: &str) -> Result<(f64, f64)> {
    let mut hi = hi0;
    let flo = f(lo);
    let max_hi = 1e3;
    while (flo <= 0.0) == (f(hi) <= 0.0) {
        hi *= 1.6;
        if hi > max_hi {
            return Err(Error::RootBracketing {
                what: what.into(),
                lo,
                hi,
            });
        }
    }
    Ok((lo, hi))
}

/// Root-found regime boundaries at fixed r (authoritative values).
///
/// Solved by bisection to 1e-10 on g2 - 1, g3 - 1 and g2 - g3 as functions
/// of the displacement amplitude, with theta = 2 phi = 0.
pub fn critical_alphas(r: f64) -> Result<CriticalAlphas> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "critical_alphas requires r > 0, got {r}"
        )));
    }
    let at = |abar: f64| GaussianParams {
        alpha_mag: abar,
        alpha_phase: 0.0,
        sq_mag: r,
        sq_phase: 0.0,
        n_th: 0.0,
    };
    let g2 = |a: f64| dsts_g2(&at(a)).expect("nonzero occupation for r > 0");
    let g3 = |a: f64| dsts_g3(&at(a)).expect("nonzero occupation for r > 0");

    let start = 1e-8;
    let scale = 2.0 * (1.0 + (2.0 * r).cosh());

    let f0 = |a: f64| g2(a) - 1.0;
    let (lo, hi) = bracket(&f0, start, scale, "g2 = 1")?;
    let alpha0 = bisect(f0, lo, hi);

    let f1 = |a: f64| g3(a) - 1.0;
    let (lo, hi) = bracket(&f1, start, scale, "g3 = 1")?;
    let alpha1 = bisect(f1, lo, hi);

    let f2 = |a: f64| g2(a) - g3(a);
    let (lo, hi) = bracket(&f2, alpha0.max(start), scale, "g2 = g3")?;
    let alpha2 = bisect(f2, lo, hi);

    if !(alpha0 <= alpha1 + 1e-9 && alpha1 <= alpha2 + 1e-9) {
        return Err(Error::InvalidParameter(format!(
            "regime boundaries out of order: {alpha0} {alpha1} {alpha2}"
        )));
    }
    Ok(CriticalAlphas {
        alpha0,
        alpha1,
        alpha2,
    })
}

/// Printed closed forms for the boundaries, kept for cross-checking the
/// root-found values. The alpha2 prefactor uses 1/(4 sqrt(2 s)) with
/// s = sinh r; the dimensionally consistent reading of the published
/// radical (see tests, which pin closed form against root-finder).
pub fn critical_alphas_closed_form(r: f64) -> CriticalAlphas {
    let c = r.cosh();
    let s = r.sinh();
    let alpha0 = (0.5 * (1.0 + c.powi(4) + c * (2.0 * c + s) * (c * s - 1.0))).sqrt();

    let f = |x: f64| x * (-3.0 * r).exp() - 4.0 * (3.0 * r).exp() + (5.0 * r).exp();
    let beta1 = 35.0 + 94.0 * c.powi(4) + 2.0 * c * s * (70.0 + 47.0 * c * s)
        - 2.0 * c * c * (51.0 + 88.0 * c * s);
    let alpha1 = (3.0 * f(7.0) - 4.0 * (3.0 * c - 21.0 * s)
        + 8.0 * (3.0 * beta1).sqrt() * (c + s) * s * s)
        .sqrt()
        / (4.0 * (6.0 * s).sqrt());

    let beta2 = 10.0 + 29.0 * c.powi(4) + c * s * (40.0 + 29.0 * c * s)
        - c * c * (31.0 + 56.0 * c * s);
    let alpha2 = (f(9.0) - 2.0 * (3.0 * c - 17.0 * s)
        + 8.0 * (2.0 * beta2).sqrt() * (c + s) * s * s)
        .sqrt()
        / (4.0 * (2.0 * s).sqrt());

    CriticalAlphas {
        alpha0,
        alpha1,
        alpha2,
    }
}

/// Whether any (abar, r) region with g2 < 1 < g3 (nonstandard 1PB of
/// type 2) exists for the given squeezing and displacement phases, by a
/// bounded search over abar in (0, 3], r in (0, 1.5] at n_th = 0.
pub fn scs_npb_phase_table(theta: f64, phi: f64) -> bool {
    let na = 80;
    let nr = 60;
    for ia in 0..na {
        let abar = 3.0 * (ia + 1) as f64 / na as f64;
        for ir in 0..nr {
            let r = 1.5 * (ir + 1) as f64 / nr as f64;
            let p = GaussianParams {
                alpha_mag: abar,
                alpha_phase: phi,
                sq_mag: r,
                sq_phase: theta,
                n_th: 0.0,
            };
            let (g2, g3) = match (dsts_g2(&p), dsts_g3(&p)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            if g2 < 1.0 - 1e-9 && g3 > 1.0 + 1e-9 {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn params(abar: f64, phi: f64, r: f64, theta: f64, n_th: f64) -> GaussianParams {
        GaussianParams::new(abar, phi, r, theta, n_th).unwrap()
    }

    /// Independent oracle: factorial moment <(a^dag)^k a^k> of a displaced
    /// Gaussian state by explicit enumeration of Wick contractions over the
    /// normal-ordered product. Positions 0..k are daggered.
    fn wick_moment(k: usize, m: &GaussianMoments) -> f64 {
        fn go(free: &[usize], k: usize, m: &GaussianMoments) -> Complex64 {
            let Some((&first, rest)) = free.split_first() else {
                return Complex64::new(1.0, 0.0);
            };
            let mean = |pos: usize| {
                if pos < k {
                    m.alpha.conj()
                } else {
                    m.alpha
                }
            };
            // First element unpaired:
            let mut total = mean(first) * go(rest, k, m);
            // Or contracted with a later element:
            for (idx, &other) in rest.iter().enumerate() {
                let contraction = match (first < k, other < k) {
                    (true, true) => m.m_tilde.conj(),
                    (true, false) => Complex64::new(m.n_tilde, 0.0),
                    (false, false) => m.m_tilde,
                    (false, true) => unreachable!("normal order broken"),
                };
                let mut remaining = rest.to_vec();
                remaining.remove(idx);
                total += contraction * go(&remaining, k, m);
            }
            total
        }
        let all: Vec<usize> = (0..2 * k).collect();
        go(&all, k, m).re
    }

    #[test]
    fn closed_forms_match_wick_enumeration() {
        for p in [
            params(0.8, 0.2, 0.4, 0.4, 0.05),
            params(0.5, 1.1, 0.3, 0.7, 0.12),
            params(1.2, 0.0, 0.6, PI, 0.0),
            params(0.0, 0.0, 0.5, 0.0, 0.0),
            params(2.0, 0.7, 1.0, 1.9, 0.5),
        ] {
            let m = GaussianMoments::from_params(&p);
            let n = dsts_mean_n(&p);
            assert_abs_diff_eq!(wick_moment(1, &m), n, epsilon = 1e-12 * n.max(1.0));
            let g2 = dsts_g2(&p).unwrap();
            let g3 = dsts_g3(&p).unwrap();
            assert_abs_diff_eq!(g2, wick_moment(2, &m) / n.powi(2), epsilon = 1e-10);
            assert_abs_diff_eq!(g3, wick_moment(3, &m) / n.powi(3), epsilon = 1e-10);
        }
    }

    #[test]
    fn mean_n_special_cases() {
        assert_abs_diff_eq!(
            dsts_mean_n(&params(0.0, 0.0, 0.0, 0.0, 0.2)),
            0.2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            dsts_mean_n(&params(1.0, 0.0, 0.0, 0.0, 0.0)),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn squeezed_vacuum_g2() {
        // Wick's theorem for zero-mean Gaussian states gives
        // g2 = 3 + 1/sinh^2 r.
        for r in [0.2, 0.5, 1.0] {
            let g2 = dsts_g2(&params(0.0, 0.0, r, 0.9, 0.0)).unwrap();
            assert_abs_diff_eq!(g2, 3.0 + 1.0 / r.sinh().powi(2), epsilon = 1e-10);
        }
    }

    #[test]
    fn thermal_limits() {
        let g2 = dsts_g2(&params(0.0, 0.0, 0.0, 0.0, 0.3)).unwrap();
        let g3 = dsts_g3(&params(0.0, 0.0, 0.0, 0.0, 0.3)).unwrap();
        assert_abs_diff_eq!(g2, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g3, 6.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_limits() {
        let g2 = dsts_g2(&params(1.0, 0.3, 0.0, 0.0, 0.0)).unwrap();
        let g3 = dsts_g3(&params(1.0, 0.3, 0.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(g2, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g3, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn nth_to_zero_limit_is_continuous() {
        let base = params(0.7, 0.4, 0.5, 0.8, 0.0);
        let g2_0 = dsts_g2(&base).unwrap();
        let g3_0 = dsts_g3(&base).unwrap();
        let eps_state = params(0.7, 0.4, 0.5, 0.8, 1e-12);
        assert_abs_diff_eq!(dsts_g2(&eps_state).unwrap(), g2_0, epsilon = 1e-9);
        assert_abs_diff_eq!(dsts_g3(&eps_state).unwrap(), g3_0, epsilon = 1e-9);
    }

    #[test]
    fn thermal_gk_is_factorial() {
        assert_eq!(thermal_gk(1), 1.0);
        assert_eq!(thermal_gk(2), 2.0);
        assert_eq!(thermal_gk(3), 6.0);
        assert_eq!(thermal_gk(4), 24.0);
    }

    #[test]
    fn critical_r0_values() {
        assert_abs_diff_eq!(critical_r0(0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(critical_r0(0.1), 0.0912, epsilon = 5e-5);
        assert_abs_diff_eq!(critical_r0(0.2), 0.1682, epsilon = 5e-5);
    }

    #[test]
    fn variance_special_cases() {
        // Vacuum: variance 1/4, no negative part.
        let (v, t) = squeezing_variance(&params(0.0, 0.0, 0.0, 0.0, 0.0));
        assert_abs_diff_eq!(v, 0.25, epsilon = 1e-15);
        assert_eq!(t, 0.0);
        // At the classical boundary r = r0 the variance is exactly 1/4.
        let n_th = 0.15;
        let (v, t) = squeezing_variance(&params(0.3, 0.0, critical_r0(n_th), 0.0, n_th));
        assert_abs_diff_eq!(v, 0.25, epsilon = 1e-14);
        assert_eq!(t, 0.0);
        // Squeezed vacuum r = 0.5: normally ordered variance (e^{-1}-1)/4.
        let (_, t) = squeezing_variance(&params(0.0, 0.0, 0.5, 0.0, 0.0));
        assert_abs_diff_eq!(t, 0.25 * ((-1.0f64).exp() - 1.0), epsilon = 1e-14);
    }

    #[test]
    fn variance_independent_of_displacement_and_theta() {
        let (v1, t1) = squeezing_variance(&params(0.0, 0.0, 0.4, 0.0, 0.1));
        let (v2, t2) = squeezing_variance(&params(1.7, 0.9, 0.4, 2.3, 0.1));
        assert_eq!(v1, v2);
        assert_eq!(t1, t2);
    }

    #[test]
    fn ep_variance_monotonicity() {
        // -log2(variance)/2 - 1 = (r - r0)/ln 2 for the DSTS.
        for (r, n_th) in [(0.3, 0.0), (0.5, 0.1), (0.9, 0.2)] {
            let (v, _) = squeezing_variance(&params(0.4, 0.0, r, 1.0, n_th));
            let lhs = -0.5 * v.log2() - 1.0;
            let rhs = (r - critical_r0(n_th)) / std::f64::consts::LN_2;
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
        }
    }

    #[test]
    fn critical_alphas_match_closed_forms() {
        for r in [0.1, 0.3, 0.6, 1.0, 1.5] {
            let found = critical_alphas(r).unwrap();
            let closed = critical_alphas_closed_form(r);
            assert_abs_diff_eq!(found.alpha0, closed.alpha0, epsilon = 1e-6);
            assert_abs_diff_eq!(found.alpha1, closed.alpha1, epsilon = 1e-6);
            assert_abs_diff_eq!(found.alpha2, closed.alpha2, epsilon = 1e-6);
        }
    }

    #[test]
    fn critical_alphas_order_and_regimes() {
        let r = 0.3;
        let ca = critical_alphas(r).unwrap();
        assert!(0.0 < ca.alpha0 && ca.alpha0 <= ca.alpha1 && ca.alpha1 <= ca.alpha2);

        // Sample each regime at theta = 2 phi = 0.
        let sample = |abar: f64| {
            let p = params(abar, 0.0, r, 0.0, 0.0);
            (dsts_g2(&p).unwrap(), dsts_g3(&p).unwrap())
        };
        let (g2, g3) = sample(0.9 * ca.alpha0);
        assert!(1.0 < g2 && g2 < g3, "expected 3PT below alpha0: {g2} {g3}");
        let (g2, g3) = sample(0.5 * (ca.alpha0 + ca.alpha1));
        assert!(g2 < 1.0 && 1.0 < g3, "expected type 2 between: {g2} {g3}");
        let (g2, g3) = sample(0.5 * (ca.alpha1 + ca.alpha2));
        assert!(g2 < g3 && g3 < 1.0, "expected type 3 between: {g2} {g3}");
        let (g2, g3) = sample(1.2 * ca.alpha2);
        assert!(g3 < g2 && g2 < 1.0, "expected type 1 above alpha2: {g2} {g3}");
    }

    #[test]
    fn small_r_boundaries_collapse() {
        let ca = critical_alphas(1e-4).unwrap();
        assert!(ca.alpha0 < 0.02);
        // Degenerate coherent limit: everything pinches toward g2 = g3 = 1.
        let p = params(1.0, 0.0, 1e-6, 0.0, 0.0);
        assert_abs_diff_eq!(dsts_g2(&p).unwrap(), 1.0, epsilon = 1e-4);
        assert_abs_diff_eq!(dsts_g3(&p).unwrap(), 1.0, epsilon = 1e-4);
    }

    #[test]
    fn phase_table_rows() {
        // theta = 0
        assert!(scs_npb_phase_table(0.0, 0.0));
        assert!(scs_npb_phase_table(0.0, PI));
        assert!(!scs_npb_phase_table(0.0, PI / 2.0));
        assert!(!scs_npb_phase_table(0.0, 3.0 * PI / 2.0));
        // theta = pi
        assert!(scs_npb_phase_table(PI, PI / 2.0));
        assert!(scs_npb_phase_table(PI, 3.0 * PI / 2.0));
        assert!(!scs_npb_phase_table(PI, 0.0));
        assert!(!scs_npb_phase_table(PI, PI));
        // phi in {0, pi}
        assert!(scs_npb_phase_table(0.4, 0.0));
        assert!(!scs_npb_phase_table(2.0, 0.0));
        // phi = pi/2
        assert!(!scs_npb_phase_table(0.3, PI / 2.0));
        assert!(scs_npb_phase_table(PI - 0.4, PI / 2.0));
    }

    #[test]
    fn no_two_pt_region_for_scs() {
        // Sampled search finds no 1 < g3 < g2 ordering at theta = 2 phi.
        for ia in 0..60 {
            let abar = 3.0 * (ia + 1) as f64 / 60.0;
            for ir in 0..50 {
                let r = 1.5 * (ir + 1) as f64 / 50.0;
                let p = params(abar, 0.3, r, 0.6, 0.0);
                let g2 = dsts_g2(&p).unwrap();
                let g3 = dsts_g3(&p).unwrap();
                assert!(
                    !(1.0 < g3 && g3 < g2),
                    "unexpected 2PT at abar={abar}, r={r}: g2={g2}, g3={g3}"
                );
            }
        }
    }
}
