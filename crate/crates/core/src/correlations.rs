//! Equal-time photon-number statistics of a density matrix.
//!
//! The k-th order correlation is
//!
//!   g(k) = <(a^dag)^k a^k> / <n>^k = sum_n P_n n(n-1)...(n-k+1) / <n>^k,
//!
//! i.e. the normalized k-th factorial moment. Both the distribution route
//! and the operator route are implemented; they must agree and are tested
//! against each other.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{annihilation, DensityMatrix, TAU_DIV};
use crate::linalg;

/// Clipping threshold for small negative populations from round-off.
pub const P_CLIP: f64 = 1e-12;

/// Bundle of the statistics used by the classifiers.
#[derive(Debug, Clone)]
pub struct CorrelationSet {
    pub mean_n: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
    /// Photon-number distribution P_k, clipped at -1e-12.
    pub pn: Vec<f64>,
    /// How many populations were clipped; nonzero values flag PSD noise.
    pub clipped: usize,
}

/// Photon-number distribution P_k = <k|rho|k> with negative round-off
/// clipped. Returns the distribution and the number of clipped entries.
pub fn photon_distribution(rho: &DensityMatrix) -> (Vec<f64>, usize) {
    let mut clipped = 0;
    let pn = rho
        .diagonal()
        .into_iter()
        .map(|p| {
            if p < -P_CLIP {
                clipped += 1;
                0.0
            } else {
                p.max(0.0)
            }
        })
        .collect();
    (pn, clipped)
}

fn factorial_moment(pn: &[f64], k: usize) -> f64 {
    pn.iter()
        .enumerate()
        .skip(k)
        .map(|(n, p)| {
            let mut w = 1.0;
            for j in 0..k {
                w *= (n - j) as f64;
            }
            p * w
        })
        .sum()
}

/// g(k) from the photon-number distribution.
pub fn correlation_k(rho: &DensityMatrix, k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidParameter("correlation order must be >= 1".into()));
    }
    let d = rho.dim();
    if k > d / 2 {
        return Err(Error::OrderExceedsTruncation {
            order: k,
            half_dim: d / 2,
        });
    }
    let (pn, _) = photon_distribution(rho);
    let mean_n = pn.iter().enumerate().map(|(n, p)| n as f64 * p).sum::<f64>();
    if mean_n < TAU_DIV {
        return Err(Error::EmptyCavity(mean_n));
    }
    Ok(factorial_moment(&pn, k) / mean_n.powi(k as i32))
}

/// g(k) from the operator form Tr[(a^dag)^k a^k rho] / <n>^k.
///
/// An independent code path kept for cross-validation of
/// [`correlation_k`].
pub fn correlation_k_operator(rho: &DensityMatrix, k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidParameter("correlation order must be >= 1".into()));
    }
    let d = rho.dim();
    if k > d / 2 {
        return Err(Error::OrderExceedsTruncation {
            order: k,
            half_dim: d / 2,
        });
    }
    let a = annihilation(d)?;
    let mut ak = linalg::eye(d);
    for _ in 0..k {
        ak = ak.dot(a.matrix());
    }
    let adk = linalg::dagger(&ak);
    let num = (adk.dot(&ak).dot(rho.matrix()))
        .diag()
        .iter()
        .sum::<Complex64>()
        .re;
    let mean_n = rho.mean_photon_number();
    if mean_n < TAU_DIV {
        return Err(Error::EmptyCavity(mean_n));
    }
    Ok(num / mean_n.powi(k as i32))
}

/// Poissonian reference P^cs_k = exp(-<n>) <n>^k / k! for a coherent state
/// of the same mean photon number.
pub fn poissonian_reference(mean_n: f64, k: usize) -> f64 {
    if mean_n == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    // ln-space for robustness at large k.
    let ln_fact: f64 = (1..=k).map(|j| (j as f64).ln()).sum();
    (-mean_n + k as f64 * mean_n.ln() - ln_fact).exp()
}

/// Compute the full correlation bundle for a state.
pub fn correlation_set(rho: &DensityMatrix) -> Result<CorrelationSet> {
    let (pn, clipped) = photon_distribution(rho);
    let mean_n = pn.iter().enumerate().map(|(n, p)| n as f64 * p).sum::<f64>();
    if mean_n < TAU_DIV {
        return Err(Error::EmptyCavity(mean_n));
    }
    let g = |k: usize| factorial_moment(&pn, k) / mean_n.powi(k as i32);
    Ok(CorrelationSet {
        mean_n,
        g2: g(2),
        g3: g(3),
        g4: g(4),
        pn,
        clipped,
    })
}
