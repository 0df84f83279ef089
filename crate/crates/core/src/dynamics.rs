//! Steady states and time propagation of the Liouvillian.

use ndarray::Array1;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{number_op, DensityMatrix, Tolerances, TAU_DIV};
use crate::linalg::{self, CMat};
use crate::master::{trace_row, unvectorize, vectorize, Liouvillian};

/// Residual tolerance for an accepted steady-state solution.
pub const TAU_SS: f64 = 1e-10;

/// Ratio separating the two smallest singular values of L below which the
/// null space is flagged as degenerate.
pub const DEGENERACY_RATIO: f64 = 1e6;

/// Steady-state solution with quality metrics.
#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    pub rho: DensityMatrix,
    /// ||L vec(rho)||_2 for the returned state.
    pub residual: f64,
    /// Population in the top two Fock levels; the truncation quality metric.
    pub trace_loss: f64,
}

fn tail_population(rho: &DensityMatrix) -> f64 {
    let d = rho.dim();
    let diag = rho.diagonal();
    diag[d - 1].max(0.0) + diag[d - 2].max(0.0)
}

/// Solve L vec(rho) = 0 with Tr rho = 1.
///
/// One row of L is replaced by the trace functional and the square system
/// solved by dense LU. If the residual is not small enough, falls back to
/// extracting the smallest-singular-vector of L via the eigendecomposition
/// of L^dagger L, which also exposes null-space degeneracy.
pub fn steady_state(l: &Liouvillian) -> Result<SteadyStateResult> {
    steady_state_with(l, &Tolerances::default())
}

pub fn steady_state_with(l: &Liouvillian, tol: &Tolerances) -> Result<SteadyStateResult> {
    let d = l.dim();
    let n2 = d * d;
    let mut a = l.matrix().clone();
    let tr = trace_row(d);
    for j in 0..n2 {
        a[[0, j]] = tr[j];
    }
    let mut b = Array1::<Complex64>::zeros(n2);
    b[0] = Complex64::new(1.0, 0.0);

    let finish = |v: &Array1<Complex64>| -> Result<SteadyStateResult> {
        let residual = {
            let lv = l.matrix().dot(v);
            lv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
        };
        let rho = DensityMatrix::from_matrix(unvectorize(v, d), tol)?;
        let trace_loss = tail_population(&rho);
        Ok(SteadyStateResult {
            rho,
            residual,
            trace_loss,
        })
    };

    if let Ok(v) = linalg::solve_vec(&a, &b) {
        // Normalize the trace before measuring the residual.
        let t: Complex64 = (0..d).map(|k| v[k * d + k]).sum();
        if t.norm() > TAU_DIV {
            let v = v.mapv(|z| z / t);
            let out = finish(&v)?;
            if out.residual < TAU_SS {
                return Ok(out);
            }
        }
    }

    // Fallback: smallest singular vector of L.
    let lh = linalg::dagger(l.matrix()).dot(l.matrix());
    let (vals, vecs) = linalg::eigh(&lh)?;
    if vals[1].max(0.0).sqrt() < DEGENERACY_RATIO * vals[0].max(0.0).sqrt() {
        return Err(Error::DegenerateSteadyState(format!(
            "two smallest singular values {:.3e}, {:.3e} are not separated",
            vals[0].max(0.0).sqrt(),
            vals[1].max(0.0).sqrt()
        )));
    }
    let v0 = vecs.column(0).to_owned();
    let t: Complex64 = (0..d).map(|k| v0[k * d + k]).sum();
    if t.norm() < TAU_DIV {
        return Err(Error::DegenerateSteadyState(
            "null vector has vanishing trace".into(),
        ));
    }
    let v0 = v0.mapv(|z| z / t);
    let out = finish(&v0)?;
    if out.residual >= TAU_SS {
        return Err(Error::NonConvergence(out.residual));
    }
    Ok(out)
}

/// Diagnostic: the two smallest singular values of L. A unique steady state
/// has s0 ~ 0 and s1 separated by many orders of magnitude.
pub fn null_space_gap(l: &Liouvillian) -> Result<(f64, f64)> {
    linalg::smallest_two_singular_values(l.matrix())
}

/// Propagate an operator under exp(L tau).
///
/// Dense matrix exponential for moderate dimensions; classical RK4 fallback
/// for superoperators too large to exponentiate.
pub fn propagate(l: &Liouvillian, x0: &CMat, tau: f64) -> Result<CMat> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "propagation time must be finite and nonnegative, got {tau}"
        )));
    }
    if tau == 0.0 {
        return Ok(x0.clone());
    }
    let d = l.dim();
    if d * d <= 2500 {
        let e = crate::expm::expm(&(l.matrix() * Complex64::new(tau, 0.0)));
        Ok(unvectorize(&e.dot(&vectorize(x0)), d))
    } else {
        rk4_propagate(l, x0, tau)
    }
}

fn rk4_propagate(l: &Liouvillian, x0: &CMat, tau: f64) -> Result<CMat> {
    let d = l.dim();
    // Step bounded by the generator's scale.
    let norm = linalg::max_abs(l.matrix()) * (d as f64);
    let h_max = (0.1 / norm.max(1.0)).min(0.05);
    let steps = (tau / h_max).ceil().max(1.0) as usize;
    let h = Complex64::new(tau / steps as f64, 0.0);
    let m = l.matrix();
    let mut v = vectorize(x0);
    for _ in 0..steps {
        let k1 = m.dot(&v);
        let k2 = m.dot(&(&v + &(&k1 * (h * 0.5))));
        let k3 = m.dot(&(&v + &(&k2 * (h * 0.5))));
        let k4 = m.dot(&(&v + &(&k3 * h)));
        v = &v + &((k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0));
        if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::PropagationFailure(format!(
                "RK4 diverged with step {}",
                h.re
            )));
        }
    }
    Ok(unvectorize(&v, d))
}

/// Precomputed single-step propagator for walking a uniform time grid.
pub struct Propagator {
    dim: usize,
    step: CMat,
}

impl Propagator {
    pub fn new(l: &Liouvillian, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "propagator step must be positive, got {dt}"
            )));
        }
        Ok(Self {
            dim: l.dim(),
            step: crate::expm::expm(&(l.matrix() * Complex64::new(dt, 0.0))),
        })
    }

    pub fn advance(&self, v: &Array1<Complex64>) -> Array1<Complex64> {
        self.step.dot(v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Default delay grid: 200 points, tau_max = 8 / gamma.
pub fn default_tau_grid() -> Vec<f64> {
    let n = 200;
    let tau_max = 8.0;
    (0..n).map(|i| tau_max * i as f64 / (n - 1) as f64).collect()
}

/// Two-time correlation g2(tau) on a uniform nonnegative grid via the
/// quantum regression theorem:
///
///   g2(tau) = Tr[ n_hat exp(L tau) (a rho_ss a^dag) ] / <n>^2.
pub fn g2_tau(l: &Liouvillian, rho_ss: &DensityMatrix, tau_grid: &[f64]) -> Result<Vec<f64>> {
    let d = l.dim();
    if tau_grid.is_empty() {
        return Err(Error::InvalidParameter("empty tau grid".into()));
    }
    for w in tau_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidParameter(
                "tau grid must be strictly increasing".into(),
            ));
        }
    }
    if tau_grid[0] < 0.0 {
        return Err(Error::InvalidParameter("tau grid must be nonnegative".into()));
    }

    let nbar = rho_ss.mean_photon_number();
    if nbar < TAU_DIV {
        return Err(Error::EmptyCavity(nbar));
    }

    let a = crate::fock::annihilation(d)?;
    let ad = linalg::dagger(a.matrix());
    let nop = number_op(d)?;
    let x0 = a.matrix().dot(rho_ss.matrix()).dot(&ad);

    // Uniform grids walk a single precomputed step; otherwise exponentiate
    // each distinct increment.
    let uniform = tau_grid.len() > 2 && {
        let dt = tau_grid[1] - tau_grid[0];
        tau_grid
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() < 1e-12 * dt.max(1.0))
    };

    let expect_n = |v: &Array1<Complex64>| -> f64 {
        let x = unvectorize(v, d);
        (0..d).map(|k| (nop.matrix()[[k, k]] * x[[k, k]]).re).sum()
    };

    let mut out = Vec::with_capacity(tau_grid.len());
    let mut v = vectorize(&x0);
    if uniform && tau_grid[0] == 0.0 {
        let step = Propagator::new(l, tau_grid[1] - tau_grid[0])?;
        for (i, _) in tau_grid.iter().enumerate() {
            out.push(expect_n(&v) / (nbar * nbar));
            if i + 1 < tau_grid.len() {
                v = step.advance(&v);
            }
        }
    } else {
        let mut t_prev = 0.0;
        for &t in tau_grid {
            let dt = t - t_prev;
            if dt > 0.0 {
                let e = crate::expm::expm(&(l.matrix() * Complex64::new(dt, 0.0)));
                v = e.dot(&v);
            }
            t_prev = t;
            out.push(expect_n(&v) / (nbar * nbar));
        }
    }
    Ok(out)
}
