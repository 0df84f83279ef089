//! Truncated-Fock-space operators and reference states.
//!
//! Operators act on the d-dimensional space spanned by |0>..|d-1>.
//! Displacement and squeezing are matrix exponentials of their truncated
//! generators, which makes them exactly unitary on the truncated space;
//! to keep truncation error *observable*, states are therefore assembled
//! on a padded dimension and projected down, so the reported trace loss
//! is the actual probability weight pushed past the cut.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::linalg::{self, CMat};

/// Validation tolerances for constructed states.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Hermiticity: max |rho - rho^dagger| entry.
    pub herm: f64,
    /// Positive semidefiniteness: allowed negative eigenvalue magnitude.
    pub psd: f64,
    /// Truncation budget on trace loss.
    pub trunc: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            psd: 1e-10,
            trunc: 1e-8,
        }
    }
}

/// Division guard on mean photon numbers.
pub const TAU_DIV: f64 = 1e-12;

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

/// A dense operator on the truncated Fock space.
#[derive(Debug, Clone)]
pub struct Operator {
    dim: usize,
    mat: CMat,
}

impl Operator {
    /// Wrap a matrix, checking squareness, dimension, and finiteness.
    pub fn new(mat: CMat) -> Result<Self> {
        let d = mat.nrows();
        check_dim(d)?;
        if mat.ncols() != d {
            return Err(Error::InvalidParameter(format!(
                "operator must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if !mat.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidParameter(
                "operator entries must be finite".into(),
            ));
        }
        Ok(Self { dim: d, mat })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }
}

/// A validated density matrix: Hermitian, unit trace, positive
/// semidefinite within tolerances. `trace_loss` records how much
/// probability was cut by truncation before renormalization.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dim: usize,
    mat: CMat,
    trace_loss: f64,
}

impl DensityMatrix {
    /// Validate and normalize a candidate density matrix.
    pub fn from_matrix(mat: CMat, tol: &Tolerances) -> Result<Self> {
        Self::from_matrix_with_loss(mat, 0.0, tol)
    }

    /// As [`from_matrix`](Self::from_matrix), recording a known trace loss
    /// from an earlier projection step.
    pub fn from_matrix_with_loss(mat: CMat, trace_loss: f64, tol: &Tolerances) -> Result<Self> {
        let d = mat.nrows();
        check_dim(d)?;
        let herm_err = linalg::max_abs(&(&mat - &linalg::dagger(&mat)));
        if herm_err > tol.herm {
            return Err(Error::NonHermitian(herm_err));
        }
        // Hermitize to scrub round-off before the eigenvalue check.
        let mut h = (&mat + &linalg::dagger(&mat)) * Complex64::new(0.5, 0.0);
        let tr: f64 = (0..d).map(|k| h[[k, k]].re).sum();
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace {tr} is not positive"
            )));
        }
        h.mapv_inplace(|z| z / tr);
        let min_ev = linalg::min_eigvalsh(&h)?;
        if min_ev < -tol.psd {
            return Err(Error::InvalidParameter(format!(
                "density matrix has negative eigenvalue {min_ev:.3e}"
            )));
        }
        Ok(Self {
            dim: d,
            mat: h,
            trace_loss,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn trace_loss(&self) -> f64 {
        self.trace_loss
    }

    /// <n> = sum_k k P_k.
    pub fn mean_photon_number(&self) -> f64 {
        (0..self.dim)
            .map(|k| k as f64 * self.mat[[k, k]].re)
            .sum()
    }

    /// Tr(rho^2).
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Diagonal in the Fock basis, unclipped.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|k| self.mat[[k, k]].re).collect()
    }
}

/// Parameters of a displaced squeezed thermal state (SCS when `n_th = 0`):
/// displacement alpha = alpha_mag * exp(i alpha_phase), squeezing
/// xi = sq_mag * exp(i sq_phase), thermal occupation n_th.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub alpha_mag: f64,
    pub alpha_phase: f64,
    pub sq_mag: f64,
    pub sq_phase: f64,
    pub n_th: f64,
}

impl GaussianParams {
    pub fn new(
        alpha_mag: f64,
        alpha_phase: f64,
        sq_mag: f64,
        sq_phase: f64,
        n_th: f64,
    ) -> Result<Self> {
        let p = Self {
            alpha_mag,
            alpha_phase: alpha_phase.rem_euclid(std::f64::consts::TAU),
            sq_mag,
            sq_phase: sq_phase.rem_euclid(std::f64::consts::TAU),
            n_th,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [
            ("alpha_mag", self.alpha_mag),
            ("sq_mag", self.sq_mag),
            ("n_th", self.n_th),
        ];
        for (name, v) in vals {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        if !self.alpha_phase.is_finite() || !self.sq_phase.is_finite() {
            return Err(Error::InvalidParameter("phases must be finite".into()));
        }
        Ok(())
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::from_polar(self.alpha_mag, self.alpha_phase)
    }

    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar(self.sq_mag, self.sq_phase)
    }
}

/// Annihilation operator: (m, m+1) entry sqrt(m+1).
pub fn annihilation(d: usize) -> Result<Operator> {
    check_dim(d)?;
    let mut a: CMat = Array2::zeros((d, d));
    for m in 0..d - 1 {
        a[[m, m + 1]] = Complex64::new(((m + 1) as f64).sqrt(), 0.0);
    }
    Operator::new(a)
}

/// Creation operator a^dagger.
pub fn creation(d: usize) -> Result<Operator> {
    Ok(Operator {
        dim: d,
        mat: linalg::dagger(annihilation(d)?.matrix()),
    })
}

/// Number operator a^dagger a = diag(0, 1, ..., d-1).
pub fn number_op(d: usize) -> Result<Operator> {
    check_dim(d)?;
    let mut n: CMat = Array2::zeros((d, d));
    for k in 0..d {
        n[[k, k]] = Complex64::new(k as f64, 0.0);
    }
    Operator::new(n)
}

/// True when the displacement fits comfortably inside the truncation.
pub fn displacement_budget_ok(d: usize, alpha: Complex64) -> bool {
    4.0 * alpha.norm_sqr() <= d as f64
}

/// True when the squeezing fits comfortably inside the truncation.
pub fn squeeze_budget_ok(d: usize, xi: Complex64) -> bool {
    6.0 * xi.norm().sinh().powi(2) <= d as f64
}

/// Displacement operator D(alpha) = exp(alpha a^dagger - alpha* a).
pub fn displacement(d: usize, alpha: Complex64) -> Result<Operator> {
    check_dim(d)?;
    let a = annihilation(d)?;
    let ad = linalg::dagger(a.matrix());
    let gen = &ad * alpha - a.matrix() * alpha.conj();
    Operator::new(expm(&gen))
}

/// Squeezing operator S(xi) = exp[(xi* a^2 - xi a^dagger^2)/2].
pub fn squeeze(d: usize, xi: Complex64) -> Result<Operator> {
    check_dim(d)?;
    let a = annihilation(d)?;
    let a2 = a.matrix().dot(a.matrix());
    let ad2 = linalg::dagger(&a2);
    let gen = (&a2 * xi.conj() - &ad2 * xi) * Complex64::new(0.5, 0.0);
    Operator::new(expm(&gen))
}

/// Fock state projector |n><n|.
pub fn state_fock(d: usize, n: usize, tol: &Tolerances) -> Result<DensityMatrix> {
    check_dim(d)?;
    if n >= d {
        return Err(Error::InvalidParameter(format!(
            "Fock level {n} outside dimension {d}"
        )));
    }
    let mut m: CMat = Array2::zeros((d, d));
    m[[n, n]] = Complex64::new(1.0, 0.0);
    DensityMatrix::from_matrix(m, tol)
}

/// Coherent state |alpha><alpha| on the truncated space.
pub fn state_coherent(d: usize, alpha: Complex64, tol: &Tolerances) -> Result<DensityMatrix> {
    let p = GaussianParams::new(alpha.norm(), alpha.arg(), 0.0, 0.0, 0.0)?;
    state_scs(d, &p, tol)
}

fn thermal_diagonal(d: usize, n_th: f64) -> Array1<f64> {
    let mut p = Array1::zeros(d);
    if n_th <= 0.0 {
        p[0] = 1.0;
        return p;
    }
    let ratio = n_th / (1.0 + n_th);
    let mut w = 1.0 / (1.0 + n_th);
    for k in 0..d {
        p[k] = w;
        w *= ratio;
    }
    p
}

/// Thermal state with geometric photon-number distribution
/// P_k = n_th^k / (1 + n_th)^(k+1), truncated and renormalized.
pub fn state_thermal(d: usize, n_th: f64, tol: &Tolerances) -> Result<DensityMatrix> {
    check_dim(d)?;
    if !(n_th.is_finite() && n_th >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "n_th must be finite and nonnegative, got {n_th}"
        )));
    }
    let p = thermal_diagonal(d, n_th);
    let loss = 1.0 - p.sum();
    if loss > tol.trunc {
        return Err(Error::TruncationBudget {
            dim: d,
            loss,
            budget: tol.trunc,
        });
    }
    let mut m: CMat = Array2::zeros((d, d));
    for k in 0..d {
        m[[k, k]] = Complex64::new(p[k], 0.0);
    }
    DensityMatrix::from_matrix_with_loss(m, loss.max(0.0), tol)
}

/// Build D(alpha) S(xi) rho_th S^dagger D^dagger on a padded dimension and
/// project to `d`, so the returned trace loss is real tail weight.
fn build_displaced_squeezed(
    d: usize,
    params: &GaussianParams,
    tol: &Tolerances,
) -> Result<(CMat, f64)> {
    check_dim(d)?;
    params.validate()?;
    let pad = (d / 4).max(8);
    let big = d + pad;
    let disp = displacement(big, params.alpha())?;
    let sq = squeeze(big, params.xi())?;
    let u = disp.matrix().dot(sq.matrix());

    // rho = U rho_th U^dagger, with rho_th diagonal.
    let pth = thermal_diagonal(big, params.n_th);
    let mut scaled = u.clone();
    for (k, col) in scaled.columns_mut().into_iter().enumerate() {
        let w = Complex64::new(pth[k], 0.0);
        let mut col = col;
        col.mapv_inplace(|z| z * w);
    }
    let rho_big = scaled.dot(&linalg::dagger(&u));

    let block = rho_big.slice(ndarray::s![0..d, 0..d]).to_owned();
    let tr: f64 = (0..d).map(|k| block[[k, k]].re).sum();
    // Includes the thermal tail beyond the padded dimension.
    let loss = (1.0 - tr).max(0.0);
    if loss > tol.trunc {
        return Err(Error::TruncationBudget {
            dim: d,
            loss,
            budget: tol.trunc,
        });
    }
    Ok((block, loss))
}

/// Squeezed coherent state D(alpha) S(xi) |0><0| S^dagger D^dagger.
///
/// Requires `n_th = 0`; use [`state_dsts`] for thermal occupation.
pub fn state_scs(d: usize, params: &GaussianParams, tol: &Tolerances) -> Result<DensityMatrix> {
    if params.n_th != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "state_scs requires n_th = 0, got {}",
            params.n_th
        )));
    }
    state_dsts(d, params, tol)
}

/// Displaced squeezed thermal state
/// D(alpha) S(xi) rho_th(n_th) S^dagger(xi) D^dagger(alpha),
/// renormalized to unit trace with the trace loss recorded.
pub fn state_dsts(d: usize, params: &GaussianParams, tol: &Tolerances) -> Result<DensityMatrix> {
    let (block, loss) = build_displaced_squeezed(d, params, tol)?;
    DensityMatrix::from_matrix_with_loss(block, loss, tol)
}

/// Mean photon number of the DSTS:
/// abar^2 + [(1 + 2 n_th) cosh(2r) - 1] / 2.
pub fn dsts_mean_n_estimate(params: &GaussianParams) -> f64 {
    params.alpha_mag.powi(2)
        + 0.5 * ((1.0 + 2.0 * params.n_th) * (2.0 * params.sq_mag).cosh() - 1.0)
}

/// Default adaptive truncation rule: d = max(16, ceil(8 (<n>_est + 1))).
pub fn adaptive_dim(params: &GaussianParams) -> usize {
    let n_est = dsts_mean_n_estimate(params);
    16usize.max((8.0 * (n_est + 1.0)).ceil() as usize)
}

/// Construct a DSTS at a dimension large enough that the projected tail
/// perturbs factorial moments up to `order` by less than `tol` (relative to
/// <n>^order). Doubles the dimension until the weighted tail estimate is
/// inside budget; errors out past `max_dim`.
pub fn state_dsts_converged(
    params: &GaussianParams,
    order: usize,
    tol: f64,
    max_dim: usize,
) -> Result<(DensityMatrix, usize)> {
    let mut d = adaptive_dim(params);
    let nbar = dsts_mean_n_estimate(params).max(1.0);
    loop {
        let pad = (d / 4).max(8);
        let big = d + pad;
        let relaxed = Tolerances {
            trunc: f64::INFINITY,
            ..Tolerances::default()
        };
        let (block, loss) = build_displaced_squeezed(d, params, &relaxed)?;
        // Weighted tail estimate from the padded build: the worst moment
        // error is bounded by the cut weight times the top factorial power.
        let mut weighted = 0.0f64;
        {
            // Reconstruct the padded diagonal to weight the cut band.
            let disp = displacement(big, params.alpha())?;
            let sq = squeeze(big, params.xi())?;
            let u = disp.matrix().dot(sq.matrix());
            let pth = thermal_diagonal(big, params.n_th);
            for k in d..big {
                let pk: f64 = (0..big).map(|m| u[[k, m]].norm_sqr() * pth[m]).sum();
                let mut w = 1.0f64;
                for j in 0..order {
                    w *= (k - j) as f64;
                }
                weighted += pk * w;
            }
        }
        let moment_err = weighted / nbar.powi(order as i32);
        if loss <= Tolerances::default().trunc && moment_err <= tol {
            let rho = DensityMatrix::from_matrix_with_loss(block, loss, &Tolerances::default())?;
            return Ok((rho, d));
        }
        d *= 2;
        if d > max_dim {
            return Err(Error::TruncationBudget {
                dim: d,
                loss,
                budget: tol,
            });
        }
    }
}
