//! Liouvillian construction for a driven cavity coupled to a squeezed
//! reservoir.
//!
//! The generator is
//!
//!   L rho = -i[H, rho]
//!           + (gamma/2) { (n+1) G1[a] + n G1[a^dag]
//!                         - M G2[a] - M* G2[a^dag] } rho
//!
//! with G1[x] rho = 2 x rho x^dag - x^dag x rho - rho x^dag x and
//! G2[x] rho = 2 x rho x - x x rho - rho x x. Setting M = 0 recovers the
//! standard thermal-bath master equation.
//!
//! Vectorization convention: rho is column-stacked, so A rho B maps to
//! (B^T (x) A) vec(rho) and entry rho[i, j] sits at index j*d + i.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{annihilation, creation, Operator};
use crate::linalg::CMat;

/// Drive and reservoir parameters, all rates in units of gamma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Detuning between cavity and drive.
    pub delta: f64,
    /// Drive strength, >= 0.
    pub epsilon: f64,
    /// Damping rate; sets the unit scale (default 1).
    pub gamma: f64,
    /// Reservoir mean photon number, >= 0.
    pub n_res: f64,
    /// Reservoir squeezing parameter, |M| <= sqrt(n(n+1)).
    pub m_res: Complex64,
}

impl SystemParams {
    /// Parameters with `gamma = 1`.
    pub fn new(delta: f64, epsilon: f64, n_res: f64, m_res: Complex64) -> Result<Self> {
        let p = Self {
            delta,
            epsilon,
            gamma: 1.0,
            n_res,
            m_res,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        self.gamma = gamma;
        self.validate()?;
        Ok(self)
    }

    /// Largest admissible |M| for a given reservoir occupation.
    pub fn max_m(n_res: f64) -> f64 {
        (n_res * (n_res + 1.0)).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta must be finite, got {}",
                self.delta
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be finite and nonnegative, got {}",
                self.epsilon
            )));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite and positive, got {}",
                self.gamma
            )));
        }
        if !(self.n_res.is_finite() && self.n_res >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "n_res must be finite and nonnegative, got {}",
                self.n_res
            )));
        }
        let bound = Self::max_m(self.n_res);
        let m_abs = self.m_res.norm();
        // Tiny slack so |M| = sqrt(n(n+1)) computed in floating point passes.
        if m_abs > bound * (1.0 + 1e-12) + 1e-300 {
            return Err(Error::ReservoirConstraint { m_abs, bound });
        }
        Ok(())
    }
}

/// Dense superoperator acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    mat: CMat,
}

impl Liouvillian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The d^2 x d^2 generator matrix.
    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    /// Apply the generator to a density-matrix-shaped operand.
    pub fn apply(&self, x: &CMat) -> CMat {
        let v = vectorize(x);
        unvectorize(&self.mat.dot(&v), self.dim)
    }
}

/// Column-stack an operator into a vector.
pub fn vectorize(x: &CMat) -> Array1<Complex64> {
    let d = x.nrows();
    Array1::from_shape_fn(d * d, |idx| x[[idx % d, idx / d]])
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &Array1<Complex64>, d: usize) -> CMat {
    Array2::from_shape_fn((d, d), |(i, j)| v[j * d + i])
}

/// Row functional representing Tr: entries 1 at the diagonal slots.
pub fn trace_row(d: usize) -> Array1<Complex64> {
    let mut t = Array1::zeros(d * d);
    for k in 0..d {
        t[k * d + k] = Complex64::new(1.0, 0.0);
    }
    t
}

/// H = Delta a^dag a + epsilon (a^dag + a).
pub fn hamiltonian(d: usize, params: &SystemParams) -> Result<Operator> {
    params.validate()?;
    let a = annihilation(d)?;
    let ad = creation(d)?;
    let n = ad.matrix().dot(a.matrix());
    let h = &n * Complex64::new(params.delta, 0.0)
        + (ad.matrix() + a.matrix()) * Complex64::new(params.epsilon, 0.0);
    Operator::new(h)
}

/// Add coeff * (B^T (x) A) to `l` in place, skipping zero entries of B.
fn add_sandwich(l: &mut CMat, a: &CMat, b: &CMat, coeff: Complex64) {
    let d = a.nrows();
    for r in 0..d {
        for p in 0..d {
            let brp = b[[r, p]];
            if brp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let w = coeff * brp;
            for q in 0..d {
                for s in 0..d {
                    let aqs = a[[q, s]];
                    if aqs != Complex64::new(0.0, 0.0) {
                        l[[p * d + q, r * d + s]] += w * aqs;
                    }
                }
            }
        }
    }
}

fn eye(d: usize) -> CMat {
    Array2::from_diag_elem(d, Complex64::new(1.0, 0.0))
}

/// Superoperator for G1[x] rho = 2 x rho x^dag - x^dag x rho - rho x^dag x.
pub fn dissipator_gamma1(x: &Operator) -> CMat {
    let d = x.dim();
    let xm = x.matrix();
    let xd = crate::linalg::dagger(xm);
    let xdx = xd.dot(xm);
    let id = eye(d);
    let mut l = Array2::zeros((d * d, d * d));
    add_sandwich(&mut l, xm, &xd, Complex64::new(2.0, 0.0));
    add_sandwich(&mut l, &xdx, &id, Complex64::new(-1.0, 0.0));
    add_sandwich(&mut l, &id, &xdx, Complex64::new(-1.0, 0.0));
    l
}

/// Superoperator for G2[x] rho = 2 x rho x - x x rho - rho x x.
pub fn dissipator_gamma2(x: &Operator) -> CMat {
    let d = x.dim();
    let xm = x.matrix();
    let xx = xm.dot(xm);
    let id = eye(d);
    let mut l = Array2::zeros((d * d, d * d));
    add_sandwich(&mut l, xm, xm, Complex64::new(2.0, 0.0));
    add_sandwich(&mut l, &xx, &id, Complex64::new(-1.0, 0.0));
    add_sandwich(&mut l, &id, &xx, Complex64::new(-1.0, 0.0));
    l
}

/// Assemble the full generator for the given Hamiltonian and reservoir.
///
/// Useful when the drive has been transformed (e.g. into the squeezed
/// frame) and no longer has the standard `Delta, epsilon` form.
pub fn liouvillian_from_hamiltonian(
    h: &Operator,
    gamma: f64,
    n_res: f64,
    m_res: Complex64,
) -> Result<Liouvillian> {
    let d = h.dim();
    if !(gamma.is_finite() && gamma > 0.0) || !(n_res.is_finite() && n_res >= 0.0) {
        return Err(Error::InvalidParameter(
            "gamma must be positive and n_res nonnegative".into(),
        ));
    }
    let bound = SystemParams::max_m(n_res);
    if m_res.norm() > bound * (1.0 + 1e-12) + 1e-300 {
        return Err(Error::ReservoirConstraint {
            m_abs: m_res.norm(),
            bound,
        });
    }

    let a = annihilation(d)?;
    let ad = creation(d)?;
    let id = eye(d);
    let mut l: CMat = Array2::zeros((d * d, d * d));

    // -i [H, rho]
    add_sandwich(&mut l, h.matrix(), &id, Complex64::new(0.0, -1.0));
    add_sandwich(&mut l, &id, h.matrix(), Complex64::new(0.0, 1.0));

    let half_gamma = 0.5 * gamma;
    l += &(dissipator_gamma1(&a) * Complex64::new(half_gamma * (n_res + 1.0), 0.0));
    if n_res > 0.0 {
        l += &(dissipator_gamma1(&ad) * Complex64::new(half_gamma * n_res, 0.0));
    }
    if m_res.norm() > 0.0 {
        l += &(dissipator_gamma2(&a) * (-Complex64::new(half_gamma, 0.0) * m_res));
        l += &(dissipator_gamma2(&ad) * (-Complex64::new(half_gamma, 0.0) * m_res.conj()));
    }
    Ok(Liouvillian { dim: d, mat: l })
}

/// Build the Liouvillian of the driven cavity in the squeezed reservoir.
pub fn build_liouvillian(d: usize, params: &SystemParams) -> Result<Liouvillian> {
    params.validate()?;
    let h = hamiltonian(d, params)?;
    liouvillian_from_hamiltonian(&h, params.gamma, params.n_res, params.m_res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{state_fock, Tolerances};
    use crate::linalg::max_abs;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hamiltonian_zero_params_is_zero() {
        let p = SystemParams::new(0.0, 0.0, 0.0, c(0.0, 0.0)).unwrap();
        let h = hamiltonian(6, &p).unwrap();
        assert_eq!(max_abs(h.matrix()), 0.0);
    }

    #[test]
    fn hamiltonian_pure_detuning_is_number_operator() {
        let p = SystemParams::new(1.0, 0.0, 0.0, c(0.0, 0.0)).unwrap();
        let h = hamiltonian(5, &p).unwrap();
        for k in 0..5 {
            assert_abs_diff_eq!(h.matrix()[[k, k]].re, k as f64, epsilon = 1e-15);
        }
    }

    #[test]
    fn drive_matrix_element() {
        // <1|H|0> = epsilon sqrt(1)
        let p = SystemParams::new(0.0, 0.07, 0.0, c(0.0, 0.0)).unwrap();
        let h = hamiltonian(4, &p).unwrap();
        assert_abs_diff_eq!(h.matrix()[[1, 0]].re, 0.07, epsilon = 1e-15);
    }

    #[test]
    fn reservoir_constraint_rejected() {
        let n = 0.1;
        let too_big = SystemParams::max_m(n) * 1.01;
        assert!(matches!(
            SystemParams::new(0.0, 0.0, n, c(too_big, 0.0)),
            Err(Error::ReservoirConstraint { .. })
        ));
        // The maximal value itself is accepted.
        assert!(SystemParams::new(0.0, 0.0, n, c(SystemParams::max_m(n), 0.0)).is_ok());
    }

    #[test]
    fn gamma1_on_vacuum_is_dark() {
        let d = 3;
        let a = annihilation(d).unwrap();
        let g1 = dissipator_gamma1(&a);
        let vac = state_fock(d, 0, &Tolerances::default()).unwrap();
        let out = unvectorize(&g1.dot(&vectorize(vac.matrix())), d);
        assert!(max_abs(&out) < 1e-15);
    }

    #[test]
    fn gamma1_single_photon_decay() {
        // G1[a] |1><1| = 2|0><0| - 2|1><1|
        let d = 3;
        let a = annihilation(d).unwrap();
        let g1 = dissipator_gamma1(&a);
        let one = state_fock(d, 1, &Tolerances::default()).unwrap();
        let out = unvectorize(&g1.dot(&vectorize(one.matrix())), d);
        assert_abs_diff_eq!(out[[0, 0]].re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out[[1, 1]].re, -2.0, epsilon = 1e-14);
        assert!(out[[2, 2]].norm() < 1e-14);
        assert!(out[[0, 1]].norm() < 1e-14);
    }

    #[test]
    fn gamma2_on_vacuum_is_dark() {
        let d = 3;
        let a = annihilation(d).unwrap();
        let g2 = dissipator_gamma2(&a);
        let vac = state_fock(d, 0, &Tolerances::default()).unwrap();
        let out = unvectorize(&g2.dot(&vectorize(vac.matrix())), d);
        assert!(max_abs(&out) < 1e-15);
    }

    #[test]
    fn gamma2_single_photon_hand_expansion() {
        // On |1><1|: a|1><1|a = 0, aa|1><1| = 0, |1><1|aa = 0 on a 3-level
        // space except the anomalous term 2 a rho a which maps |1><1| to
        // |0><... a|1> = |0>, <1|a = sqrt(2)<2|  => 2 a|1><1|a has entry
        // (0,?) ... expand: (2 a rho a)[i,j] = 2 a[i,1] rho[1,1] a[1,j]
        //   a[0,1] = 1, a[1,2] = sqrt(2) => entry (0,2) = 2*sqrt(2)*... wait
        //   (a rho a)[i,j] = sum a[i,k] rho[k,l] a[l,j] = a[i,1] a[1,j]
        //   a[1,j] nonzero at j=2 (sqrt 2) => entry (0,2) = sqrt(2).
        // aa|1><1|: (aa)[i,1] nonzero? aa maps |1> to 0 and |2> to
        // sqrt(2)*... (aa)[0,2] = sqrt(2): no column-1 support => 0.
        // |1><1|aa likewise 0. So G2[a]|1><1| = 2 sqrt(2) |0><2|.
        let d = 3;
        let a = annihilation(d).unwrap();
        let g2 = dissipator_gamma2(&a);
        let one = state_fock(d, 1, &Tolerances::default()).unwrap();
        let out = unvectorize(&g2.dot(&vectorize(one.matrix())), d);
        assert_abs_diff_eq!(out[[0, 2]].re, 2.0 * 2f64.sqrt(), epsilon = 1e-14);
        let mut rest = out.clone();
        rest[[0, 2]] = c(0.0, 0.0);
        assert!(max_abs(&rest) < 1e-14);
    }

    #[test]
    fn dissipators_are_traceless_maps() {
        let d = 5;
        let a = annihilation(d).unwrap();
        let tr = trace_row(d);
        for l in [dissipator_gamma1(&a), dissipator_gamma2(&a)] {
            let row = tr.dot(&l);
            assert!(row.iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn liouvillian_trace_preserving() {
        let p = SystemParams::new(0.3, 0.2, 0.05, c(0.02, 0.01)).unwrap();
        let l = build_liouvillian(8, &p).unwrap();
        let row = trace_row(8).dot(l.matrix());
        let worst = row.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(worst < 1e-10, "trace row norm {worst}");
    }

    #[test]
    fn m_zero_matches_thermal_construction() {
        // With M = 0 the generator must equal the standard thermal form
        // built directly from G1 pieces.
        let d = 6;
        let p = SystemParams::new(0.2, 0.1, 0.4, c(0.0, 0.0)).unwrap();
        let l = build_liouvillian(d, &p).unwrap();

        let a = annihilation(d).unwrap();
        let ad = creation(d).unwrap();
        let h = hamiltonian(d, &p).unwrap();
        let id = eye(d);
        let mut expect: CMat = Array2::zeros((d * d, d * d));
        add_sandwich(&mut expect, h.matrix(), &id, c(0.0, -1.0));
        add_sandwich(&mut expect, &id, h.matrix(), c(0.0, 1.0));
        expect += &(dissipator_gamma1(&a) * c(0.5 * (p.n_res + 1.0), 0.0));
        expect += &(dissipator_gamma1(&ad) * c(0.5 * p.n_res, 0.0));

        assert!(max_abs(&(l.matrix() - &expect)) < 1e-14);
    }
}
