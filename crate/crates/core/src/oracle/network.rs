//! Ground-state second moments of quadratic oscillator networks.
//!
//! `H = p^T M^{-1} p / 2 + u^T K u / 2`. With `M = L L^T` and
//! `W = L^{-1} K L^{-T} = U diag(w^2) U^T`, the ground state has
//! `<u u^T> = (hbar/2) L^{-T} U w^{-1} U^T L^{-1}` and
//! `<p p^T> = (hbar/2) L U w U^T L^T`.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::oscillator::GaussianMoments;

#[derive(Debug, Clone, PartialEq)]
pub struct NormalModeNetwork {
    mass_matrix: DMatrix<f64>,
    stiffness_matrix: DMatrix<f64>,
    subsystem_index: usize,
    hbar: f64,
}

const SYMMETRY_TOL: f64 = 1e-12;

impl NormalModeNetwork {
    pub fn new(mass_matrix: DMatrix<f64>, stiffness_matrix: DMatrix<f64>, subsystem_index: usize) -> Result<Self> {
        Self::with_hbar(mass_matrix, stiffness_matrix, subsystem_index, 1.0)
    }

    pub fn with_hbar(
        mass_matrix: DMatrix<f64>,
        stiffness_matrix: DMatrix<f64>,
        subsystem_index: usize,
        hbar: f64,
    ) -> Result<Self> {
        let n = mass_matrix.nrows();
        if !mass_matrix.is_square() || stiffness_matrix.shape() != (n, n) || n == 0 {
            return Err(Error::domain(
                "mass and stiffness must be square matrices of equal size",
            ));
        }
        if subsystem_index >= n {
            return Err(Error::domain(format!(
                "subsystem index {subsystem_index} out of range for {n} sites"
            )));
        }
        if !(hbar > 0.0) {
            return Err(Error::domain("hbar must be positive"));
        }
        for (name, m) in [("mass", &mass_matrix), ("stiffness", &stiffness_matrix)] {
            let asym = (m - m.transpose()).amax();
            if !(asym <= SYMMETRY_TOL * m.amax().max(1.0)) {
                return Err(Error::domain(format!(
                    "{name} matrix not symmetric (deviation {asym:e})"
                )));
            }
        }
        if Cholesky::new(mass_matrix.clone()).is_none() {
            return Err(Error::domain("mass matrix is not positive definite"));
        }
        Ok(Self {
            mass_matrix,
            stiffness_matrix,
            subsystem_index,
            hbar,
        })
    }

    /// Identical unit masses.
    pub fn unit_mass(stiffness_matrix: DMatrix<f64>, subsystem_index: usize) -> Result<Self> {
        let n = stiffness_matrix.nrows();
        Self::new(DMatrix::identity(n, n), stiffness_matrix, subsystem_index)
    }

    pub fn sites(&self) -> usize {
        self.mass_matrix.nrows()
    }

    pub fn mass_matrix(&self) -> &DMatrix<f64> {
        &self.mass_matrix
    }

    pub fn stiffness_matrix(&self) -> &DMatrix<f64> {
        &self.stiffness_matrix
    }

    pub fn subsystem_index(&self) -> usize {
        self.subsystem_index
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
}

/// Exact `<q_0^2>` and `<p_0^2>` of the selected site in the network ground state.
pub fn network_ground_covariances(net: &NormalModeNetwork) -> Result<GaussianMoments<f64>> {
    let l = Cholesky::new(net.mass_matrix.clone())
        .ok_or_else(|| Error::domain("mass matrix is not positive definite"))?
        .l();
    let n = net.sites();
    let l_inv = l
        .clone()
        .solve_lower_triangular(&DMatrix::identity(n, n))
        .ok_or_else(|| Error::domain("singular mass factor"))?;
    let mut w = &l_inv * &net.stiffness_matrix * l_inv.transpose();
    w = (&w + w.transpose()) * 0.5;
    let eig = SymmetricEigen::new(w);
    let scale = eig.eigenvalues.amax().max(f64::MIN_POSITIVE);
    if let Some(min) = eig.eigenvalues.iter().copied().reduce(f64::min) {
        if min <= 1e-12 * scale {
            return Err(Error::domain(format!(
                "normal mode with squared frequency {min:e} has no ground state"
            )));
        }
    }
    let freqs: Vec<f64> = eig.eigenvalues.iter().map(|v| v.sqrt()).collect();
    let i = net.subsystem_index;
    // row i of L^{-T} U and of L U
    let a = l_inv.transpose() * &eig.eigenvectors;
    let b = &l * &eig.eigenvectors;
    let half = 0.5 * net.hbar;
    let q2 = half * (0..n).map(|k| a[(i, k)].powi(2) / freqs[k]).sum::<f64>();
    let p2 = half * (0..n).map(|k| b[(i, k)].powi(2) * freqs[k]).sum::<f64>();
    GaussianMoments::with_hbar(q2, p2, net.hbar)
}

/// Oscillator of unit mass and frequency `omega0` coupled to `modes` bath
/// oscillators on a uniform grid in `(0, cutoff_ratio * omega0]`, with
/// ohmic couplings `c_k^2 = (2/pi) w_k J(w_k) dw`, `J(w) = 2 alpha omega0 w`,
/// and the counter-term that keeps the bare frequency `omega0`:
///
/// `V = omega0^2 q^2 / 2 + sum_k w_k^2 (q_k - c_k q / w_k^2)^2 / 2`.
///
/// Site 0 is the oscillator.
pub fn ohmic_network(alpha: f64, cutoff_ratio: f64, modes: usize, omega0: f64) -> Result<NormalModeNetwork> {
    if !(alpha >= 0.0) || !(cutoff_ratio > 0.0) || !(omega0 > 0.0) || modes == 0 {
        return Err(Error::domain(
            "ohmic network needs alpha >= 0, positive cutoff and frequency, and modes > 0",
        ));
    }
    let n = modes + 1;
    let dw = cutoff_ratio * omega0 / modes as f64;
    let mut k = DMatrix::zeros(n, n);
    k[(0, 0)] = omega0 * omega0;
    for j in 1..n {
        let w = dw * j as f64;
        let c = (2.0 / std::f64::consts::PI * w * 2.0 * alpha * omega0 * w * dw).sqrt();
        k[(j, j)] = w * w;
        k[(0, j)] = -c;
        k[(j, 0)] = -c;
        k[(0, 0)] += c * c / (w * w);
    }
    NormalModeNetwork::unit_mass(k, 0)
}
