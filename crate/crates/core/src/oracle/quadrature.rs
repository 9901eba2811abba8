//! Direct quadrature of the position-space integral representations.
//!
//! Each oracle integrates over `[-L, L]^2` with Gauss–Legendre rules of
//! doubling order, `L` being eight widths of the broadest Gaussian factor.

use crate::error::{Error, Result};
use crate::numerics::{hermite_poly, integrate_2d_adaptive};
use crate::oscillator::{imaginary_time_propagator, position_density_matrix, GaussianMoments, OscillatorParams};

/// Largest Fock index accepted by [`rho_nn_via_quadrature`].
pub const MAX_QUADRATURE_LEVEL: usize = 30;

const START_ORDER: usize = 32;
const MAX_ORDER: usize = 2048;
const AGREEMENT: f64 = 1e-11;

fn half_width(g: &GaussianMoments<f64>) -> f64 {
    // diagonal spread <q^2>, off-diagonal spread hbar / sqrt(<p^2>)
    8.0 * g.q2().sqrt().max(g.hbar() / g.p2().sqrt())
}

fn oscillator_width(p: &OscillatorParams<f64>) -> f64 {
    (p.hbar() / (p.mass() * p.omega())).sqrt()
}

fn require_oscillator(p: &OscillatorParams<f64>) -> Result<()> {
    if !(p.omega() > 0.0) {
        return Err(Error::domain("quadrature oracle needs omega > 0"));
    }
    Ok(())
}

/// `Z(chi) = int dq dq' <q|rho|q'> <q'|exp(-chi H_s)|q>`.
pub fn z_via_quadrature(p: &OscillatorParams<f64>, g: &GaussianMoments<f64>, chi: f64) -> Result<f64> {
    require_oscillator(p)?;
    if !(chi > 0.0) {
        return Err(Error::domain("quadrature of Z needs chi > 0"));
    }
    let l = half_width(g).max(8.0 * oscillator_width(p));
    let (v, _) = integrate_2d_adaptive(
        -l,
        l,
        |q, qp| {
            let k = imaginary_time_propagator(p, q, qp, chi).unwrap_or(0.0);
            position_density_matrix(g, q, qp) * k
        },
        START_ORDER,
        MAX_ORDER,
        AGREEMENT,
    )?;
    Ok(v)
}

/// Normalized Hermite function `psi_n(q)` of the isolated oscillator.
pub fn hermite_function(p: &OscillatorParams<f64>, n: usize, q: f64) -> f64 {
    let gamma = p.gamma();
    let u = gamma * q;
    // (gamma^2 / pi)^(1/4) / sqrt(2^n n!), in logs to stay finite
    let log_norm = 0.25 * (gamma * gamma / std::f64::consts::PI).ln()
        - 0.5 * (n as f64 * 2f64.ln() + (1..=n).map(|k| (k as f64).ln()).sum::<f64>());
    let h = hermite_poly(n, u);
    h.signum() * (log_norm + h.abs().ln() - 0.5 * u * u).exp()
}

/// `rho_nn = int dq dq' psi_n(q) <q|rho|q'> psi_n(q')`.
pub fn rho_nn_via_quadrature(p: &OscillatorParams<f64>, g: &GaussianMoments<f64>, n: usize) -> Result<f64> {
    require_oscillator(p)?;
    if n > MAX_QUADRATURE_LEVEL {
        return Err(Error::domain(format!(
            "Fock level {n} beyond the quadrature accuracy bound {MAX_QUADRATURE_LEVEL}"
        )));
    }
    let w = oscillator_width(p);
    let l = half_width(g).max(((2 * n + 1) as f64).sqrt() * w + 8.0 * w);
    let (v, _) = integrate_2d_adaptive(
        -l,
        l,
        |q, qp| hermite_function(p, n, q) * position_density_matrix(g, q, qp) * hermite_function(p, n, qp),
        START_ORDER,
        MAX_ORDER,
        AGREEMENT,
    )?;
    Ok(v)
}

/// `Tr rho^2 = int dq dq' <q|rho|q'> <q'|rho|q>`.
pub fn purity_via_quadrature(g: &GaussianMoments<f64>) -> Result<f64> {
    let l = half_width(g);
    let (v, _) = integrate_2d_adaptive(
        -l,
        l,
        |q, qp| position_density_matrix(g, q, qp) * position_density_matrix(g, qp, q),
        START_ORDER,
        MAX_ORDER,
        AGREEMENT,
    )?;
    Ok(v)
}
