//! Ohmic environment mapped onto oscillator shape variables.
//!
//! For an under-damped oscillator with dimensionless damping `alpha` (in
//! units of the oscillator frequency) and a high-frequency cutoff `omega_c`:
//!
//! ```text
//! x(alpha) = (1 - (2/pi) arctan(alpha / sqrt(1 - alpha^2))) / sqrt(1 - alpha^2)
//! y(alpha) = (1 - 2 alpha^2) x(alpha) + (4 alpha / pi) ln(omega_c / omega)
//! ```

use crate::error::{Error, Result};
use crate::oscillator::{fock_probabilities, ShapeParams};
use crate::scalar::Real;

/// Cutoff ratio `omega_c / omega` used when none is given.
pub const DEFAULT_CUTOFF_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhmicBathParams<T> {
    pub alpha: T,
    /// `omega_c / omega`.
    pub cutoff_ratio: T,
}

impl<T: Real> OhmicBathParams<T> {
    pub fn new(alpha: T, cutoff_ratio: T) -> Result<Self> {
        check_alpha(alpha)?;
        if !(cutoff_ratio > T::one()) || !cutoff_ratio.is_finite() {
            return Err(Error::domain(format!("cutoff ratio {cutoff_ratio} must exceed 1")));
        }
        Ok(Self { alpha, cutoff_ratio })
    }

    pub fn with_default_cutoff(alpha: T) -> Result<Self> {
        Self::new(alpha, T::lit(DEFAULT_CUTOFF_RATIO))
    }
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if !(alpha >= T::zero()) {
        return Err(Error::domain(format!("coupling alpha = {alpha} must be non-negative")));
    }
    if !(alpha < T::one()) {
        return Err(Error::domain(format!(
            "alpha = {alpha} is over-damped; only 0 <= alpha < 1 is supported"
        )));
    }
    Ok(())
}

/// `x(alpha) = 2 <q^2> m omega / hbar` for the ohmic bath.
pub fn ohmic_x<T: Real>(alpha: T) -> Result<T> {
    check_alpha(alpha)?;
    if alpha == T::zero() {
        return Ok(T::one());
    }
    // 1 - (2/pi) arctan(alpha/s) = (2/pi) arctan(s/alpha), which avoids the
    // cancellation as alpha -> 1.
    let s = (T::one() - alpha * alpha).sqrt();
    Ok(T::FRAC_2_PI() * (s / alpha).atan() / s)
}

/// `y(alpha) = 2 <p^2> / (m omega hbar)` for the ohmic bath.
pub fn ohmic_y<T: Real>(p: &OhmicBathParams<T>) -> Result<T> {
    let x = ohmic_x(p.alpha)?;
    let two = T::lit(2.0);
    Ok((T::one() - two * p.alpha * p.alpha) * x + two * two * p.alpha / T::PI() * p.cutoff_ratio.ln())
}

/// Shape of the oscillator state; violations of `xy >= 1` are reported with
/// the offending coupling.
pub fn ohmic_shape<T: Real>(p: &OhmicBathParams<T>, quantum: T) -> Result<ShapeParams<T>> {
    let x = ohmic_x(p.alpha)?;
    let y = ohmic_y(p)?;
    ShapeParams::from_xy(x, y, quantum).map_err(|e| {
        Error::domain(format!(
            "ohmic bath at alpha = {}, cutoff {}: {e}",
            p.alpha, p.cutoff_ratio
        ))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow<T> {
    pub alpha: T,
    pub x: T,
    pub y: T,
    pub purity: T,
    /// `rho_00 ..= rho_{n_max n_max}`.
    pub probs: Vec<T>,
    /// `1 - sum(probs)`.
    pub tail: T,
}

/// `steps` evenly spaced couplings from 0 to `alpha_max` inclusive.
pub fn alpha_grid<T: Real>(alpha_max: T, steps: usize, cutoff_ratio: T) -> Result<Vec<OhmicBathParams<T>>> {
    if steps == 0 {
        return Err(Error::domain("trajectory needs at least one step"));
    }
    if steps == 1 {
        return Ok(vec![OhmicBathParams::new(T::zero(), cutoff_ratio)?]);
    }
    (0..steps)
        .map(|i| {
            let alpha = alpha_max * T::from_count(i) / T::from_count(steps - 1);
            OhmicBathParams::new(alpha, cutoff_ratio)
        })
        .collect()
}

/// Oscillator state along a sweep of the coupling, in units `hbar omega = 1`.
pub fn ohmic_trajectory<T: Real>(grid: &[OhmicBathParams<T>], n_max: usize) -> Result<Vec<TrajectoryRow<T>>> {
    if let Some(first) = grid.first() {
        if grid.iter().any(|p| p.cutoff_ratio != first.cutoff_ratio) {
            return Err(Error::domain("trajectory grid must share one cutoff ratio"));
        }
        if grid.windows(2).any(|w| w[1].alpha < w[0].alpha) {
            return Err(Error::domain("trajectory grid must be sorted by alpha"));
        }
    }
    grid.iter()
        .map(|p| {
            let shape = ohmic_shape(p, T::one())?;
            let fock = fock_probabilities(&shape, n_max)?;
            Ok(TrajectoryRow {
                alpha: p.alpha,
                x: shape.x,
                y: shape.y,
                purity: shape.purity(),
                tail: fock.tail_bound,
                probs: fock.probs,
            })
        })
        .collect()
}
