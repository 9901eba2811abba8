//! Gaussian-state energetics of a harmonic oscillator.
//!
//! A linearly coupled oscillator in the global ground state has a Gaussian
//! reduced density matrix fixed by `<q^2>` and `<p^2>` (with `<q> = <p> = 0`
//! and `<qp + pq> = 0`). Everything here is a function of those two moments,
//! usually through the dimensionless shape variables
//!
//! ```text
//! x = 2 gamma^2 <q^2>,  y = 2 <p^2> / (gamma^2 hbar^2),  gamma^2 = m omega / hbar
//! D = (1 + x)(1 + y),   a = (y - x) / D,   b = (xy - 1) / D
//! E = (x + y) hbar omega / 4,   A = <q^2><p^2> / hbar^2 = xy / 4
//! ```
//!
//! `a` measures the departure from equipartition and `b` the excess area of
//! the uncertainty ellipse. The isolated ground state has `x = y = 1`,
//! `a = b = 0`, `A = 1/4`.

mod fock;
mod generating;

pub use fock::{
    density_matrix_eigenvalues, fock_probabilities, fock_probabilities_for_moments, fock_probabilities_to_tolerance,
    fock_probabilities_unchecked, fock_ratios, truncation_for_tolerance, FockDistribution, SpectralTransformVars,
    MAX_FOCK_TRUNCATION,
};
pub use generating::{
    cumulants_closed_form, cumulants_finite_difference, generating_function, generating_function_free,
    imaginary_time_propagator, position_density_matrix, wick_moment, EnergyCumulants,
};

use crate::error::{Error, Result};
use crate::scalar::Real;

fn slack<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(16.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams<T> {
    mass: T,
    omega: T,
    hbar: T,
}

impl<T: Real> OscillatorParams<T> {
    /// Oscillator with `hbar = 1`.
    pub fn new(mass: T, omega: T) -> Result<Self> {
        Self::with_hbar(mass, omega, T::one())
    }

    /// `omega = 0` is admitted for the free-particle limit only; Fock-basis
    /// quantities need `omega > 0`.
    pub fn with_hbar(mass: T, omega: T, hbar: T) -> Result<Self> {
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(Error::domain("mass must be positive"));
        }
        if !(omega >= T::zero()) || !omega.is_finite() {
            return Err(Error::domain("omega must be non-negative"));
        }
        if !(hbar > T::zero()) {
            return Err(Error::domain("hbar must be positive"));
        }
        Ok(Self { mass, omega, hbar })
    }

    /// Unit mass, frequency and `hbar`.
    pub fn unit() -> Self {
        Self {
            mass: T::one(),
            omega: T::one(),
            hbar: T::one(),
        }
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    /// Inverse oscillator length, `sqrt(m omega / hbar)`.
    pub fn gamma(&self) -> T {
        (self.mass * self.omega / self.hbar).sqrt()
    }

    /// Level spacing `hbar omega`.
    pub fn quantum(&self) -> T {
        self.hbar * self.omega
    }

    /// `E_n = (n + 1/2) hbar omega`.
    pub fn level_energy(&self, n: usize) -> T {
        (T::from_count(n) + T::lit(0.5)) * self.quantum()
    }

    pub(crate) fn require_bound(&self) -> Result<()> {
        if self.omega > T::zero() {
            Ok(())
        } else {
            Err(Error::domain("operation requires omega > 0"))
        }
    }
}

/// Second moments of a centred Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMoments<T> {
    q2: T,
    p2: T,
    hbar: T,
}

impl<T: Real> GaussianMoments<T> {
    /// Moments with `hbar = 1`.
    pub fn new(q2: T, p2: T) -> Result<Self> {
        Self::with_hbar(q2, p2, T::one())
    }

    /// Rejects states violating `<q^2><p^2> >= hbar^2 / 4`.
    pub fn with_hbar(q2: T, p2: T, hbar: T) -> Result<Self> {
        let g = Self::unchecked(q2, p2, hbar);
        if !(q2 > T::zero() && p2 > T::zero()) || !(q2 * p2).is_finite() {
            return Err(Error::domain("second moments must be positive and finite"));
        }
        if !(hbar > T::zero()) {
            return Err(Error::domain("hbar must be positive"));
        }
        let bound = T::lit(0.25) * hbar * hbar;
        if q2 * p2 < bound * (T::one() - slack::<T>()) {
            return Err(Error::domain(format!(
                "uncertainty violated: <q^2><p^2> = {} < hbar^2/4 = {bound}",
                q2 * p2
            )));
        }
        Ok(g)
    }

    /// No validation; for demonstrating what unphysical moments produce.
    pub fn unchecked(q2: T, p2: T, hbar: T) -> Self {
        Self { q2, p2, hbar }
    }

    pub fn q2(&self) -> T {
        self.q2
    }

    pub fn p2(&self) -> T {
        self.p2
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }
}

/// Dimensionless description of a Gaussian oscillator state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeParams<T> {
    pub x: T,
    pub y: T,
    /// `(1 + x)(1 + y)`.
    pub d: T,
    /// Equipartition deviation, `(y - x) / D`.
    pub a: T,
    /// Uncertainty-area deviation, `(xy - 1) / D`.
    pub b: T,
    /// Mean energy `E = (x + y) hbar omega / 4`.
    pub energy: T,
    /// `A = <q^2><p^2> / hbar^2 = xy / 4`.
    pub area: T,
    /// Level spacing `hbar omega`.
    pub quantum: T,
}

impl<T: Real> ShapeParams<T> {
    /// Shape with level spacing `quantum`, rejecting `xy < 1`.
    pub fn from_xy(x: T, y: T, quantum: T) -> Result<Self> {
        if !(x > T::zero() && y > T::zero()) || !(x * y).is_finite() {
            return Err(Error::domain("x and y must be positive and finite"));
        }
        if !(quantum >= T::zero()) || !quantum.is_finite() {
            return Err(Error::domain("level spacing must be non-negative"));
        }
        if x * y < T::one() - slack::<T>() {
            return Err(Error::domain(format!("uncertainty violated: xy = {} < 1", x * y)));
        }
        Ok(Self::from_xy_unchecked(x, y, quantum))
    }

    /// No validation.
    pub fn from_xy_unchecked(x: T, y: T, quantum: T) -> Self {
        let d = (T::one() + x) * (T::one() + y);
        Self {
            x,
            y,
            d,
            a: (y - x) / d,
            b: (x * y - T::one()) / d,
            energy: (x + y) * quantum * T::lit(0.25),
            area: x * y * T::lit(0.25),
            quantum,
        }
    }

    /// Ground state of the isolated oscillator.
    pub fn isolated(quantum: T) -> Self {
        Self::from_xy_unchecked(T::one(), T::one(), quantum)
    }

    /// `Tr rho^2 = 1 / sqrt(xy)`.
    pub fn purity(&self) -> T {
        T::one() / (self.x * self.y).sqrt()
    }
}

/// Shape variables of a Gaussian state of the oscillator `p`.
pub fn moments_to_shape<T: Real>(p: &OscillatorParams<T>, g: &GaussianMoments<T>) -> Result<ShapeParams<T>> {
    let g = GaussianMoments::with_hbar(g.q2, g.p2, p.hbar)?;
    let quantum = p.quantum();
    if p.omega == T::zero() {
        // Free particle: x vanishes, keep E and A.
        let mut s = ShapeParams::from_xy_unchecked(T::zero(), T::zero(), T::zero());
        s.energy = g.p2 / (T::lit(2.0) * p.mass);
        s.area = g.q2 * g.p2 / (p.hbar * p.hbar);
        return Ok(s);
    }
    let gamma2 = p.mass * p.omega / p.hbar;
    let x = T::lit(2.0) * gamma2 * g.q2;
    let y = T::lit(2.0) * g.p2 / (gamma2 * p.hbar * p.hbar);
    let mut s = ShapeParams::from_xy(x, y, quantum)?;
    // Same values, computed from the moments directly.
    s.energy = T::lit(0.5) * (p.mass * p.omega * p.omega * g.q2 + g.p2 / p.mass);
    s.area = g.q2 * g.p2 / (p.hbar * p.hbar);
    Ok(s)
}

/// Inverse of [`moments_to_shape`].
pub fn shape_to_moments<T: Real>(p: &OscillatorParams<T>, s: &ShapeParams<T>) -> Result<GaussianMoments<T>> {
    p.require_bound()?;
    let gamma2 = p.mass * p.omega / p.hbar;
    let q2 = s.x / (T::lit(2.0) * gamma2);
    let p2 = s.y * gamma2 * p.hbar * p.hbar * T::lit(0.5);
    GaussianMoments::with_hbar(q2, p2, p.hbar)
}

/// `Tr rho^2 = (hbar/2) / sqrt(<q^2><p^2>)`.
pub fn purity<T: Real>(g: &GaussianMoments<T>) -> Result<T> {
    let g = GaussianMoments::with_hbar(g.q2, g.p2, g.hbar)?;
    Ok((T::lit(0.5) * g.hbar / (g.q2 * g.p2).sqrt()).min(T::one()))
}
