//! Two-level sub-system energetics.
//!
//! The system Hamiltonian is `H_s = (eps/2) sigma_z + (delta/2) sigma_x` with
//! level spacing `hbar*Omega = sqrt(eps^2 + delta^2)`. A reduced state is given
//! by its Bloch vector, and all energy statistics follow from the two diagonal
//! weights in the eigenbasis of `H_s`.
//!
//! Logarithms in the weak-coupling occupation and the crossover temperature are
//! natural logarithms.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

fn slack<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(8.0))
}

/// A value together with an optional validity warning.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessed<T> {
    pub value: T,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitParams<T> {
    epsilon: T,
    delta: T,
    hbar: T,
    omega: T,
}

impl<T: Real> QubitParams<T> {
    /// Parameters in units with `hbar = 1`.
    pub fn new(epsilon: T, delta: T) -> Result<Self> {
        Self::with_hbar(epsilon, delta, T::one())
    }

    pub fn with_hbar(epsilon: T, delta: T, hbar: T) -> Result<Self> {
        if !(epsilon.is_finite() && delta.is_finite()) {
            return Err(Error::domain("qubit energies must be finite"));
        }
        if !(hbar > T::zero()) {
            return Err(Error::domain("hbar must be positive"));
        }
        let spacing = epsilon.hypot(delta);
        if spacing == T::zero() {
            return Err(Error::domain("epsilon and delta cannot both vanish"));
        }
        Ok(Self {
            epsilon,
            delta,
            hbar,
            omega: spacing / hbar,
        })
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    /// Angular frequency `Omega`.
    pub fn omega(&self) -> T {
        self.omega
    }

    /// `hbar * Omega`, the gap between the two eigenenergies.
    pub fn level_spacing(&self) -> T {
        self.hbar * self.omega
    }

    /// Components `(n_x, n_z)` of the unit vector along the field.
    pub fn field_direction(&self) -> (T, T) {
        let s = self.level_spacing();
        (self.delta / s, self.epsilon / s)
    }
}

/// Expectation values `(<sigma_x>, <sigma_y>, <sigma_z>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> BlochVector<T> {
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        let b = Self { x, y, z };
        b.check()?;
        Ok(b)
    }

    pub fn norm_squared(&self) -> T {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    fn check(&self) -> Result<()> {
        let n2 = self.norm_squared();
        if !n2.is_finite() || n2 > T::one() + slack() {
            return Err(Error::domain(format!(
                "Bloch vector outside the unit ball (|r|^2 = {n2})"
            )));
        }
        Ok(())
    }

    /// Ground state of the isolated Hamiltonian, anti-parallel to the field.
    pub fn isolated_ground_state(params: &QubitParams<T>) -> Self {
        let (nx, nz) = params.field_direction();
        Self {
            x: -nx,
            y: T::zero(),
            z: -nz,
        }
    }
}

/// `Tr rho^2 = (1 + X^2 + Y^2 + Z^2) / 2`.
pub fn bloch_purity<T: Real>(b: &BlochVector<T>) -> Result<T> {
    b.check()?;
    Ok((T::one() + b.norm_squared()) * T::lit(0.5))
}

/// `<H_s> = (eps/2) <sigma_z> + (delta/2) <sigma_x>`. `<sigma_y>` does not enter.
pub fn mean_energy<T: Real>(p: &QubitParams<T>, b: &BlochVector<T>) -> T {
    T::lit(0.5) * (p.epsilon * b.z + p.delta * b.x)
}

/// `Z(i chi) = <exp(-i chi H_s)>`.
pub fn characteristic_function<T: Real>(p: &QubitParams<T>, b: &BlochVector<T>, chi: T) -> Complex<T> {
    let phase = p.level_spacing() * chi * T::lit(0.5);
    let projection = (p.epsilon * b.z + p.delta * b.x) / p.level_spacing();
    Complex::new(phase.cos(), -phase.sin() * projection)
}

/// Real-argument generating function `Z(chi) = <exp(-chi H_s)>`.
pub fn generating_function<T: Real>(p: &QubitParams<T>, b: &BlochVector<T>, chi: T) -> T {
    let arg = p.level_spacing() * chi * T::lit(0.5);
    let projection = (p.epsilon * b.z + p.delta * b.x) / p.level_spacing();
    arg.cosh() - arg.sinh() * projection
}

/// Weights of the two delta peaks at `-hbar*Omega/2` and `+hbar*Omega/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelEnergyDistribution<T> {
    pub energy_minus: T,
    pub energy_plus: T,
    pub p_down: T,
    pub p_up: T,
}

impl<T: Real> TwoLevelEnergyDistribution<T> {
    /// First moment `sum_j E_j p_j`.
    pub fn mean(&self) -> T {
        self.p_down * self.energy_minus + self.p_up * self.energy_plus
    }

    /// `hbar * Omega`.
    pub fn spacing(&self) -> T {
        self.energy_plus - self.energy_minus
    }
}

/// Energy distribution from the mean energy alone.
pub fn energy_distribution<T: Real>(p: &QubitParams<T>, mean_e: T) -> Result<TwoLevelEnergyDistribution<T>> {
    let half = p.level_spacing() * T::lit(0.5);
    if !mean_e.is_finite() || mean_e.abs() > half + slack::<T>() * half.max(T::one()) {
        return Err(Error::domain(format!(
            "mean energy {mean_e} outside [-{half}, {half}]: no density matrix has it"
        )));
    }
    let p_up = (T::lit(0.5) * (T::one() + mean_e / half)).max(T::zero()).min(T::one());
    Ok(TwoLevelEnergyDistribution {
        energy_minus: -half,
        energy_plus: half,
        p_down: T::one() - p_up,
        p_up,
    })
}

/// Cumulants `kappa_1..kappa_{n_max}` of the two-point distribution.
pub fn cumulants_from_two_levels<T: Real>(d: &TwoLevelEnergyDistribution<T>, n_max: usize) -> Result<Vec<T>> {
    if n_max == 0 || n_max > 6 {
        return Err(Error::domain("cumulant order must lie in 1..=6"));
    }
    let mean = d.mean();
    // Central moments; kappa_n from moment-cumulant recursion on central moments
    // with mu_1 = 0.
    let lo = d.energy_minus - mean;
    let hi = d.energy_plus - mean;
    let mu: Vec<T> = (0..=n_max)
        .map(|k| d.p_down * lo.powi(k as i32) + d.p_up * hi.powi(k as i32))
        .collect();
    let mut kappa = vec![T::zero(); n_max + 1];
    for n in 2..=n_max {
        let mut acc = mu[n];
        for k in 2..n {
            acc -= T::lit(binomial(n - 1, k - 1)) * kappa[k] * mu[n - k];
        }
        kappa[n] = acc;
    }
    kappa[1] = mean;
    Ok(kappa[1..].to_vec())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Energy spectrum reconstructed by discrete Fourier inversion of
/// [`characteristic_function`].
///
/// Samples `chi_k = k * T / samples` over `T = 2 pi periods / (hbar Omega)` and
/// returns `(E_m, weight_m)` on the energy grid `E_m = m hbar Omega / periods`,
/// `m = -samples/2 .. samples/2`. With an even `periods` the peaks at
/// `+-hbar Omega / 2` sit on grid points.
pub fn spectrum_from_characteristic<T: Real>(
    p: &QubitParams<T>,
    b: &BlochVector<T>,
    periods: usize,
    samples: usize,
) -> Vec<(T, T)> {
    let spacing = p.level_spacing();
    let window = T::TAU() * T::from_count(periods) / spacing;
    let dchi = window / T::from_count(samples);
    let values: Vec<Complex<T>> = (0..samples)
        .map(|k| characteristic_function(p, b, dchi * T::from_count(k)))
        .collect();
    let half = (samples / 2) as i64;
    (-half..=half)
        .map(|m| {
            let energy = spacing * T::lit(m as f64) / T::from_count(periods);
            let mut acc = Complex::new(T::zero(), T::zero());
            for (k, z) in values.iter().enumerate() {
                let phase = dchi * T::from_count(k) * energy;
                acc += Complex::new(phase.cos(), phase.sin()) * z;
            }
            (energy, acc.re / T::from_count(samples))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistentCurrentReading<T> {
    pub current: T,
    pub current_uncoupled: T,
    /// Metadata only.
    pub flux: T,
}

/// `p_up = (1 - I/I_0) / 2` for the symmetric ring-dot qubit.
///
/// Values outside `[0, 1]` are returned unclamped with a warning.
pub fn p_up_from_persistent_current<T: Real>(r: &PersistentCurrentReading<T>) -> Result<Assessed<T>> {
    if r.current_uncoupled == T::zero() || !r.current_uncoupled.is_finite() {
        return Err(Error::domain(
            "uncoupled persistent current must be finite and non-zero",
        ));
    }
    let ratio = r.current / r.current_uncoupled;
    let value = T::lit(0.5) * (T::one() - ratio);
    let warning = (ratio.abs() > T::one())
        .then(|| format!("|I/I0| = {} exceeds 1; p_up = {value} is outside [0, 1]", ratio.abs()));
    Ok(Assessed { value, warning })
}

/// Weak-coupling excited-state probability of the symmetric spin-boson
/// model, `p_up = alpha ln(omega_c / delta)`.
///
/// A warning is attached once the value exceeds 0.1, where the expansion is
/// no longer trustworthy.
pub fn weak_coupling_p_up<T: Real>(alpha: T, delta: T, omega_c: T) -> Result<Assessed<T>> {
    if !(alpha >= T::zero()) || !alpha.is_finite() {
        return Err(Error::domain("coupling alpha must be non-negative"));
    }
    if !(delta > T::zero()) {
        return Err(Error::domain("tunneling energy delta must be positive"));
    }
    if !(omega_c > delta) {
        return Err(Error::domain(format!(
            "cutoff {omega_c} must exceed delta {delta} (otherwise p_up < 0)"
        )));
    }
    let value = alpha * (omega_c / delta).ln();
    let warning = (value > T::lit(0.1)).then(|| format!("p_up = {value} exceeds 0.1; outside the perturbative regime"));
    Ok(Assessed { value, warning })
}

/// Low-temperature thermal occupation `exp(-gap / (k T))`.
pub fn thermal_occupation<T: Real>(gap: T, temperature: T, k: T) -> Result<T> {
    if !(gap > T::zero()) {
        return Err(Error::domain("gap must be positive"));
    }
    if !(temperature > T::zero()) {
        return Err(Error::domain("temperature must be positive"));
    }
    if !(k > T::zero()) {
        return Err(Error::domain("Boltzmann constant must be positive"));
    }
    Ok((-gap / (k * temperature)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalCrossoverQuery<T> {
    /// `E_2 - E_1`.
    pub gap: T,
    pub alpha: T,
    /// `omega_c / delta`.
    pub cutoff_ratio: T,
    pub boltzmann_k: T,
}

impl<T: Real> ThermalCrossoverQuery<T> {
    pub fn new(gap: T, alpha: T, cutoff_ratio: T) -> Self {
        Self {
            gap,
            alpha,
            cutoff_ratio,
            boltzmann_k: T::one(),
        }
    }

    /// `alpha ln(omega_c/delta)`, the weak-coupling excitation probability.
    pub fn excitation_probability(&self) -> T {
        self.alpha * self.cutoff_ratio.ln()
    }
}

/// Temperature `T*` at which thermal and coupling-induced excitation agree:
/// `k T* = -gap / ln(alpha ln(omega_c/delta))`.
pub fn crossover_temperature<T: Real>(q: &ThermalCrossoverQuery<T>) -> Result<T> {
    if !(q.gap > T::zero()) {
        return Err(Error::domain("gap must be positive"));
    }
    if !(q.alpha >= T::zero()) {
        return Err(Error::domain("alpha must be non-negative"));
    }
    if !(q.cutoff_ratio > T::one()) {
        return Err(Error::domain("cutoff ratio omega_c/delta must exceed 1"));
    }
    if !(q.boltzmann_k > T::zero()) {
        return Err(Error::domain("Boltzmann constant must be positive"));
    }
    let p = q.excitation_probability();
    if !(p > T::zero()) {
        return Err(Error::domain(
            "alpha ln(omega_c/delta) = 0: no coupling-induced excitation, T* is zero",
        ));
    }
    if !(p < T::one()) {
        return Err(Error::domain(format!(
            "alpha ln(omega_c/delta) = {p} >= 1: thermal occupation never reaches it"
        )));
    }
    Ok(-q.gap / (q.boltzmann_k * p.ln()))
}
