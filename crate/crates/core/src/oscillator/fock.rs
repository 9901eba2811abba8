//! Diagonal of the Gaussian density matrix in the Fock basis.
//!
//! `rho_nn = sqrt(4/D) (b^2 - a^2)^(n/2) P_n(b / sqrt(b^2 - a^2))`. The scaled
//! sequence `Q_n = (b^2 - a^2)^(n/2) P_n(...)` obeys the real recurrence
//!
//! ```text
//! Q_0 = 1,  Q_1 = b,  (n + 1) Q_{n+1} = (2n + 1) b Q_n - n (b^2 - a^2) Q_{n-1}
//! ```
//!
//! which stays real for squeezed states with `b^2 < a^2`.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::ShapeParams;

/// Largest truncation chosen automatically.
pub const MAX_FOCK_TRUNCATION: usize = 200;

/// `Q_0..=Q_{n_max}`, i.e. `rho_nn / rho_00`.
pub fn fock_ratios<T: Real>(a: T, b: T, n_max: usize) -> Vec<T> {
    let mut q = Vec::with_capacity(n_max + 1);
    q.push(T::one());
    if n_max == 0 {
        return q;
    }
    q.push(b);
    let det = b * b - a * a;
    for n in 1..n_max {
        let nf = T::from_count(n);
        let next = ((nf + nf + T::one()) * b * q[n] - nf * det * q[n - 1]) / (nf + T::one());
        q.push(next);
    }
    q
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockDistribution<T> {
    /// `rho_00 ..= rho_NN`.
    pub probs: Vec<T>,
    /// `N`.
    pub truncation: usize,
    /// `1 - sum(probs)`.
    pub tail_bound: T,
    /// Level spacing `hbar omega`; `E_n = (n + 1/2) hbar omega`.
    pub quantum: T,
    prefactor: T,
    envelope_ratio: T,
}

/// `rho_00..=rho_{n_max, n_max}` with no physicality check.
pub fn fock_probabilities_unchecked<T: Real>(s: &ShapeParams<T>, n_max: usize) -> Vec<T> {
    let pref = (T::lit(4.0) / s.d).sqrt();
    fock_ratios(s.a, s.b, n_max).into_iter().map(|q| pref * q).collect()
}

/// Fock probabilities up to `n_max`.
pub fn fock_probabilities<T: Real>(s: &ShapeParams<T>, n_max: usize) -> Result<FockDistribution<T>> {
    let shape = ShapeParams::from_xy(s.x, s.y, s.quantum)?;
    let mut probs = fock_probabilities_unchecked(&shape, n_max);
    let floor = -T::lit(1e-14).max(T::epsilon() * T::lit(16.0));
    for (n, p) in probs.iter_mut().enumerate() {
        if *p < floor {
            return Err(Error::domain(format!("rho_{n}{n} = {p} is negative")));
        }
        *p = p.max(T::zero());
    }
    let total = probs.iter().fold(T::zero(), |acc, &p| acc + p);
    Ok(FockDistribution {
        truncation: n_max,
        tail_bound: T::one() - total,
        quantum: shape.quantum,
        prefactor: (T::lit(4.0) / shape.d).sqrt(),
        envelope_ratio: shape.b + shape.a.abs(),
        probs,
    })
}

/// Envelope `rho_nn <= sqrt(4/D) (n + 1) r^n` with `r = b + |a| < 1`.
fn envelope_term<T: Real>(prefactor: T, ratio: T, n: usize) -> T {
    prefactor * T::from_count(n + 1) * ratio.powi(n as i32)
}

/// Smallest `N` whose envelope tail `sum_{n > N}` drops below `tol`, capped at
/// [`MAX_FOCK_TRUNCATION`].
pub fn truncation_for_tolerance<T: Real>(s: &ShapeParams<T>, tol: T) -> usize {
    let prefactor = (T::lit(4.0) / s.d).sqrt();
    let r = s.b + s.a.abs();
    if r <= T::zero() {
        return 0;
    }
    // sum_{n >= N+1} (n+1) r^n = r^(N+1) ((N+2) - (N+1) r) / (1-r)^2
    let one_minus = T::one() - r;
    for n in 0..MAX_FOCK_TRUNCATION {
        let nf = T::from_count(n);
        let tail =
            prefactor * r.powi(n as i32 + 1) * ((nf + T::lit(2.0)) - (nf + T::one()) * r) / (one_minus * one_minus);
        if tail < tol {
            return n;
        }
    }
    MAX_FOCK_TRUNCATION
}

/// Fock probabilities truncated where the envelope tail drops below `tol`.
pub fn fock_probabilities_to_tolerance<T: Real>(s: &ShapeParams<T>, tol: T) -> Result<FockDistribution<T>> {
    fock_probabilities(s, truncation_for_tolerance(s, tol))
}

/// Fock probabilities truncated so energy moments up to `order` have envelope
/// tails below `tol` (relative to the magnitude of the moment).
pub fn fock_probabilities_for_moments<T: Real>(
    s: &ShapeParams<T>,
    order: usize,
    tol: T,
) -> Result<FockDistribution<T>> {
    let mut n = truncation_for_tolerance(s, tol);
    loop {
        let f = fock_probabilities(s, n)?;
        match f.central_moments(order, tol) {
            Ok(_) => return Ok(f),
            Err(e) if n >= MAX_FOCK_TRUNCATION => return Err(e),
            Err(_) => n = (n + 10).min(MAX_FOCK_TRUNCATION),
        }
    }
}

impl<T: Real> FockDistribution<T> {
    pub fn level_energy(&self, n: usize) -> T {
        (T::from_count(n) + T::lit(0.5)) * self.quantum
    }

    /// Envelope bound on `sum_{n > N} E_n^k rho_nn`.
    pub fn envelope_tail(&self, k: usize) -> T {
        let r = self.envelope_ratio;
        if r <= T::zero() {
            return T::zero();
        }
        let mut acc = T::zero();
        let mut n = self.truncation + 1;
        loop {
            let term = envelope_term(self.prefactor, r, n) * self.level_energy(n).powi(k as i32);
            acc += term;
            if term <= acc * T::epsilon() || term < T::min_positive_value() || n > 100_000 {
                break;
            }
            n += 1;
        }
        acc
    }

    /// Energy transform `Z(chi) = sum_n exp(-chi E_n) rho_nn`.
    ///
    /// Fails when the unsummed remainder could exceed `tol`. Negative `chi`
    /// is accepted while `r exp(-chi hbar omega) < 1` for the envelope ratio
    /// `r = b + |a|`, with the remainder bounded by the envelope.
    pub fn spectral_generating_function(&self, chi: T, tol: T) -> Result<T> {
        if !chi.is_finite() {
            return Err(Error::domain("energy transform needs finite chi"));
        }
        let remainder = if chi >= T::zero() {
            self.tail_bound.max(T::zero()) * (-chi * self.level_energy(self.truncation + 1)).exp()
        } else {
            let r = self.envelope_ratio * (-chi * self.quantum).exp();
            if !(r < T::one()) {
                return Err(Error::domain(format!(
                    "energy transform diverges at chi = {chi}: envelope ratio {r} >= 1"
                )));
            }
            // sum_{n > N} (n + 1) r^n = r^(N+1) ((N+2) - (N+1) r) / (1-r)^2
            let n = T::from_count(self.truncation);
            let one_minus = T::one() - r;
            self.prefactor
                * (-chi * self.quantum * T::lit(0.5)).exp()
                * r.powi(self.truncation as i32 + 1)
                * ((n + T::lit(2.0)) - (n + T::one()) * r)
                / (one_minus * one_minus)
        };
        if remainder > tol {
            return Err(Error::tolerance(
                "Fock truncation of energy transform",
                remainder.to_f64().unwrap_or(f64::NAN),
                tol.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(self
            .probs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (n, &p)| acc + (-chi * self.level_energy(n)).exp() * p))
    }

    fn check_moment_tail(&self, k: usize, scale: T, tol: T) -> Result<()> {
        let tail = self.envelope_tail(k);
        if tail > tol * scale.max(T::one()) {
            return Err(Error::tolerance(
                format!("Fock truncation of energy moment {k}"),
                tail.to_f64().unwrap_or(f64::NAN),
                tol.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(())
    }

    fn central_moments(&self, order: usize, tol: T) -> Result<(T, Vec<T>)> {
        let mean = self
            .probs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (n, &p)| acc + self.level_energy(n) * p);
        for k in 1..=order {
            self.check_moment_tail(k, mean.abs().powi(k as i32), tol)?;
        }
        let central = (2..=order)
            .map(|k| {
                self.probs.iter().enumerate().fold(T::zero(), |acc, (n, &p)| {
                    acc + (self.level_energy(n) - mean).powi(k as i32) * p
                })
            })
            .collect();
        Ok((mean, central))
    }

    /// Mean and variance of the truncated energy distribution.
    pub fn mean_and_variance(&self, tol: T) -> Result<(T, T)> {
        let (mean, c) = self.central_moments(2, tol)?;
        Ok((mean, c[0]))
    }

    /// First four cumulants from spectral sums.
    pub fn cumulants(&self, tol: T) -> Result<super::EnergyCumulants<T>> {
        let (mean, c) = self.central_moments(4, tol)?;
        Ok(super::EnergyCumulants {
            k1: mean,
            k2: c[0],
            k3: c[1],
            k4: c[2] - T::lit(3.0) * c[0] * c[0],
        })
    }
}

/// Eigenvalues `lambda_n = (1 - xi) xi^n` of the Gaussian density matrix, with
/// `xi = (nu - 1)/(nu + 1)` and symplectic eigenvalue `nu = sqrt(xy)`.
pub fn density_matrix_eigenvalues<T: Real>(s: &ShapeParams<T>, n_max: usize) -> Vec<T> {
    let nu = (s.x * s.y).sqrt();
    let xi = (nu - T::one()) / (nu + T::one());
    (0..=n_max).map(|n| (T::one() - xi) * xi.powi(n as i32)).collect()
}

/// Variables of the Legendre summation that turns the Fock probabilities
/// back into the generating function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralTransformVars<T> {
    /// `sqrt(b^2 - a^2) exp(-chi hbar omega)`.
    pub t: T,
    /// `b / sqrt(b^2 - a^2)`.
    pub z: T,
    pub chi: T,
}

impl<T: Real> SpectralTransformVars<T> {
    /// Defined for `b^2 > a^2` and `|t| < 1`.
    pub fn new(s: &ShapeParams<T>, chi: T) -> Result<Self> {
        let det = s.b * s.b - s.a * s.a;
        if !(det > T::zero()) {
            return Err(Error::domain("transform variables need b^2 > a^2"));
        }
        let root = det.sqrt();
        let t = root * (-chi * s.quantum).exp();
        if !(t.abs() < T::one()) {
            return Err(Error::domain(format!(
                "|t| = {} >= 1: Legendre series diverges",
                t.abs()
            )));
        }
        Ok(Self { t, z: s.b / root, chi })
    }

    /// `sum_n t^n P_n(z) = (1 - 2 z t + t^2)^(-1/2)`.
    pub fn legendre_sum(&self) -> T {
        (T::one() - T::lit(2.0) * self.z * self.t + self.t * self.t).powf(T::lit(-0.5))
    }

    /// `Z(chi) = sqrt(4/D) exp(-chi hbar omega / 2) sum_n t^n P_n(z)`.
    pub fn generating_function(&self, s: &ShapeParams<T>) -> T {
        (T::lit(4.0) / s.d).sqrt() * (-self.chi * s.quantum * T::lit(0.5)).exp() * self.legendre_sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::legendre_poly;
    use crate::oscillator::{cumulants_closed_form, generating_function};

    #[test]
    fn isolated_state_is_pure_ground() {
        let f = fock_probabilities(&ShapeParams::<f64>::isolated(1.0), 5).unwrap();
        assert_eq!(f.probs, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(f.tail_bound, 0.0);
    }

    #[test]
    fn symmetric_state_is_geometric() {
        let s = ShapeParams::<f64>::from_xy(3.0, 3.0, 1.0).unwrap();
        let f = fock_probabilities(&s, 20).unwrap();
        for (n, p) in f.probs.iter().enumerate() {
            assert!((p - 0.5 * 0.5f64.powi(n as i32)).abs() < 1e-15);
        }
    }

    #[test]
    fn ratio_table_row_two() {
        let q = fock_ratios(0.3f64, 0.4, 7);
        assert!((q[1] - 0.4).abs() < 1e-15);
        assert!((q[2] - 0.205).abs() < 1e-15);
    }

    #[test]
    fn recurrence_matches_legendre_where_real() {
        let (a, b) = (0.2f64, 0.55);
        let root = (b * b - a * a).sqrt();
        let q = fock_ratios(a, b, 12);
        for (n, qn) in q.iter().enumerate() {
            let lit = root.powi(n as i32) * legendre_poly(n, b / root);
            assert!((qn - lit).abs() < 1e-14);
        }
    }

    #[test]
    fn squeezed_state_stays_nonnegative() {
        let s = ShapeParams::<f64>::from_xy(0.25, 6.0, 1.0).unwrap();
        assert!(s.b * s.b < s.a * s.a);
        let f = fock_probabilities_to_tolerance(&s, 1e-12).unwrap();
        assert!(f.probs.iter().all(|&p| p >= 0.0));
        assert!(f.tail_bound.abs() < 1e-11);
    }

    #[test]
    fn unphysical_inputs_break_probabilities() {
        assert!(fock_probabilities(&ShapeParams::<f64>::from_xy_unchecked(0.2, 0.2, 1.0), 4).is_err());
        let raw = fock_probabilities_unchecked(&ShapeParams::<f64>::from_xy_unchecked(0.2, 0.2, 1.0), 4);
        assert!(raw[0] > 1.0);
        assert!(raw[1] < 0.0);
    }

    #[test]
    fn truncation_controls_normalization() {
        for &(x, y) in &[(1.0, 10.0), (10.0, 10.0), (2.0, 7.5), (1.0, 1.0)] {
            let s = ShapeParams::<f64>::from_xy(x, y, 1.0).unwrap();
            let f = fock_probabilities_to_tolerance(&s, 1e-10).unwrap();
            assert!(f.truncation <= MAX_FOCK_TRUNCATION);
            assert!(f.tail_bound.abs() < 1e-10, "({x}, {y}) tail {}", f.tail_bound);
        }
    }

    #[test]
    fn spectral_transform_matches_closed_form() {
        let s = ShapeParams::<f64>::from_xy(3.0, 3.0, 1.0).unwrap();
        let f = fock_probabilities(&s, 60).unwrap();
        let z = f.spectral_generating_function(1.0, 1e-12).unwrap();
        assert!((z - generating_function(&s, 1.0)).abs() < 1e-10);
        assert!((f.spectral_generating_function(0.0, 1e-12).unwrap() - 1.0).abs() < 1e-15);

        let short = fock_probabilities(&s, 3).unwrap();
        assert!(matches!(
            short.spectral_generating_function(0.0, 1e-10),
            Err(Error::Tolerance { .. })
        ));

        // r = b = 1/2: negative chi converges while exp(-chi) < 2.
        let deep = fock_probabilities(&s, 120).unwrap();
        let z = deep.spectral_generating_function(-0.3, 1e-12).unwrap();
        assert!((z - generating_function(&s, -0.3)).abs() < 1e-10);
        assert!(matches!(
            deep.spectral_generating_function(-0.8, 1e-12),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            short.spectral_generating_function(-0.3, 1e-10),
            Err(Error::Tolerance { .. })
        ));

        let v = SpectralTransformVars::new(&s, 1.0).unwrap();
        assert!((v.generating_function(&s) - generating_function(&s, 1.0)).abs() < 1e-14);
        assert!(SpectralTransformVars::new(&ShapeParams::<f64>::isolated(1.0), 1.0).is_err());
    }

    #[test]
    fn spectral_moments() {
        let iso = fock_probabilities(&ShapeParams::<f64>::isolated(2.0), 4).unwrap();
        assert_eq!(iso.mean_and_variance(1e-12).unwrap(), (1.0, 0.0));

        let s = ShapeParams::<f64>::from_xy(3.0, 3.0, 1.0).unwrap();
        let f = fock_probabilities_for_moments(&s, 2, 1e-12).unwrap();
        let (mean, _) = f.mean_and_variance(1e-12).unwrap();
        assert!((mean - 1.5).abs() < 1e-12);

        let s = ShapeParams::<f64>::from_xy(3.0, 1.0, 1.0).unwrap();
        let f = fock_probabilities_for_moments(&s, 4, 1e-12).unwrap();
        let k = f.cumulants(1e-12).unwrap();
        let c = cumulants_closed_form(&s);
        assert!((k.k2 - c.k2).abs() < 1e-10);
        assert!((k.k4 - c.k4).abs() < 1e-9);
    }

    #[test]
    fn first_eigenvalue_matches_rho11_at_weak_coupling() {
        let s = ShapeParams::<f64>::from_xy(1.0004, 1.0008, 1.0).unwrap();
        let f = fock_probabilities(&s, 2).unwrap();
        let lam = density_matrix_eigenvalues(&s, 1);
        let b_lin = (0.0004 + 0.0008) / 4.0;
        assert!((f.probs[1] - b_lin).abs() < 1e-6);
        assert!((lam[1] - f.probs[1]).abs() < 1e-6);
    }
}
