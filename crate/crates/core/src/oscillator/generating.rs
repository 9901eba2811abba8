use crate::error::{Error, Result};
use crate::numerics::{double_factorial, nth_log_derivative, Derivative, FiniteDifferenceScheme};
use crate::scalar::Real;

use super::{GaussianMoments, OscillatorParams, ShapeParams};

/// Position-space matrix element `<q|rho|q'>` of the Gaussian state.
///
/// The `(q + q')^2` term carries `1 / (8 <q^2>)`, which makes the diagonal a
/// normalized Gaussian of variance `<q^2>`, and the `(q - q')^2` term
/// reproduces `<p^2>`.
pub fn position_density_matrix<T: Real>(g: &GaussianMoments<T>, q: T, q_prime: T) -> T {
    let sum = q + q_prime;
    let diff = q - q_prime;
    let norm = (T::TAU() * g.q2).sqrt().recip();
    norm * (-(sum * sum) / (T::lit(8.0) * g.q2) - g.p2 * diff * diff / (T::lit(2.0) * g.hbar * g.hbar)).exp()
}

/// Euclidean propagator `<q'|exp(-chi H_s)|q>` of the isolated oscillator
/// (Mehler kernel). Falls back to the free heat kernel when `omega = 0`.
pub fn imaginary_time_propagator<T: Real>(p: &OscillatorParams<T>, q: T, q_prime: T, chi: T) -> Result<T> {
    if !(chi > T::zero()) {
        return Err(Error::domain("imaginary-time propagator needs chi > 0"));
    }
    let (m, hbar) = (p.mass, p.hbar);
    let diff = q - q_prime;
    if p.omega == T::zero() {
        let tau = hbar * hbar * chi;
        let pref = (m / (T::TAU() * tau)).sqrt();
        return Ok(pref * (-m * diff * diff / (T::lit(2.0) * tau)).exp());
    }
    let w = p.quantum() * chi;
    let sh = w.sinh();
    let half = (w * T::lit(0.5)).sinh();
    // (q^2 + q'^2) cosh w - 2 q q' = (q - q')^2 + (cosh w - 1)(q^2 + q'^2)
    let quad = diff * diff + T::lit(2.0) * half * half * (q * q + q_prime * q_prime);
    let scale = m * p.omega / (hbar * sh);
    Ok((scale / T::TAU()).sqrt() * (-scale * T::lit(0.5) * quad).exp())
}

/// Energy generating function `Z(chi) = <exp(-chi H_s)>` of the Gaussian state:
///
/// `Z = {2E sinh(eps chi)/eps + 2A (cosh(eps chi) - 1) + (1 + cosh(eps chi))/2}^(-1/2)`
/// with `eps = hbar omega`.
pub fn generating_function<T: Real>(s: &ShapeParams<T>, chi: T) -> T {
    let two = T::lit(2.0);
    let w = s.quantum * chi;
    let half_sinh = (w * T::lit(0.5)).sinh();
    let cosh_minus_one = two * half_sinh * half_sinh;
    let sinh_over_eps = if s.quantum == T::zero() {
        chi
    } else {
        w.sinh() / s.quantum
    };
    let braces =
        two * s.energy * sinh_over_eps + two * s.area * cosh_minus_one + T::one() + T::lit(0.5) * cosh_minus_one;
    braces.powf(T::lit(-0.5))
}

/// Free-particle limit `Z = (1 + chi <p^2>/m)^(-1/2)`.
pub fn generating_function_free<T: Real>(p2: T, mass: T, chi: T) -> T {
    (T::one() + chi * p2 / mass).powf(T::lit(-0.5))
}

/// Gaussian moment `<p^{2n}> = (2n - 1)!! <p^2>^n`.
pub fn wick_moment<T: Real>(p2: T, n: usize) -> Result<T> {
    let df = double_factorial(2 * n as i64 - 1)?;
    let df = T::from_u128(df).ok_or_else(|| Error::Overflow(format!("(2*{n}-1)!! as float")))?;
    Ok(df * p2.powi(n as i32))
}

/// First four energy cumulants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyCumulants<T> {
    pub k1: T,
    pub k2: T,
    pub k3: T,
    pub k4: T,
}

impl<T: Real> EnergyCumulants<T> {
    pub fn to_array(&self) -> [T; 4] {
        [self.k1, self.k2, self.k3, self.k4]
    }
}

/// Closed forms of the first four cumulants in terms of `E`, `A`, `eps`.
pub fn cumulants_closed_form<T: Real>(s: &ShapeParams<T>) -> EnergyCumulants<T> {
    let e = s.energy;
    let a = s.area;
    let eps2 = s.quantum * s.quantum;
    let e2 = e * e;
    let twelve_a = T::lit(12.0) * a;
    let k2 = T::lit(0.5) * (-eps2 * T::lit(0.5) + T::lit(4.0) * e2 - T::lit(2.0) * eps2 * a);
    let k3 = -(e * T::lit(0.5)) * (-T::lit(16.0) * e2 + eps2 * (T::one() + twelve_a));
    let k4 = T::lit(48.0) * e2 * e2 - T::lit(4.0) * eps2 * e2 * (T::one() + twelve_a)
        + eps2 * eps2 * (T::lit(0.125) + T::lit(2.0) * a + T::lit(6.0) * a * a);
    EnergyCumulants { k1: e, k2, k3, k4 }
}

/// Distance from `chi = 0` to the nearest singularity of `ln Z`.
fn log_singularity_distance<T: Real>(s: &ShapeParams<T>) -> T {
    if s.quantum > T::zero() {
        let r = s.b + s.a.abs();
        if r > T::zero() {
            return -r.ln() / s.quantum;
        }
        T::infinity()
    } else if s.energy > T::zero() {
        T::lit(0.5) / s.energy
    } else {
        T::infinity()
    }
}

/// Cumulants 1..=4 from finite differences of `ln Z`.
///
/// `chi` is rescaled so the nearest singularity of `ln Z` sits at unit
/// distance or further before the scheme is applied.
pub fn cumulants_finite_difference<T: Real>(
    s: &ShapeParams<T>,
    scheme: &FiniteDifferenceScheme<T>,
) -> Result<[Derivative<T>; 4]> {
    let mut unit = log_singularity_distance(s);
    if s.quantum > T::zero() {
        unit = unit.min(s.quantum.recip());
    }
    if !unit.is_finite() {
        unit = T::one();
    }
    let mut out = [Derivative {
        value: T::zero(),
        error: T::zero(),
    }; 4];
    for (n, slot) in out.iter_mut().enumerate() {
        let order = n + 1;
        let d = nth_log_derivative(|u| generating_function(s, u * unit), order, scheme)?;
        let scale = unit.powi(order as i32);
        *slot = Derivative {
            value: d.value / scale,
            error: d.error / scale,
        };
    }
    Ok(out)
}
