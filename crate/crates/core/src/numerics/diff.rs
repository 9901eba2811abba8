//! Central finite differences with Richardson extrapolation over step halvings.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilKind {
    Central,
}

#[derive(Debug, Clone, Copy)]
pub struct FiniteDifferenceScheme<T> {
    /// Coarsest step; each Richardson level halves it.
    pub step: T,
    /// Highest derivative order the scheme accepts (at most 6).
    pub max_order: usize,
    pub stencil_kind: StencilKind,
    /// Number of step sizes in the Richardson table (at least 2).
    pub levels: usize,
}

impl<T: Real> FiniteDifferenceScheme<T> {
    pub fn new(step: T, max_order: usize) -> Result<Self> {
        if !(step > T::zero()) || !step.is_finite() {
            return Err(Error::domain("finite-difference step must be positive"));
        }
        if max_order == 0 || max_order > 6 {
            return Err(Error::domain("max_order must lie in 1..=6"));
        }
        Ok(Self {
            step,
            max_order,
            stencil_kind: StencilKind::Central,
            levels: 4,
        })
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels = levels.max(2);
        self
    }
}

impl<T: Real> Default for FiniteDifferenceScheme<T> {
    fn default() -> Self {
        Self::new(T::lit(0.2), 6).expect("default scheme is valid")
    }
}

/// Derivative estimate with the Richardson error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative<T> {
    pub value: T,
    pub error: T,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Stencil offsets (in units of the step) and weights for the O(h^2) central
/// n-th derivative. Odd orders average the two half-shifted differences.
fn central_stencil(n: usize) -> Vec<(i64, f64)> {
    let mut taps: Vec<(i64, f64)> = Vec::new();
    let mut push = |offset: i64, w: f64| match taps.iter_mut().find(|(o, _)| *o == offset) {
        Some(t) => t.1 += w,
        None => taps.push((offset, w)),
    };
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let c = sign * binomial(n, k);
        // Offsets n/2 - k, doubled to stay integral.
        let twice = n as i64 - 2 * k as i64;
        if n.is_multiple_of(2) {
            push(twice / 2, c);
        } else {
            push((twice + 1) / 2, 0.5 * c);
            push((twice - 1) / 2, 0.5 * c);
        }
    }
    taps.retain(|&(_, w)| w != 0.0);
    taps
}

fn richardson<T: Real, G>(mut g: G, n: usize, scheme: &FiniteDifferenceScheme<T>) -> Result<Derivative<T>>
where
    G: FnMut(T) -> Result<T>,
{
    if n == 0 || n > scheme.max_order {
        return Err(Error::domain(format!(
            "derivative order {n} outside 1..={}",
            scheme.max_order
        )));
    }
    let stencil = central_stencil(n);
    let levels = scheme.levels.max(2);
    let mut table: Vec<Vec<T>> = Vec::with_capacity(levels);
    let mut h = scheme.step;
    for i in 0..levels {
        let mut acc = T::zero();
        for &(offset, w) in &stencil {
            acc += T::lit(w) * g(T::lit(offset as f64) * h)?;
        }
        let mut row = vec![acc / h.powi(n as i32)];
        let mut factor = T::one();
        for j in 1..=i {
            factor *= T::lit(4.0);
            let refined = row[j - 1] + (row[j - 1] - table[i - 1][j - 1]) / (factor - T::one());
            row.push(refined);
        }
        table.push(row);
        h *= T::lit(0.5);
    }
    let last = &table[levels - 1];
    let value = last[levels - 1];
    let error = (value - last[levels - 2]).abs();
    Ok(Derivative { value, error })
}

/// n-th derivative of `f` at zero.
pub fn nth_derivative<T: Real, F>(mut f: F, n: usize, scheme: &FiniteDifferenceScheme<T>) -> Result<Derivative<T>>
where
    F: FnMut(T) -> T,
{
    richardson(|s| Ok(f(s)), n, scheme)
}

/// `(-1)^n d^n/dchi^n ln f(chi)` at `chi = 0`, the n-th cumulant of a
/// generating function `f(chi) = <exp(-chi X)>`.
pub fn nth_log_derivative<T: Real, F>(mut f: F, n: usize, scheme: &FiniteDifferenceScheme<T>) -> Result<Derivative<T>>
where
    F: FnMut(T) -> T,
{
    let d = richardson(
        |s| {
            let v = f(s);
            if v > T::zero() && v.is_finite() {
                Ok(v.ln())
            } else {
                Err(Error::domain(format!(
                    "generating function not positive at stencil point {s:e}: {v:e}"
                )))
            }
        },
        n,
        scheme,
    )?;
    let value = if n.is_multiple_of(2) { d.value } else { -d.value };
    Ok(Derivative { value, error: d.error })
}
