//! Gauss quadrature rules.
//!
//! Nodes come from Newton iteration on the three-term recurrences. Hermite
//! rules integrate against `exp(-u^2)` on the real line; Legendre rules
//! integrate on `[-1, 1]` and can be mapped onto any finite interval.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    GaussHermite,
    GaussLegendre,
}

#[derive(Debug, Clone)]
pub struct QuadratureRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
    kind: QuadratureKind,
}

const MAX_NEWTON: usize = 100;

impl<T: Real> QuadratureRule<T> {
    /// Gauss–Legendre rule with `order` nodes on `[-1, 1]`.
    pub fn gauss_legendre(order: usize) -> Self {
        assert!(order > 0, "quadrature order must be positive");
        let n = order;
        let nf = T::from_count(n);
        let half = T::lit(0.5);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        for i in 0..n.div_ceil(2) {
            let mut z = (T::PI() * (T::from_count(i) + T::lit(0.75)) / (nf + half)).cos();
            let mut deriv = T::one();
            for _ in 0..MAX_NEWTON {
                let (p, dp) = legendre_with_derivative(n, z);
                deriv = dp;
                let dz = p / dp;
                z -= dz;
                if dz.abs() <= T::epsilon() * T::lit(4.0) {
                    let (_, dp) = legendre_with_derivative(n, z);
                    deriv = dp;
                    break;
                }
            }
            let w = T::lit(2.0) / ((T::one() - z * z) * deriv * deriv);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self {
            nodes,
            weights,
            kind: QuadratureKind::GaussLegendre,
        }
    }

    /// Gauss–Hermite rule with `order` nodes for the weight `exp(-u^2)`.
    pub fn gauss_hermite(order: usize) -> Self {
        assert!(order > 0, "quadrature order must be positive");
        let n = order;
        let nf = T::from_count(n);
        let pim4 = T::PI().powf(T::lit(-0.25));
        // Roots found from the largest downwards.
        let mut roots: Vec<T> = Vec::with_capacity(n.div_ceil(2));
        let mut weights_desc: Vec<T> = Vec::with_capacity(n.div_ceil(2));
        let mut z = T::zero();
        for i in 0..n.div_ceil(2) {
            z = match i {
                0 => {
                    let m = T::lit(2.0) * nf + T::one();
                    m.sqrt() - T::lit(1.85575) * m.powf(T::lit(-0.16667))
                }
                1 => z - T::lit(1.14) * nf.powf(T::lit(0.426)) / z,
                2 => T::lit(1.86) * z - T::lit(0.86) * roots[0],
                3 => T::lit(1.91) * z - T::lit(0.91) * roots[1],
                _ => T::lit(2.0) * z - roots[i - 2],
            };
            let mut pp = T::one();
            for _ in 0..MAX_NEWTON {
                let (p1, dp) = normalized_hermite_with_derivative(n, z, pim4);
                pp = dp;
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() <= T::epsilon() * T::lit(4.0) * z.abs().max(T::one()) {
                    pp = normalized_hermite_with_derivative(n, z, pim4).1;
                    break;
                }
            }
            roots.push(z);
            weights_desc.push(T::lit(2.0) / (pp * pp));
        }
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        for (i, (&r, &w)) in roots.iter().zip(&weights_desc).enumerate() {
            nodes[i] = -r;
            nodes[n - 1 - i] = r;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self {
            nodes,
            weights,
            kind: QuadratureKind::GaussHermite,
        }
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn kind(&self) -> QuadratureKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Weighted sum of `f` over the nodes, for the rule's native weight and domain.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }

    /// Integral of `f` over `[lo, hi]`. Only meaningful for Legendre rules.
    pub fn integrate_interval<F: FnMut(T) -> T>(&self, lo: T, hi: T, mut f: F) -> T {
        debug_assert_eq!(self.kind, QuadratureKind::GaussLegendre);
        let half = T::lit(0.5) * (hi - lo);
        let mid = T::lit(0.5) * (hi + lo);
        half * self.integrate(|u| f(mid + half * u))
    }

    /// Tensor-product integral of `f` over `[lo, hi]^2`. Legendre rules only.
    pub fn integrate_square<F: FnMut(T, T) -> T>(&self, lo: T, hi: T, mut f: F) -> T {
        debug_assert_eq!(self.kind, QuadratureKind::GaussLegendre);
        let half = T::lit(0.5) * (hi - lo);
        let mid = T::lit(0.5) * (hi + lo);
        let mut acc = T::zero();
        for (&u, &wu) in self.nodes.iter().zip(&self.weights) {
            let q = mid + half * u;
            let mut inner = T::zero();
            for (&v, &wv) in self.nodes.iter().zip(&self.weights) {
                inner += wv * f(q, mid + half * v);
            }
            acc += wu * inner;
        }
        acc * half * half
    }
}

fn legendre_with_derivative<T: Real>(n: usize, z: T) -> (T, T) {
    let mut p1 = T::one();
    let mut p2 = T::zero();
    for j in 1..=n {
        let jf = T::from_count(j);
        let p3 = p2;
        p2 = p1;
        p1 = ((jf + jf - T::one()) * z * p2 - (jf - T::one()) * p3) / jf;
    }
    let nf = T::from_count(n);
    let dp = nf * (z * p1 - p2) / (z * z - T::one());
    (p1, dp)
}

// Orthonormal Hermite functions without the Gaussian factor.
fn normalized_hermite_with_derivative<T: Real>(n: usize, z: T, pim4: T) -> (T, T) {
    let two = T::lit(2.0);
    let mut p1 = pim4;
    let mut p2 = T::zero();
    for j in 0..n {
        let jf = T::from_count(j);
        let p3 = p2;
        p2 = p1;
        p1 = z * (two / (jf + T::one())).sqrt() * p2 - (jf / (jf + T::one())).sqrt() * p3;
    }
    (p1, (two * T::from_count(n)).sqrt() * p2)
}

/// Integrates `f` over `[lo, hi]^2` with Gauss–Legendre rules, doubling the
/// order from `start_order` until two successive orders agree within `agreement`
/// (absolute, scaled by `max(1, |value|)`).
///
/// Returns the value and the last difference between orders.
pub fn integrate_2d_adaptive<F: FnMut(f64, f64) -> f64>(
    lo: f64,
    hi: f64,
    mut f: F,
    start_order: usize,
    max_order: usize,
    agreement: f64,
) -> Result<(f64, f64)> {
    let mut order = start_order.max(2);
    let mut prev = QuadratureRule::<f64>::gauss_legendre(order).integrate_square(lo, hi, &mut f);
    let mut diff = f64::INFINITY;
    while order * 2 <= max_order {
        order *= 2;
        let next = QuadratureRule::<f64>::gauss_legendre(order).integrate_square(lo, hi, &mut f);
        diff = (next - prev).abs();
        if diff <= agreement * next.abs().max(1.0) {
            return Ok((next, diff));
        }
        prev = next;
    }
    Err(Error::tolerance("2d quadrature order doubling", diff, agreement))
}
