use crate::error::{Error, Result};
use crate::scalar::Real;

/// Physicists' Hermite polynomial `H_n(u)`.
pub fn hermite_poly<T: Real>(n: usize, u: T) -> T {
    let two = T::lit(2.0);
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = two * u;
    for k in 1..n {
        let next = two * u * cur - two * T::from_count(k) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Legendre polynomial `P_n(z)` by the Bonnet recurrence.
pub fn legendre_poly<T: Real>(n: usize, z: T) -> T {
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = z;
    for k in 1..n {
        let kf = T::from_count(k);
        let next = ((kf + kf + T::one()) * z * cur - kf * prev) / (kf + T::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// Double factorial `n!!`, with `0!! = (-1)!! = 1`.
pub fn double_factorial(n: i64) -> Result<u128> {
    if n < -1 {
        return Err(Error::domain(format!("double factorial undefined for {n}")));
    }
    let mut acc: u128 = 1;
    let mut k = n;
    while k > 1 {
        acc = acc
            .checked_mul(k as u128)
            .ok_or_else(|| Error::Overflow(format!("{n}!! exceeds u128")))?;
        k -= 2;
    }
    Ok(acc)
}
