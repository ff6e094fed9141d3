//! Complete elliptic integral of the first kind and Jacobi elliptic functions.
//!
//! All arguments use the modulus `k` (not the parameter `m = k²`).

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_ITER: usize = 64;

fn check_modulus<T: Real>(k: T) -> Result<()> {
    if !k.is_finite() || k < T::zero() || k >= T::one() {
        return Err(Error::Domain(format!(
            "elliptic modulus must satisfy 0 <= k < 1, got {k}"
        )));
    }
    Ok(())
}

fn agm_tol<T: Real>() -> T {
    T::lit(5.0) * T::epsilon()
}

/// Arithmetic–geometric mean of two non-negative numbers.
pub fn agm<T: Real>(a: T, b: T) -> T {
    let (mut a, mut g) = (a, b);
    for _ in 0..MAX_ITER {
        if (a - g).abs() <= agm_tol::<T>() * a {
            break;
        }
        let next = (a + g) / T::lit(2.0);
        g = (a * g).sqrt();
        a = next;
    }
    a
}

/// `K(k) = π / (2·agm(1, √(1−k²)))`.
pub fn elliptic_k<T: Real>(k: T) -> Result<T> {
    check_modulus(k)?;
    if k == T::zero() {
        return Ok(T::FRAC_PI_2());
    }
    let kp = ((T::one() - k) * (T::one() + k)).sqrt();
    Ok(T::PI() / (T::lit(2.0) * agm(T::one(), kp)))
}

/// Jacobi elliptic functions at argument `u` and modulus `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobi<T> {
    pub sn: T,
    pub cn: T,
    pub dn: T,
}

/// `sn`, `cn`, `dn` via the descending Landen (AGM) scheme.
pub fn jacobi<T: Real>(u: T, k: T) -> Result<Jacobi<T>> {
    check_modulus(k)?;
    if !u.is_finite() {
        return Err(Error::NonFinite("elliptic argument"));
    }
    if k == T::zero() {
        return Ok(Jacobi { sn: u.sin(), cn: u.cos(), dn: T::one() });
    }
    let two = T::lit(2.0);
    let mut a = vec![T::one()];
    let mut c = vec![k];
    let mut b = ((T::one() - k) * (T::one() + k)).sqrt();
    for _ in 0..MAX_ITER {
        let an = *a.last().unwrap();
        let cn = (an - b) / two;
        let next = (an + b) / two;
        b = (an * b).sqrt();
        a.push(next);
        c.push(cn);
        if cn.abs() <= agm_tol::<T>() * next {
            break;
        }
    }
    let n = a.len() - 1;
    let mut phi = two.powi(n as i32) * a[n] * u;
    for i in (1..=n).rev() {
        let s = (c[i] / a[i] * phi.sin()).max(-T::one()).min(T::one());
        phi = (phi + s.asin()) / two;
    }
    let sn = phi.sin();
    let cn = phi.cos();
    // dn² = k′² + k² cn²: both terms non-negative, no cancellation near u = K.
    let kp2 = (T::one() - k) * (T::one() + k);
    let dn = (kp2 + k * k * cn * cn).sqrt();
    Ok(Jacobi { sn, cn, dn })
}

pub fn jacobi_cn_dn<T: Real>(u: T, k: T) -> Result<(T, T)> {
    jacobi(u, k).map(|j| (j.cn, j.dn))
}
