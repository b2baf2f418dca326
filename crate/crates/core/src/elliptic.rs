//! Complete elliptic integrals and Jacobi elliptic functions.
//!
//! Everything is expressed in the parameter `m = p^2` (not the modulus `p`),
//! with the usual normalization `sn(0) = 0`, `cn(0) = dn(0) = 1` and
//! `sn(K(m), m) = 1`.
//!
//! `K` and `E` come from the arithmetic-geometric mean; the Jacobi functions
//! from the descending AGM phase recursion. `m = 1` is handled by the exact
//! hyperbolic branch `sn = tanh`, `cn = dn = sech`.

use std::f64::consts::FRAC_PI_2;

use crate::{Error, Result};

const MAX_AGM_STEPS: usize = 64;

/// Elliptic parameter `m` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EllipticParameter(f64);

impl EllipticParameter {
    pub fn new(m: f64) -> Result<Self> {
        check_parameter(m)?;
        Ok(Self(m))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn complementary(self) -> f64 {
        1.0 - self.0
    }
}

impl TryFrom<f64> for EllipticParameter {
    type Error = Error;

    fn try_from(m: f64) -> Result<Self> {
        Self::new(m)
    }
}

fn check_parameter(m: f64) -> Result<()> {
    if (0.0..=1.0).contains(&m) {
        Ok(())
    } else {
        Err(Error::ParameterDomain(m))
    }
}

/// Result of running the AGM on `(1, sqrt(1 - m))`.
struct Agm {
    /// Common limit of the two means.
    limit: f64,
    /// `sum_{n >= 1} 2^(n-1) c_n^2`; the `n = 0` term (`m / 2`) is kept
    /// separate so small-`m` callers avoid cancellation.
    tail: f64,
}

fn agm(m: f64) -> Agm {
    let b0 = (1.0 - m).sqrt();
    let mut a = 0.5 * (1.0 + b0);
    let mut b = b0.sqrt();
    // c_1 = (a_0 - b_0) / 2, written without cancellation.
    let mut c = m / (2.0 * (1.0 + b0));
    let mut tail = 0.0;
    let mut weight = 1.0;
    for _ in 0..MAX_AGM_STEPS {
        tail += weight * c * c;
        if c <= f64::EPSILON * a {
            break;
        }
        let a_next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = a_next;
        // c_{n+1} = c_n^2 / (4 a_{n+1})
        c = c * c / (4.0 * a);
        weight *= 2.0;
    }
    Agm { limit: a, tail }
}

/// Complete elliptic integral of the first kind, `K(m)`.
pub fn complete_k(m: f64) -> Result<f64> {
    check_parameter(m)?;
    if m == 1.0 {
        return Err(Error::Divergence);
    }
    Ok(FRAC_PI_2 / agm(m).limit)
}

/// Complete elliptic integral of the second kind, `E(m)`.
pub fn complete_e(m: f64) -> Result<f64> {
    check_parameter(m)?;
    if m == 1.0 {
        return Ok(1.0);
    }
    let g = agm(m);
    let k = FRAC_PI_2 / g.limit;
    Ok(k * (1.0 - 0.5 * m - g.tail))
}

/// `int_0^{2K(m)} cn^2(u, m) du`, one full period of `cn^2`.
///
/// Equal to `2 (E - (1 - m) K) / m`, evaluated here as `K (1 - 2 tail / m)`
/// from the AGM so that it stays accurate as `m -> 0`, where the value tends
/// to `pi / 2`.
pub fn cn_squared_period_integral(m: f64) -> Result<f64> {
    check_parameter(m)?;
    if m == 1.0 {
        return Err(Error::Divergence);
    }
    let g = agm(m);
    let k = FRAC_PI_2 / g.limit;
    if m == 0.0 {
        return Ok(k);
    }
    Ok(k * (1.0 - 2.0 * g.tail / m))
}

/// The triple `(sn, cn, dn)` at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobi {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Jacobi elliptic functions `sn, cn, dn` of argument `u` and parameter `m`.
pub fn jacobi_sn_cn_dn(u: f64, m: f64) -> Result<Jacobi> {
    check_parameter(m)?;
    if !u.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite argument u = {u}")));
    }
    Ok(jacobi_unchecked(u, m))
}

pub(crate) fn jacobi_unchecked(u: f64, m: f64) -> Jacobi {
    if m == 0.0 {
        let (s, c) = u.sin_cos();
        return Jacobi { sn: s, cn: c, dn: 1.0 };
    }
    if m == 1.0 {
        let sech = 1.0 / u.cosh();
        return Jacobi {
            sn: u.tanh(),
            cn: sech,
            dn: sech,
        };
    }

    // Reduce modulo the real period 4K so the phase recursion below never
    // sees large arguments.
    let quarter = FRAC_PI_2 / agm(m).limit;
    let period = 4.0 * quarter;
    let u = if u.abs() > period {
        u - period * (u / period).round()
    } else {
        u
    };

    let mut a = [0.0_f64; MAX_AGM_STEPS + 1];
    let mut c = [0.0_f64; MAX_AGM_STEPS + 1];
    a[0] = 1.0;
    let mut b = (1.0 - m).sqrt();
    c[0] = m.sqrt();
    let mut n = 0;
    while n < MAX_AGM_STEPS && c[n].abs() > f64::EPSILON * a[n] {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }

    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for i in (1..=n).rev() {
        phi = 0.5 * (phi + (c[i] / a[i] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    // 1 - m sn^2 written as a sum of nonnegative terms.
    let dn = ((1.0 - m) + m * cn * cn).sqrt();
    Jacobi { sn, cn, dn }
}
