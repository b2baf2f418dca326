//! Closed-form elasticae parametrized by moduli `(m, w, A, c, beta)`.
//!
//! The curvature is `k^2(s) = A^2 (1 - (m/w) sn^2(v, m))` with phase
//! `v = A s / (2 sqrt(w)) + beta`, the torsion satisfies `k^2 t = c`, and the
//! multiplier, torsion constant and Killing-field magnitude are functions of
//! the moduli.

mod axis;
mod reconstruct;

pub use axis::{fit_killing_axis, KillingAxis};
pub use reconstruct::{analytic_bending_energy, reconstruct, reconstruct_planar, reconstruct_spatial};

use serde::{Deserialize, Serialize};

use crate::elliptic::{complete_k, jacobi_unchecked, Jacobi};
use crate::{Error, Result};

/// Tolerance used to decide family membership (`w = 1`, `w = m`, ...).
pub const FAMILY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    /// `w = m` in `(0, 1)`: planar, with inflection points.
    Wavelike,
    /// `w = 1`, `m` in `(0, 1)`: planar, curvature of one sign.
    Orbitlike,
    /// `m = w = 1`: planar single loop, curvature decays like `sech`.
    Borderline,
    /// `m = 0`, `w = 1`: circular arc.
    Circular,
    /// Nonzero torsion constant.
    Spatial,
}

impl FamilyKind {
    pub fn is_planar(self) -> bool {
        self != FamilyKind::Spatial
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TorsionSign {
    Plus,
    Minus,
}

impl TorsionSign {
    fn value(self) -> f64 {
        match self {
            TorsionSign::Plus => 1.0,
            TorsionSign::Minus => -1.0,
        }
    }
}

/// A point of the moduli space with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticaParams {
    pub m: f64,
    pub w: f64,
    /// Curvature amplitude `A` (maximum of `|k|`).
    pub amplitude: f64,
    /// Torsion constant `c = k^2 t`.
    pub c: f64,
    /// Phase shift, normalized to `[-2K(m), 0]` when `m < 1`.
    pub beta: f64,
    pub lambda: f64,
    /// Killing-field magnitude `|J|`.
    pub killing: f64,
    pub family: FamilyKind,
}

/// `lambda = A^2 (3w - m - 1) / (2w)`.
pub fn lambda_from_moduli(m: f64, w: f64, amplitude: f64) -> f64 {
    amplitude * amplitude * (3.0 * w - m - 1.0) / (2.0 * w)
}

/// `c = sign * A^3 / (2w) * sqrt((1 - w)(w - m))`.
pub fn torsion_constant_from_moduli(m: f64, w: f64, amplitude: f64, sign: TorsionSign) -> f64 {
    let prod = ((1.0 - w) * (w - m)).max(0.0);
    sign.value() * amplitude.powi(3) / (2.0 * w) * prod.sqrt()
}

fn classify(m: f64, w: f64) -> FamilyKind {
    let w_is_one = 1.0 - w <= FAMILY_TOL;
    let w_is_m = w - m <= FAMILY_TOL;
    if w_is_one && m <= FAMILY_TOL {
        FamilyKind::Circular
    } else if w_is_one && 1.0 - m <= FAMILY_TOL {
        FamilyKind::Borderline
    } else if w_is_one {
        FamilyKind::Orbitlike
    } else if w_is_m {
        FamilyKind::Wavelike
    } else {
        FamilyKind::Spatial
    }
}

/// Validates `0 <= m <= w <= 1`, `w > 0`, `A > 0`.
pub fn check_region(m: f64, w: f64, amplitude: f64) -> Result<()> {
    if !(m.is_finite() && w.is_finite() && amplitude.is_finite()) {
        return Err(Error::InvalidModuli("non-finite moduli".into()));
    }
    if !(0.0 <= m && m <= w && w <= 1.0 && w > 0.0) {
        return Err(Error::InvalidModuli(format!("(m, w) = ({m}, {w}) outside 0 <= m <= w <= 1, w > 0")));
    }
    if !(amplitude > 0.0) {
        return Err(Error::InvalidModuli(format!("amplitude {amplitude} must be positive")));
    }
    Ok(())
}

impl ElasticaParams {
    pub fn new(m: f64, w: f64, amplitude: f64, sign: TorsionSign, beta: f64) -> Result<Self> {
        check_region(m, w, amplitude)?;
        if !beta.is_finite() {
            return Err(Error::InvalidModuli("non-finite phase".into()));
        }
        let family = classify(m, w);
        // Planar families are snapped onto their defining relations.
        let (m, w) = match family {
            FamilyKind::Circular => (0.0, 1.0),
            FamilyKind::Borderline => (1.0, 1.0),
            FamilyKind::Orbitlike => (m, 1.0),
            FamilyKind::Wavelike => (m, m),
            FamilyKind::Spatial => (m, w),
        };
        let c = if family.is_planar() {
            0.0
        } else {
            torsion_constant_from_moduli(m, w, amplitude, sign)
        };
        let beta = if m < 1.0 {
            let half = 2.0 * complete_k(m)?;
            let r = beta.rem_euclid(half);
            if r == 0.0 {
                0.0
            } else {
                r - half
            }
        } else {
            beta
        };
        let lambda = lambda_from_moduli(m, w, amplitude);
        let a2 = (amplitude * amplitude - lambda).powi(2) + 4.0 * c * c / (amplitude * amplitude);
        Ok(Self {
            m,
            w,
            amplitude,
            c,
            beta,
            lambda,
            killing: a2.sqrt(),
            family,
        })
    }

    /// Planar wavelike elastica `k = A cn(A s / (2 sqrt(m)) + beta, m)`.
    pub fn wavelike(m: f64, amplitude: f64, beta: f64) -> Result<Self> {
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::InvalidModuli(format!("wavelike parameter {m} outside (0, 1)")));
        }
        Self::new(m, m, amplitude, TorsionSign::Plus, beta)
    }

    /// Planar orbitlike elastica `k = A dn(A s / 2 + beta, m)`.
    pub fn orbitlike(m: f64, amplitude: f64, beta: f64) -> Result<Self> {
        Self::new(m, 1.0, amplitude, TorsionSign::Plus, beta)
    }

    /// Planar borderline elastica `k = A sech(A s / 2 + beta)`.
    pub fn borderline(amplitude: f64, beta: f64) -> Result<Self> {
        Self::new(1.0, 1.0, amplitude, TorsionSign::Plus, beta)
    }

    pub fn circular(amplitude: f64) -> Result<Self> {
        Self::new(0.0, 1.0, amplitude, TorsionSign::Plus, 0.0)
    }

    /// `d v / d s` for the phase `v = A s / (2 sqrt(w)) + beta`.
    fn phase_rate(&self) -> f64 {
        self.amplitude / (2.0 * self.w.sqrt())
    }

    fn jacobi(&self, s: f64) -> Jacobi {
        jacobi_unchecked(self.phase_rate() * s + self.beta, self.m)
    }

    pub fn curvature_squared(&self, s: f64) -> f64 {
        if self.m == 0.0 {
            return self.amplitude * self.amplitude;
        }
        let j = self.jacobi(s);
        let a2 = self.amplitude * self.amplitude;
        (a2 * (1.0 - self.m / self.w * j.sn * j.sn)).max(0.0)
    }

    /// `d(k^2)/ds`.
    pub fn curvature_squared_derivative(&self, s: f64) -> f64 {
        if self.m == 0.0 {
            return 0.0;
        }
        let j = self.jacobi(s);
        -2.0 * self.amplitude * self.amplitude * self.m / self.w * j.sn * j.cn * j.dn * self.phase_rate()
    }

    /// Signed curvature of a planar family.
    pub fn signed_curvature(&self, s: f64) -> Result<f64> {
        Ok(self.signed_curvature_and_derivative(s)?.0)
    }

    /// `(k, dk/ds)` with the sign convention of [`ElasticaParams::signed_curvature`].
    pub fn signed_curvature_and_derivative(&self, s: f64) -> Result<(f64, f64)> {
        let a = self.amplitude;
        let rate = self.phase_rate();
        let j = self.jacobi(s);
        Ok(match self.family {
            FamilyKind::Spatial => return Err(Error::NotPlanar(self.c)),
            FamilyKind::Circular => (a, 0.0),
            FamilyKind::Wavelike => (a * j.cn, -a * rate * j.sn * j.dn),
            FamilyKind::Orbitlike => (a * j.dn, -a * rate * self.m * j.sn * j.cn),
            FamilyKind::Borderline => (a * j.cn, -a * rate * j.sn * j.cn),
        })
    }

    /// `(k, dk/ds)` with `k = sqrt(k^2) >= 0`, for the spatial families.
    pub(crate) fn unsigned_curvature_and_derivative(&self, s: f64) -> (f64, f64) {
        let k = self.curvature_squared(s).sqrt();
        let dk = if k > 0.0 {
            self.curvature_squared_derivative(s) / (2.0 * k)
        } else {
            0.0
        };
        (k, dk)
    }

    pub fn torsion(&self, s: f64) -> Result<f64> {
        if self.c == 0.0 {
            return Ok(0.0);
        }
        let k2 = self.curvature_squared(s);
        if k2 <= FAMILY_TOL * self.amplitude * self.amplitude {
            return Err(Error::SingularTorsion(s));
        }
        Ok(self.c / k2)
    }

    /// `(k^2 - lambda)^2 + 4 k_s^2 + 4 k^2 t^2` evaluated at `s`; constant
    /// along the curve.
    pub fn killing_squared_at(&self, s: f64) -> Result<f64> {
        let k2 = self.curvature_squared(s);
        let dk2 = self.curvature_squared_derivative(s);
        let mut v = (k2 - self.lambda).powi(2);
        if k2 > 0.0 {
            // 4 k_s^2 = (k^2)_s^2 / k^2
            v += dk2 * dk2 / k2;
        } else if self.family == FamilyKind::Wavelike {
            let (_, dk) = self.signed_curvature_and_derivative(s)?;
            v += 4.0 * dk * dk;
        }
        if self.c != 0.0 {
            v += 4.0 * self.c * self.c / k2.max(f64::MIN_POSITIVE);
        }
        Ok(v)
    }

    /// `|J|`, or a degenerate error for the circle with `k^2 = lambda`.
    pub fn killing_magnitude(&self) -> Result<f64> {
        if self.killing <= FAMILY_TOL * self.amplitude * self.amplitude {
            return Err(Error::Degenerate(
                "circular arc with k^2 = lambda has a vanishing Killing field".into(),
            ));
        }
        Ok(self.killing)
    }

    /// Distance from the Killing axis: `(2/a^2) sqrt(a^2 k^2 - 4 c^2)`.
    pub fn cylindrical_radius(&self, s: f64) -> Result<f64> {
        let a = self.killing_magnitude()?;
        let a2 = a * a;
        let inner = a2 * self.curvature_squared(s) - 4.0 * self.c * self.c;
        Ok(2.0 / a2 * inner.max(0.0).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::complete_k;

    #[test]
    fn multiplier_formula_special_cases() {
        assert_eq!(lambda_from_moduli(0.5, 0.5, 3.0), 0.0);
        let j = 7.0;
        assert!((lambda_from_moduli(1.0, 1.0, 2.0 * j) - 2.0 * j * j).abs() < 1e-12);
        let (m, a): (f64, f64) = (0.3, 1.7);
        assert!((lambda_from_moduli(m, m, a) - a * a / (2.0 * m) * (2.0 * m - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn torsion_constant_squares_match() {
        assert_eq!(torsion_constant_from_moduli(0.3, 1.0, 2.0, TorsionSign::Plus), 0.0);
        assert_eq!(torsion_constant_from_moduli(0.3, 0.3, 2.0, TorsionSign::Minus).abs(), 0.0);
        for &(m, w, a) in &[(0.0, 0.5, 1.0), (0.2, 0.7, 2.5), (0.6, 0.9, 0.4)] {
            let c = torsion_constant_from_moduli(m, w, a, TorsionSign::Minus);
            assert!(c < 0.0);
            let rhs = a.powi(6) / (w * w) * (1.0 - w) * (w - m);
            assert!((4.0 * c * c - rhs).abs() <= 1e-14 * rhs);
        }
    }

    #[test]
    fn families() {
        assert_eq!(ElasticaParams::circular(1.0).unwrap().family, FamilyKind::Circular);
        assert_eq!(ElasticaParams::borderline(1.0, 0.3).unwrap().family, FamilyKind::Borderline);
        assert_eq!(ElasticaParams::wavelike(0.4, 1.0, 0.0).unwrap().family, FamilyKind::Wavelike);
        assert_eq!(ElasticaParams::orbitlike(0.4, 1.0, 0.0).unwrap().family, FamilyKind::Orbitlike);
        let p = ElasticaParams::new(0.2, 0.6, 1.0, TorsionSign::Plus, 0.0).unwrap();
        assert_eq!(p.family, FamilyKind::Spatial);
        assert!(p.signed_curvature(0.1).is_err());
        for (m, w, a) in [(0.5, 0.4, 1.0), (-0.1, 0.5, 1.0), (0.0, 0.0, 1.0), (0.2, 1.1, 1.0), (0.2, 0.5, 0.0)] {
            assert!(matches!(
                ElasticaParams::new(m, w, a, TorsionSign::Plus, 0.0),
                Err(Error::InvalidModuli(_))
            ));
        }
    }

    #[test]
    fn phase_is_normalized() {
        let m = 0.3;
        let k = complete_k(m).unwrap();
        let p = ElasticaParams::orbitlike(m, 1.0, 0.7).unwrap();
        assert!((p.beta - (0.7 - 2.0 * k)).abs() < 1e-14);
        let q = ElasticaParams::orbitlike(m, 1.0, -5.0 * k).unwrap();
        assert!(q.beta >= -2.0 * k && q.beta <= 0.0);
        // Orbitlike curvature has period 2K in the phase, so the shift is invisible.
        let r = ElasticaParams {
            beta: 0.7,
            ..p
        };
        for s in [0.0, 0.4, 1.3] {
            assert!((p.signed_curvature(s).unwrap() - r.signed_curvature(s).unwrap()).abs() < 1e-13);
        }
        assert_eq!(ElasticaParams::borderline(2.0, 3.5).unwrap().beta, 3.5);
    }

    #[test]
    fn curvature_extremes() {
        let m = 0.45;
        let k = complete_k(m).unwrap();
        let p = ElasticaParams::wavelike(m, 2.0, 0.0).unwrap();
        let rate = 2.0 / (2.0 * m.sqrt());
        assert!(p.curvature_squared(k / rate).abs() < 1e-14);
        assert!((p.curvature_squared(0.0) - 4.0).abs() < 1e-15);
        let b = ElasticaParams::borderline(3.0, 0.0).unwrap();
        for s in [0.0, 0.3, 1.7] {
            let sech = 1.0 / (1.5 * s as f64).cosh();
            assert!((b.curvature_squared(s) - 9.0 * sech * sech).abs() < 1e-13);
        }
    }

    #[test]
    fn signed_curvature_squares_to_curvature_squared() {
        let ps = [
            ElasticaParams::wavelike(0.7, 1.3, -0.4).unwrap(),
            ElasticaParams::orbitlike(0.7, 1.3, -0.4).unwrap(),
            ElasticaParams::borderline(1.3, 0.2).unwrap(),
            ElasticaParams::circular(1.3).unwrap(),
        ];
        for p in &ps {
            for i in 0..50 {
                let s = 0.1 * i as f64;
                let (k, dk) = p.signed_curvature_and_derivative(s).unwrap();
                assert!((k * k - p.curvature_squared(s)).abs() < 1e-13);
                let h = 1e-5;
                let fd = (p.signed_curvature(s + h).unwrap() - p.signed_curvature(s - h).unwrap()) / (2.0 * h);
                assert!((fd - dk).abs() < 1e-7, "{:?} {s} {fd} {dk}", p.family);
            }
        }
    }

    #[test]
    fn torsion_and_killing() {
        let p = ElasticaParams::new(0.3, 0.8, 1.4, TorsionSign::Minus, -0.5).unwrap();
        for i in 0..40 {
            let s = 0.17 * i as f64;
            assert!((p.torsion(s).unwrap() * p.curvature_squared(s) - p.c).abs() < 1e-14);
            let a2 = p.killing_squared_at(s).unwrap();
            assert!((a2 - p.killing * p.killing).abs() < 1e-12 * a2, "{a2} {}", p.killing);
        }
        let circle = ElasticaParams::circular(2.0).unwrap();
        assert!(matches!(circle.killing_magnitude(), Err(Error::Degenerate(_))));
        assert!(circle.cylindrical_radius(0.0).is_err());
        assert_eq!(circle.torsion(0.3).unwrap(), 0.0);
    }

    #[test]
    fn borderline_radius_at_apex() {
        let a = 2.5;
        let p = ElasticaParams::borderline(a, 0.0).unwrap();
        assert!((p.killing_magnitude().unwrap() - a * a / 2.0).abs() < 1e-14);
        assert!((p.cylindrical_radius(0.0).unwrap() - 4.0 / a).abs() < 1e-14);
        let w = ElasticaParams::wavelike(0.5, 1.0, 0.0).unwrap();
        let k = complete_k(0.5).unwrap();
        let s_inflection = k / (1.0 / (2.0 * 0.5f64.sqrt()));
        assert!(w.cylindrical_radius(s_inflection).unwrap() < 1e-7);
    }
}
