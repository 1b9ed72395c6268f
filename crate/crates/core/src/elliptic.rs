//! Complete elliptic integral `K(κ)`, Jacobi `sn`, `cn`, `dn`, and the
//! closed-form periodic waves of KdV and mKdV.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use crate::math::{asin, cos, sin, sqrt, PI};
use crate::waves::TravelingWave;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EllipticError {
    /// Modulus outside `[0, 1)`.
    Domain(f64),
}

impl fmt::Display for EllipticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EllipticError::Domain(k) => write!(f, "elliptic modulus {k} outside [0, 1)"),
        }
    }
}

impl core::error::Error for EllipticError {}

fn check(kappa: f64) -> Result<(), EllipticError> {
    if (0.0..1.0).contains(&kappa) {
        Ok(())
    } else {
        Err(EllipticError::Domain(kappa))
    }
}

/// Arithmetic–geometric mean.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        let next = 0.5 * (a + b);
        b = sqrt(a * b);
        a = next;
        if (a - b).abs() <= 2.0 * f64::EPSILON * a {
            break;
        }
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind, `K(κ) = ∫₀^{π/2} dθ/√(1 − κ² sin²θ)`.
pub fn elliptic_k(kappa: f64) -> Result<f64, EllipticError> {
    check(kappa)?;
    Ok(PI / (2.0 * agm(1.0, sqrt((1.0 - kappa) * (1.0 + kappa)))))
}

/// `(sn, cn, dn)` of `u` with modulus `κ`, by the descending Landen/AGM scheme.
pub fn jacobi_sncndn(u: f64, kappa: f64) -> Result<(f64, f64, f64), EllipticError> {
    check(kappa)?;
    if kappa == 0.0 {
        return Ok((sin(u), cos(u), 1.0));
    }
    let mut a = [0.0f64; 16];
    let mut c = [0.0f64; 16];
    a[0] = 1.0;
    let mut b = sqrt((1.0 - kappa) * (1.0 + kappa));
    c[0] = kappa;
    let mut n = 0;
    while n < 15 {
        let an = a[n];
        a[n + 1] = 0.5 * (an + b);
        c[n + 1] = 0.5 * (an - b);
        b = sqrt(an * b);
        n += 1;
        if c[n].abs() <= f64::EPSILON * a[n] {
            break;
        }
    }
    let mut phi = libm::ldexp(a[n] * u, n as i32);
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + asin(c[j] / a[j] * sin(phi)));
    }
    let (s, co) = (sin(phi), cos(phi));
    // dn > 0 on the real line
    Ok((s, co, sqrt((1.0 - kappa * s) * (1.0 + kappa * s))))
}

pub fn jacobi_sn(u: f64, kappa: f64) -> Result<f64, EllipticError> {
    Ok(jacobi_sncndn(u, kappa)?.0)
}

pub fn jacobi_cn(u: f64, kappa: f64) -> Result<f64, EllipticError> {
    Ok(jacobi_sncndn(u, kappa)?.1)
}

pub fn jacobi_dn(u: f64, kappa: f64) -> Result<f64, EllipticError> {
    Ok(jacobi_sncndn(u, kappa)?.2)
}

/// Which closed-form family a wave belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    /// `u = (12κ²K²/π²) cn²(Kx/π)` for `u_t + u u_x + u_xxx = 0`.
    KdvCnoidal,
    /// `u = (2√2 κK/π) cn(2Kx/π)` for `u_t + 3u² u_x + u_xxx = 0`.
    MkdvCn,
    /// `u = (2√2 κK/π) sn(2Kx/π + K)` for `u_t − 3u² u_x + u_xxx = 0`; the
    /// shift by a quarter period makes the profile even.
    MkdvSn,
}

impl ClosedForm {
    pub fn model_id(self) -> &'static str {
        match self {
            ClosedForm::KdvCnoidal => "kdv",
            ClosedForm::MkdvCn => "mkdv-focusing",
            ClosedForm::MkdvSn => "mkdv-defocusing",
        }
    }

    fn sigma_power(self) -> (f64, i32) {
        match self {
            ClosedForm::KdvCnoidal => (1.0, 1),
            ClosedForm::MkdvCn => (3.0, 2),
            ClosedForm::MkdvSn => (-3.0, 2),
        }
    }

    /// Wave speed `c(κ)`.
    pub fn speed(self, kappa: f64) -> Result<f64, EllipticError> {
        let k = elliptic_k(kappa)?;
        let kk = k * k / (PI * PI);
        Ok(match self {
            ClosedForm::KdvCnoidal | ClosedForm::MkdvCn => 4.0 * kk * (2.0 * kappa * kappa - 1.0),
            ClosedForm::MkdvSn => -4.0 * (1.0 + kappa * kappa) * kk,
        })
    }

    /// Profile value `U(x)` and second derivative `U''(x)`, from the Jacobi
    /// functions and their first-derivative rules.
    pub fn profile(self, x: f64, kappa: f64) -> Result<(f64, f64), EllipticError> {
        let k = elliptic_k(kappa)?;
        let m = kappa * kappa;
        Ok(match self {
            ClosedForm::KdvCnoidal => {
                let beta = k / PI;
                let amp = 12.0 * m * beta * beta;
                let (s, c, d) = jacobi_sncndn(beta * x, kappa)?;
                // (cn²)'' = −2 (sn cn dn)' = −2 (cn²dn² − sn²dn² − κ² sn²cn²)
                let dd = -2.0 * (c * c * d * d - s * s * d * d - m * s * s * c * c);
                (amp * c * c, amp * beta * beta * dd)
            }
            ClosedForm::MkdvCn => {
                let beta = 2.0 * k / PI;
                let amp = core::f64::consts::SQRT_2 * kappa * beta;
                let (s, c, d) = jacobi_sncndn(beta * x, kappa)?;
                // cn'' = (−sn dn)' = −cn dn² + κ² sn² cn
                (amp * c, amp * beta * beta * (-c * d * d + m * s * s * c))
            }
            ClosedForm::MkdvSn => {
                let beta = 2.0 * k / PI;
                let amp = core::f64::consts::SQRT_2 * kappa * beta;
                let (s, c, d) = jacobi_sncndn(beta * x + k, kappa)?;
                // sn'' = (cn dn)' = −sn dn² − κ² sn cn²
                (amp * s, amp * beta * beta * (-s * d * d - m * s * c * c))
            }
        })
    }

    /// Closed-form wave as a cosine series with `modes` harmonics.
    pub fn wave(self, kappa: f64, modes: usize) -> Result<TravelingWave, EllipticError> {
        let c = self.speed(kappa)?;
        let points = 8 * modes.max(32);
        let values: Vec<f64> = (0..points)
            .map(|i| self.profile(PI * (i as f64 + 0.5) / points as f64, kappa).map(|p| p.0))
            .collect::<Result<_, _>>()?;
        let coefficients = crate::waves::cosine_coefficients(&values, modes);
        let residual = self.ode_residual(kappa, 256)?;
        let integration_constant = self.integration_constant(kappa)?;
        Ok(TravelingWave {
            model: self.model_id().to_string(),
            speed: c,
            amplitude: coefficients.get(1).copied().unwrap_or(0.0),
            coefficients,
            integration_constant,
            residual,
        })
    }

    fn integrated(self, kappa: f64, c: f64, x: f64) -> Result<f64, EllipticError> {
        let (sigma, p) = self.sigma_power();
        let (u, upp) = self.profile(x, kappa)?;
        Ok(-c * u + sigma * crate::math::powi(u, p + 1) / (p + 1) as f64 + upp)
    }

    /// The constant `B` in `−cU + σU^{p+1}/(p+1) + U'' = B`.
    pub fn integration_constant(self, kappa: f64) -> Result<f64, EllipticError> {
        let c = self.speed(kappa)?;
        self.integrated(kappa, c, 0.0)
    }

    /// Max over `points` equispaced points in `[0, 2π)` of the deviation of
    /// `−cU + σU^{p+1}/(p+1) + U''` from its value at `x = 0`. A constant value
    /// is exactly the traveling-wave ODE `−cU' + σUᵖU' + U''' = 0`.
    pub fn ode_residual(self, kappa: f64, points: usize) -> Result<f64, EllipticError> {
        let c = self.speed(kappa)?;
        let b = self.integrated(kappa, c, 0.0)?;
        let mut worst = 0.0f64;
        for i in 0..points {
            let x = 2.0 * PI * i as f64 / points as f64;
            worst = worst.max((self.integrated(kappa, c, x)? - b).abs());
        }
        Ok(worst)
    }
}

/// KdV cnoidal wave with 64 harmonics.
pub fn kdv_cnoidal(kappa: f64) -> Result<TravelingWave, EllipticError> {
    ClosedForm::KdvCnoidal.wave(kappa, 64)
}

/// Focusing mKdV cn wave with 64 harmonics.
pub fn mkdv_cn_wave(kappa: f64) -> Result<TravelingWave, EllipticError> {
    ClosedForm::MkdvCn.wave(kappa, 64)
}

/// Defocusing mKdV sn wave with 64 harmonics.
pub fn mkdv_sn_wave(kappa: f64) -> Result<TravelingWave, EllipticError> {
    ClosedForm::MkdvSn.wave(kappa, 64)
}
