//! Fractional centered-difference coefficients.
//!
//! The Riesz derivative of order γ is approximated by a symmetric difference
//! with weights ω_k^(γ) = (-1)^k Γ(γ+1) / (Γ(γ/2-k+1) Γ(γ/2+k+1)), lifted to
//! fourth order by the tridiagonal correction weights
//! ϱ_{±1} = -γ/24, ϱ_0 = 1 + γ/12.

use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;

/// A validated fractional order γ ∈ (0,1) ∪ (1,2].
///
/// γ = 1 is rejected separately: the Riesz scale 1/(2cos(πγ/2)) has a pole there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidOrder {
                gamma,
                reason: "order must be finite",
            });
        }
        if gamma <= 0.0 {
            return Err(Error::InvalidOrder {
                gamma,
                reason: "order must be positive",
            });
        }
        if gamma > 2.0 {
            return Err(Error::InvalidOrder {
                gamma,
                reason: "order must not exceed 2",
            });
        }
        if gamma == 1.0 {
            return Err(Error::InvalidOrder {
                gamma,
                reason: "order 1 is excluded (1/(2cos(pi*gamma/2)) pole)",
            });
        }
        Ok(Self(gamma))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// True for dispersion-type orders, γ ∈ (1,2].
    pub fn is_dispersion_order(self) -> bool {
        self.0 > 1.0
    }

    /// True for advection-type orders, γ ∈ (0,1).
    pub fn is_advection_order(self) -> bool {
        self.0 < 1.0
    }
}

/// Fourth-order correction weights (ϱ_{-1}, ϱ_0, ϱ_1) = (-γ/24, 1 + γ/12, -γ/24).
pub fn rho_coefficients(gamma: FractionalOrder) -> [f64; 3] {
    let g = gamma.value();
    [-g / 24.0, 1.0 + g / 12.0, -g / 24.0]
}

/// The symmetric half ω_0..ω_K of the centered-difference weights for one order,
/// together with the ϱ triple.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    gamma: FractionalOrder,
    omega: Vec<f64>,
    rho: [f64; 3],
}

impl CoefficientSet {
    pub fn gamma(&self) -> FractionalOrder {
        self.gamma
    }

    pub fn rho(&self) -> [f64; 3] {
        self.rho
    }

    /// Truncation count K; indices 0..=K are stored.
    pub fn truncation(&self) -> usize {
        self.omega.len() - 1
    }

    /// ω_k by signed index; ω_{-k} = ω_k, zero beyond the truncation.
    pub fn omega(&self, k: i64) -> f64 {
        let k = k.unsigned_abs() as usize;
        self.omega.get(k).copied().unwrap_or(0.0)
    }

    /// The stored half as a slice (index k = 0..=K).
    pub fn omega_half(&self) -> &[f64] {
        &self.omega
    }

    /// Truncated total sum ω_0 + 2 Σ_{k=1..K} ω_k.
    ///
    /// The tail terms are summed smallest-first so the near-cancellation against
    /// ω_0 is not polluted by rounding; the analytic value tends to 0 as K → ∞.
    pub fn truncated_total(&self) -> f64 {
        let tail: f64 = self.omega[1..].iter().rev().sum();
        self.omega[0] + 2.0 * tail
    }
}

/// Generate ω_0..ω_K by the multiplicative recurrence
/// ω_0 = Γ(γ+1)/Γ(γ/2+1)², ω_{k+1} = ω_k (k - γ/2)/(k + 1 + γ/2).
///
/// The recurrence is algebraically identical to the gamma-function quotient and
/// avoids the Γ poles at nonpositive arguments that the direct form hits for k ≥ 2.
pub fn omega_coefficients(gamma: FractionalOrder, k_max: usize) -> Result<CoefficientSet> {
    if k_max == 0 {
        return Err(Error::InvalidArgument(
            "coefficient truncation K must be at least 1".into(),
        ));
    }
    let g = gamma.value();
    let mut omega = Vec::with_capacity(k_max + 1);
    omega.push((ln_gamma(g + 1.0) - 2.0 * ln_gamma(g / 2.0 + 1.0)).exp());
    for k in 0..k_max {
        let k = k as f64;
        let next = omega[omega.len() - 1] * (k - g / 2.0) / (k + 1.0 + g / 2.0);
        omega.push(next);
    }
    Ok(CoefficientSet {
        gamma,
        omega,
        rho: rho_coefficients(gamma),
    })
}

/// Direct evaluation of ω_k via the gamma-function formula.
///
/// Valid only where Γ(γ/2 - k + 1) is finite (its argument not a nonpositive
/// integer); used as an independent cross-check of the recurrence.
pub fn omega_direct(gamma: FractionalOrder, k: i64) -> Result<f64> {
    let g = gamma.value();
    let k = k.unsigned_abs() as f64;
    let left_arg = g / 2.0 - k + 1.0;
    if left_arg <= 0.0 && left_arg.fract() == 0.0 {
        return Err(Error::InvalidArgument(format!(
            "gamma-function pole at argument {left_arg}"
        )));
    }
    let sign = if (k as i64) % 2 == 0 { 1.0 } else { -1.0 };
    let gamma_left = statrs::function::gamma::gamma(left_arg);
    Ok(sign * gamma_fn_total(g + 1.0) / (gamma_left * gamma_fn_total(g / 2.0 + k + 1.0)))
}

// Positive-argument gamma via ln_gamma (sharper than the reflection path).
fn gamma_fn_total(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Truncated generating-function sum ω_0 + 2 Σ_{k=1..K} ω_k cos(kz).
///
/// Approximates |2 sin(z/2)|^γ; the imaginary parts of Σ ω_k e^{-ikz} cancel by
/// the symmetry ω_{-k} = ω_k. The tail decays like K^{-1-γ}, so K must be large
/// for small z.
pub fn generating_function(gamma: FractionalOrder, z: f64, k_max: usize) -> Result<f64> {
    let coeffs = omega_coefficients(gamma, k_max)?;
    let mut acc = 0.0;
    for k in (1..=k_max).rev() {
        acc += coeffs.omega[k] * (k as f64 * z).cos();
    }
    Ok(coeffs.omega[0] + 2.0 * acc)
}
