//! Shared domain types: the physical parameters of the driven atom, the
//! driving-regime classification relative to the resonant exceptional point,
//! and the auxiliary frequencies that parametrise the resonant closed forms.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex rate/frequency. The real part is a rate, the imaginary part a frequency.
pub type ComplexFrequency = Complex64;

/// Default half-width (in units of gamma) of the band around the resonant
/// exceptional point that is classified as `AtEp`.
pub const DEFAULT_EP_TOL: f64 = 1e-9;

/// Laser detuning, drive amplitude, decay rate and drive phase.
///
/// All frequencies share the units of `gamma`. The phase is canonicalised to
/// `[0, 2pi)`; no observable depends on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomParams {
    delta: f64,
    omega: f64,
    gamma: f64,
    theta: f64,
}

impl AtomParams {
    pub fn new(delta: f64, omega: f64, gamma: f64, theta: f64) -> Result<Self> {
        if !(delta.is_finite() && omega.is_finite() && gamma.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "non-finite input (delta={delta}, omega={omega}, gamma={gamma}, theta={theta})"
            )));
        }
        if gamma <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "gamma must be > 0, got {gamma}"
            )));
        }
        if omega < 0.0 {
            return Err(Error::InvalidParams(format!(
                "omega must be >= 0 (fold the sign into theta), got {omega}"
            )));
        }
        let mut theta = theta.rem_euclid(TAU);
        if theta >= TAU {
            theta = 0.0;
        }
        Ok(Self {
            delta,
            omega,
            gamma,
            theta,
        })
    }

    /// Resonant drive in units where gamma = 1.
    pub fn resonant(omega: f64) -> Result<Self> {
        Self::new(0.0, omega, 1.0, 0.0)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        Self::new(delta, self.omega, self.gamma, self.theta)
    }

    pub fn with_omega(self, omega: f64) -> Result<Self> {
        Self::new(self.delta, omega, self.gamma, self.theta)
    }

    pub fn with_theta(self, theta: f64) -> Result<Self> {
        Self::new(self.delta, self.omega, self.gamma, theta)
    }

    /// `e^{i theta}`
    pub fn phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }

    pub fn is_resonant(&self) -> bool {
        self.delta == 0.0
    }

    pub(crate) fn require_resonant(&self) -> Result<()> {
        if self.is_resonant() {
            Ok(())
        } else {
            Err(Error::NonResonantInput { delta: self.delta })
        }
    }

    /// `2 Omega^2 + Delta^2 + (gamma/2)^2`, the common denominator of the
    /// steady-state moments.
    pub fn saturation_denominator(&self) -> f64 {
        2.0 * self.omega * self.omega + self.delta * self.delta + 0.25 * self.gamma * self.gamma
    }

    /// Drive amplitude of the resonant exceptional point, `gamma / 8`.
    pub fn resonant_ep_omega(&self) -> f64 {
        self.gamma / 8.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeTag {
    BelowEp,
    AtEp,
    AboveEp,
}

/// Position of a resonant drive relative to the exceptional point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrivingRegime {
    pub tag: RegimeTag,
    /// `(Omega - Omega_EP) / gamma`
    pub distance: f64,
}

/// Classify a resonant drive against `Omega_EP = gamma / 8`.
///
/// `ep_tol` is measured in units of gamma, like `distance`.
pub fn classify_regime(params: &AtomParams, ep_tol: f64) -> Result<DrivingRegime> {
    params.require_resonant()?;
    let distance = (params.omega - params.resonant_ep_omega()) / params.gamma;
    let tag = if distance.abs() <= ep_tol {
        RegimeTag::AtEp
    } else if distance < 0.0 {
        RegimeTag::BelowEp
    } else {
        RegimeTag::AboveEp
    };
    Ok(DrivingRegime { tag, distance })
}

/// `(2 Omega)^2 - (gamma/4)^2`, evaluated in factored form so that it
/// vanishes cleanly at the exceptional point.
pub(crate) fn omega_tilde_squared(omega: f64, gamma: f64) -> f64 {
    (2.0 * omega - 0.25 * gamma) * (2.0 * omega + 0.25 * gamma)
}

/// The resonant splitting frequency `sqrt((2 Omega)^2 - (gamma/4)^2)`.
///
/// Above the exceptional point this is real. Below it the radicand is
/// negative and the result is `i Gamma` with `Gamma` from [`hyperbolic_rate`].
pub fn auxiliary_omega_tilde(params: &AtomParams) -> Result<ComplexFrequency> {
    params.require_resonant()?;
    let sq = omega_tilde_squared(params.omega, params.gamma);
    Ok(if sq >= 0.0 {
        Complex64::new(sq.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-sq).sqrt())
    })
}

/// `Gamma = sqrt((gamma/4)^2 - (2 Omega)^2)` below the exceptional point, zero otherwise.
pub fn hyperbolic_rate(params: &AtomParams) -> Result<f64> {
    params.require_resonant()?;
    Ok((-omega_tilde_squared(params.omega, params.gamma))
        .max(0.0)
        .sqrt())
}

/// Resolved splitting used by the piecewise closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Splitting {
    /// Real `Omega_tilde`.
    Oscillatory(f64),
    Critical,
    /// Real `Gamma`.
    Hyperbolic(f64),
}

impl Splitting {
    pub(crate) fn resolve(params: &AtomParams) -> Result<(Splitting, DrivingRegime)> {
        let regime = classify_regime(params, DEFAULT_EP_TOL)?;
        let sq = omega_tilde_squared(params.omega, params.gamma);
        let split = match regime.tag {
            RegimeTag::AtEp => Splitting::Critical,
            RegimeTag::AboveEp => Splitting::Oscillatory(sq.max(0.0).sqrt()),
            RegimeTag::BelowEp => Splitting::Hyperbolic((-sq).max(0.0).sqrt()),
        };
        Ok((split, regime))
    }
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|k| if k == n - 1 { hi } else { lo + step * k as f64 })
                .collect()
        }
    }
}

/// `n` logarithmically spaced points on `[lo, hi]`, `0 < lo <= hi`.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    linspace(a, b, n)
        .into_iter()
        .enumerate()
        .map(|(k, x)| {
            if k == 0 {
                lo
            } else if k == n - 1 {
                hi
            } else {
                x.exp()
            }
        })
        .collect()
}

/// Delay grid used by the correlator engines unless told otherwise:
/// `tau = 0` followed by 400 log-spaced points on `[1e-3, 20] / gamma`.
pub fn default_tau_grid(gamma: f64) -> Vec<f64> {
    let mut grid = vec![0.0];
    grid.extend(logspace(1e-3 / gamma, 20.0 / gamma, 400));
    grid
}
