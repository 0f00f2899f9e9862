//! Exceptional points of the Liouvillian in the `(Delta, Omega)` plane.
//!
//! Two of the nonzero eigenvalues coalesce where the Cardano quantity `D`
//! of the characteristic cubic vanishes. Written in `x = Omega^2` this is the
//! cubic `x^3 + b2 x^2 + b1 x + b0 = 0` with
//!
//! ```text
//! b2 = 3 (Delta/2)^2 - (gamma/8)^2
//! b1 = (Delta/8)^2 (12 Delta^2 - 5 gamma^2)
//! b0 = (Delta/8)^2 (Delta^2 + gamma^2/4)^2
//! ```
//!
//! It has two positive roots for `0 < |Delta| < Delta_c = gamma/(6 sqrt 3)`,
//! which merge at `Delta_c` and leave the real axis beyond it.

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::cubic::solve_monic_cubic;
use crate::error::{Error, Result};
use crate::liouvillian::{build_liouvillian, eigenvalues_numeric};
use crate::model::AtomParams;

/// Drive amplitudes below `OMEGA_FLOOR * gamma` are the trivial root at zero drive.
pub const OMEGA_FLOOR: f64 = 1e-8;
/// Half-width (units of gamma) of the band around `Delta_c` reported as a single double root.
pub const MERGE_BAND: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpQuery {
    pub delta: f64,
    pub gamma: f64,
}

impl EpQuery {
    pub fn new(delta: f64, gamma: f64) -> Result<Self> {
        if !delta.is_finite() || !gamma.is_finite() {
            return Err(Error::InvalidParams(
                "delta and gamma must be finite".into(),
            ));
        }
        if gamma <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        Ok(Self { delta, gamma })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpResult {
    pub delta: f64,
    /// Ascending exceptional-point drive amplitudes.
    pub omegas: Vec<f64>,
    pub critical_delta: f64,
    /// Discriminant of the cubic in `Omega^2`: positive below `Delta_c`,
    /// zero at `Delta = 0` and `Delta_c`, negative beyond.
    pub discriminant: f64,
}

pub fn critical_detuning(gamma: f64) -> f64 {
    gamma / (6.0 * 3f64.sqrt())
}

pub fn sextic_coefficients(query: &EpQuery) -> (f64, f64, f64) {
    let d = query.delta;
    let g = query.gamma;
    let d8 = (d / 8.0).powi(2);
    let b2 = 3.0 * (d / 2.0).powi(2) - (g / 8.0).powi(2);
    let b1 = d8 * (12.0 * d * d - 5.0 * g * g);
    let b0 = d8 * (d * d + 0.25 * g * g).powi(2);
    (b2, b1, b0)
}

/// `Omega^6 + b2 Omega^4 + b1 Omega^2 + b0`
pub fn sextic_residual(query: &EpQuery, omega: f64) -> f64 {
    let (b2, b1, b0) = sextic_coefficients(query);
    let x = omega * omega;
    ((x + b2) * x + b1) * x + b0
}

/// Closed form of the discriminant of the cubic in `x = Omega^2`,
/// `-Delta^2 gamma^4 (108 Delta^2 - gamma^2)^3 / 2^26`.
pub fn sextic_discriminant(query: &EpQuery) -> f64 {
    let d2 = query.delta * query.delta;
    let g = query.gamma;
    -d2 * g.powi(4) * (108.0 * d2 - g * g).powi(3) / 2f64.powi(26)
}

/// Newton steps on the sextic in `x = Omega^2` with coefficients and
/// residual in double-double arithmetic, returning `Omega`.
///
/// Near `Delta_c` the two roots in `x` approach each other and a root taken
/// from f64 coefficients is only good to about `1e-12`, which is enough to
/// split a coalesced pair by more than the detection tolerance.
fn polished_omega(query: &EpQuery, x0: f64) -> f64 {
    let d = TwoFloat::from(query.delta);
    let g = TwoFloat::from(query.gamma);
    let d2 = d * d;
    let g2 = g * g;
    let d8 = d2 / 64.0;
    let b2 = d2 * 0.75 - g2 / 64.0;
    let b1 = d8 * (d2 * 12.0 - g2 * 5.0);
    let q = d2 + g2 * 0.25;
    let b0 = d8 * q * q;
    let mut x = TwoFloat::from(x0);
    for _ in 0..2 {
        let f = ((x + b2) * x + b1) * x + b0;
        let df = (x * 3.0 + b2 * 2.0) * x + b1;
        if df.hi() == 0.0 {
            break;
        }
        let next = x - f / df;
        if !(next.hi() > 0.0 && next.hi().is_finite()) {
            break;
        }
        x = next;
    }
    x.sqrt().hi()
}

fn is_coalescence_point(delta: f64, omega: f64, gamma: f64) -> bool {
    let Ok(params) = AtomParams::new(delta, omega, gamma, 0.0) else {
        return false;
    };
    eigenvalues_numeric(&build_liouvillian(&params)).is_ok_and(|s| !s.coalescence.is_empty())
}

/// Candidate drive amplitudes before the coalescence check, ascending.
fn candidate_omegas(query: &EpQuery) -> Vec<f64> {
    let g = query.gamma;
    let b = sextic_coefficients(query);
    if b.1 == 0.0 && b.2 == 0.0 {
        // Delta = 0: x^2 (x + b2) with the double root at zero drive
        return if -b.0 > 0.0 {
            vec![(-b.0).sqrt()]
        } else {
            Vec::new()
        };
    }
    let roots = solve_monic_cubic(b.0, b.1, b.2).roots;
    let near_critical = (query.delta.abs() - critical_detuning(g)).abs() < MERGE_BAND * g;
    if near_critical {
        // the two positive roots (or the real part of the pair they become) collapse into one
        let pos: Vec<f64> = roots.iter().map(|z| z.re).filter(|&x| x > 0.0).collect();
        if pos.is_empty() {
            return Vec::new();
        }
        return vec![(pos.iter().sum::<f64>() / pos.len() as f64).sqrt()];
    }
    let mut xs: Vec<f64> = roots
        .iter()
        .filter(|z| z.im == 0.0 && z.re > 0.0)
        .map(|z| polished_omega(query, z.re))
        .collect();
    xs.sort_by(f64::total_cmp);
    xs
}

pub fn solve_ep_sextic(query: &EpQuery) -> EpResult {
    let g = query.gamma;
    let mut omegas: Vec<f64> = candidate_omegas(query)
        .into_iter()
        .filter(|&w| w >= OMEGA_FLOOR * g)
        .filter(|&w| is_coalescence_point(query.delta, w, g))
        .collect();
    omegas.dedup();
    EpResult {
        delta: query.delta,
        omegas,
        critical_delta: critical_detuning(g),
        discriminant: sextic_discriminant(query),
    }
}

/// `solve_ep_sextic` over a detuning grid, in grid order.
pub fn ep_sweep(gamma: f64, delta_grid: &[f64]) -> Result<Vec<EpResult>> {
    delta_grid
        .iter()
        .map(|&d| EpQuery::new(d, gamma).map(|q| solve_ep_sextic(&q)))
        .collect()
}

/// Cardano `D` of the Liouvillian cubic at `(Delta, Omega)`. An EP is a zero.
pub fn cardano_d(delta: f64, omega: f64, gamma: f64) -> Result<f64> {
    let params = AtomParams::new(delta, omega, gamma, 0.0)?;
    let (a2, a1, a0) = crate::liouvillian::cubic_coefficients(&params);
    Ok(solve_monic_cubic(a2, a1, a0).d)
}
