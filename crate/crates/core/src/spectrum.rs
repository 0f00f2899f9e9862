//! Resonance-fluorescence spectrum: the elastic (delta-function) weight and
//! the smooth inelastic lineshape, in frequency offsets `x = omega - omega_0`
//! from the drive.
//!
//! The elastic peak is never sampled onto a grid; it is carried as a scalar.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dynamics::g1_regression;
use crate::error::{Error, Result};
use crate::model::{classify_regime, AtomParams, DrivingRegime, Splitting, DEFAULT_EP_TOL};

/// Below this drive (units of gamma) the below-EP weights are taken from their small-drive series.
pub const SMALL_DRIVE: f64 = 1e-4;
/// Delay cutoff of the numeric Fourier transform, units of `1/gamma`.
pub const TAU_MAX: f64 = 40.0;
/// Delay step of the numeric Fourier transform, units of `1/gamma`.
pub const TAU_STEP: f64 = 0.005;
/// Largest `|g1(tau_max) - g1(infinity)|` accepted by the numeric transform.
pub const TAIL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineshapeMethod {
    Analytic,
    NumericFourier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Coefficient of `delta(omega - omega_0)`.
    pub elastic_weight: f64,
    pub omega_grid: Vec<f64>,
    pub inelastic: Vec<f64>,
    pub regime: Option<DrivingRegime>,
    pub method: LineshapeMethod,
}

impl SpectrumResult {
    /// Trapezoid integral of the sampled inelastic part over the grid.
    pub fn sampled_inelastic_weight(&self) -> f64 {
        trapezoid(&self.omega_grid, &self.inelastic)
    }

    pub fn max_abs_diff(&self, other: &SpectrumResult) -> f64 {
        self.inelastic
            .iter()
            .zip(&other.inelastic)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `(gamma/2)^2 / ((gamma/2)^2 + 2 Omega^2)`
pub fn elastic_weight(params: &AtomParams) -> Result<f64> {
    params.require_resonant()?;
    let g2q = 0.25 * params.gamma().powi(2);
    Ok(g2q / (g2q + 2.0 * params.omega().powi(2)))
}

/// The resonant inelastic lineshape of one regime.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Lineshape {
    Above {
        gamma: f64,
        omega_tilde: f64,
        side_weight: f64,
        dispersive: f64,
    },
    At {
        gamma: f64,
    },
    Below {
        gamma: f64,
        rate: f64,
        l_plus: f64,
        l_minus: f64,
    },
}

fn lorentzian(width: f64, x: f64) -> f64 {
    width / (width * width + x * x)
}

impl Lineshape {
    fn new(params: &AtomParams) -> Result<Self> {
        let (split, _) = Splitting::resolve(params)?;
        let g = params.gamma();
        let w = params.omega();
        let w2 = w * w;
        let g2q = 0.25 * g * g;
        let n0 = 2.0 * w2 + g2q;
        Ok(match split {
            Splitting::Oscillatory(wt) => Lineshape::Above {
                gamma: g,
                omega_tilde: wt,
                side_weight: 0.5 - g2q / n0,
                dispersive: (10.0 * w2 - g2q) / n0,
            },
            Splitting::Critical => Lineshape::At { gamma: g },
            Splitting::Hyperbolic(rate) => {
                let (l_plus, l_minus) = if w < SMALL_DRIVE * g {
                    let r = (w / g).powi(2);
                    (-0.5 + 8.0 * r - 128.0 * r * r, 64.0 * r * r)
                } else {
                    let hg = 0.5 * g;
                    let lp = (w2 / rate) * (hg * (hg + 2.0 * rate) - 4.0 * w2)
                        / ((g2q + 2.0 * w2) * (2.0 * rate - hg));
                    let lm = 8.0 * w2 * w2
                        / (32.0 * w2 * w2 - g * (10.0 * rate + 4.5 * g) * w2
                            + (2.0 * rate + hg) * hg.powi(3));
                    (lp, lm)
                };
                Lineshape::Below {
                    gamma: g,
                    rate,
                    l_plus,
                    l_minus,
                }
            }
        })
    }

    fn eval(&self, x: f64) -> f64 {
        match *self {
            Lineshape::Above {
                gamma,
                omega_tilde,
                side_weight,
                dispersive,
            } => {
                let a = 0.75 * gamma;
                let mut s = lorentzian(0.5 * gamma, x) / (2.0 * PI);
                for tau in [1.0, -1.0] {
                    let y = x - tau * omega_tilde;
                    let den = a * a + y * y;
                    s += side_weight * a / den / (2.0 * PI);
                    s -= tau / (16.0 * PI) * (gamma / omega_tilde) * dispersive * y / den;
                }
                s
            }
            Lineshape::At { gamma } => {
                let a = 0.75 * gamma;
                let den = x * x + a * a;
                lorentzian(0.5 * gamma, x) / (2.0 * PI)
                    - gamma / (4.0 * PI) * (x * x + 0.75 * gamma * gamma) / (den * den)
            }
            Lineshape::Below {
                gamma,
                rate,
                l_plus,
                l_minus,
            } => {
                let a = 0.75 * gamma;
                lorentzian(0.5 * gamma, x) / (2.0 * PI)
                    + l_plus / PI * lorentzian(a - rate, x)
                    + l_minus / PI * lorentzian(a + rate, x)
            }
        }
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid("frequency grid must be finite".into()));
    }
    Ok(())
}

pub fn spectrum_analytic(params: &AtomParams, omega_grid: &[f64]) -> Result<SpectrumResult> {
    check_grid(omega_grid)?;
    let elastic = elastic_weight(params)?;
    let shape = Lineshape::new(params)?;
    Ok(SpectrumResult {
        elastic_weight: elastic,
        omega_grid: omega_grid.to_vec(),
        inelastic: omega_grid.iter().map(|&x| shape.eval(x)).collect(),
        regime: classify_regime(params, DEFAULT_EP_TOL).ok(),
        method: LineshapeMethod::Analytic,
    })
}

/// Spectrum by Fourier transform of the regression `g1`, for any detuning.
///
/// `S(x) = (1/pi) Re int_0^inf [g1(tau) - g1(inf)] e^{i x tau} dtau` on a
/// uniform delay grid up to `TAU_MAX / gamma`, trapezoid rule with the
/// leading Euler-Maclaurin endpoint correction.
pub fn spectrum_numeric(params: &AtomParams, omega_grid: &[f64]) -> Result<SpectrumResult> {
    check_grid(omega_grid)?;
    let g = params.gamma();
    let h = TAU_STEP / g;
    let n = (TAU_MAX / TAU_STEP).round() as usize;
    let taus: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
    let (g1, limit, slope) = g1_regression(params, &taus)?;
    let residual = (g1[n] - limit).norm();
    if residual > TAIL_TOL {
        return Err(Error::TailNotConverged { residual });
    }
    let f: Vec<Complex64> = g1.iter().map(|z| z - limit).collect();
    let inelastic = omega_grid
        .iter()
        .map(|&x| {
            let step = Complex64::from_polar(1.0, x * h);
            let mut phase = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, fk) in f.iter().enumerate() {
                let wgt = if k == 0 || k == n { 0.5 } else { 1.0 };
                acc += fk * phase * wgt;
                phase *= step;
                if k % 256 == 255 {
                    phase = Complex64::from_polar(1.0, x * h * (k + 1) as f64);
                }
            }
            let d0 = slope + Complex64::new(0.0, x) * f[0];
            let integral = acc * h + h * h / 12.0 * d0;
            integral.re / PI
        })
        .collect();
    Ok(SpectrumResult {
        elastic_weight: limit.re,
        omega_grid: omega_grid.to_vec(),
        inelastic,
        regime: classify_regime(params, DEFAULT_EP_TOL).ok(),
        method: LineshapeMethod::NumericFourier,
    })
}

pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// `int_{-inf}^{inf} f(x) dx` for an `f` decaying at least like `1/x^2`.
///
/// Trapezoid rule in `t` after `x = scale sinh t`, which converges
/// exponentially for lineshapes analytic in a strip around the real axis.
pub fn full_line_integral(f: impl Fn(f64) -> f64, scale: f64) -> f64 {
    let t_max: f64 = 40.0;
    let h = 0.0025;
    let n = (t_max / h).round() as i64;
    (-n..=n)
        .map(|k| {
            let t = k as f64 * h;
            let wgt = if k.abs() == n { 0.5 } else { 1.0 };
            wgt * f(scale * t.sinh()) * scale * t.cosh()
        })
        .sum::<f64>()
        * h
}

/// Elastic weight plus the full-line integral of the analytic inelastic lineshape.
pub fn total_weight(params: &AtomParams) -> Result<f64> {
    let elastic = elastic_weight(params)?;
    let shape = Lineshape::new(params)?;
    Ok(elastic + full_line_integral(|x| shape.eval(x), 0.5 * params.gamma()))
}

/// Interior indices that are strict local maxima (plateaus count once).
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut k = 1;
    while k + 1 < values.len() {
        if values[k] > values[k - 1] {
            let mut j = k;
            while j + 1 < values.len() && values[j + 1] == values[k] {
                j += 1;
            }
            if j + 1 < values.len() && values[j + 1] < values[k] {
                out.push(k);
            }
            k = j + 1;
        } else {
            k += 1;
        }
    }
    out
}
