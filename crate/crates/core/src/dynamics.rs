//! Moment equations `i dPsi/dt = H Psi + P` for `Psi = (<sigma>, <sigma^dag>, <sigma^dag sigma>)`,
//! the populations they generate, and the first- and second-order coherences
//! obtained from them by quantum regression.
//!
//! The regression vectors start from two-level operator algebra: every
//! product with two adjacent `sigma` or two adjacent `sigma^dag` vanishes, so
//! for `g1` the two-time vector starts at `(<sigma^dag sigma>, 0, 0)` driven by
//! `P <sigma^dag>`, and for `g2` it starts at zero driven by
//! `P <sigma^dag sigma>`. Both systems are integrated in rescaled variables
//! that stay finite as `Omega -> 0`.

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{Error, Result};
use crate::liouvillian::DensityVector;
use crate::model::{classify_regime, AtomParams, DrivingRegime, Splitting, DEFAULT_EP_TOL};
use crate::ode::{self, Tolerances};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    pub sigma_mean: Complex64,
    pub sigma_dag_mean: Complex64,
    pub population: Complex64,
}

impl MomentVector {
    /// Atom in the excited state with no coherence.
    pub fn excited() -> Self {
        Self::from_array([
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
    }

    pub fn from_array(a: [Complex64; 3]) -> Self {
        Self {
            sigma_mean: a[0],
            sigma_dag_mean: a[1],
            population: a[2],
        }
    }

    pub fn to_array(&self) -> [Complex64; 3] {
        [self.sigma_mean, self.sigma_dag_mean, self.population]
    }

    pub fn from_density(rho: &DensityVector) -> Self {
        Self {
            sigma_mean: rho.rho10,
            sigma_dag_mean: rho.rho01,
            population: rho.rho11,
        }
    }

    pub fn to_density(&self) -> DensityVector {
        DensityVector {
            rho00: 1.0 - self.population,
            rho11: self.population,
            rho10: self.sigma_mean,
            rho01: self.sigma_dag_mean,
        }
    }

    /// `|<sigma^dag> - conj <sigma>|`
    pub fn conjugacy_defect(&self) -> f64 {
        (self.sigma_dag_mean - self.sigma_mean.conj()).norm()
    }
}

/// `H` and `P` of the moment equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicalMatrix3 {
    pub entries: Matrix3<Complex64>,
    pub drive: [Complex64; 3],
}

impl DynamicalMatrix3 {
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let m = nalgebra::DMatrix::from_iterator(3, 3, self.entries.iter().copied());
        Ok(eigen::eigen_decompose(&m, 0.0, 1e-8)?.values)
    }

    /// `-i (H v + P)`
    pub fn rate(&self, v: &[Complex64; 3]) -> [Complex64; 3] {
        let m = &self.entries;
        std::array::from_fn(|i| {
            -I * ((0..3).map(|j| m[(i, j)] * v[j]).sum::<Complex64>() + self.drive[i])
        })
    }

    /// Steady state `-H^{-1} P`, by LU factorisation.
    pub fn fixed_point(&self) -> Result<[Complex64; 3]> {
        let rhs = nalgebra::Vector3::from_iterator(self.drive.iter().map(|z| -z));
        let sol = self
            .entries
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::ConvergenceFailure("dynamical matrix is singular".into()))?;
        Ok([sol[0], sol[1], sol[2]])
    }
}

pub fn build_moment_system(params: &AtomParams) -> DynamicalMatrix3 {
    let d = params.delta();
    let w = params.omega();
    let g = params.gamma();
    let e = params.phase();
    let ec = e.conj();
    let z = Complex64::new(0.0, 0.0);
    #[rustfmt::skip]
    let entries = Matrix3::new(
        Complex64::new(d, -0.5 * g), z,                            -2.0 * w * e,
        z,                           Complex64::new(-d, -0.5 * g),  2.0 * w * ec,
        -w * ec,                     w * e,                         Complex64::new(0.0, -g),
    );
    DynamicalMatrix3 {
        entries,
        drive: [w * e, -w * ec, z],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrelatorMethod {
    AnalyticPiecewise,
    NumericOde,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TraceValues {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl TraceValues {
    pub fn len(&self) -> usize {
        match self {
            TraceValues::Real(v) => v.len(),
            TraceValues::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A correlator sampled on a delay (or time) grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorTrace {
    pub taus: Vec<f64>,
    pub values: TraceValues,
    /// `None` off resonance, where the regime is not a closed-form notion.
    pub regime: Option<DrivingRegime>,
    pub method: CorrelatorMethod,
}

impl CorrelatorTrace {
    /// Real parts (the values themselves for a real trace).
    pub fn real(&self) -> Vec<f64> {
        match &self.values {
            TraceValues::Real(v) => v.clone(),
            TraceValues::Complex(v) => v.iter().map(|z| z.re).collect(),
        }
    }

    pub fn moduli(&self) -> Vec<f64> {
        match &self.values {
            TraceValues::Real(v) => v.iter().map(|x| x.abs()).collect(),
            TraceValues::Complex(v) => v.iter().map(|z| z.norm()).collect(),
        }
    }

    /// Sup-norm distance. A real trace against a complex one is compared on moduli.
    pub fn max_abs_diff(&self, other: &CorrelatorTrace) -> f64 {
        let pairs: Vec<f64> = match (&self.values, &other.values) {
            (TraceValues::Real(a), TraceValues::Real(b)) => {
                a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect()
            }
            (TraceValues::Complex(a), TraceValues::Complex(b)) => {
                a.iter().zip(b).map(|(x, y)| (x - y).norm()).collect()
            }
            _ => self
                .moduli()
                .iter()
                .zip(other.moduli())
                .map(|(x, y)| (x - y).abs())
                .collect(),
        };
        pairs.into_iter().fold(0.0, f64::max)
    }
}

/// Classical and quantum parts of the steady-state population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationSplit {
    /// `<sigma^dag><sigma>`
    pub classical: f64,
    /// `<upsilon^dag upsilon>` with `upsilon = sigma - <sigma>`
    pub quantum: f64,
}

impl PopulationSplit {
    pub fn total(&self) -> f64 {
        self.classical + self.quantum
    }
}

pub fn population_split(params: &AtomParams) -> PopulationSplit {
    let w2 = params.omega().powi(2);
    let n = params.saturation_denominator();
    let coh = params.delta().powi(2) + 0.25 * params.gamma().powi(2);
    PopulationSplit {
        classical: w2 * coh / (n * n),
        quantum: 2.0 * w2 * w2 / (n * n),
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidGrid(
            "grid must be finite and ascending".into(),
        ));
    }
    if grid.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidGrid("grid must start at t >= 0".into()));
    }
    Ok(())
}

fn resonant_regime(params: &AtomParams) -> Option<DrivingRegime> {
    classify_regime(params, DEFAULT_EP_TOL).ok()
}

/// Integrate `dy/dt = -i (M y + d)` from `y(0) = y0` and sample on `grid`.
fn integrate_linear(
    m: Matrix3<Complex64>,
    d: [Complex64; 3],
    y0: [Complex64; 3],
    grid: &[f64],
) -> Result<Vec<[Complex64; 3]>> {
    validate_grid(grid)?;
    if grid.is_empty() {
        return Ok(Vec::new());
    }
    let sys = DynamicalMatrix3 {
        entries: m,
        drive: d,
    };
    let pack = |v: [Complex64; 3]| -> [f64; 6] {
        std::array::from_fn(|k| if k % 2 == 0 { v[k / 2].re } else { v[k / 2].im })
    };
    let unpack = |y: &[f64; 6]| -> [Complex64; 3] {
        std::array::from_fn(|k| Complex64::new(y[2 * k], y[2 * k + 1]))
    };
    let prepend = grid[0] > 0.0;
    let mut full = Vec::with_capacity(grid.len() + 1);
    if prepend {
        full.push(0.0);
    }
    full.extend_from_slice(grid);
    let ys = ode::integrate(
        |_, y: &[f64; 6]| pack(sys.rate(&unpack(y))),
        pack(y0),
        &full,
        Tolerances::default(),
    )?;
    Ok(ys.iter().skip(usize::from(prepend)).map(unpack).collect())
}

/// Full moment trajectory from `initial` at `t = 0`.
pub fn moment_trajectory(
    params: &AtomParams,
    initial: &MomentVector,
    t_grid: &[f64],
) -> Result<Vec<MomentVector>> {
    let sys = build_moment_system(params);
    let ys = integrate_linear(sys.entries, sys.drive, initial.to_array(), t_grid)?;
    Ok(ys.into_iter().map(MomentVector::from_array).collect())
}

/// Population trace `Re <sigma^dag sigma>(t)` from `initial` at `t = 0`.
pub fn evolve_moments(
    params: &AtomParams,
    initial: &MomentVector,
    t_grid: &[f64],
) -> Result<CorrelatorTrace> {
    let traj = moment_trajectory(params, initial, t_grid)?;
    Ok(CorrelatorTrace {
        taus: t_grid.to_vec(),
        values: TraceValues::Real(traj.iter().map(|m| m.population.re).collect()),
        regime: resonant_regime(params),
        method: CorrelatorMethod::NumericOde,
    })
}

/// `(cos-like, sin-like / s)` factors times `exp(-3 gamma t/4)`.
///
/// Oscillatory: `cos(W t)`, `sin(W t)/W`. Hyperbolic: `cosh(G t)`, `sinh(G t)/G`,
/// evaluated through exponentials so large `t` cannot overflow.
fn damped_pair(split: Splitting, gamma: f64, t: f64) -> (f64, f64) {
    let a = 0.75 * gamma;
    match split {
        Splitting::Oscillatory(w) => {
            let env = (-a * t).exp();
            ((w * t).cos() * env, ((w * t).sin() / w) * env)
        }
        Splitting::Hyperbolic(g) => {
            let up = ((g - a) * t).exp();
            let down = (-(g + a) * t).exp();
            (0.5 * (up + down), 0.5 * (up - down) / g)
        }
        Splitting::Critical => {
            let env = (-a * t).exp();
            (env, t * env)
        }
    }
}

fn check_tau_grid(grid: &[f64]) -> Result<()> {
    validate_grid(grid)
}

/// Population at zero detuning starting from the excited state.
pub fn population_analytic(params: &AtomParams, t_grid: &[f64]) -> Result<CorrelatorTrace> {
    check_tau_grid(t_grid)?;
    let (split, regime) = Splitting::resolve(params)?;
    let g = params.gamma();
    let w2 = params.omega().powi(2);
    let g2q = 0.25 * g * g;
    let n0 = 2.0 * w2 + g2q;
    let values = t_grid
        .iter()
        .map(|&t| match split {
            Splitting::Critical => {
                1.0 / 18.0 + (17.0 / 6.0 - 0.875 * g * t) * (-0.75 * g * t).exp() / 3.0
            }
            _ => {
                let (c, s) = damped_pair(split, g, t);
                w2 / n0 + ((w2 + g2q) * c - 0.25 * g * (5.0 * w2 + g2q) * s) / n0
            }
        })
        .collect();
    Ok(CorrelatorTrace {
        taus: t_grid.to_vec(),
        values: TraceValues::Real(values),
        regime: Some(regime),
        method: CorrelatorMethod::AnalyticPiecewise,
    })
}

/// Population from the excited state by either method.
pub fn population(
    params: &AtomParams,
    t_grid: &[f64],
    method: CorrelatorMethod,
) -> Result<CorrelatorTrace> {
    match method {
        CorrelatorMethod::AnalyticPiecewise => population_analytic(params, t_grid),
        CorrelatorMethod::NumericOde => evolve_moments(params, &MomentVector::excited(), t_grid),
    }
}

/// Regression system for `y = psi / <sigma^dag sigma>`, whose first
/// component is `g1`. Returns `(H, drive)`.
fn g1_system(params: &AtomParams) -> (Matrix3<Complex64>, [Complex64; 3]) {
    let sys = build_moment_system(params);
    let e = params.phase();
    // P <sigma^dag> / <sigma^dag sigma> = (e^{i theta}, -e^{-i theta}, 0) * (-e^{-i theta} (Delta - i gamma/2))
    let k = -e.conj() * Complex64::new(params.delta(), -0.5 * params.gamma());
    (
        sys.entries,
        [e * k, -e.conj() * k, Complex64::new(0.0, 0.0)],
    )
}

/// Complex `g1` on `grid` by regression, with its `tau -> infinity` limit
/// from the fixed point of the regression system and its slope at `tau = 0`.
pub(crate) fn g1_regression(
    params: &AtomParams,
    grid: &[f64],
) -> Result<(Vec<Complex64>, Complex64, Complex64)> {
    let (m, d) = g1_system(params);
    let y0 = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    ];
    let ys = integrate_linear(m, d, y0, grid)?;
    let sys = DynamicalMatrix3 {
        entries: m,
        drive: d,
    };
    let limit = sys.fixed_point()?[0];
    let slope = sys.rate(&y0)[0];
    Ok((ys.into_iter().map(|y| y[0]).collect(), limit, slope))
}

pub fn g1(
    params: &AtomParams,
    tau_grid: &[f64],
    method: CorrelatorMethod,
) -> Result<CorrelatorTrace> {
    check_tau_grid(tau_grid)?;
    match method {
        CorrelatorMethod::AnalyticPiecewise => {
            let (split, regime) = Splitting::resolve(params)?;
            let g = params.gamma();
            let w2 = params.omega().powi(2);
            let g2q = 0.25 * g * g;
            let n0 = 2.0 * w2 + g2q;
            let values = tau_grid
                .iter()
                .map(|&t| {
                    let el = 0.5 * (-0.5 * g * t).exp();
                    match split {
                        Splitting::Critical => {
                            8.0 / 9.0 + el - (28.0 + 3.0 * g * t) / 72.0 * (-0.75 * g * t).exp()
                        }
                        _ => {
                            let (c, s) = damped_pair(split, g, t);
                            g2q / n0
                                + el
                                + ((w2 - g * g / 8.0) * c + (10.0 * w2 - g2q) * g / 8.0 * s) / n0
                        }
                    }
                })
                .collect();
            Ok(CorrelatorTrace {
                taus: tau_grid.to_vec(),
                values: TraceValues::Real(values),
                regime: Some(regime),
                method,
            })
        }
        CorrelatorMethod::NumericOde => {
            let (values, _, _) = g1_regression(params, tau_grid)?;
            Ok(CorrelatorTrace {
                taus: tau_grid.to_vec(),
                values: TraceValues::Complex(values),
                regime: resonant_regime(params),
                method,
            })
        }
    }
}

pub fn g2(
    params: &AtomParams,
    tau_grid: &[f64],
    method: CorrelatorMethod,
) -> Result<CorrelatorTrace> {
    check_tau_grid(tau_grid)?;
    let g = params.gamma();
    let values = match method {
        CorrelatorMethod::AnalyticPiecewise => {
            let (split, _) = Splitting::resolve(params)?;
            tau_grid
                .iter()
                .map(|&t| {
                    let (c, s) = damped_pair(split, g, t);
                    1.0 - c - 0.75 * g * s
                })
                .collect()
        }
        CorrelatorMethod::NumericOde => {
            // Phi = <sigma^dag sigma> diag(Omega, Omega, Omega^2) x, so g2 = x3 * N
            let w2 = params.omega().powi(2);
            let e = params.phase();
            let sys = build_moment_system(params);
            let mut m = sys.entries;
            m[(0, 2)] = -2.0 * w2 * e;
            m[(1, 2)] = 2.0 * w2 * e.conj();
            m[(2, 0)] = -e.conj();
            m[(2, 1)] = e;
            let d = [e, -e.conj(), Complex64::new(0.0, 0.0)];
            let zero = Complex64::new(0.0, 0.0);
            let n = params.saturation_denominator();
            integrate_linear(m, d, [zero; 3], tau_grid)?
                .iter()
                .map(|x| x[2].re * n)
                .collect()
        }
    };
    Ok(CorrelatorTrace {
        taus: tau_grid.to_vec(),
        values: TraceValues::Real(values),
        regime: resonant_regime(params),
        method,
    })
}
