//! The 4x4 Liouvillian acting on `(rho00, rho11, rho10, rho01)`, its steady
//! state, and its spectrum by two independent routes: the Cardano closed form
//! of the characteristic cubic and a dense numeric eigensolver.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cubic::solve_monic_cubic;
use crate::eigen::{self, eigenvectors_for, normalize, overlap};
use crate::error::{Error, Result};
use crate::model::{omega_tilde_squared, AtomParams, ComplexFrequency};
use crate::ode::{self, Tolerances};

/// Relative eigenvalue distance (units of gamma) and eigenvector overlap
/// defect below which two eigenpairs are reported as coalesced.
pub const DEFAULT_COALESCE_TOL: f64 = 1e-6;
/// Relative singular-value threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-8;
/// `|lambda| <= ZERO_TOL * gamma` identifies the steady-state eigenvalue.
pub const ZERO_TOL: f64 = 1e-10;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiouvillianMatrix {
    pub entries: Matrix4<Complex64>,
    /// Rate that sets the absolute tolerances (gamma for a physical Liouvillian).
    pub scale: f64,
}

impl LiouvillianMatrix {
    pub fn from_entries(entries: Matrix4<Complex64>, scale: f64) -> Self {
        Self { entries, scale }
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_iterator(4, 4, self.entries.iter().copied())
    }

    pub fn apply(&self, v: &[Complex64; 4]) -> [Complex64; 4] {
        let m = &self.entries;
        std::array::from_fn(|i| (0..4).map(|j| m[(i, j)] * v[j]).sum())
    }

    /// Largest |entry| of row 1 + row 2; zero when population is conserved.
    pub fn trace_row_defect(&self) -> f64 {
        (0..4)
            .map(|j| (self.entries[(0, j)] + self.entries[(1, j)]).norm())
            .fold(0.0, f64::max)
    }

    /// Largest elementwise |L - L^dagger|.
    pub fn hermiticity_deviation(&self) -> f64 {
        (self.entries - self.entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn determinant(&self) -> Complex64 {
        self.entries.determinant()
    }

    /// Numeric rank of `L - lambda I` at relative threshold `rel_tol`.
    pub fn shifted_rank(&self, lambda: Complex64, rel_tol: f64) -> usize {
        let shifted = self.to_dmatrix() - DMatrix::<Complex64>::identity(4, 4) * lambda;
        eigen::numeric_rank(&shifted, rel_tol)
    }

    /// Singular values of `L - lambda I`, descending.
    pub fn shifted_singular_values(&self, lambda: Complex64) -> Vec<f64> {
        eigen::singular_values(&(self.to_dmatrix() - DMatrix::<Complex64>::identity(4, 4) * lambda))
    }
}

pub fn build_liouvillian(params: &AtomParams) -> LiouvillianMatrix {
    let g = params.gamma();
    let d = params.delta();
    let w = params.omega();
    let e = params.phase();
    let ec = e.conj();
    let z = c(0.0);
    #[rustfmt::skip]
    let entries = Matrix4::new(
        z,            c(g),          -I * w * ec,       I * w * e,
        z,            c(-g),          I * w * ec,      -I * w * e,
        -I * w * e,   I * w * e,     -I * d - 0.5 * g,  z,
        I * w * ec,  -I * w * ec,     z,                I * d - 0.5 * g,
    );
    LiouvillianMatrix { entries, scale: g }
}

/// Density matrix flattened as `(rho00, rho11, rho10, rho01)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityVector {
    pub rho00: Complex64,
    pub rho11: Complex64,
    pub rho10: Complex64,
    pub rho01: Complex64,
}

/// Violations of the density-matrix constraints; all zero for a physical state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityDefects {
    /// `|rho00 + rho11 - 1|`
    pub trace: f64,
    /// `|rho01 - conj(rho10)|`
    pub conjugacy: f64,
    /// Largest imaginary part of the populations.
    pub reality: f64,
    /// How far the populations leave `[0, 1]`.
    pub range: f64,
    /// `max(0, |rho10|^2 - rho00 rho11)`
    pub positivity: f64,
}

impl DensityDefects {
    pub fn max(&self) -> f64 {
        [
            self.trace,
            self.conjugacy,
            self.reality,
            self.range,
            self.positivity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl DensityVector {
    pub fn ground() -> Self {
        Self::from_array([c(1.0), c(0.0), c(0.0), c(0.0)])
    }

    pub fn excited() -> Self {
        Self::from_array([c(0.0), c(1.0), c(0.0), c(0.0)])
    }

    pub fn from_array(a: [Complex64; 4]) -> Self {
        Self {
            rho00: a[0],
            rho11: a[1],
            rho10: a[2],
            rho01: a[3],
        }
    }

    pub fn to_array(&self) -> [Complex64; 4] {
        [self.rho00, self.rho11, self.rho10, self.rho01]
    }

    pub fn trace(&self) -> Complex64 {
        self.rho00 + self.rho11
    }

    pub fn defects(&self) -> DensityDefects {
        let out_of_range = |x: f64| (-x).max(x - 1.0).max(0.0);
        DensityDefects {
            trace: (self.trace() - 1.0).norm(),
            conjugacy: (self.rho01 - self.rho10.conj()).norm(),
            reality: self.rho00.im.abs().max(self.rho11.im.abs()),
            range: out_of_range(self.rho00.re).max(out_of_range(self.rho11.re)),
            positivity: (self.rho10.norm_sqr() - self.rho00.re * self.rho11.re).max(0.0),
        }
    }
}

/// Closed-form steady state.
pub fn steady_state(params: &AtomParams) -> DensityVector {
    let w = params.omega();
    let d = params.delta();
    let g = params.gamma();
    let den = params.saturation_denominator();
    let rho11 = w * w / den;
    let rho00 = (w * w + d * d + 0.25 * g * g) / den;
    let rho10 = -(params.phase() * w) * Complex64::new(d, 0.5 * g) / den;
    DensityVector {
        rho00: c(rho00),
        rho11: c(rho11),
        rho10,
        rho01: rho10.conj(),
    }
}

/// Trace-normalised null vector of the matrix, computed numerically.
pub fn null_steady_state(matrix: &LiouvillianMatrix) -> DensityVector {
    let v = eigenvectors_for(&matrix.to_dmatrix(), &[c(0.0)], 0.0, RANK_TOL)
        .pop()
        .expect("one vector requested");
    let tr = v[0] + v[1];
    DensityVector::from_array(std::array::from_fn(|i| v[i] / tr))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumMethod {
    Analytic,
    Numeric,
}

/// Eigenvalues, eigenvectors and coalescence diagnostics of a Liouvillian.
///
/// Ordering: the steady-state eigenvalue (`|lambda| <= 1e-10 gamma`) is last;
/// the others are sorted by real part descending, ties by imaginary part
/// descending.
#[derive(Debug, Clone, PartialEq)]
pub struct LiouvillianSpectrum {
    pub lambdas: [ComplexFrequency; 4],
    pub eigenvectors: [[Complex64; 4]; 4],
    /// Index pairs whose eigenvalues and eigenvectors both coincide to within tolerance.
    pub coalescence: Vec<(usize, usize)>,
    pub method: SpectrumMethod,
}

impl LiouvillianSpectrum {
    /// The three eigenvalues that are not the steady state, in order.
    pub fn nontrivial(&self) -> [ComplexFrequency; 3] {
        [self.lambdas[0], self.lambdas[1], self.lambdas[2]]
    }

    /// Smallest distance between two eigenvalues among the first three.
    pub fn min_gap(&self) -> f64 {
        let l = &self.lambdas;
        (l[0] - l[1])
            .norm()
            .min((l[0] - l[2]).norm())
            .min((l[1] - l[2]).norm())
    }

    pub fn is_coalesced(&self, i: usize, j: usize) -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.coalescence.contains(&(a, b))
    }
}

/// Sort eigenpairs into the documented order.
fn order_pairs(
    mut pairs: Vec<(Complex64, [Complex64; 4])>,
    scale: f64,
) -> Vec<(Complex64, [Complex64; 4])> {
    let zero = |z: &Complex64| z.norm() <= ZERO_TOL * scale;
    pairs.sort_by(|a, b| {
        zero(&a.0)
            .cmp(&zero(&b.0))
            .then(b.0.re.total_cmp(&a.0.re))
            .then(b.0.im.total_cmp(&a.0.im))
    });
    // equal real parts up to rounding are ordered by imaginary part
    let tie = 1e-12 * scale;
    for _ in 0..pairs.len() {
        for k in 0..pairs.len().saturating_sub(1) {
            let (a, b) = (pairs[k].0, pairs[k + 1].0);
            if zero(&a) == zero(&b) && (a.re - b.re).abs() <= tie && a.im < b.im {
                pairs.swap(k, k + 1);
            }
        }
    }
    pairs
}

fn coalesced_pairs(
    lambdas: &[Complex64; 4],
    vectors: &[[Complex64; 4]; 4],
    tol: f64,
    scale: f64,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            if (lambdas[i] - lambdas[j]).norm() < tol * scale
                && overlap(&vectors[i], &vectors[j]) > 1.0 - tol
            {
                out.push((i, j));
            }
        }
    }
    out
}

fn assemble(
    pairs: Vec<(Complex64, [Complex64; 4])>,
    scale: f64,
    coalesce_tol: f64,
    method: SpectrumMethod,
) -> LiouvillianSpectrum {
    let pairs = order_pairs(pairs, scale);
    let lambdas: [Complex64; 4] = std::array::from_fn(|i| pairs[i].0);
    let eigenvectors: [[Complex64; 4]; 4] = std::array::from_fn(|i| pairs[i].1);
    let coalescence = coalesced_pairs(&lambdas, &eigenvectors, coalesce_tol, scale);
    LiouvillianSpectrum {
        lambdas,
        eigenvectors,
        coalescence,
        method,
    }
}

fn to_array4(v: &[Complex64]) -> [Complex64; 4] {
    std::array::from_fn(|i| v[i])
}

/// Coefficients `(a2, a1, a0)` of the characteristic cubic
/// `lambda^3 + a2 lambda^2 + a1 lambda + a0` of the nonzero eigenvalues.
pub fn cubic_coefficients(params: &AtomParams) -> (f64, f64, f64) {
    let g = params.gamma();
    let d2 = params.delta().powi(2);
    let w2 = params.omega().powi(2);
    (
        2.0 * g,
        d2 + 4.0 * w2 + 1.25 * g * g,
        g * (d2 + 2.0 * w2 + 0.25 * g * g),
    )
}

/// Eigenvector of the physical Liouvillian for a nonzero eigenvalue.
///
/// From rows 1+2 and 3, 4 of `(L - lambda) v = 0` with `p_pm = lambda + gamma/2 +- i Delta`:
/// `v = (p+ p-, -p+ p-, -2i Omega e^{i theta} p-, 2i Omega e^{-i theta} p+)`.
/// `None` where this parametrisation collapses (no drive, or the
/// pure-coherence mode on resonance).
fn parametrized_eigenvector(params: &AtomParams, lambda: Complex64) -> Option<[Complex64; 4]> {
    let g = params.gamma();
    let p_plus = lambda + 0.5 * g + I * params.delta();
    let p_minus = lambda + 0.5 * g - I * params.delta();
    let w = params.omega();
    if w == 0.0 || p_plus.norm().max(p_minus.norm()) < 1e-7 * g {
        return None;
    }
    let e = params.phase();
    let pp = p_plus * p_minus;
    Some([
        pp,
        -pp,
        -2.0 * I * w * e * p_minus,
        2.0 * I * w * e.conj() * p_plus,
    ])
}

/// Spectrum from the Cardano solution of the characteristic cubic.
pub fn eigenvalues_analytic(params: &AtomParams) -> LiouvillianSpectrum {
    eigenvalues_analytic_with_tol(params, DEFAULT_COALESCE_TOL)
}

pub fn eigenvalues_analytic_with_tol(
    params: &AtomParams,
    coalesce_tol: f64,
) -> LiouvillianSpectrum {
    let (a2, a1, a0) = cubic_coefficients(params);
    let roots = solve_monic_cubic(a2, a1, a0).roots;
    let matrix = build_liouvillian(params);
    let dm = matrix.to_dmatrix();
    let g = params.gamma();

    let mut pairs: Vec<(Complex64, [Complex64; 4])> = Vec::with_capacity(4);
    let mut fallback = Vec::new();
    for lam in roots {
        match parametrized_eigenvector(params, lam) {
            Some(v) => pairs.push((lam, to_array4(&normalize(&v)))),
            None => fallback.push(lam),
        }
    }
    if !fallback.is_empty() {
        for (lam, v) in
            fallback
                .iter()
                .zip(eigenvectors_for(&dm, &fallback, coalesce_tol * g, RANK_TOL))
        {
            pairs.push((*lam, to_array4(&v)));
        }
    }
    let ss = steady_state(params).to_array();
    pairs.push((c(0.0), to_array4(&normalize(&ss))));
    assemble(pairs, g, coalesce_tol, SpectrumMethod::Analytic)
}

/// Spectrum from the general dense eigensolver.
pub fn eigenvalues_numeric(matrix: &LiouvillianMatrix) -> Result<LiouvillianSpectrum> {
    eigenvalues_numeric_with_tol(matrix, DEFAULT_COALESCE_TOL)
}

pub fn eigenvalues_numeric_with_tol(
    matrix: &LiouvillianMatrix,
    coalesce_tol: f64,
) -> Result<LiouvillianSpectrum> {
    let e = eigen::eigen_decompose(&matrix.to_dmatrix(), coalesce_tol * matrix.scale, RANK_TOL)?;
    let pairs = e
        .values
        .into_iter()
        .zip(e.vectors)
        .map(|(l, v)| (l, to_array4(&v)))
        .collect();
    Ok(assemble(
        pairs,
        matrix.scale,
        coalesce_tol,
        SpectrumMethod::Numeric,
    ))
}

/// Resonant eigenvalues and the unnormalised eigenvectors
///
/// ```text
/// Lambda1 = (0, 0, e^{i theta}, e^{-i theta})
/// Lambda2 = (-8i Omega/(gamma + 4s), 8i Omega/(gamma + 4s), e^{i theta}, -e^{-i theta})
/// Lambda3 = ( 8i Omega/(4s - gamma), 8i Omega/(gamma - 4s), e^{i theta}, -e^{-i theta})
/// ```
///
/// with `lambda2,3 = -3 gamma/4 +- s`; `s = i Omega_tilde` above the
/// exceptional point and `s = Gamma` below it. The fourth eigenvector is the
/// steady-state density vector.
pub fn resonant_eigenvectors(params: &AtomParams) -> Result<LiouvillianSpectrum> {
    params.require_resonant()?;
    let g = params.gamma();
    let w = params.omega();
    let sq = omega_tilde_squared(w, g);
    let s = if sq >= 0.0 {
        I * sq.sqrt()
    } else {
        c((-sq).sqrt())
    };
    let e = params.phase();
    let ec = e.conj();

    let lambda1 = c(-0.5 * g);
    let lambda2 = -0.75 * g + s;
    let lambda3 = -0.75 * g - s;
    let v1 = [c(0.0), c(0.0), e, ec];
    let v2 = [
        -8.0 * I * w / (4.0 * s + g),
        8.0 * I * w / (g + 4.0 * s),
        e,
        -ec,
    ];
    let v3 = [
        8.0 * I * w / (4.0 * s - g),
        8.0 * I * w / (g - 4.0 * s),
        e,
        -ec,
    ];
    if v2
        .iter()
        .chain(&v3)
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::InvalidParams(
            "resonant eigenvector pole at gamma = 4 s".into(),
        ));
    }

    let lambdas = [lambda1, lambda2, lambda3, c(0.0)];
    let eigenvectors = [v1, v2, v3, steady_state(params).to_array()];
    let coalescence = coalesced_pairs(&lambdas, &eigenvectors, DEFAULT_COALESCE_TOL, g);
    Ok(LiouvillianSpectrum {
        lambdas,
        eigenvectors,
        coalescence,
        method: SpectrumMethod::Analytic,
    })
}

/// Integrate `d rho/dt = L rho` and sample it on `t_grid`.
pub fn evolve_density(
    params: &AtomParams,
    initial: &DensityVector,
    t_grid: &[f64],
) -> Result<Vec<DensityVector>> {
    let m = build_liouvillian(params).entries;
    let pack = |v: [Complex64; 4]| -> [f64; 8] {
        std::array::from_fn(|k| if k % 2 == 0 { v[k / 2].re } else { v[k / 2].im })
    };
    let unpack = |y: &[f64; 8]| -> [Complex64; 4] {
        std::array::from_fn(|k| Complex64::new(y[2 * k], y[2 * k + 1]))
    };
    let rhs = |_t: f64, y: &[f64; 8]| {
        let v = unpack(y);
        let dv: [Complex64; 4] = std::array::from_fn(|i| (0..4).map(|j| m[(i, j)] * v[j]).sum());
        pack(dv)
    };
    let ys = ode::integrate(rhs, pack(initial.to_array()), t_grid, Tolerances::default())?;
    Ok(ys
        .iter()
        .map(|y| DensityVector::from_array(unpack(y)))
        .collect())
}
