//! The lossless driven atom in the rotating frame: its 2x2 Hermitian
//! Hamiltonian and the dressed states that diagonalise it.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::AtomParams;

/// Hermitian 2x2 matrix in the `{|0>, |1>}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianMatrix2(pub Matrix2<Complex64>);

impl HermitianMatrix2 {
    /// Largest elementwise deviation from the conjugate transpose.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.0;
        (m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order. Hermiticity makes them real.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let m = &self.0;
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = m[(0, 1)].norm();
        let mean = 0.5 * (a + d);
        let half = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        [mean - half, mean + half]
    }
}

/// `[[0, Omega e^{-i theta}], [Omega e^{i theta}, Delta]]`
pub fn build_closed_hamiltonian(params: &AtomParams) -> HermitianMatrix2 {
    let drive = params.phase() * params.omega();
    HermitianMatrix2(Matrix2::new(
        Complex64::new(0.0, 0.0),
        drive.conj(),
        drive,
        Complex64::new(params.delta(), 0.0),
    ))
}

/// Mixing angle of the dressed states; both components are non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAngle {
    pub sin_phi: f64,
    pub cos_phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedStates {
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub nu: f64,
    /// `None` when `nu = 0` (no drive, no detuning).
    pub mixing: Option<MixingAngle>,
    theta: f64,
}

impl DressedStates {
    pub fn mixing_angle(&self) -> Result<MixingAngle> {
        self.mixing.ok_or(Error::DegenerateDressing)
    }

    /// Amplitudes of `|+>` and `|->` on `(|0>, |1>)`.
    pub fn states(&self) -> Result<([Complex64; 2], [Complex64; 2])> {
        let MixingAngle { sin_phi, cos_phi } = self.mixing_angle()?;
        let ph = Complex64::from_polar(1.0, -self.theta);
        let plus = [ph * sin_phi, Complex64::new(cos_phi, 0.0)];
        let minus = [ph * cos_phi, Complex64::new(-sin_phi, 0.0)];
        Ok((plus, minus))
    }
}

/// Dressed energies `omega_pm = Delta/2 +- nu` and the mixing angle.
pub fn dressed_states(params: &AtomParams) -> DressedStates {
    let half_delta = 0.5 * params.delta();
    let nu = params.omega().hypot(half_delta);
    let mixing = (nu > 0.0).then(|| {
        let r = (half_delta / nu).clamp(-1.0, 1.0);
        MixingAngle {
            sin_phi: (0.5 * (1.0 - r)).sqrt(),
            cos_phi: (0.5 * (1.0 + r)).sqrt(),
        }
    });
    DressedStates {
        omega_plus: half_delta + nu,
        omega_minus: half_delta - nu,
        nu,
        mixing,
        theta: params.theta(),
    }
}
