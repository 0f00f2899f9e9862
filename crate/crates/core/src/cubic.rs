//! Closed-form roots of a real monic cubic `x^3 + a2 x^2 + a1 x + a0`.
//!
//! With `x = y - a2/3` the cubic is depressed and the roots follow from
//!
//! ```text
//! Q = (3 a1 - a2^2) / 9
//! R = (9 a2 a1 - 27 a0 - 2 a2^3) / 54
//! D = R^2 + Q^3
//! S = cbrt(R + sqrt(D)),  T = cbrt(R - sqrt(D))
//! x1 = -a2/3 + S + T
//! x2,3 = -a2/3 - (S + T)/2 +- i sqrt(3)/2 (S - T)
//! ```
//!
//! For `D >= 0` both radicands are real and the real cube root is taken. The
//! smaller of `S`, `T` in magnitude is recovered from `S T = -Q` to avoid
//! cancellation. For `D < 0` (three real roots) `S` and `T` are complex
//! conjugates and the trigonometric form is used instead, so the three roots
//! come out exactly real.

use std::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoots {
    /// `[x1, x2, x3]` in the Cardano labelling above. For `D >= 0`, `x1` is
    /// real and `Im x2 >= 0`. For `D < 0` all three are real and `x1 >= x3 >= x2`.
    pub roots: [Complex64; 3],
    pub q: f64,
    pub r: f64,
    /// `D = R^2 + Q^3`
    pub d: f64,
}

impl CubicRoots {
    /// Real roots (those with vanishing imaginary part), ascending.
    pub fn real_roots(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .roots
            .iter()
            .filter(|z| z.im == 0.0)
            .map(|z| z.re)
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }
}

pub fn solve_monic_cubic(a2: f64, a1: f64, a0: f64) -> CubicRoots {
    let shift = -a2 / 3.0;
    let q = (3.0 * a1 - a2 * a2) / 9.0;
    let r = (9.0 * a2 * a1 - 27.0 * a0 - 2.0 * a2 * a2 * a2) / 54.0;
    let d = r * r + q * q * q;

    let roots = if d >= 0.0 {
        let sqrt_d = d.sqrt();
        let big = (r + r.signum() * sqrt_d).cbrt();
        let small = if big != 0.0 { -q / big } else { 0.0 };
        let (s, t) = if r >= 0.0 { (big, small) } else { (small, big) };
        let re = shift - 0.5 * (s + t);
        let im = 0.5 * 3f64.sqrt() * (s - t);
        [
            Complex64::new(shift + s + t, 0.0),
            Complex64::new(re, im),
            Complex64::new(re, -im),
        ]
    } else {
        // d < 0 forces q < 0
        let m = (-q).sqrt();
        let phi = (r / (m * m * m)).clamp(-1.0, 1.0).acos();
        let y = |k: f64| 2.0 * m * ((phi + 2.0 * PI * k) / 3.0).cos();
        [
            Complex64::new(shift + y(0.0), 0.0),
            Complex64::new(shift + y(1.0), 0.0),
            Complex64::new(shift + y(-1.0), 0.0),
        ]
    };

    CubicRoots { roots, q, r, d }
}

/// Polynomial discriminant `18 a2 a1 a0 - 4 a2^3 a0 + a2^2 a1^2 - 4 a1^3 - 27 a0^2`.
///
/// Positive for three distinct real roots, negative for a complex pair,
/// zero for a repeated root. Equals `-108 D`.
pub fn discriminant(a2: f64, a1: f64, a0: f64) -> f64 {
    18.0 * a2 * a1 * a0 - 4.0 * a2.powi(3) * a0 + a2 * a2 * a1 * a1
        - 4.0 * a1.powi(3)
        - 27.0 * a0 * a0
}

/// `x^3 + a2 x^2 + a1 x + a0` at complex `x`.
pub fn eval_monic_cubic(a2: f64, a1: f64, a0: f64, x: Complex64) -> Complex64 {
    ((x + a2) * x + a1) * x + a0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs_from_roots(r: [Complex64; 3]) -> (f64, f64, f64) {
        let a2 = -(r[0] + r[1] + r[2]);
        let a1 = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
        let a0 = -(r[0] * r[1] * r[2]);
        (a2.re, a1.re, a0.re)
    }

    fn multiset_distance(a: &[Complex64; 3], b: &[Complex64; 3]) -> f64 {
        let perms = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        perms
            .iter()
            .map(|p| (0..3).map(|i| (a[i] - b[p[i]]).norm()).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn three_real_roots_use_trig_branch() {
        let c = solve_monic_cubic(-6.0, 11.0, -6.0);
        assert!(c.d < 0.0);
        assert_eq!(c.real_roots().len(), 3);
        let r = c.real_roots();
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
        // x1 largest, x2 smallest
        assert!(c.roots[0].re > c.roots[2].re && c.roots[2].re > c.roots[1].re);
    }

    #[test]
    fn complex_pair() {
        // (x - 1)(x^2 + 1)
        let c = solve_monic_cubic(-1.0, 1.0, -1.0);
        assert!(c.d > 0.0);
        assert!((c.roots[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((c.roots[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
        assert!((c.roots[2] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn triple_root() {
        let c = solve_monic_cubic(-3.0, 3.0, -1.0);
        assert_eq!(c.d, 0.0);
        for z in c.roots {
            assert!((z - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn discriminant_matches_cardano() {
        for (a2, a1, a0) in [
            (-6.0, 11.0, -6.0),
            (-1.0, 1.0, -1.0),
            (2.0, 1.3, 0.4),
            (0.1, -2.0, 0.7),
        ] {
            let c = solve_monic_cubic(a2, a1, a0);
            let disc = discriminant(a2, a1, a0);
            assert!((disc + 108.0 * c.d).abs() < 1e-12 * (1.0 + disc.abs()));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn recovers_real_roots(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
                let roots = [a, b, c].map(|x| Complex64::new(x, 0.0));
                let (a2, a1, a0) = coeffs_from_roots(roots);
                let sol = solve_monic_cubic(a2, a1, a0);
                for z in sol.roots {
                    prop_assert!(eval_monic_cubic(a2, a1, a0, z).norm() < 1e-10);
                }
                // root sensitivity degrades near repeated roots; only assert on well-separated sets
                let sep = (a - b).abs().min((a - c).abs()).min((b - c).abs());
                if sep > 1e-2 {
                    prop_assert!(multiset_distance(&sol.roots, &roots) < 1e-9 / sep);
                }
            }

            #[test]
            fn recovers_complex_pair(x in -3.0f64..3.0, re in -3.0f64..3.0, im in 0.01f64..3.0) {
                let roots = [Complex64::new(x, 0.0), Complex64::new(re, im), Complex64::new(re, -im)];
                let (a2, a1, a0) = coeffs_from_roots(roots);
                let sol = solve_monic_cubic(a2, a1, a0);
                prop_assert!(sol.roots[1].im >= 0.0);
                prop_assert!(sol.roots[1] == sol.roots[2].conj());
                let sep = im.min(Complex64::new(x - re, im).norm());
                prop_assert!(multiset_distance(&sol.roots, &roots) < 1e-9 / sep);
            }
        }
    }
}
