//! Dense eigen-decomposition of small complex matrices.
//!
//! Eigenvalues come from the complex Schur form. Eigenvectors are the right
//! singular vectors of `A - lambda I` for the smallest singular value. For a
//! cluster of close eigenvalues the null space at the cluster mean decides
//! between the two cases that matter here: if it has full dimension the
//! cluster is semisimple and gets an orthonormal basis, otherwise the members
//! keep their individual (nearly parallel) null vectors, which is what marks
//! a defective point.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Right eigenpairs, unit-normalised, in solver order.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<Complex64>,
    pub vectors: Vec<Vec<Complex64>>,
}

/// Singular values, descending.
pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rel_tol * sigma_max`.
pub fn numeric_rank(m: &DMatrix<Complex64>, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let Some(&top) = s.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Right singular vectors of `m` ordered by ascending singular value.
fn null_directions(m: &DMatrix<Complex64>) -> Vec<(f64, DVector<Complex64>)> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let mut out: Vec<(f64, DVector<Complex64>)> = (0..m.ncols())
        .map(|i| {
            let row = v_t.row(i);
            (
                svd.singular_values[i],
                DVector::from_iterator(row.len(), row.iter().map(|z| z.conj())),
            )
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Unit norm, with the largest-modulus component made real and positive.
pub fn normalize(v: &[Complex64]) -> Vec<Complex64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return v.to_vec();
    }
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    v.iter().map(|z| z * phase / norm).collect()
}

/// `|<a|b>| / (|a| |b|)`
pub fn overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    dot.norm() / (na * nb)
}

/// Eigen-decompose a square matrix.
///
/// Eigenvalues closer than `cluster_tol` are examined together as described
/// in the module docs; `rank_tol` is the relative singular-value threshold
/// used to count null-space dimension.
pub fn eigen_decompose(
    m: &DMatrix<Complex64>,
    cluster_tol: f64,
    rank_tol: f64,
) -> Result<EigenPairs> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::InvalidParams("matrix must be square".into()));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidParams("matrix has non-finite entries".into()));
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000).ok_or_else(|| {
        Error::ConvergenceFailure("complex Schur iteration did not converge".into())
    })?;
    let values: Vec<Complex64> = schur
        .eigenvalues()
        .ok_or_else(|| Error::ConvergenceFailure("Schur form not triangular".into()))?
        .iter()
        .copied()
        .collect();

    let vectors = eigenvectors_for(m, &values, cluster_tol, rank_tol);
    Ok(EigenPairs { values, vectors })
}

/// Unit right eigenvectors of `m` for already known eigenvalues.
pub fn eigenvectors_for(
    m: &DMatrix<Complex64>,
    values: &[Complex64],
    cluster_tol: f64,
    rank_tol: f64,
) -> Vec<Vec<Complex64>> {
    let n = m.nrows();
    let k = values.len();
    let norm = singular_values(m).first().copied().unwrap_or(0.0);
    let mut vectors: Vec<Option<Vec<Complex64>>> = vec![None; k];
    let mut assigned = vec![false; k];
    for i in 0..k {
        if assigned[i] {
            continue;
        }
        let cluster: Vec<usize> = (i..k)
            .filter(|&j| j == i || (!assigned[j] && (values[j] - values[i]).norm() < cluster_tol))
            .collect();
        let shifted = |lambda: Complex64| m - DMatrix::<Complex64>::identity(n, n) * lambda;

        if cluster.len() > 1 {
            let mean = cluster.iter().map(|&j| values[j]).sum::<Complex64>() / cluster.len() as f64;
            let dirs = null_directions(&shifted(mean));
            let null_dim = dirs
                .iter()
                .filter(|(s, _)| *s <= rank_tol * norm.max(f64::MIN_POSITIVE))
                .count();
            if null_dim >= cluster.len() {
                for (&j, (_, v)) in cluster.iter().zip(&dirs) {
                    vectors[j] = Some(normalize(v.as_slice()));
                    assigned[j] = true;
                }
                continue;
            }
        }
        for &j in &cluster {
            let dirs = null_directions(&shifted(values[j]));
            vectors[j] = Some(normalize(dirs[0].1.as_slice()));
            assigned[j] = true;
        }
    }

    vectors
        .into_iter()
        .map(|v| v.expect("every index assigned"))
        .collect()
}

/// Smallest achievable max-pairwise distance between two equally sized
/// multisets of complex numbers (minimum over all matchings).
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets must have equal size");
    fn go(
        a: &[Complex64],
        b: &[Complex64],
        used: &mut Vec<bool>,
        depth: usize,
        acc: f64,
        best: &mut f64,
    ) {
        if acc >= *best {
            return;
        }
        if depth == a.len() {
            *best = acc;
            return;
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(
                    a,
                    b,
                    used,
                    depth + 1,
                    acc.max((a[depth] - b[j]).norm()),
                    best,
                );
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(a, b, &mut vec![false; b.len()], 0, 0.0, &mut best);
    if a.is_empty() {
        0.0
    } else {
        best
    }
}

/// Coefficients `[c0, c1, ..., cn]` of `det(lambda I - M) = sum c_k lambda^k`
/// by the Faddeev-LeVerrier recursion. `cn = 1`.
pub fn characteristic_polynomial(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let n = m.nrows();
    let id = DMatrix::<Complex64>::identity(n, n);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut mk = DMatrix::<Complex64>::zeros(n, n);
    for k in 1..=n {
        mk = m * &mk + &id * coeffs[n + 1 - k];
        let am = m * &mk;
        coeffs[n - k] = -am.trace() / k as f64;
    }
    coeffs
}
