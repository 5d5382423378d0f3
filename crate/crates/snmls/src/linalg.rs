//! Small dense linear algebra helpers shared across the crate.
//!
//! Everything works on `DMatrix<Complex64>`; Hermitian matrices are
//! symmetrized before eigensolves so that tiny asymmetries from rounding
//! cannot leak into verdicts.

use crate::{C64, CMat, Error, Result};

/// Largest singular value; 0 for empty matrices.
pub fn opnorm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let svd = m.clone().svd(false, false);
    svd.singular_values.iter().copied().fold(0.0, f64::max)
}

/// Largest entry modulus; 0 for empty matrices.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hermitian part (m + m^*)/2.
pub fn herm_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part.
pub fn herm_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let se = nalgebra::SymmetricEigen::new(herm_part(m));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let vals: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (j, &i) in idx.iter().enumerate() {
        vecs.set_column(j, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Smallest eigenvalue of the Hermitian part; 0 for empty matrices.
pub fn min_eig_herm(m: &CMat) -> f64 {
    let (vals, _) = herm_eigen(m);
    vals.first().copied().unwrap_or(0.0)
}

/// Nearest positive semidefinite matrix (negative eigenvalues clipped).
pub fn psd_project(m: &CMat) -> CMat {
    let n = m.nrows();
    if n == 0 {
        return m.clone();
    }
    let (vals, vecs) = herm_eigen(m);
    let mut out = CMat::zeros(n, n);
    for (i, &v) in vals.iter().enumerate() {
        if v > 0.0 {
            let col = vecs.column(i);
            out += (col * col.adjoint()) * C64::new(v, 0.0);
        }
    }
    herm_part(&out)
}

/// Moore-Penrose pseudoinverse with a relative rank cutoff.
pub fn pinv(m: &CMat, rel_tol: f64) -> CMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CMat::zeros(m.ncols(), m.nrows());
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = rel_tol * smax.max(f64::MIN_POSITIVE);
    svd.pseudo_inverse(eps)
        .unwrap_or_else(|_| CMat::zeros(m.ncols(), m.nrows()))
}

/// 2-norm condition number; infinite when the smallest singular value vanishes.
pub fn cond2(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 1.0;
    }
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    if smin <= 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Solve m x = b through the SVD, rejecting condition numbers above `max_cond`.
pub fn solve_conditioned(m: &CMat, b: &CMat, max_cond: f64) -> Result<CMat> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dim(format!(
            "square matrix expected, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() != b.nrows() {
        return Err(Error::Dim("solve: row counts differ".into()));
    }
    let c = cond2(m);
    if !c.is_finite() || c > max_cond {
        return Err(Error::Conditioning(format!(
            "condition number {c:.3e} exceeds {max_cond:.3e}"
        )));
    }
    Ok(pinv(m, 1e-300) * b)
}

/// Orthonormal basis of the column space: left singular vectors whose
/// singular value clears both the relative and the absolute cutoff.  The
/// absolute cutoff guards against all-noise matrices, where a purely
/// relative test would keep spurious directions.
pub fn orthonormal_range(m: &CMat, rel_tol: f64, abs_tol: f64) -> CMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.as_ref().expect("svd with u");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = (rel_tol * smax).max(abs_tol);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cut && svd.singular_values[i] > 0.0)
        .collect();
    let mut out = CMat::zeros(m.nrows(), keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &u.column(i));
    }
    out
}

/// Orthonormal basis of the orthogonal complement of the (orthonormal)
/// columns of `q` inside the ambient space.
pub fn orthonormal_complement(q: &CMat) -> CMat {
    let n = q.nrows();
    let k = q.ncols();
    if n == 0 || k >= n {
        return CMat::zeros(n, n.saturating_sub(k));
    }
    if k == 0 {
        return CMat::identity(n, n);
    }
    // Householder QR of [Q I] produces a full unitary whose leading k
    // columns span range(Q); the trailing columns complete it.  (An SVD
    // of the projector I - QQ^* is unreliable here: its spectrum is
    // maximally clustered.)
    let ext = hcat(&[q.clone(), CMat::identity(n, n)]);
    let qfull = ext.qr().q();
    CMat::from(qfull.columns(k, n - k))
}

/// Kronecker product a (x) b.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Horizontal concatenation; all blocks must share a row count.
pub fn hcat(blocks: &[CMat]) -> CMat {
    if blocks.is_empty() {
        return CMat::zeros(0, 0);
    }
    let rows = blocks[0].nrows();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut off = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hcat row mismatch");
        out.view_mut((0, off), (rows, b.ncols())).copy_from(b);
        off += b.ncols();
    }
    out
}

/// Vertical concatenation; all blocks must share a column count.
pub fn vcat(blocks: &[CMat]) -> CMat {
    if blocks.is_empty() {
        return CMat::zeros(0, 0);
    }
    let cols = blocks[0].ncols();
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut off = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vcat column mismatch");
        out.view_mut((off, 0), (b.nrows(), cols)).copy_from(b);
        off += b.nrows();
    }
    out
}

/// Block diagonal matrix from the given blocks.
pub fn blkdiag(blocks: &[CMat]) -> CMat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Number of real coordinates of a Hermitian d x d matrix.
pub fn herm_dim(d: usize) -> usize {
    d * d
}

/// Real coordinates of a Hermitian matrix in an orthonormal basis
/// (Frobenius inner product maps to the Euclidean one).
pub fn herm_vec(m: &CMat, out: &mut [f64]) {
    let d = m.nrows();
    debug_assert_eq!(out.len(), d * d);
    let s = std::f64::consts::SQRT_2;
    let mut k = 0;
    for i in 0..d {
        out[k] = m[(i, i)].re;
        k += 1;
    }
    for i in 0..d {
        for j in (i + 1)..d {
            out[k] = s * m[(i, j)].re;
            out[k + 1] = s * m[(i, j)].im;
            k += 2;
        }
    }
}

/// Inverse of [`herm_vec`].
pub fn herm_unvec(coords: &[f64], d: usize) -> CMat {
    debug_assert_eq!(coords.len(), d * d);
    let s = std::f64::consts::SQRT_2;
    let mut m = CMat::zeros(d, d);
    let mut k = 0;
    for i in 0..d {
        m[(i, i)] = C64::new(coords[k], 0.0);
        k += 1;
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let z = C64::new(coords[k] / s, coords[k + 1] / s);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn opnorm_known() {
        let m = CMat::from_row_slice(1, 2, &[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!((opnorm(&m) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn herm_round_trip() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.5, -0.25), c(0.5, 0.25), c(-2.0, 0.0)],
        );
        let mut v = vec![0.0; 4];
        herm_vec(&m, &mut v);
        let back = herm_unvec(&v, 2);
        assert!(max_abs(&(back - m)) < 1e-14);
        // the basis is orthonormal, so norms agree
        let fro: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let direct = (1.0f64 + 2.0 * (0.5f64.powi(2) + 0.25f64.powi(2)) + 4.0).sqrt();
        assert!((fro - direct).abs() < 1e-12);
    }

    #[test]
    fn psd_project_clips() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-3.0, 0.0)]);
        let p = psd_project(&m);
        assert!(min_eig_herm(&p) >= -1e-12);
        assert!((p[(0, 0)].re - 1.0).abs() < 1e-12 && p[(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn complement_spans() {
        let q = CMat::from_row_slice(3, 1, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let comp = orthonormal_complement(&q);
        assert_eq!(comp.ncols(), 2);
        let gram = comp.adjoint() * &comp;
        assert!(max_abs(&(gram - CMat::identity(2, 2))) < 1e-12);
        assert!(max_abs(&(q.adjoint() * &comp)) < 1e-12);
    }
}
