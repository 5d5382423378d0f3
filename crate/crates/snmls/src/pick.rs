//! Pick-style feasibility tests for the row-ball graph and classical
//! cross-checks.
//!
//! For the single-source complete graph the Stein identity collapses to
//! the familiar displacement equation
//!
//!   K - sum_e T_e K T_e^* = X X^* - Y Y^*,
//!
//! whose unique solution (for a strict row contraction or a nilpotent
//! tuple) is the noncommutative Pick kernel of the left data set.  The
//! problem is solvable iff that kernel is PSD.  This module computes the
//! kernel two independent ways, specializes it to commuting diagonal data
//! where it reproduces the scalar ball Pick matrix, and implements the
//! one-variable Schur-Nehari coefficient test used to cross-check
//! coefficient interpolation verdicts.

use crate::data::SideData;
use crate::linalg::{blkdiag, kron, max_abs, min_eig_herm, opnorm, solve_conditioned};
use crate::tuple::OperatorTuple;
use crate::{CMat, Error, Result, C64};

/// Noncommutative left Pick kernel for the row-ball graph.
#[derive(Debug, Clone)]
pub struct FmPick {
    /// Kernel from the vectorized linear solve.
    pub kernel: CMat,
    /// Deviation between the linear solve and the fixed-point iteration.
    pub gap: f64,
    pub min_eig: f64,
    pub feasible: bool,
    /// Fixed-point sweeps used.
    pub iterations: usize,
}

/// Solve K - sum_e T_e K T_e^* = X X^* - Y Y^* by a conditioned linear
/// solve and confirm with the fixed-point iteration K <- rhs + sum T K T^*.
pub fn fm_left_pick(
    t: &OperatorTuple,
    x: &CMat,
    y: &CMat,
    tol: f64,
    max_iter: usize,
) -> Result<FmPick> {
    let d = t.dim();
    if x.nrows() != d || y.nrows() != d {
        return Err(Error::Dim(
            "tangential directions must act from the tuple space".into(),
        ));
    }
    let rhs = x * x.adjoint() - y * y.adjoint();
    // vec(T K T^*) = (conj(T) (x) T) vec K in column-major vectorization
    let mut a = CMat::identity(d * d, d * d);
    for e in 0..t.num_edges() {
        let te = t.op(e);
        a -= kron(&te.conjugate(), te);
    }
    let b = CMat::from_iterator(d * d, 1, rhs.iter().cloned());
    let mut z = solve_conditioned(&a, &b, 1e12)?;
    // one round of iterative refinement sharpens the direct solve to
    // near machine precision even for Neumann-amplified kernels
    let defect = &b - &a * &z;
    z += solve_conditioned(&a, &defect, 1e12)?;
    let kernel = CMat::from_iterator(d, d, z.iter().cloned());

    let mut k_fp = rhs.clone();
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        let mut next = rhs.clone();
        for e in 0..t.num_edges() {
            let te = t.op(e);
            next += te * &k_fp * te.adjoint();
        }
        let step = max_abs(&(next.clone() - &k_fp));
        k_fp = next;
        if step <= 1e-14 * (1.0 + opnorm(&rhs)) {
            break;
        }
    }
    let gap = max_abs(&(kernel.clone() - &k_fp));
    let min_eig = min_eig_herm(&kernel);
    let feasible = min_eig >= -tol * (1.0 + opnorm(&kernel));
    Ok(FmPick {
        kernel,
        gap,
        min_eig,
        feasible,
        iterations,
    })
}

/// Scalar ball Pick matrix for tangential data b_i F(lambda_i) = c_i:
/// entries (b_i b_j^* - c_i c_j^*) / (1 - <lambda_i, lambda_j>).
pub fn commutative_pick(lambdas: &[Vec<C64>], b: &[CMat], c: &[CMat]) -> Result<CMat> {
    let kappa = lambdas.len();
    if b.len() != kappa || c.len() != kappa {
        return Err(Error::Dim("one direction pair per point required".into()));
    }
    let d = lambdas.first().map(|l| l.len()).unwrap_or(0);
    for l in lambdas {
        if l.len() != d {
            return Err(Error::Dim("points live in different dimensions".into()));
        }
        let norm2: f64 = l.iter().map(|z| z.norm_sqr()).sum();
        if norm2 >= 1.0 {
            return Err(Error::Input("points must lie in the open unit ball".into()));
        }
    }
    for m in b.iter().chain(c.iter()) {
        if m.nrows() != 1 {
            return Err(Error::Dim("tangential directions must be row vectors".into()));
        }
    }
    let mut p = CMat::zeros(kappa, kappa);
    for i in 0..kappa {
        for j in 0..kappa {
            let inner: C64 = (0..d).map(|e| lambdas[i][e] * lambdas[j][e].conj()).sum();
            let num = (&b[i] * b[j].adjoint())[(0, 0)] - (&c[i] * c[j].adjoint())[(0, 0)];
            p[(i, j)] = num / (C64::new(1.0, 0.0) - inner);
        }
    }
    Ok(p)
}

/// Left data set over the row-ball graph whose Pick kernel is the scalar
/// ball Pick matrix: diagonal tuple of the point coordinates with stacked
/// direction rows.
pub fn commutative_to_left_data(
    lambdas: &[Vec<C64>],
    b: &[CMat],
    c: &[CMat],
) -> Result<SideData> {
    let kappa = lambdas.len();
    if kappa == 0 {
        return Err(Error::Input("no interpolation points".into()));
    }
    let d = lambdas[0].len();
    let mut ops = Vec::with_capacity(d);
    for e in 0..d {
        let mut t = CMat::zeros(kappa, kappa);
        for i in 0..kappa {
            t[(i, i)] = lambdas[i][e];
        }
        ops.push(t);
    }
    let dim_out = b[0].ncols();
    let dim_in = c[0].ncols();
    let mut x = CMat::zeros(kappa, dim_out);
    let mut y = CMat::zeros(kappa, dim_in);
    for i in 0..kappa {
        if b[i].ncols() != dim_out || c[i].ncols() != dim_in {
            return Err(Error::Dim("direction rows have inconsistent widths".into()));
        }
        x.view_mut((i, 0), (1, dim_out)).copy_from(&b[i]);
        y.view_mut((i, 0), (1, dim_in)).copy_from(&c[i]);
    }
    Ok(SideData {
        t: OperatorTuple::new(ops)?,
        x,
        y,
    })
}

/// One-variable coefficient test: the initial segment S_0..S_N extends to
/// a Schur-class function iff the block lower-triangular Toeplitz matrix
/// built from it is a contraction.
#[derive(Debug, Clone)]
pub struct ToeplitzReport {
    pub matrix: CMat,
    pub norm: f64,
    pub feasible: bool,
}

pub fn schur_toeplitz(coeffs: &[CMat]) -> Result<ToeplitzReport> {
    if coeffs.is_empty() {
        return Err(Error::Input("no coefficients given".into()));
    }
    let dy = coeffs[0].nrows();
    let du = coeffs[0].ncols();
    for s in coeffs {
        if s.nrows() != dy || s.ncols() != du {
            return Err(Error::Dim("coefficient blocks have mixed shapes".into()));
        }
    }
    let n = coeffs.len();
    let mut m = CMat::zeros(n * dy, n * du);
    for i in 0..n {
        for j in 0..=i {
            m.view_mut((i * dy, j * du), (dy, du)).copy_from(&coeffs[i - j]);
        }
    }
    let norm = opnorm(&m);
    Ok(ToeplitzReport {
        matrix: m,
        norm,
        feasible: norm <= 1.0 + 1e-9,
    })
}

/// Direct sum of two left data sets over the same graph.
pub fn left_data_direct_sum(a: &SideData, b: &SideData) -> Result<SideData> {
    if a.t.num_edges() != b.t.num_edges() {
        return Err(Error::Dim("tuples have different edge counts".into()));
    }
    if a.x.ncols() != b.x.ncols() || a.y.ncols() != b.y.ncols() {
        return Err(Error::Dim("direction widths differ".into()));
    }
    let ops = (0..a.t.num_edges())
        .map(|e| blkdiag(&[a.t.op(e).clone(), b.t.op(e).clone()]))
        .collect();
    Ok(SideData {
        t: OperatorTuple::new(ops)?,
        x: crate::linalg::vcat(&[a.x.clone(), b.x.clone()]),
        y: crate::linalg::vcat(&[a.y.clone(), b.y.clone()]),
    })
}
