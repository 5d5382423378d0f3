//! Formal power series in noncommuting variables indexed by graph edges.
//!
//! A series carries its coefficient dimensions, a truncation order N and a
//! sparse map from words to coefficients.  All arithmetic is exact on the
//! retained coefficients: products truncate to the smaller of the two
//! orders, which is precisely the range on which the Cauchy sum needs no
//! coefficients beyond the inputs' orders.
//!
//! Evaluations at operator tuples report whether the truncation was exact,
//! which it is whenever every product of length order + 1 vanishes.

use std::collections::BTreeMap;

use crate::linalg::{kron, max_abs};
use crate::tuple::OperatorTuple;
use crate::word::Word;
use crate::{C64, CMat, Error, Result};

/// Coefficients are exactly zero below this threshold when deciding whether
/// to keep a term; evaluation levels prune products below it as well.
pub const DROP_TOL: f64 = 1e-300;

/// Threshold under which an operator product counts as vanished when
/// certifying exactness of a truncated evaluation.
pub const NILPOTENT_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct NcSeries {
    dim_out: usize,
    dim_in: usize,
    order: usize,
    terms: BTreeMap<Word, CMat>,
}

impl NcSeries {
    pub fn zero(dim_out: usize, dim_in: usize, order: usize) -> Self {
        NcSeries {
            dim_out,
            dim_in,
            order,
            terms: BTreeMap::new(),
        }
    }

    /// Constant series with the given matrix as empty-word coefficient.
    pub fn constant(m: CMat, order: usize) -> Self {
        let mut s = NcSeries::zero(m.nrows(), m.ncols(), order);
        s.set(Word::empty(), m);
        s
    }

    pub fn identity(dim: usize, order: usize) -> Self {
        NcSeries::constant(CMat::identity(dim, dim), order)
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &CMat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, w: &Word) -> Option<&CMat> {
        self.terms.get(w)
    }

    /// Coefficient at w, zero if absent.
    pub fn coeff_or_zero(&self, w: &Word) -> CMat {
        self.terms
            .get(w)
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.dim_out, self.dim_in))
    }

    /// Insert or overwrite a coefficient.  Words beyond the order and
    /// all-zero matrices are ignored.
    pub fn set(&mut self, w: Word, m: CMat) {
        assert_eq!(m.nrows(), self.dim_out, "coefficient row mismatch");
        assert_eq!(m.ncols(), self.dim_in, "coefficient column mismatch");
        if w.len() > self.order || max_abs(&m) <= DROP_TOL {
            self.terms.remove(&w);
            return;
        }
        self.terms.insert(w, m);
    }

    /// Add into the coefficient at w.
    pub fn add_to(&mut self, w: Word, m: &CMat) {
        if w.len() > self.order {
            return;
        }
        let cur = self.coeff_or_zero(&w);
        self.set(w, cur + m);
    }

    pub fn truncate(&self, order: usize) -> NcSeries {
        let mut s = NcSeries::zero(self.dim_out, self.dim_in, order);
        for (w, m) in &self.terms {
            if w.len() > order {
                break;
            }
            s.set(w.clone(), m.clone());
        }
        s
    }

    /// Coefficient-wise submatrix: restrict every coefficient to the given
    /// row and column ranges.
    pub fn submatrix(
        &self,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
    ) -> NcSeries {
        let mut s = NcSeries::zero(rows.len(), cols.len(), self.order);
        for (w, m) in &self.terms {
            s.set(
                w.clone(),
                CMat::from(m.view((rows.start, cols.start), (rows.len(), cols.len()))),
            );
        }
        s
    }

    pub fn add(&self, rhs: &NcSeries) -> Result<NcSeries> {
        if self.dim_out != rhs.dim_out || self.dim_in != rhs.dim_in {
            return Err(Error::Dim("series addition dimension mismatch".into()));
        }
        let order = self.order.min(rhs.order);
        let mut out = self.truncate(order);
        for (w, m) in &rhs.terms {
            if w.len() > order {
                break;
            }
            out.add_to(w.clone(), m);
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &NcSeries) -> Result<NcSeries> {
        self.add(&rhs.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, z: C64) -> NcSeries {
        let mut out = NcSeries::zero(self.dim_out, self.dim_in, self.order);
        for (w, m) in &self.terms {
            out.set(w.clone(), m * z);
        }
        out
    }

    /// Cauchy product; words concatenate in factor order.
    pub fn mul(&self, rhs: &NcSeries) -> Result<NcSeries> {
        if self.dim_in != rhs.dim_out {
            return Err(Error::Dim(format!(
                "series product mismatch: {} vs {}",
                self.dim_in, rhs.dim_out
            )));
        }
        let order = self.order.min(rhs.order);
        let mut out = NcSeries::zero(self.dim_out, rhs.dim_in, order);
        for (v, a) in &self.terms {
            if v.len() > order {
                break;
            }
            let rem = order - v.len();
            for (w, b) in &rhs.terms {
                if w.len() > rem {
                    break;
                }
                out.add_to(v.concat(w), &(a * b));
            }
        }
        Ok(out)
    }

    /// Left multiplication by a constant matrix.
    pub fn left_mul(&self, m: &CMat) -> Result<NcSeries> {
        if m.ncols() != self.dim_out {
            return Err(Error::Dim("left multiplier mismatch".into()));
        }
        let mut out = NcSeries::zero(m.nrows(), self.dim_in, self.order);
        for (w, c) in &self.terms {
            out.set(w.clone(), m * c);
        }
        Ok(out)
    }

    /// Right multiplication by a constant matrix.
    pub fn right_mul(&self, m: &CMat) -> Result<NcSeries> {
        if self.dim_in != m.nrows() {
            return Err(Error::Dim("right multiplier mismatch".into()));
        }
        let mut out = NcSeries::zero(self.dim_out, m.ncols(), self.order);
        for (w, c) in &self.terms {
            out.set(w.clone(), c * m);
        }
        Ok(out)
    }

    /// Multiplication by a single variable on the right: F(z) z_e.
    pub fn mul_letter_right(&self, e: usize) -> NcSeries {
        let mut out = NcSeries::zero(self.dim_out, self.dim_in, self.order);
        for (w, m) in &self.terms {
            out.set(w.append(e), m.clone());
        }
        out
    }

    /// Multiplication by a single variable on the left: z_e F(z).
    pub fn mul_letter_left(&self, e: usize) -> NcSeries {
        let mut out = NcSeries::zero(self.dim_out, self.dim_in, self.order);
        for (w, m) in &self.terms {
            out.set(w.prepend(e), m.clone());
        }
        out
    }

    /// Division by a variable on the right: F(z) z_e^{-1}.  Words that do
    /// not end in e contribute zero.
    pub fn strip_letter_right(&self, e: usize) -> NcSeries {
        let mut out = NcSeries::zero(self.dim_out, self.dim_in, self.order);
        for (w, m) in &self.terms {
            if let Some(stripped) = w.strip_right(e) {
                out.set(stripped, m.clone());
            }
        }
        out
    }

    /// Division by a variable on the left: z_e^{-1} F(z).
    pub fn strip_letter_left(&self, e: usize) -> NcSeries {
        let mut out = NcSeries::zero(self.dim_out, self.dim_in, self.order);
        for (w, m) in &self.terms {
            if let Some(stripped) = w.strip_left(e) {
                out.set(stripped, m.clone());
            }
        }
        out
    }

    /// The adjoint series: coefficient at v is (F_{v^T})^*.  The adjoint of
    /// a product is the reversed product of adjoints.
    pub fn adjoint(&self) -> NcSeries {
        let mut out = NcSeries::zero(self.dim_in, self.dim_out, self.order);
        for (w, m) in &self.terms {
            out.set(w.transpose(), m.adjoint());
        }
        out
    }

    /// Inverse of a series whose constant term is invertible, exact to the
    /// series order.  Writes F = C(I + L) and sums the Neumann series of L.
    pub fn neumann_inverse(&self, max_cond: f64) -> Result<NcSeries> {
        if self.dim_out != self.dim_in {
            return Err(Error::Dim("only square series can be inverted".into()));
        }
        let dim = self.dim_out;
        let c = self.coeff_or_zero(&Word::empty());
        let c_inv = crate::linalg::solve_conditioned(&c, &CMat::identity(dim, dim), max_cond)
            .map_err(|e| match e {
                Error::Conditioning(msg) => {
                    Error::Conditioning(format!("series constant term: {msg}"))
                }
                other => other,
            })?;
        // L = C^{-1}(F - C) has zero constant term
        let mut l = self.left_mul(&c_inv)?;
        l.set(Word::empty(), CMat::zeros(dim, dim));
        let ident = NcSeries::identity(dim, self.order);
        let mut s = ident.clone();
        for _ in 0..self.order {
            s = ident.sub(&l.mul(&s)?)?;
        }
        s.right_mul(&c_inv)
    }

    /// Largest coefficient entry over all terms.
    pub fn max_coeff_abs(&self) -> f64 {
        self.terms.values().map(max_abs).fold(0.0, f64::max)
    }

    /// Largest entry of the coefficient-wise difference, up to the smaller
    /// order.
    pub fn max_diff(&self, rhs: &NcSeries) -> f64 {
        let order = self.order.min(rhs.order);
        let mut worst = 0.0f64;
        for (w, m) in &self.terms {
            if w.len() > order {
                break;
            }
            worst = worst.max(max_abs(&(m - rhs.coeff_or_zero(w))));
        }
        for (w, m) in &rhs.terms {
            if w.len() > order {
                break;
            }
            if !self.terms.contains_key(w) {
                worst = worst.max(max_abs(m));
            }
        }
        worst
    }

    /// Sum of coefficients with the given letter counts (one homogeneous
    /// part of the abelianization).
    pub fn abelian_part(&self, counts: &[u32]) -> CMat {
        let mut acc = CMat::zeros(self.dim_out, self.dim_in);
        for (w, m) in &self.terms {
            if w.abelianize(counts.len()) == counts {
                acc += m;
            }
        }
        acc
    }

    /// Evaluation of the abelianized series at a commuting scalar point.
    pub fn scalar_eval(&self, point: &[C64]) -> Result<CMat> {
        let mut acc = CMat::zeros(self.dim_out, self.dim_in);
        for (w, m) in &self.terms {
            let mut lambda = C64::new(1.0, 0.0);
            for e in w.letters() {
                let z = *point.get(e).ok_or_else(|| {
                    Error::Dim("scalar point has fewer entries than the edge set".into())
                })?;
                lambda *= z;
            }
            acc += m * lambda;
        }
        Ok(acc)
    }

    /// Lift to a two-variable series supported on the first variable.
    pub fn lift_first(&self, total_order: usize) -> BiSeries {
        let mut out = BiSeries::zero(self.dim_out, self.dim_in, total_order);
        for (w, m) in &self.terms {
            out.set(w.clone(), Word::empty(), m.clone());
        }
        out
    }

    /// Lift to a two-variable series supported on the second variable.
    pub fn lift_second(&self, total_order: usize) -> BiSeries {
        let mut out = BiSeries::zero(self.dim_out, self.dim_in, total_order);
        for (w, m) in &self.terms {
            out.set(Word::empty(), w.clone(), m.clone());
        }
        out
    }
}

/// Result of evaluating a truncated series at an operator tuple.
#[derive(Debug, Clone)]
pub struct EvalResult {
    pub value: CMat,
    /// True when every product of length order + 1 vanishes, so the
    /// truncated sum equals the full series evaluation.
    pub exact: bool,
}

fn levels_with_exactness(
    t: &OperatorTuple,
    order: usize,
) -> (Vec<Vec<(Word, CMat)>>, bool) {
    let levels = t.levels(order + 1, NILPOTENT_TOL);
    let exact = levels.len() <= order + 1 || levels[order + 1].is_empty();
    (levels, exact)
}

/// F(T) = sum_v F_v (x) T^v on the tensor product space.
pub fn eval_tensor(f: &NcSeries, t: &OperatorTuple) -> Result<EvalResult> {
    let kdim = t.dim();
    let (levels, exact) = levels_with_exactness(t, f.order());
    let mut acc = CMat::zeros(f.dim_out() * kdim, f.dim_in() * kdim);
    for level in levels.iter().take(f.order() + 1) {
        for (w, tw) in level {
            if let Some(fv) = f.coeff(w) {
                acc += kron(fv, tw);
            }
        }
    }
    Ok(EvalResult { value: acc, exact })
}

/// Left evaluation with operator argument: sum_v T^{v^T} X F_v.
/// X maps the output space of F into the tuple's space.
pub fn eval_left(t: &OperatorTuple, x: &CMat, f: &NcSeries) -> Result<EvalResult> {
    if x.nrows() != t.dim() || x.ncols() != f.dim_out() {
        return Err(Error::Dim(format!(
            "left evaluation: X is {}x{}, expected {}x{}",
            x.nrows(),
            x.ncols(),
            t.dim(),
            f.dim_out()
        )));
    }
    let (levels, exact) = levels_with_exactness(t, f.order());
    let mut acc = CMat::zeros(t.dim(), f.dim_in());
    for level in levels.iter().take(f.order() + 1) {
        for (u, tu) in level {
            // u runs over all words; substituting u = v^T picks up T^{v^T}
            if let Some(fv) = f.coeff(&u.transpose()) {
                acc += tu * x * fv;
            }
        }
    }
    Ok(EvalResult { value: acc, exact })
}

/// Right evaluation with operator argument: sum_v F_v Y T^{v^T}.
/// Y maps the tuple's space into the input space of F.
pub fn eval_right(f: &NcSeries, y: &CMat, t: &OperatorTuple) -> Result<EvalResult> {
    if y.nrows() != f.dim_in() || y.ncols() != t.dim() {
        return Err(Error::Dim(format!(
            "right evaluation: Y is {}x{}, expected {}x{}",
            y.nrows(),
            y.ncols(),
            f.dim_in(),
            t.dim()
        )));
    }
    let (levels, exact) = levels_with_exactness(t, f.order());
    let mut acc = CMat::zeros(f.dim_out(), t.dim());
    for level in levels.iter().take(f.order() + 1) {
        for (u, tu) in level {
            if let Some(fv) = f.coeff(&u.transpose()) {
                acc += fv * y * tu;
            }
        }
    }
    Ok(EvalResult { value: acc, exact })
}

/// Formal series in two independent batches of noncommuting variables
/// (each batch commutes with the other, not within itself), truncated by
/// total degree.
#[derive(Debug, Clone)]
pub struct BiSeries {
    dim_out: usize,
    dim_in: usize,
    order: usize,
    terms: BTreeMap<(Word, Word), CMat>,
}

impl BiSeries {
    pub fn zero(dim_out: usize, dim_in: usize, order: usize) -> Self {
        BiSeries {
            dim_out,
            dim_in,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(m: CMat, order: usize) -> Self {
        let mut s = BiSeries::zero(m.nrows(), m.ncols(), order);
        s.set(Word::empty(), Word::empty(), m);
        s
    }

    pub fn identity(dim: usize, order: usize) -> Self {
        BiSeries::constant(CMat::identity(dim, dim), order)
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, Word), &CMat)> {
        self.terms.iter()
    }

    pub fn coeff_or_zero(&self, v: &Word, w: &Word) -> CMat {
        self.terms
            .get(&(v.clone(), w.clone()))
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.dim_out, self.dim_in))
    }

    pub fn set(&mut self, v: Word, w: Word, m: CMat) {
        assert_eq!(m.nrows(), self.dim_out);
        assert_eq!(m.ncols(), self.dim_in);
        if v.len() + w.len() > self.order || max_abs(&m) <= DROP_TOL {
            self.terms.remove(&(v, w));
            return;
        }
        self.terms.insert((v, w), m);
    }

    pub fn add_to(&mut self, v: Word, w: Word, m: &CMat) {
        if v.len() + w.len() > self.order {
            return;
        }
        let cur = self.coeff_or_zero(&v, &w);
        self.set(v, w, cur + m);
    }

    pub fn add(&self, rhs: &BiSeries) -> Result<BiSeries> {
        if self.dim_out != rhs.dim_out || self.dim_in != rhs.dim_in {
            return Err(Error::Dim("bi-series addition dimension mismatch".into()));
        }
        let order = self.order.min(rhs.order);
        let mut out = BiSeries::zero(self.dim_out, self.dim_in, order);
        for ((v, w), m) in &self.terms {
            out.add_to(v.clone(), w.clone(), m);
        }
        for ((v, w), m) in &rhs.terms {
            out.add_to(v.clone(), w.clone(), m);
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &BiSeries) -> Result<BiSeries> {
        self.add(&rhs.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, z: C64) -> BiSeries {
        let mut out = BiSeries::zero(self.dim_out, self.dim_in, self.order);
        for ((v, w), m) in &self.terms {
            out.set(v.clone(), w.clone(), m * z);
        }
        out
    }

    /// Product: first-batch words concatenate in factor order, and so do
    /// second-batch words.
    pub fn mul(&self, rhs: &BiSeries) -> Result<BiSeries> {
        if self.dim_in != rhs.dim_out {
            return Err(Error::Dim("bi-series product dimension mismatch".into()));
        }
        let order = self.order.min(rhs.order);
        let mut out = BiSeries::zero(self.dim_out, rhs.dim_in, order);
        for ((v1, w1), a) in &self.terms {
            let la = v1.len() + w1.len();
            if la > order {
                continue;
            }
            for ((v2, w2), b) in &rhs.terms {
                if la + v2.len() + w2.len() > order {
                    continue;
                }
                out.add_to(v1.concat(v2), w1.concat(w2), &(a * b));
            }
        }
        Ok(out)
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.terms.values().map(max_abs).fold(0.0, f64::max)
    }
}
