//! Interpolation data sets and the structured Stein identity.
//!
//! A two-sided data set over an admissible graph consists of a left tuple
//! T_L on K_L with tangential directions X_L : Y -> K_L, Y_L : U -> K_L,
//! and a right tuple T_R on K_R with X_R : K_R -> Y, Y_R : K_R -> U.  A
//! Schur-class series F solves the problem when
//!
//!   sum_v T_L^{v^T} X_L F_v = Y_L   and   sum_v F_v Y_R T_R^{v^T} = X_R.
//!
//! Solvability is equivalent to the existence of positive semidefinite
//! component kernels K_p satisfying the Stein identity
//!
//!   sum_s M_s^* K_{[s]} M_s - sum_r N_r^* K_{[r]} N_r = X^* X - Y^* Y,
//!
//! where M_s and N_r interleave coordinate embeddings with the data tuples
//! and X = [X_L^* X_R], Y = [Y_L^* Y_R].  This module builds those
//! operators, evaluates residuals, and produces the certificate kernels
//! that witness necessity for transfer functions of conservative
//! colligations.

use crate::colligation::Colligation;
use crate::graph::Graph;
use crate::linalg::{hcat, max_abs, vcat};
use crate::series::{eval_left, eval_right, eval_tensor, NcSeries};
use crate::tuple::{admissibility_sufficient, AdmissibilityCertificate, OperatorTuple, Side};
use crate::word::Word;
use crate::{CMat, Error, Result};

/// One side of a data set: a tuple with its two tangential directions.
#[derive(Debug, Clone)]
pub struct SideData {
    pub t: OperatorTuple,
    pub x: CMat,
    pub y: CMat,
}

#[derive(Debug, Clone)]
pub struct InterpolationData {
    pub graph: Graph,
    pub dim_in: usize,
    pub dim_out: usize,
    pub left: Option<SideData>,
    pub right: Option<SideData>,
}

impl InterpolationData {
    pub fn left_only(graph: Graph, dim_in: usize, dim_out: usize, side: SideData) -> Result<Self> {
        InterpolationData {
            graph,
            dim_in,
            dim_out,
            left: Some(side),
            right: None,
        }
        .validated()
    }

    pub fn right_only(graph: Graph, dim_in: usize, dim_out: usize, side: SideData) -> Result<Self> {
        InterpolationData {
            graph,
            dim_in,
            dim_out,
            left: None,
            right: Some(side),
        }
        .validated()
    }

    pub fn two_sided(
        graph: Graph,
        dim_in: usize,
        dim_out: usize,
        left: SideData,
        right: SideData,
    ) -> Result<Self> {
        InterpolationData {
            graph,
            dim_in,
            dim_out,
            left: Some(left),
            right: Some(right),
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.left.is_none() && self.right.is_none() {
            return Err(Error::Input("data set carries neither side".into()));
        }
        if let Some(l) = &self.left {
            if l.t.num_edges() != self.graph.num_edges() {
                return Err(Error::Dim("left tuple does not match the edge set".into()));
            }
            if l.x.nrows() != l.t.dim() || l.x.ncols() != self.dim_out {
                return Err(Error::Dim(format!(
                    "X_L must be {}x{}, got {}x{}",
                    l.t.dim(),
                    self.dim_out,
                    l.x.nrows(),
                    l.x.ncols()
                )));
            }
            if l.y.nrows() != l.t.dim() || l.y.ncols() != self.dim_in {
                return Err(Error::Dim(format!(
                    "Y_L must be {}x{}, got {}x{}",
                    l.t.dim(),
                    self.dim_in,
                    l.y.nrows(),
                    l.y.ncols()
                )));
            }
        }
        if let Some(r) = &self.right {
            if r.t.num_edges() != self.graph.num_edges() {
                return Err(Error::Dim("right tuple does not match the edge set".into()));
            }
            if r.x.nrows() != self.dim_out || r.x.ncols() != r.t.dim() {
                return Err(Error::Dim(format!(
                    "X_R must be {}x{}, got {}x{}",
                    self.dim_out,
                    r.t.dim(),
                    r.x.nrows(),
                    r.x.ncols()
                )));
            }
            if r.y.nrows() != self.dim_in || r.y.ncols() != r.t.dim() {
                return Err(Error::Dim(format!(
                    "Y_R must be {}x{}, got {}x{}",
                    self.dim_in,
                    r.t.dim(),
                    r.y.nrows(),
                    r.y.ncols()
                )));
            }
        }
        Ok(self)
    }

    /// Dimension of K_L (zero when no left side is present).
    pub fn kl(&self) -> usize {
        self.left.as_ref().map(|s| s.t.dim()).unwrap_or(0)
    }

    /// Dimension of K_R.
    pub fn kr(&self) -> usize {
        self.right.as_ref().map(|s| s.t.dim()).unwrap_or(0)
    }

    /// Admissibility certificates for whichever sides are present.
    pub fn admissibility(
        &self,
    ) -> Result<(
        Option<AdmissibilityCertificate>,
        Option<AdmissibilityCertificate>,
    )> {
        let l = self
            .left
            .as_ref()
            .map(|s| admissibility_sufficient(&self.graph, &s.t, Side::Left))
            .transpose()?;
        let r = self
            .right
            .as_ref()
            .map(|s| admissibility_sufficient(&self.graph, &s.t, Side::Right))
            .transpose()?;
        Ok((l, r))
    }

    /// Largest nilpotency order over the present sides, when both are
    /// nilpotent.
    pub fn nilpotency_order(&self) -> Option<usize> {
        let mut order = 1usize;
        if let Some(l) = &self.left {
            order = order.max(l.t.nilpotency_order()?);
        }
        if let Some(r) = &self.right {
            order = order.max(r.t.nilpotency_order()?);
        }
        Some(order)
    }

    /// The row X = [X_L^* X_R] : K_L (+) K_R -> Y.
    pub fn x_row(&self) -> CMat {
        let mut blocks = Vec::new();
        if let Some(l) = &self.left {
            blocks.push(l.x.adjoint());
        } else {
            blocks.push(CMat::zeros(self.dim_out, 0));
        }
        if let Some(r) = &self.right {
            blocks.push(r.x.clone());
        } else {
            blocks.push(CMat::zeros(self.dim_out, 0));
        }
        hcat(&blocks)
    }

    /// The row Y = [Y_L^* Y_R] : K_L (+) K_R -> U.
    pub fn y_row(&self) -> CMat {
        let mut blocks = Vec::new();
        if let Some(l) = &self.left {
            blocks.push(l.y.adjoint());
        } else {
            blocks.push(CMat::zeros(self.dim_in, 0));
        }
        if let Some(r) = &self.right {
            blocks.push(r.y.clone());
        } else {
            blocks.push(CMat::zeros(self.dim_in, 0));
        }
        hcat(&blocks)
    }

    /// Assemble the Stein operators M_s, N_r and the identity's right-hand
    /// side for this data set.
    pub fn stein_operators(&self) -> Result<SteinOperators> {
        let g = &self.graph;
        let kl = self.kl();
        let kr = self.kr();
        let ktot = kl + kr;
        // component space dimensions: one K_L copy per source, one K_R
        // copy per range
        let comp_dims: Vec<usize> = g
            .components()
            .iter()
            .map(|&(n, m)| n * kl + m * kr)
            .collect();
        let mut m_ops = Vec::with_capacity(g.num_sources());
        for s in 0..g.num_sources() {
            let p = g.source_comp(s);
            let (n_p, m_p) = g.components()[p];
            let i_s = s - g.sources_of(p).start;
            // E_{L,s}: K_L embedded at slot i_s of the source stack
            let mut top = CMat::zeros(n_p * kl, ktot);
            if kl > 0 {
                top.view_mut((i_s * kl, 0), (kl, kl))
                    .copy_from(&CMat::identity(kl, kl));
            }
            // M~_s: column of T_{R, e(s, r')} over the component's ranges
            let mut bottom = CMat::zeros(m_p * kr, ktot);
            if kr > 0 {
                let r_side = self.right.as_ref().expect("kr > 0 implies right side");
                for (j, r) in g.ranges_of(p).enumerate() {
                    let e = g.edge_between(s, r).expect("same component");
                    bottom
                        .view_mut((j * kr, kl), (kr, kr))
                        .copy_from(r_side.t.op(e));
                }
            }
            m_ops.push(vcat(&[top, bottom]));
        }
        let mut n_ops = Vec::with_capacity(g.num_ranges());
        for r in 0..g.num_ranges() {
            let p = g.range_comp(r);
            let (n_p, m_p) = g.components()[p];
            let j_r = r - g.ranges_of(p).start;
            // N~_r: column of T_{L, e(s', r)}^* over the component's sources
            let mut top = CMat::zeros(n_p * kl, ktot);
            if kl > 0 {
                let l_side = self.left.as_ref().expect("kl > 0 implies left side");
                for (i, s) in g.sources_of(p).enumerate() {
                    let e = g.edge_between(s, r).expect("same component");
                    top.view_mut((i * kl, 0), (kl, kl))
                        .copy_from(&l_side.t.op(e).adjoint());
                }
            }
            // E_{R,r}: K_R embedded at slot j_r of the range stack
            let mut bottom = CMat::zeros(m_p * kr, ktot);
            if kr > 0 {
                bottom
                    .view_mut((j_r * kr, kl), (kr, kr))
                    .copy_from(&CMat::identity(kr, kr));
            }
            n_ops.push(vcat(&[top, bottom]));
        }
        let x = self.x_row();
        let y = self.y_row();
        let rhs = x.adjoint() * &x - y.adjoint() * &y;
        Ok(SteinOperators {
            graph: g.clone(),
            comp_dims,
            m_ops,
            n_ops,
            x,
            y,
            rhs,
        })
    }

    /// Residual of the interpolation conditions for a candidate series.
    /// Returns the largest entry deviation over the present sides together
    /// with a flag telling whether both evaluations were exact.
    pub fn interpolation_residual(&self, f: &NcSeries) -> Result<(f64, bool)> {
        if f.dim_out() != self.dim_out || f.dim_in() != self.dim_in {
            return Err(Error::Dim("candidate series has the wrong I/O dims".into()));
        }
        let mut worst = 0.0f64;
        let mut exact = true;
        if let Some(l) = &self.left {
            let ev = eval_left(&l.t, &l.x, f)?;
            exact &= ev.exact;
            worst = worst.max(max_abs(&(ev.value - &l.y)));
        }
        if let Some(r) = &self.right {
            let ev = eval_right(f, &r.y, &r.t)?;
            exact &= ev.exact;
            worst = worst.max(max_abs(&(ev.value - &r.x)));
        }
        Ok((worst, exact))
    }
}

/// The assembled left-hand side operators of the Stein identity.
#[derive(Debug, Clone)]
pub struct SteinOperators {
    pub graph: Graph,
    /// Dimension of the component space H_p for each component.
    pub comp_dims: Vec<usize>,
    /// M_s : K_L (+) K_R -> H_{[s]}, one per source.
    pub m_ops: Vec<CMat>,
    /// N_r : K_L (+) K_R -> H_{[r]}, one per range.
    pub n_ops: Vec<CMat>,
    /// X = [X_L^* X_R].
    pub x: CMat,
    /// Y = [Y_L^* Y_R].
    pub y: CMat,
    /// X^* X - Y^* Y.
    pub rhs: CMat,
}

impl SteinOperators {
    /// Total data space dimension K_L + K_R.
    pub fn data_dim(&self) -> usize {
        self.rhs.nrows()
    }

    /// Left-hand side of the Stein identity at the given kernels.
    pub fn apply(&self, k: &[CMat]) -> Result<CMat> {
        if k.len() != self.comp_dims.len() {
            return Err(Error::Dim("one kernel per component required".into()));
        }
        for (p, kp) in k.iter().enumerate() {
            if kp.nrows() != self.comp_dims[p] || kp.ncols() != self.comp_dims[p] {
                return Err(Error::Dim(format!(
                    "kernel {p} must be {0}x{0}",
                    self.comp_dims[p]
                )));
            }
        }
        let d = self.data_dim();
        let mut acc = CMat::zeros(d, d);
        for s in 0..self.graph.num_sources() {
            let m = &self.m_ops[s];
            acc += m.adjoint() * &k[self.graph.source_comp(s)] * m;
        }
        for r in 0..self.graph.num_ranges() {
            let n = &self.n_ops[r];
            acc -= n.adjoint() * &k[self.graph.range_comp(r)] * n;
        }
        Ok(acc)
    }

    /// Largest entry of (left-hand side - right-hand side).
    pub fn residual(&self, k: &[CMat]) -> Result<f64> {
        Ok(max_abs(&(self.apply(k)? - &self.rhs)))
    }
}

/// Certificate kernels for a solution that is the transfer function of a
/// conservative colligation: with H_s and G_r the structured resolvent
/// blocks of the colligation,
///
///   K_p = [T_{p,L} T_{p,R}]^* [T_{p,L} T_{p,R}],
///   T_{p,L} = Row_{[s]=p} ( sum_v T_L^{v^T} X_L (H_s)_v )^*,
///   T_{p,R} = Row_{[r]=p} ( sum_v (G_r)_v Y_R T_R^{v^T} ).
///
/// These Gram kernels are positive semidefinite by construction and
/// satisfy the Stein identity.  The data tuples must be nilpotent so the
/// evaluations are exact.
pub fn necessity_certificate(col: &Colligation, data: &InterpolationData) -> Result<Vec<CMat>> {
    if col.graph() != &data.graph {
        return Err(Error::Input("colligation and data use different graphs".into()));
    }
    if col.dim_in() != data.dim_in || col.dim_out() != data.dim_out {
        return Err(Error::Dim("colligation I/O does not match the data".into()));
    }
    let order = data
        .nilpotency_order()
        .ok_or_else(|| Error::Input("certificate kernels need nilpotent data tuples".into()))?;
    let g = &data.graph;
    let n = order.max(1);
    let kl = data.kl();
    let kr = data.kr();
    let mut kernels = Vec::with_capacity(g.num_components());
    for p in 0..g.num_components() {
        let h_dim = col.state_dims()[p];
        let mut row_blocks: Vec<CMat> = Vec::new();
        if let Some(l) = &data.left {
            for s in g.sources_of(p) {
                let hs = col.h_series_block(n, s)?;
                let ev = eval_left(&l.t, &l.x, &hs)?;
                debug_assert!(ev.exact);
                row_blocks.push(ev.value.adjoint());
            }
        } else {
            for _ in g.sources_of(p) {
                row_blocks.push(CMat::zeros(h_dim, kl));
            }
        }
        if let Some(r_side) = &data.right {
            for r in g.ranges_of(p) {
                let gr = col.g_series_block(n, r)?;
                let ev = eval_right(&gr, &r_side.y, &r_side.t)?;
                debug_assert!(ev.exact);
                row_blocks.push(ev.value);
            }
        } else {
            for _ in g.ranges_of(p) {
                row_blocks.push(CMat::zeros(h_dim, kr));
            }
        }
        let gen = hcat(&row_blocks);
        kernels.push(gen.adjoint() * gen);
    }
    Ok(kernels)
}

/// Schur-class check by sampling: evaluate the series at seeded nilpotent
/// tuples whose amplified structure matrix has norm at most `z_cap`, and
/// record the largest operator norm of the values.
#[derive(Debug, Clone)]
pub struct SchurSample {
    pub max_norm: f64,
    pub samples: usize,
    pub all_exact: bool,
}

pub fn schur_sample(
    f: &NcSeries,
    graph: &Graph,
    samples: usize,
    seed: u64,
    z_cap: f64,
) -> Result<SchurSample> {
    let mut rng = crate::random::rng_from_seed(seed);
    let mut max_norm = 0.0f64;
    let mut all_exact = true;
    for i in 0..samples {
        let dim = 2 + (i % 3);
        let blocks = 2 + (i % 3);
        let t = crate::random::random_nilpotent_tuple(&mut rng, graph, dim, blocks, z_cap);
        let ev = eval_tensor(f, &t)?;
        all_exact &= ev.exact;
        max_norm = max_norm.max(crate::linalg::opnorm(&ev.value));
    }
    Ok(SchurSample {
        max_norm,
        samples,
        all_exact,
    })
}

/// Left data set that encodes matching of the first coefficients: the
/// series must interpolate F_v = S_v for every word v in a lower
/// inclusive set (closed under removal of the rightmost letter).  The
/// tuple acts on l2(words) (x) Y by the truncated right shifts.
pub fn nsp_to_left_data(
    graph: &Graph,
    targets: &[(Word, CMat)],
    dim_in: usize,
    dim_out: usize,
) -> Result<SideData> {
    if graph.num_sources() != 1 || graph.num_components() != 1 {
        return Err(Error::Input(
            "coefficient interpolation uses the single-source complete graph".into(),
        ));
    }
    let d = graph.num_edges();
    if targets.is_empty() {
        return Err(Error::Input("no target coefficients given".into()));
    }
    let mut words: Vec<Word> = targets.iter().map(|(w, _)| w.clone()).collect();
    words.sort();
    words.dedup();
    if words.len() != targets.len() {
        return Err(Error::Input("duplicate target words".into()));
    }
    let index = |w: &Word| words.binary_search(w).ok();
    for w in &words {
        for e in w.letters() {
            if e >= d {
                return Err(Error::Input(format!(
                    "word {w} uses letter {e} outside the {d}-letter alphabet"
                )));
            }
        }
        if w.len() > 0 {
            let parent = Word::from_letters(
                &w.letters().collect::<Vec<_>>()[..w.len() - 1],
            );
            if index(&parent).is_none() {
                return Err(Error::Input(format!(
                    "target set is not lower inclusive: {w} present without {parent}"
                )));
            }
        }
    }
    let nw = words.len();
    let dim = nw * dim_out;
    let mut ops = Vec::with_capacity(d);
    for e in 0..d {
        let mut t = CMat::zeros(dim, dim);
        for (wi, w) in words.iter().enumerate() {
            if let Some(vi) = index(&w.append(e)) {
                t.view_mut((vi * dim_out, wi * dim_out), (dim_out, dim_out))
                    .copy_from(&CMat::identity(dim_out, dim_out));
            }
        }
        ops.push(t);
    }
    let mut x = CMat::zeros(dim, dim_out);
    let empty_idx = index(&Word::empty()).expect("lower inclusive set contains the empty word");
    x.view_mut((empty_idx * dim_out, 0), (dim_out, dim_out))
        .copy_from(&CMat::identity(dim_out, dim_out));
    let mut y = CMat::zeros(dim, dim_in);
    for (w, m) in targets {
        if m.nrows() != dim_out || m.ncols() != dim_in {
            return Err(Error::Dim(format!(
                "target at {w} must be {dim_out}x{dim_in}"
            )));
        }
        let wi = index(w).expect("word listed");
        y.view_mut((wi * dim_out, 0), (dim_out, dim_in)).copy_from(m);
    }
    let t = OperatorTuple::new(ops)?;
    Ok(SideData { t, x, y })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colligation::random_conservative;
    use crate::random::rng_from_seed;
    use crate::C64;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// Frozen hand-computed kernel for coefficient targets S_() = 0.5,
    /// S_(0) = 0.9 over one letter: the unique Stein solution is
    /// [[0.75, -0.45], [-0.45, -0.06]], which is indefinite.
    #[test]
    fn nsp_data_frozen_kernel() {
        let g = Graph::fm(1).unwrap();
        let targets = vec![
            (Word::empty(), CMat::from_element(1, 1, c(0.5))),
            (Word::letter(0), CMat::from_element(1, 1, c(0.9))),
        ];
        let side = nsp_to_left_data(&g, &targets, 1, 1).unwrap();
        assert_eq!(side.t.dim(), 2);
        assert_eq!(side.t.nilpotency_order(), Some(2));
        let data = InterpolationData::left_only(g, 1, 1, side).unwrap();
        let ops = data.stein_operators().unwrap();
        // single component, forced kernel from the nilpotent recursion
        let l = &data.left.as_ref().unwrap();
        let rhs = &ops.rhs;
        let t0 = l.t.op(0);
        let forced = rhs + t0 * rhs * t0.adjoint();
        let expect = CMat::from_row_slice(2, 2, &[c(0.75), c(-0.45), c(-0.45), c(-0.06)]);
        assert!(max_abs(&(forced.clone() - expect)) < 1e-12);
        assert!((ops.residual(&[forced.clone()]).unwrap()) < 1e-12);
        assert!(crate::linalg::min_eig_herm(&forced) < -0.1);
    }

    #[test]
    fn nsp_rejects_non_lower_sets() {
        let g = Graph::fm(2).unwrap();
        let targets = vec![
            (Word::empty(), CMat::from_element(1, 1, c(0.1))),
            (Word::from_letters(&[0, 1]), CMat::from_element(1, 1, c(0.2))),
        ];
        assert!(nsp_to_left_data(&g, &targets, 1, 1).is_err());
    }

    #[test]
    fn necessity_kernels_satisfy_stein_identity() {
        let mut rng = rng_from_seed(71);
        for (graph, dims) in [
            (Graph::fm(2).unwrap(), vec![2]),
            (Graph::gr(2).unwrap(), vec![1, 2]),
            (Graph::new(vec![(1, 2), (2, 1)]).unwrap(), vec![2, 1]),
        ] {
            let col = random_conservative(&mut rng, &graph, &dims, 2).unwrap();
            let f = col.transfer_series(4);
            let tl = crate::random::random_nilpotent_tuple(&mut rng, &graph, 4, 3, 0.9);
            let tr = crate::random::random_nilpotent_tuple(&mut rng, &graph, 3, 3, 0.9);
            let xl = crate::random::random_cmat(&mut rng, 4, col.dim_out(), 1.0);
            let yr = crate::random::random_cmat(&mut rng, col.dim_in(), 3, 1.0);
            // build consistent data from the sampled transfer function
            let yl = crate::series::eval_left(&tl, &xl, &f).unwrap();
            assert!(yl.exact);
            let xr = crate::series::eval_right(&f, &yr, &tr).unwrap();
            assert!(xr.exact);
            let data = InterpolationData::two_sided(
                graph.clone(),
                col.dim_in(),
                col.dim_out(),
                SideData {
                    t: tl,
                    x: xl,
                    y: yl.value,
                },
                SideData {
                    t: tr,
                    x: xr.value,
                    y: yr,
                },
            )
            .unwrap();
            let (res, exact) = data.interpolation_residual(&f).unwrap();
            assert!(exact && res < 1e-12);
            let kernels = necessity_certificate(&col, &data).unwrap();
            let ops = data.stein_operators().unwrap();
            let stein_res = ops.residual(&kernels).unwrap();
            assert!(stein_res < 1e-9, "stein residual {stein_res}");
            for kp in &kernels {
                let me = crate::linalg::min_eig_herm(kp);
                assert!(me >= -1e-9 * (1.0 + crate::linalg::opnorm(kp)));
            }
        }
    }

    #[test]
    fn schur_sample_bounds_conservative_transfer() {
        let mut rng = rng_from_seed(73);
        let graph = Graph::full(2, 2).unwrap();
        let col = random_conservative(&mut rng, &graph, &[2], 1).unwrap();
        let f = col.transfer_series(4);
        let rep = schur_sample(&f, &graph, 10, 99, 0.99).unwrap();
        assert!(rep.all_exact);
        assert!(rep.max_norm <= 1.0 + 1e-8, "norm {}", rep.max_norm);
    }
}
