//! Structured multidimensional linear system colligations and their
//! transfer functions.
//!
//! A colligation over an admissible graph carries one state space per
//! component; the source side of the system operator stacks a copy of the
//! component space for every source vertex, the range side one for every
//! range vertex.  The system operator
//!
//!   U = [A B; C D] : (source states) (+) input -> (range states) (+) output
//!
//! is conservative when it is unitary.  The transfer function is computed
//! both by direct word products and through the series inverse of
//! I - Z(z) A; the two must agree coefficient by coefficient.

use std::collections::BTreeMap;

use crate::graph::Graph;
use crate::linalg::{blkdiag, max_abs};
use crate::series::{BiSeries, NcSeries};
use crate::word::Word;
use crate::{CMat, CVec, Error, Result};

#[derive(Debug, Clone)]
pub struct Colligation {
    graph: Graph,
    state_dims: Vec<usize>,
    dim_in: usize,
    dim_out: usize,
    u: CMat,
}

impl Colligation {
    pub fn new(
        graph: Graph,
        state_dims: Vec<usize>,
        dim_in: usize,
        dim_out: usize,
        u: CMat,
    ) -> Result<Self> {
        if state_dims.len() != graph.num_components() {
            return Err(Error::Dim(format!(
                "expected {} state dimensions, got {}",
                graph.num_components(),
                state_dims.len()
            )));
        }
        let col = Colligation {
            graph,
            state_dims,
            dim_in,
            dim_out,
            u,
        };
        let rows = col.range_state_dim() + dim_out;
        let cols = col.source_state_dim() + dim_in;
        if col.u.nrows() != rows || col.u.ncols() != cols {
            return Err(Error::Dim(format!(
                "system operator must be {}x{}, got {}x{}",
                rows,
                cols,
                col.u.nrows(),
                col.u.ncols()
            )));
        }
        Ok(col)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn state_dims(&self) -> &[usize] {
        &self.state_dims
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn u(&self) -> &CMat {
        &self.u
    }

    /// Total dimension of the source-side state stack.
    pub fn source_state_dim(&self) -> usize {
        *self
            .graph
            .source_dim_offsets(&self.state_dims)
            .last()
            .unwrap()
    }

    /// Total dimension of the range-side state stack.
    pub fn range_state_dim(&self) -> usize {
        *self
            .graph
            .range_dim_offsets(&self.state_dims)
            .last()
            .unwrap()
    }

    pub fn a(&self) -> CMat {
        let (rs, cs) = (self.range_state_dim(), self.source_state_dim());
        self.u.view((0, 0), (rs, cs)).into()
    }

    pub fn b(&self) -> CMat {
        let rs = self.range_state_dim();
        let cs = self.source_state_dim();
        self.u.view((0, cs), (rs, self.dim_in)).into()
    }

    pub fn c(&self) -> CMat {
        let rs = self.range_state_dim();
        let cs = self.source_state_dim();
        self.u.view((rs, 0), (self.dim_out, cs)).into()
    }

    pub fn d(&self) -> CMat {
        let rs = self.range_state_dim();
        let cs = self.source_state_dim();
        self.u.view((rs, cs), (self.dim_out, self.dim_in)).into()
    }

    /// Block A_{r,s} of A, mapping the state copy at source s to the state
    /// copy at range r.
    pub fn a_block(&self, r: usize, s: usize) -> CMat {
        let ro = self.graph.range_dim_offsets(&self.state_dims);
        let so = self.graph.source_dim_offsets(&self.state_dims);
        self.u
            .view((ro[r], so[s]), (ro[r + 1] - ro[r], so[s + 1] - so[s]))
            .into()
    }

    /// Block row B_r of B.
    pub fn b_block(&self, r: usize) -> CMat {
        let ro = self.graph.range_dim_offsets(&self.state_dims);
        let cs = self.source_state_dim();
        self.u
            .view((ro[r], cs), (ro[r + 1] - ro[r], self.dim_in))
            .into()
    }

    /// Block column C_s of C.
    pub fn c_block(&self, s: usize) -> CMat {
        let so = self.graph.source_dim_offsets(&self.state_dims);
        let rs = self.range_state_dim();
        self.u
            .view((rs, so[s]), (self.dim_out, so[s + 1] - so[s]))
            .into()
    }

    /// Largest deviation of U from unitarity.
    pub fn conservativity_defect(&self) -> f64 {
        let n = self.u.ncols();
        let m = self.u.nrows();
        let d1 = max_abs(&(self.u.adjoint() * &self.u - CMat::identity(n, n)));
        let d2 = max_abs(&(&self.u * self.u.adjoint() - CMat::identity(m, m)));
        d1.max(d2)
    }

    pub fn is_conservative(&self, tol: f64) -> bool {
        self.conservativity_defect() <= tol
    }

    /// The structure series Z(z): one term per edge, carrying the identity
    /// on the component state space at block position (source(e), range(e)).
    /// It maps the range-side stack into the source-side stack.
    pub fn structure_series(&self, order: usize) -> NcSeries {
        structure_series(&self.graph, &self.state_dims, order)
    }

    /// Transfer function by direct word products:
    /// F_empty = D, and for w = e_N ... e_1
    /// F_w = C_{s(e_N)} A_{r(e_N), s(e_{N-1})} ... A_{r(e_2), s(e_1)} B_{r(e_1)}.
    pub fn transfer_series(&self, order: usize) -> NcSeries {
        let mut f = NcSeries::zero(self.dim_out, self.dim_in, order);
        f.set(Word::empty(), self.d());
        // running products G_w = A_{r(e_k), s(e_{k-1})} ... B_{r(e_1)},
        // indexed by the word's leftmost letter for the next extension
        let mut level: Vec<(Word, CMat)> = Vec::new();
        for e in 0..self.graph.num_edges() {
            level.push((Word::letter(e), self.b_block(self.graph.edge_range(e))));
        }
        for len in 1..=order {
            for (w, g) in &level {
                let lead = w.leftmost().expect("nonempty word");
                f.set(w.clone(), self.c_block(self.graph.edge_source(lead)) * g);
            }
            if len == order {
                break;
            }
            let mut next = Vec::with_capacity(level.len() * self.graph.num_edges());
            for (w, g) in &level {
                let lead = w.leftmost().expect("nonempty word");
                for e in 0..self.graph.num_edges() {
                    let a = self.a_block(self.graph.edge_range(e), self.graph.edge_source(lead));
                    next.push((w.prepend(e), a * g));
                }
            }
            level = next;
        }
        f
    }

    /// Transfer function through the series identity
    /// F(z) = D + C (I - Z(z) A)^{-1} Z(z) B.
    pub fn transfer_series_neumann(&self, order: usize) -> Result<NcSeries> {
        let z = self.structure_series(order);
        let za = z.right_mul(&self.a())?;
        let resolvent = NcSeries::identity(self.source_state_dim(), order)
            .sub(&za)?
            .neumann_inverse(1e12)?;
        let zb = z.right_mul(&self.b())?;
        let tail = resolvent.mul(&zb)?.left_mul(&self.c())?;
        NcSeries::constant(self.d(), order).add(&tail)
    }

    /// H(z) = C (I - Z(z) A)^{-1}, mapping the source-side state stack to
    /// the output space.
    pub fn h_series(&self, order: usize) -> Result<NcSeries> {
        let z = self.structure_series(order);
        let za = z.right_mul(&self.a())?;
        let resolvent = NcSeries::identity(self.source_state_dim(), order)
            .sub(&za)?
            .neumann_inverse(1e12)?;
        resolvent.left_mul(&self.c())
    }

    /// G(z) = (I - A Z(z))^{-1} B, mapping the input space to the
    /// range-side state stack.
    pub fn g_series(&self, order: usize) -> Result<NcSeries> {
        let z = self.structure_series(order);
        let az = z.left_mul(&self.a())?;
        let resolvent = NcSeries::identity(self.range_state_dim(), order)
            .sub(&az)?
            .neumann_inverse(1e12)?;
        resolvent.right_mul(&self.b())
    }

    /// Column block of H(z) belonging to source s.
    pub fn h_series_block(&self, order: usize, s: usize) -> Result<NcSeries> {
        let h = self.h_series(order)?;
        let so = self.graph.source_dim_offsets(&self.state_dims);
        let dim = so[s + 1] - so[s];
        let mut out = NcSeries::zero(self.dim_out, dim, order);
        for (w, m) in h.terms() {
            out.set(w.clone(), m.view((0, so[s]), (self.dim_out, dim)).into());
        }
        Ok(out)
    }

    /// Row block of G(z) belonging to range r.
    pub fn g_series_block(&self, order: usize, r: usize) -> Result<NcSeries> {
        let g = self.g_series(order)?;
        let ro = self.graph.range_dim_offsets(&self.state_dims);
        let dim = ro[r + 1] - ro[r];
        let mut out = NcSeries::zero(dim, self.dim_in, order);
        for (w, m) in g.terms() {
            out.set(w.clone(), m.view((ro[r], 0), (dim, self.dim_in)).into());
        }
        Ok(out)
    }

    /// Residuals of the three kernel decompositions of a conservative
    /// colligation, as two-variable series up to the given total order:
    ///
    ///   I - F(z) F(z')^*  =  H(z) (I - Z(z) Z(z')^*) H(z')^*
    ///   I - F(z)^* F(z')  =  G(z)^* (I - Z(z)^* Z(z')) G(z')
    ///   F(z) - F(z')      =  H(z) (Z(z) - Z(z')) G(z')
    pub fn agler_residuals(&self, total_order: usize) -> Result<AglerReport> {
        let n = total_order;
        let f = self.transfer_series_neumann(n)?;
        let h = self.h_series(n)?;
        let g = self.g_series(n)?;
        let z = self.structure_series(n);

        let f1 = f.lift_first(n);
        let fs2 = f.adjoint().lift_second(n);
        let h1 = h.lift_first(n);
        let hs2 = h.adjoint().lift_second(n);
        let g2 = g.lift_second(n);
        let gs1 = g.adjoint().lift_first(n);
        let z1 = z.lift_first(n);
        let zs2 = z.adjoint().lift_second(n);
        let zs1 = z.adjoint().lift_first(n);
        let z2 = z.lift_second(n);
        let f2 = f.lift_second(n);
        let fs1 = f.adjoint().lift_first(n);

        let iy = BiSeries::identity(self.dim_out, n);
        let iu = BiSeries::identity(self.dim_in, n);
        let i_src = BiSeries::identity(self.source_state_dim(), n);
        let i_rng = BiSeries::identity(self.range_state_dim(), n);

        // I - F(z)F(z')^* = H(z)(I - Z(z)Z(z')^*)H(z')^*
        let lhs1 = iy.sub(&f1.mul(&fs2)?)?;
        let mid1 = i_src.sub(&z1.mul(&zs2)?)?;
        let rhs1 = h1.mul(&mid1)?.mul(&hs2)?;
        let r1 = lhs1.sub(&rhs1)?.max_coeff_abs();

        // I - F(z)^*F(z') = G(z)^*(I - Z(z)^*Z(z'))G(z')
        let lhs2 = iu.sub(&fs1.mul(&f2)?)?;
        let mid2 = i_rng.sub(&zs1.mul(&z2)?)?;
        let rhs2 = gs1.mul(&mid2)?.mul(&g2)?;
        let r2 = lhs2.sub(&rhs2)?.max_coeff_abs();

        // F(z) - F(z') = H(z)(Z(z) - Z(z'))G(z')
        let lhs3 = f1.sub(&f2)?;
        let mid3 = z1.sub(&z2)?;
        let rhs3 = h1.mul(&mid3)?.mul(&g2)?;
        let r3 = lhs3.sub(&rhs3)?.max_coeff_abs();

        Ok(AglerReport { r1, r2, r3 })
    }

    /// Run the system recursion over all words up to the horizon.
    ///
    /// States live on words: the initial state sits at the empty word and
    /// the update along edge e writes the range-r(e) block of A x + B u
    /// into the source-s(e) component of the state at word e w, all other
    /// components zero.
    pub fn simulate(
        &self,
        initial: &CVec,
        inputs: &BTreeMap<Word, CVec>,
        horizon: usize,
    ) -> Result<Trajectory> {
        let src = self.source_state_dim();
        if initial.nrows() != src {
            return Err(Error::Dim(format!(
                "initial state must have dimension {src}"
            )));
        }
        let so = self.graph.source_dim_offsets(&self.state_dims);
        let ro = self.graph.range_dim_offsets(&self.state_dims);
        let a = self.a();
        let b = self.b();
        let c = self.c();
        let d = self.d();
        let zero_input = CVec::zeros(self.dim_in);

        let mut states: BTreeMap<Word, CVec> = BTreeMap::new();
        let mut outputs: BTreeMap<Word, CVec> = BTreeMap::new();
        states.insert(Word::empty(), initial.clone());
        let mut level: Vec<Word> = vec![Word::empty()];
        for len in 0..=horizon {
            let mut next = Vec::new();
            for w in &level {
                let x = states.get(w).expect("state populated").clone();
                let u = inputs.get(w).unwrap_or(&zero_input);
                if u.nrows() != self.dim_in {
                    return Err(Error::Dim("input vector has the wrong dimension".into()));
                }
                outputs.insert(w.clone(), &c * &x + &d * u);
                if len == horizon {
                    continue;
                }
                let drive = &a * &x + &b * u;
                for e in 0..self.graph.num_edges() {
                    let s = self.graph.edge_source(e);
                    let r = self.graph.edge_range(e);
                    let mut xe = CVec::zeros(src);
                    let block = drive.rows(ro[r], ro[r + 1] - ro[r]);
                    xe.rows_mut(so[s], so[s + 1] - so[s]).copy_from(&block);
                    let we = w.prepend(e);
                    states.insert(we.clone(), xe);
                    next.push(we);
                }
            }
            level = next;
        }
        Ok(Trajectory { states, outputs })
    }

    /// Dissipation inequalities along a trajectory.  With weights
    /// N_S^{-|w|} (N_S the largest source count), a contractive U gives for
    /// every level n
    ///
    ///   sum_{|w|=n+1} w(x) - sum_{|w|=n} w(x)
    ///     <= sum_{|w|=n} w(u) - w(y),
    ///
    /// its telescoped form bounds the level-n state energy by the initial
    /// state energy plus accumulated net supply, and summing to the horizon
    /// bounds the weighted output energy.  Equality holds in the stepwise
    /// form when every component has a single source and U is isometric.
    pub fn energy_balance(
        &self,
        traj: &Trajectory,
        inputs: &BTreeMap<Word, CVec>,
        horizon: usize,
    ) -> EnergyReport {
        let ns = self.graph.max_sources() as f64;
        let zero_input = CVec::zeros(self.dim_in);
        let mut state_energy = vec![0.0f64; horizon + 2];
        let mut supply = vec![0.0f64; horizon + 1];
        let mut output_energy = vec![0.0f64; horizon + 1];
        for (w, x) in &traj.states {
            if w.len() <= horizon + 1 {
                state_energy[w.len()] += x.norm_squared() / ns.powi(w.len() as i32);
            }
        }
        for (w, y) in &traj.outputs {
            if w.len() <= horizon {
                let weight = ns.powi(w.len() as i32).recip();
                output_energy[w.len()] += weight * y.norm_squared();
                let u = inputs.get(w).unwrap_or(&zero_input);
                supply[w.len()] += weight * (u.norm_squared() - y.norm_squared());
            }
        }
        let stepwise: Vec<LevelBalance> = (0..horizon)
            .map(|n| {
                let lhs = state_energy[n + 1] - state_energy[n];
                LevelBalance {
                    level: n,
                    lhs,
                    rhs: supply[n],
                    slack: supply[n] - lhs,
                }
            })
            .collect();
        let telescoped: Vec<LevelBalance> = (1..=horizon)
            .map(|n| {
                let acc: f64 = supply[..n].iter().sum();
                LevelBalance {
                    level: n,
                    lhs: state_energy[n],
                    rhs: state_energy[0] + acc,
                    slack: state_energy[0] + acc - state_energy[n],
                }
            })
            .collect();
        let total_output: f64 = output_energy.iter().sum();
        let total_input: f64 = supply
            .iter()
            .zip(output_energy.iter())
            .map(|(s, y)| s + y)
            .sum();
        let final_slack = state_energy[0] + total_input - total_output;
        EnergyReport {
            weight_base: ns,
            stepwise,
            telescoped,
            final_slack,
        }
    }

    /// Conjugate the colligation by component unitaries: the state copy at
    /// every vertex of component p is rotated by upsilon[p].  The transfer
    /// function is unchanged.
    pub fn unitary_equivalent(&self, upsilon: &[CMat]) -> Result<Colligation> {
        if upsilon.len() != self.graph.num_components() {
            return Err(Error::Dim("one unitary per component required".into()));
        }
        for (p, up) in upsilon.iter().enumerate() {
            if up.nrows() != self.state_dims[p] || up.ncols() != self.state_dims[p] {
                return Err(Error::Dim(format!(
                    "component {p} unitary must be {0}x{0}",
                    self.state_dims[p]
                )));
            }
        }
        let mut range_blocks: Vec<CMat> = (0..self.graph.num_ranges())
            .map(|r| upsilon[self.graph.range_comp(r)].clone())
            .collect();
        range_blocks.push(CMat::identity(self.dim_out, self.dim_out));
        let left = blkdiag(&range_blocks);
        let mut source_blocks: Vec<CMat> = (0..self.graph.num_sources())
            .map(|s| upsilon[self.graph.source_comp(s)].clone())
            .collect();
        source_blocks.push(CMat::identity(self.dim_in, self.dim_in));
        let right = blkdiag(&source_blocks);
        Colligation::new(
            self.graph.clone(),
            self.state_dims.clone(),
            self.dim_in,
            self.dim_out,
            left * &self.u * right.adjoint(),
        )
    }

    /// The dual colligation: dual graph, same component state spaces,
    /// system operator U^*, inputs and outputs swapped.  Its transfer
    /// function is F'(z) with F'_v = (F_{w^T})^* where w is the word v read
    /// through the edge duality.
    pub fn dual(&self) -> Colligation {
        let dg = self.graph.dual();
        Colligation::new(
            dg,
            self.state_dims.clone(),
            self.dim_out,
            self.dim_in,
            self.u.adjoint(),
        )
        .expect("dual dimensions are consistent")
    }
}

/// Structure series of a graph with the given component dimensions:
/// term z_e carries the identity block at position (source(e), range(e)).
pub fn structure_series(graph: &Graph, dims: &[usize], order: usize) -> NcSeries {
    let so = graph.source_dim_offsets(dims);
    let ro = graph.range_dim_offsets(dims);
    let rows = *so.last().unwrap();
    let cols = *ro.last().unwrap();
    let mut z = NcSeries::zero(rows, cols, order);
    for e in 0..graph.num_edges() {
        let s = graph.edge_source(e);
        let r = graph.edge_range(e);
        let dim = dims[graph.edge_comp(e)];
        let mut m = CMat::zeros(rows, cols);
        m.view_mut((so[s], ro[r]), (dim, dim))
            .copy_from(&CMat::identity(dim, dim));
        z.set(Word::letter(e), m);
    }
    z
}

/// Conservative colligation with Haar-unitary system operator.  Input and
/// output dimensions are padded from `io_base` so that the operator can be
/// square.
pub fn random_conservative(
    rng: &mut impl rand::Rng,
    graph: &Graph,
    state_dims: &[usize],
    io_base: usize,
) -> Result<Colligation> {
    let src: usize = graph
        .source_dim_offsets(state_dims)
        .last()
        .copied()
        .unwrap_or(0);
    let rng_dim: usize = graph
        .range_dim_offsets(state_dims)
        .last()
        .copied()
        .unwrap_or(0);
    let dim_in = io_base + rng_dim.saturating_sub(src);
    let dim_out = io_base + src.saturating_sub(rng_dim);
    random_conservative_exact(rng, graph, state_dims, dim_in, dim_out)
}

/// Conservative colligation with prescribed input/output dimensions; they
/// must balance the state stacks so that U can be unitary.
pub fn random_conservative_exact(
    rng: &mut impl rand::Rng,
    graph: &Graph,
    state_dims: &[usize],
    dim_in: usize,
    dim_out: usize,
) -> Result<Colligation> {
    let src: usize = graph
        .source_dim_offsets(state_dims)
        .last()
        .copied()
        .unwrap_or(0);
    let rng_dim: usize = graph
        .range_dim_offsets(state_dims)
        .last()
        .copied()
        .unwrap_or(0);
    if src + dim_in != rng_dim + dim_out {
        return Err(Error::Dim(format!(
            "cannot build a unitary {}x{} system operator",
            rng_dim + dim_out,
            src + dim_in
        )));
    }
    let u = crate::random::haar_unitary(rng, src + dim_in);
    Colligation::new(graph.clone(), state_dims.to_vec(), dim_in, dim_out, u)
}

#[derive(Debug, Clone)]
pub struct AglerReport {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl AglerReport {
    pub fn max(&self) -> f64 {
        self.r1.max(self.r2).max(self.r3)
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: BTreeMap<Word, CVec>,
    pub outputs: BTreeMap<Word, CVec>,
}

#[derive(Debug, Clone)]
pub struct LevelBalance {
    pub level: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub weight_base: f64,
    pub stepwise: Vec<LevelBalance>,
    pub telescoped: Vec<LevelBalance>,
    pub final_slack: f64,
}

impl EnergyReport {
    /// Most negative slack across all inequalities.
    pub fn worst_slack(&self) -> f64 {
        let mut worst = self.final_slack;
        for lb in self.stepwise.iter().chain(self.telescoped.iter()) {
            worst = worst.min(lb.slack);
        }
        worst
    }

    /// Largest absolute stepwise slack (zero when equality holds).
    pub fn max_stepwise_gap(&self) -> f64 {
        self.stepwise
            .iter()
            .map(|lb| lb.slack.abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_unitary, random_input, rng_from_seed};
    use crate::C64;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// Scalar single-variable colligation from a 2x2 matrix.
    fn scalar_fm_colligation(u: CMat) -> Colligation {
        Colligation::new(Graph::fm(1).unwrap(), vec![1], 1, 1, u).unwrap()
    }

    #[test]
    fn scalar_transfer_oracle() {
        // U = [0.6 0.8; 0.8 -0.6]: F_0 = -0.6, F_k = 0.8 * 0.6^{k-1} * 0.8
        let u = CMat::from_row_slice(2, 2, &[c(0.6), c(0.8), c(0.8), c(-0.6)]);
        let col = scalar_fm_colligation(u);
        assert!(col.is_conservative(1e-12));
        let f = col.transfer_series(4);
        let expect = [-0.6, 0.64, 0.384, 0.2304, 0.138_24];
        for (k, want) in expect.iter().enumerate() {
            let w = Word::from_letters(&vec![0; k]);
            let got = f.coeff_or_zero(&w)[(0, 0)];
            assert!((got - c(*want)).norm() < 1e-12, "k={k} got={got}");
        }
    }

    #[test]
    fn word_and_neumann_paths_agree() {
        let mut rng = rng_from_seed(17);
        for (graph, dims) in [
            (Graph::fm(2).unwrap(), vec![2]),
            (Graph::gr(2).unwrap(), vec![2, 1]),
            (Graph::full(2, 2).unwrap(), vec![2]),
            (Graph::new(vec![(1, 2), (2, 1)]).unwrap(), vec![1, 2]),
        ] {
            let col = random_conservative(&mut rng, &graph, &dims, 2).unwrap();
            let fw = col.transfer_series(4);
            let fn_ = col.transfer_series_neumann(4).unwrap();
            let gap = fw.max_diff(&fn_);
            assert!(gap < 1e-12, "gap {gap}");
        }
    }

    #[test]
    fn transfer_matches_h_and_g_contractions() {
        // F = D + H Z B = D + C Z G
        let mut rng = rng_from_seed(23);
        let graph = Graph::new(vec![(2, 1), (1, 2)]).unwrap();
        let col = random_conservative(&mut rng, &graph, &[2, 1], 2).unwrap();
        let n = 4;
        let f = col.transfer_series(n);
        let z = col.structure_series(n);
        let h = col.h_series(n).unwrap();
        let g = col.g_series(n).unwrap();
        let d = NcSeries::constant(col.d(), n);
        let via_h = d
            .add(&h.mul(&z.right_mul(&col.b()).unwrap()).unwrap())
            .unwrap();
        let via_g = d
            .add(&z.left_mul(&col.c()).unwrap().mul(&g).unwrap())
            .unwrap();
        assert!(f.max_diff(&via_h) < 1e-12);
        assert!(f.max_diff(&via_g) < 1e-12);
    }

    #[test]
    fn agler_residuals_vanish_for_conservative() {
        let mut rng = rng_from_seed(29);
        let graph = Graph::full(2, 2).unwrap();
        let col = random_conservative(&mut rng, &graph, &[2], 1).unwrap();
        let rep = col.agler_residuals(3).unwrap();
        assert!(rep.max() < 1e-12, "residuals {rep:?}");
    }

    #[test]
    fn agler_residuals_detect_non_conservative() {
        let graph = Graph::fm(1).unwrap();
        let u = CMat::from_row_slice(2, 2, &[c(0.9), c(0.8), c(0.8), c(-0.6)]);
        let col = Colligation::new(graph, vec![1], 1, 1, u).unwrap();
        let rep = col.agler_residuals(2).unwrap();
        assert!(rep.max() > 1e-3);
    }

    #[test]
    fn energy_balance_conservative() {
        let mut rng = rng_from_seed(31);
        let graph = Graph::new(vec![(2, 2), (1, 1)]).unwrap();
        let col = random_conservative(&mut rng, &graph, &[2, 1], 2).unwrap();
        let horizon = 3;
        let inputs = random_input(&mut rng, graph.num_edges(), col.dim_in(), horizon);
        let x0 = CVec::from_fn(col.source_state_dim(), |_, _| crate::random::randc(&mut rng));
        let traj = col.simulate(&x0, &inputs, horizon).unwrap();
        let rep = col.energy_balance(&traj, &inputs, horizon);
        assert!(rep.worst_slack() >= -1e-10, "worst {}", rep.worst_slack());
    }

    #[test]
    fn energy_balance_equality_single_source_components() {
        // every component has one source and U unitary: stepwise equality
        let mut rng = rng_from_seed(37);
        let graph = Graph::new(vec![(1, 2), (1, 1)]).unwrap();
        let col = random_conservative(&mut rng, &graph, &[2, 1], 2).unwrap();
        let horizon = 3;
        let inputs = random_input(&mut rng, graph.num_edges(), col.dim_in(), horizon);
        let x0 = CVec::from_fn(col.source_state_dim(), |_, _| crate::random::randc(&mut rng));
        let traj = col.simulate(&x0, &inputs, horizon).unwrap();
        let rep = col.energy_balance(&traj, &inputs, horizon);
        assert!((rep.weight_base - 1.0).abs() < 1e-15);
        assert!(rep.max_stepwise_gap() < 1e-10, "gap {}", rep.max_stepwise_gap());
    }

    #[test]
    fn unitary_equivalence_preserves_transfer() {
        let mut rng = rng_from_seed(41);
        let graph = Graph::new(vec![(1, 2), (2, 1)]).unwrap();
        let col = random_conservative(&mut rng, &graph, &[2, 2], 1).unwrap();
        let ups: Vec<CMat> = vec![haar_unitary(&mut rng, 2), haar_unitary(&mut rng, 2)];
        let col2 = col.unitary_equivalent(&ups).unwrap();
        assert!(col2.is_conservative(1e-11));
        let gap = col.transfer_series(3).max_diff(&col2.transfer_series(3));
        assert!(gap < 1e-12, "gap {gap}");
    }

    #[test]
    fn dual_transfer_is_adjoint_through_edge_duality() {
        let mut rng = rng_from_seed(43);
        let graph = Graph::new(vec![(1, 2), (2, 1)]).unwrap();
        let col = random_conservative(&mut rng, &graph, &[1, 2], 2).unwrap();
        let f = col.transfer_series(3);
        let fd = col.dual().transfer_series(3);
        // coefficient of the dual transfer at the duality image of v^T
        // equals F_v^*
        for (v, m) in f.terms() {
            let mapped = Word::from_letters(
                &v.transpose()
                    .letters()
                    .map(|e| graph.dual_edge(e))
                    .collect::<Vec<_>>(),
            );
            let gap = max_abs(&(fd.coeff_or_zero(&mapped) - m.adjoint()));
            assert!(gap < 1e-12, "word {v} gap {gap}");
        }
    }
}
