//! The universal colligation and the linear-fractional parametrization of
//! all solutions.
//!
//! The defect isometry V from the quotient construction extends to the
//! unitary
//!
//!   U0 = [ V Q_D^*   Q_{D*} ]
//!        [ Q_D^*(perp)     0 ]
//!
//! acting from (range-side stack (+) Y-defect frame) conventions laid out
//! so that U0 is literally a colligation over the original graph with
//! enlarged input U (+) Defect* and output Y (+) Defect.  Writing Sigma
//! for its transfer series, split by those block structures, every Schur
//! solution of the interpolation problem arises as the feedback
//!
//!   F = Sigma11 + Sigma12 (I - T Sigma22)^{-1} T Sigma21
//!
//! with T a free Schur-class parameter from the Defect to the Defect*
//! space.  The (Defect*, Defect) corner of U0 vanishes identically, so
//! Sigma22 has zero constant coefficient and the feedback loop is always
//! invertible at the formal-series level.  When the parameter comes with
//! its own conservative colligation, coupling it into U0 yields a single
//! colligation for the solution whose transfer must match the feedback
//! formula; that cross-check is exposed here as well.

use crate::colligation::Colligation;
use crate::graph::Graph;
use crate::linalg::max_abs;
use crate::quotient::IsometryData;
use crate::series::NcSeries;
use crate::{CMat, Error, Result};

/// The extended unitary colligation built from the defect isometry.
#[derive(Debug, Clone)]
pub struct UniversalColligation {
    colligation: Colligation,
    dim_u: usize,
    dim_y: usize,
    delta: usize,
    delta_star: usize,
}

impl UniversalColligation {
    pub fn from_isometry(graph: &Graph, iso: &IsometryData) -> Result<UniversalColligation> {
        let dim_u = iso.dim_in;
        let dim_y = iso.dim_out;
        let delta = iso.defect();
        let delta_star = iso.defect_star();
        let n_d = iso.n_d();
        let n_r = iso.n_r();
        let mut u0 = CMat::zeros(n_r + delta, n_d + delta_star);
        let top_left = &iso.v_mat * iso.q_d.adjoint();
        u0.view_mut((0, 0), (n_r, n_d)).copy_from(&top_left);
        u0.view_mut((0, n_d), (n_r, delta_star))
            .copy_from(&iso.q_defect_star);
        u0.view_mut((n_r, 0), (delta, n_d))
            .copy_from(&iso.q_defect.adjoint());
        // bottom-right block stays structurally zero
        let colligation = Colligation::new(
            graph.clone(),
            iso.ranks.clone(),
            dim_u + delta_star,
            dim_y + delta,
            u0,
        )?;
        Ok(UniversalColligation {
            colligation,
            dim_u,
            dim_y,
            delta,
            delta_star,
        })
    }

    pub fn colligation(&self) -> &Colligation {
        &self.colligation
    }

    pub fn dim_u(&self) -> usize {
        self.dim_u
    }

    pub fn dim_y(&self) -> usize {
        self.dim_y
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn delta_star(&self) -> usize {
        self.delta_star
    }

    /// How far U0 is from unitary.
    pub fn unitarity_defect(&self) -> f64 {
        self.colligation.conservativity_defect()
    }

    /// Largest entry of the structurally-zero corner (exactly zero by
    /// construction; exposed for verification).
    pub fn corner_abs(&self) -> f64 {
        let u = self.colligation.u();
        let n_r = u.nrows() - self.delta;
        let n_d = u.ncols() - self.delta_star;
        max_abs(&CMat::from(u.view((n_r, n_d), (self.delta, self.delta_star))))
    }

    /// Transfer series of U0 split along the U (+) Defect* inputs and
    /// Y (+) Defect outputs.
    pub fn sigma(&self, order: usize) -> SigmaParts {
        let full = self.colligation.transfer_series(order);
        let dy = self.dim_y;
        let du = self.dim_u;
        SigmaParts {
            s11: full.submatrix(0..dy, 0..du),
            s12: full.submatrix(0..dy, du..du + self.delta_star),
            s21: full.submatrix(dy..dy + self.delta, 0..du),
            s22: full.submatrix(dy..dy + self.delta, du..du + self.delta_star),
        }
    }
}

/// Transfer series of the universal colligation, split into its four
/// input/output blocks.
#[derive(Debug, Clone)]
pub struct SigmaParts {
    /// U -> Y.
    pub s11: NcSeries,
    /// Defect* -> Y.
    pub s12: NcSeries,
    /// U -> Defect.
    pub s21: NcSeries,
    /// Defect* -> Defect.
    pub s22: NcSeries,
}

impl SigmaParts {
    pub fn order(&self) -> usize {
        self.s11.order()
    }

    /// The linear-fractional image of a parameter series T (Defect ->
    /// Defect* coefficients).
    pub fn lft(&self, t: &NcSeries) -> Result<NcSeries> {
        if t.dim_out() != self.s12.dim_in() || t.dim_in() != self.s21.dim_out() {
            return Err(Error::Dim(format!(
                "parameter must be {}x{}, got {}x{}",
                self.s12.dim_in(),
                self.s21.dim_out(),
                t.dim_out(),
                t.dim_in()
            )));
        }
        // Sigma22 has zero constant term, so I - T Sigma22 is invertible
        // whatever the parameter is
        let loop_series = NcSeries::identity(t.dim_out(), t.order().min(self.order()))
            .sub(&t.mul(&self.s22)?)?;
        let inv = loop_series.neumann_inverse(1e12)?;
        self.s11.add(&self.s12.mul(&inv.mul(&t.mul(&self.s21)?)?)?)
    }
}

/// A Schur-class parameter together with the certificates we can offer
/// for it.
#[derive(Debug, Clone)]
pub struct Parameter {
    pub label: String,
    pub series: NcSeries,
    /// Colligation realization, when the generator produced one.
    pub colligation: Option<Colligation>,
}

/// Deterministic family of Schur-class parameters of the required
/// dimensions: the zero parameter, constant contractions, conservative
/// colligation parameters when the dimension balance allows them, and
/// small certified polynomial parameters otherwise.
pub fn generate_parameters(
    rng: &mut impl rand::Rng,
    graph: &Graph,
    delta: usize,
    delta_star: usize,
    order: usize,
    count: usize,
) -> Vec<Parameter> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(Parameter {
        label: "zero".into(),
        series: NcSeries::zero(delta_star, delta, order),
        colligation: Colligation::new(
            graph.clone(),
            vec![0; graph.num_components()],
            delta,
            delta_star,
            CMat::zeros(delta_star, delta),
        )
        .ok(),
    });
    let mut idx = 1;
    while out.len() < count {
        let param = match idx % 3 {
            0 => {
                let d = crate::random::random_contraction(rng, delta_star, delta, 0.9);
                let col = Colligation::new(
                    graph.clone(),
                    vec![0; graph.num_components()],
                    delta,
                    delta_star,
                    d.clone(),
                )
                .ok();
                Parameter {
                    label: format!("constant-{idx}"),
                    series: NcSeries::constant(d, order),
                    colligation: col,
                }
            }
            1 => match conservative_parameter(rng, graph, delta, delta_star) {
                Some(col) => Parameter {
                    label: format!("colligation-{idx}"),
                    series: col.transfer_series(order),
                    colligation: Some(col),
                },
                None => polynomial_parameter(rng, graph, delta, delta_star, order, idx),
            },
            _ => polynomial_parameter(rng, graph, delta, delta_star, order, idx),
        };
        out.push(param);
        idx += 1;
    }
    out
}

/// Random conservative colligation with input Defect and output Defect*,
/// searching small state dimensions for the required balance
/// sum_p h_p (n_p - m_p) = delta_star - delta.
pub fn conservative_parameter(
    rng: &mut impl rand::Rng,
    graph: &Graph,
    delta: usize,
    delta_star: usize,
) -> Option<Colligation> {
    let ncomp = graph.num_components();
    let need = delta_star as i64 - delta as i64;
    let weights: Vec<i64> = graph
        .components()
        .iter()
        .map(|&(n, m)| n as i64 - m as i64)
        .collect();
    // enumerate small state profiles and collect those that balance
    let mut matches: Vec<Vec<usize>> = Vec::new();
    let mut profile = vec![0usize; ncomp];
    loop {
        let bal: i64 = profile
            .iter()
            .zip(&weights)
            .map(|(&h, &w)| h as i64 * w)
            .sum();
        if bal == need && profile.iter().any(|&h| h > 0 || need == 0) {
            matches.push(profile.clone());
        }
        // odometer over 0..=3 per component
        let mut pos = 0;
        loop {
            if pos == ncomp {
                break;
            }
            profile[pos] += 1;
            if profile[pos] <= 3 {
                break;
            }
            profile[pos] = 0;
            pos += 1;
        }
        if pos == ncomp {
            break;
        }
    }
    if matches.is_empty() {
        return None;
    }
    let pick = rng.random_range(0..matches.len());
    crate::colligation::random_conservative_exact(rng, graph, &matches[pick], delta, delta_star)
        .ok()
}

/// Polynomial parameter sum_j W_j z^{w_j} with sum_j ||W_j|| <= 0.8, a
/// certified Schur-class series on the structured ball.
fn polynomial_parameter(
    rng: &mut impl rand::Rng,
    graph: &Graph,
    delta: usize,
    delta_star: usize,
    order: usize,
    idx: usize,
) -> Parameter {
    let mut series = NcSeries::zero(delta_star, delta, order);
    let nterms = 1 + idx % 3;
    let budget = 0.8 / nterms as f64;
    for j in 0..nterms {
        let w = crate::random::random_word(rng, graph.num_edges(), (j + idx) % (order.max(1)) + 1);
        let m = crate::random::random_contraction(rng, delta_star, delta, budget);
        if w.len() <= order {
            series.add_to(w, &m);
        }
    }
    Parameter {
        label: format!("polynomial-{idx}"),
        series,
        colligation: None,
    }
}

/// Couple a parameter colligation into the universal one: the Defect
/// output of U0 drives the parameter input and the parameter output
/// returns through the Defect* input of U0.  State spaces add
/// componentwise.  Both colligations must live over the same graph.
pub fn couple(universal: &UniversalColligation, param: &Colligation) -> Result<Colligation> {
    let u0 = universal.colligation();
    let g = u0.graph();
    if param.graph() != g {
        return Err(Error::Input(
            "parameter colligation lives over a different graph".into(),
        ));
    }
    if param.dim_in() != universal.delta() || param.dim_out() != universal.delta_star() {
        return Err(Error::Dim(format!(
            "parameter colligation must map {} -> {}, got {} -> {}",
            universal.delta(),
            universal.delta_star(),
            param.dim_in(),
            param.dim_out()
        )));
    }
    let dim_u = universal.dim_u();
    let dim_y = universal.dim_y();
    let delta = universal.delta();

    // blocks of U0 with the defect channels separated
    let u0m = u0.u();
    let hat_src = u0.source_state_dim();
    let hat_rng = u0.range_state_dim();
    let a0 = CMat::from(u0m.view((0, 0), (hat_rng, hat_src)));
    let b0 = CMat::from(u0m.view((0, hat_src), (hat_rng, dim_u)));
    let g1 = CMat::from(u0m.view((0, hat_src + dim_u), (hat_rng, universal.delta_star())));
    let c0 = CMat::from(u0m.view((hat_rng, 0), (dim_y, hat_src)));
    let d0 = CMat::from(u0m.view((hat_rng, hat_src), (dim_y, dim_u)));
    let g2 = CMat::from(u0m.view(
        (hat_rng, hat_src + dim_u),
        (dim_y, universal.delta_star()),
    ));
    let g3 = CMat::from(u0m.view((hat_rng + dim_y, 0), (delta, hat_src)));
    let g4 = CMat::from(u0m.view((hat_rng + dim_y, hat_src), (delta, dim_u)));

    let at = param.a();
    let bt = param.b();
    let ct = param.c();
    let dt = param.d();
    let til_src = param.source_state_dim();
    let til_rng = param.range_state_dim();

    // eliminate the defect signals: d~ = g3 c + g4 u, d~* = Ct h + Dt d~
    let rows = hat_rng + til_rng + dim_y;
    let cols = hat_src + til_src + dim_u;
    let mut sep = CMat::zeros(rows, cols);
    sep.view_mut((0, 0), (hat_rng, hat_src))
        .copy_from(&(&a0 + &g1 * &dt * &g3));
    sep.view_mut((0, hat_src), (hat_rng, til_src))
        .copy_from(&(&g1 * &ct));
    sep.view_mut((0, hat_src + til_src), (hat_rng, dim_u))
        .copy_from(&(&b0 + &g1 * &dt * &g4));
    sep.view_mut((hat_rng, 0), (til_rng, hat_src))
        .copy_from(&(&bt * &g3));
    sep.view_mut((hat_rng, hat_src), (til_rng, til_src))
        .copy_from(&at);
    sep.view_mut((hat_rng, hat_src + til_src), (til_rng, dim_u))
        .copy_from(&(&bt * &g4));
    sep.view_mut((hat_rng + til_rng, 0), (dim_y, hat_src))
        .copy_from(&(&c0 + &g2 * &dt * &g3));
    sep.view_mut((hat_rng + til_rng, hat_src), (dim_y, til_src))
        .copy_from(&(&g2 * &ct));
    sep.view_mut((hat_rng + til_rng, hat_src + til_src), (dim_y, dim_u))
        .copy_from(&(&d0 + &g2 * &dt * &g4));

    // interleave the separated state stacks into per-source direct sums
    let hat_dims = u0.state_dims();
    let til_dims = param.state_dims();
    let sum_dims: Vec<usize> = hat_dims
        .iter()
        .zip(til_dims)
        .map(|(&a, &b)| a + b)
        .collect();
    let hat_so = g.source_dim_offsets(hat_dims);
    let til_so = g.source_dim_offsets(til_dims);
    let sum_so = g.source_dim_offsets(&sum_dims);
    let hat_ro = g.range_dim_offsets(hat_dims);
    let til_ro = g.range_dim_offsets(til_dims);
    let sum_ro = g.range_dim_offsets(&sum_dims);

    let mut colperm: Vec<usize> = Vec::with_capacity(cols);
    for s in 0..g.num_sources() {
        let p = g.source_comp(s);
        for i in 0..hat_dims[p] {
            colperm.push(hat_so[s] + i);
        }
        for i in 0..til_dims[p] {
            colperm.push(hat_src + til_so[s] + i);
        }
    }
    for i in 0..dim_u {
        colperm.push(hat_src + til_src + i);
    }
    let mut rowperm: Vec<usize> = Vec::with_capacity(rows);
    for r in 0..g.num_ranges() {
        let p = g.range_comp(r);
        for i in 0..hat_dims[p] {
            rowperm.push(hat_ro[r] + i);
        }
        for i in 0..til_dims[p] {
            rowperm.push(hat_rng + til_ro[r] + i);
        }
    }
    for i in 0..dim_y {
        rowperm.push(hat_rng + til_rng + i);
    }
    debug_assert_eq!(*sum_so.last().unwrap() + dim_u, cols);
    debug_assert_eq!(*sum_ro.last().unwrap() + dim_y, rows);

    let mut u_c = CMat::zeros(rows, cols);
    for (i, &ri) in rowperm.iter().enumerate() {
        for (j, &cj) in colperm.iter().enumerate() {
            u_c[(i, j)] = sep[(ri, cj)];
        }
    }
    Colligation::new(g.clone(), sum_dims, dim_u, dim_y, u_c)
}
