//! From solved Stein kernels to the defect isometry.
//!
//! Factor each kernel as K_p = L_p^* L_p with L_p of full row rank.  The
//! Stein identity then says exactly that the Gram matrices of
//!
//!   Dgen = [ L_{[s]} M_s stacked over sources ; Y ]
//!   Rgen = [ L_{[r]} N_r stacked over ranges  ; X ]
//!
//! coincide, so ξ mapsto (Dgen ξ -> Rgen ξ) is a well-defined isometry V
//! from the column space of Dgen onto that of Rgen.  Its matrix on an
//! orthonormal basis of the domain, together with orthonormal bases of
//! the two defect spaces, is everything the universal colligation needs.

use crate::data::SteinOperators;
use crate::linalg::{herm_eigen, max_abs, opnorm, orthonormal_complement, vcat};
use crate::{CMat, C64, Error, Result};

/// Factor a PSD matrix as L^* L with L of full row rank; eigenvalues
/// below `rank_tol` times the largest (and any negative ones) are
/// discarded.
pub fn factor_psd(k: &CMat, rank_tol: f64) -> CMat {
    let d = k.nrows();
    if d == 0 {
        return CMat::zeros(0, 0);
    }
    let (vals, vecs) = herm_eigen(k);
    let vmax = vals.iter().cloned().fold(0.0f64, f64::max);
    let cut = rank_tol * vmax.max(1e-300);
    let kept: Vec<usize> = (0..d).filter(|&i| vals[i] > cut).collect();
    let mut l = CMat::zeros(kept.len(), d);
    for (row, &i) in kept.iter().enumerate() {
        let s = vals[i].sqrt();
        for col in 0..d {
            l[(row, col)] = vecs[(col, i)].conj() * C64::new(s, 0.0);
        }
    }
    l
}

/// The defect isometry and the orthonormal frames around it.
#[derive(Debug, Clone)]
pub struct IsometryData {
    /// Kernel factor ranks per component.
    pub ranks: Vec<usize>,
    /// Domain-side generator matrix, (sum_s rank_{[s]} + dim_u) x kappa.
    pub d_gen: CMat,
    /// Range-side generator matrix, (sum_r rank_{[r]} + dim_y) x kappa.
    pub r_gen: CMat,
    /// Orthonormal basis of the column space of `d_gen`.
    pub q_d: CMat,
    /// V on that basis: columns are images in the range-side space.
    pub v_mat: CMat,
    /// Orthonormal basis of the domain defect.
    pub q_defect: CMat,
    /// Orthonormal basis of the range defect.
    pub q_defect_star: CMat,
    /// Common rank of the two generator matrices.
    pub rank: usize,
    pub dim_in: usize,
    pub dim_out: usize,
    /// Worst deviation of the two Gram matrices.
    pub gram_gap: f64,
    /// Worst deviation of V^* V from the identity.
    pub isometry_gap: f64,
}

impl IsometryData {
    pub fn defect(&self) -> usize {
        self.q_defect.ncols()
    }

    pub fn defect_star(&self) -> usize {
        self.q_defect_star.ncols()
    }

    /// Rows of `d_gen` (domain-side total dimension).
    pub fn n_d(&self) -> usize {
        self.d_gen.nrows()
    }

    /// Rows of `r_gen` (range-side total dimension).
    pub fn n_r(&self) -> usize {
        self.r_gen.nrows()
    }
}

/// Build the defect isometry from Stein kernels that solve the identity.
/// `rank_tol` controls both the kernel factor ranks and the generator
/// rank; `gram_tol` bounds the acceptable Gram mismatch relative to the
/// generator scale.
pub fn build_isometry(
    ops: &SteinOperators,
    kernels: &[CMat],
    rank_tol: f64,
    gram_tol: f64,
) -> Result<IsometryData> {
    if kernels.len() != ops.comp_dims.len() {
        return Err(Error::Dim("one kernel per component required".into()));
    }
    let factors: Vec<CMat> = kernels.iter().map(|k| factor_psd(k, rank_tol)).collect();
    let ranks: Vec<usize> = factors.iter().map(|l| l.nrows()).collect();
    let g = &ops.graph;
    let mut d_blocks: Vec<CMat> = Vec::with_capacity(g.num_sources() + 1);
    for s in 0..g.num_sources() {
        d_blocks.push(&factors[g.source_comp(s)] * &ops.m_ops[s]);
    }
    d_blocks.push(ops.y.clone());
    let d_gen = vcat(&d_blocks);
    let mut r_blocks: Vec<CMat> = Vec::with_capacity(g.num_ranges() + 1);
    for r in 0..g.num_ranges() {
        r_blocks.push(&factors[g.range_comp(r)] * &ops.n_ops[r]);
    }
    r_blocks.push(ops.x.clone());
    let r_gen = vcat(&r_blocks);

    let scale = 1.0 + opnorm(&d_gen).max(opnorm(&r_gen));
    let gram_gap = max_abs(&(d_gen.adjoint() * &d_gen - r_gen.adjoint() * &r_gen));
    if gram_gap > gram_tol * scale * scale {
        return Err(Error::Input(format!(
            "kernels do not solve the identity: Gram mismatch {gram_gap:.3e}"
        )));
    }

    let svd = d_gen.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd with U");
    let vt = svd.v_t.as_ref().expect("svd with Vt");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cut = f64::max(rank_tol * smax, 1e-13 * scale);
    // singular values are not guaranteed sorted; select kept indices
    let kept: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cut)
        .collect();
    let rank = kept.len();
    let mut q_d = CMat::zeros(d_gen.nrows(), rank);
    // V Q_D = V (Dgen W S^{-1}) = Rgen W S^{-1}
    let mut w_scaled = CMat::zeros(d_gen.ncols(), rank);
    for (j, &i) in kept.iter().enumerate() {
        q_d.set_column(j, &u.column(i));
        let inv = C64::new(1.0 / svd.singular_values[i], 0.0);
        for (row, &wv) in vt.row(i).iter().enumerate() {
            w_scaled[(row, j)] = wv.conj() * inv;
        }
    }
    let v_mat = &r_gen * &w_scaled;
    let isometry_gap = max_abs(&(v_mat.adjoint() * &v_mat - CMat::identity(rank, rank)));
    let q_defect = orthonormal_complement(&q_d);
    let q_defect_star = orthonormal_complement(&v_mat);
    Ok(IsometryData {
        ranks,
        d_gen,
        r_gen,
        q_d,
        v_mat,
        q_defect,
        q_defect_star,
        rank,
        dim_in: ops.y.nrows(),
        dim_out: ops.x.nrows(),
        gram_gap,
        isometry_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colligation::random_conservative;
    use crate::data::{necessity_certificate, InterpolationData, SideData};
    use crate::graph::Graph;
    use crate::random::{random_cmat, random_nilpotent_tuple, rng_from_seed};
    use crate::series::eval_left;

    #[test]
    fn factor_round_trip() {
        let mut rng = rng_from_seed(17);
        let g = random_cmat(&mut rng, 4, 3, 1.0);
        let k = &g * g.adjoint();
        let l = factor_psd(&k, 1e-10);
        assert_eq!(l.nrows(), 3);
        assert!(max_abs(&(l.adjoint() * &l - k)) < 1e-12);
    }

    #[test]
    fn factor_drops_null_directions() {
        let mut rng = rng_from_seed(19);
        let g = random_cmat(&mut rng, 5, 2, 1.0);
        let k = &g * g.adjoint();
        let l = factor_psd(&k, 1e-10);
        assert_eq!(l.nrows(), 2);
        assert!(max_abs(&(l.adjoint() * &l - k)) < 1e-12);
    }

    fn certificate_isometry(seed: u64, graph: Graph) -> IsometryData {
        let mut rng = rng_from_seed(seed);
        let dims = vec![2; graph.num_components()];
        let col = random_conservative(&mut rng, &graph, &dims, 2).unwrap();
        let f = col.transfer_series(4);
        let tl = random_nilpotent_tuple(&mut rng, &graph, 3, 3, 0.9);
        let xl = random_cmat(&mut rng, 3, col.dim_out(), 1.0);
        let yl = eval_left(&tl, &xl, &f).unwrap().value;
        let data = InterpolationData::left_only(
            graph,
            col.dim_in(),
            col.dim_out(),
            SideData {
                t: tl,
                x: xl,
                y: yl,
            },
        )
        .unwrap();
        let ops = data.stein_operators().unwrap();
        let kernels = necessity_certificate(&col, &data).unwrap();
        build_isometry(&ops, &kernels, 1e-10, 1e-8).unwrap()
    }

    #[test]
    fn certificate_kernels_yield_isometry() {
        for (seed, graph) in [
            (23u64, Graph::fm(2).unwrap()),
            (29, Graph::gr(2).unwrap()),
            (31, Graph::new(vec![(2, 1), (1, 1)]).unwrap()),
        ] {
            let iso = certificate_isometry(seed, graph);
            assert!(iso.gram_gap < 1e-10, "gram gap {}", iso.gram_gap);
            assert!(iso.isometry_gap < 1e-10, "isometry gap {}", iso.isometry_gap);
            // V maps Dgen columns to Rgen columns
            let v_on_d = &iso.v_mat * (iso.q_d.adjoint() * &iso.d_gen);
            assert!(max_abs(&(v_on_d - &iso.r_gen)) < 1e-9);
            // defect frames are orthonormal and orthogonal to the ranges
            let qd = &iso.q_defect;
            assert!(
                max_abs(&(qd.adjoint() * qd - CMat::identity(qd.ncols(), qd.ncols()))) < 1e-12
            );
            assert!(max_abs(&(qd.adjoint() * &iso.q_d)) < 1e-12);
            let qs = &iso.q_defect_star;
            assert!(
                max_abs(&(qs.adjoint() * qs - CMat::identity(qs.ncols(), qs.ncols()))) < 1e-12
            );
            assert!(max_abs(&(qs.adjoint() * &iso.v_mat)) < 1e-10);
            assert_eq!(iso.n_d(), iso.rank + iso.defect());
            assert_eq!(iso.n_r(), iso.rank + iso.defect_star());
        }
    }

    #[test]
    fn mismatched_kernels_are_rejected() {
        let iso_graph = Graph::fm(2).unwrap();
        let mut rng = rng_from_seed(37);
        let col = random_conservative(&mut rng, &iso_graph, &[2], 2).unwrap();
        let f = col.transfer_series(4);
        let tl = random_nilpotent_tuple(&mut rng, &iso_graph, 3, 3, 0.9);
        let xl = random_cmat(&mut rng, 3, col.dim_out(), 1.0);
        let yl = eval_left(&tl, &xl, &f).unwrap().value;
        let data = InterpolationData::left_only(
            iso_graph,
            col.dim_in(),
            col.dim_out(),
            SideData {
                t: tl,
                x: xl,
                y: yl,
            },
        )
        .unwrap();
        let ops = data.stein_operators().unwrap();
        let bogus = vec![CMat::identity(ops.comp_dims[0], ops.comp_dims[0]) * C64::new(5.0, 0.0)];
        assert!(build_isometry(&ops, &bogus, 1e-10, 1e-8).is_err());
    }
}

