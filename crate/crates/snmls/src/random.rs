//! Seeded random fixtures: matrices, unitaries, series, nilpotent tuples.
//!
//! Everything is driven by a caller-supplied ChaCha generator so that test
//! fixtures and CLI runs are reproducible from a single seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::series::NcSeries;
use crate::tuple::OperatorTuple;
use crate::word::Word;
use crate::{C64, CMat};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller.
pub fn randn(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Complex standard normal entry (unit variance).
pub fn randc(rng: &mut impl Rng) -> C64 {
    C64::new(randn(rng), randn(rng)) / 2f64.sqrt()
}

/// Random complex Gaussian matrix scaled by `scale`.
pub fn random_cmat(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> CMat {
    CMat::from_fn(rows, cols, |_, _| randc(rng) * scale)
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix with the
/// usual phase correction.
pub fn haar_unitary(rng: &mut impl Rng, n: usize) -> CMat {
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let g = random_cmat(rng, n, n, 1.0);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random series with Gaussian coefficients on every word up to the order.
pub fn random_series(
    rng: &mut impl Rng,
    dim_out: usize,
    dim_in: usize,
    num_letters: usize,
    order: usize,
    scale: f64,
) -> NcSeries {
    let mut s = NcSeries::zero(dim_out, dim_in, order);
    let mut level: Vec<Word> = vec![Word::empty()];
    for len in 0..=order {
        for w in &level {
            s.set(w.clone(), random_cmat(rng, dim_out, dim_in, scale));
        }
        if len < order {
            let mut next = Vec::with_capacity(level.len() * num_letters);
            for w in &level {
                for e in 0..num_letters {
                    next.push(w.append(e));
                }
            }
            level = next;
        }
    }
    s
}

/// Sparse random series: `terms` random words of length at most `order`.
pub fn random_sparse_series(
    rng: &mut impl Rng,
    dim_out: usize,
    dim_in: usize,
    num_letters: usize,
    order: usize,
    terms: usize,
    scale: f64,
) -> NcSeries {
    let mut s = NcSeries::zero(dim_out, dim_in, order);
    for _ in 0..terms {
        let len = rng.random_range(0..=order);
        let letters: Vec<usize> = (0..len).map(|_| rng.random_range(0..num_letters)).collect();
        s.set(
            Word::from_letters(&letters),
            random_cmat(rng, dim_out, dim_in, scale),
        );
    }
    s
}

/// Random word of length at most `max_len`.
pub fn random_word(rng: &mut impl Rng, num_letters: usize, max_len: usize) -> Word {
    let len = rng.random_range(0..=max_len);
    Word::from_letters(
        &(0..len)
            .map(|_| rng.random_range(0..num_letters))
            .collect::<Vec<_>>(),
    )
}

/// Random jointly nilpotent tuple for the graph: every T_e is strictly
/// block upper triangular over a common grading with `blocks` levels, so
/// all products of length `blocks` vanish.  The tuple is scaled so that
/// the amplified structure matrix has norm at most `z_norm_cap`.
pub fn random_nilpotent_tuple(
    rng: &mut impl Rng,
    graph: &Graph,
    dim: usize,
    blocks: usize,
    z_norm_cap: f64,
) -> OperatorTuple {
    let blocks = blocks.max(1).min(dim.max(1));
    // split dim into `blocks` consecutive chunks, as even as possible
    let base = dim / blocks;
    let extra = dim % blocks;
    let mut sizes = Vec::with_capacity(blocks);
    for b in 0..blocks {
        sizes.push(base + usize::from(b < extra));
    }
    let mut offsets = vec![0usize];
    for s in &sizes {
        offsets.push(offsets.last().unwrap() + s);
    }
    let mut ops = Vec::with_capacity(graph.num_edges());
    for _ in 0..graph.num_edges() {
        let mut m = CMat::zeros(dim, dim);
        for b in 0..blocks.saturating_sub(1) {
            let (r0, r1) = (offsets[b], offsets[b + 1]);
            let (c0, c1) = (offsets[b + 1], offsets[b + 2]);
            let blk = random_cmat(rng, r1 - r0, c1 - c0, 1.0);
            m.view_mut((r0, c0), (r1 - r0, c1 - c0)).copy_from(&blk);
        }
        ops.push(m);
    }
    let tuple = OperatorTuple::new(ops).expect("square blocks");
    let z = graph
        .structure_eval_blocks(tuple.ops())
        .expect("edge count matches");
    let norm = crate::linalg::opnorm(&z);
    if norm > z_norm_cap && norm > 0.0 {
        tuple.scale(z_norm_cap / norm)
    } else {
        tuple
    }
}

/// Random strict contraction of the given shape with norm at most `cap`.
pub fn random_contraction(rng: &mut impl Rng, rows: usize, cols: usize, cap: f64) -> CMat {
    let m = random_cmat(rng, rows, cols, 1.0);
    let n = crate::linalg::opnorm(&m);
    if n > cap {
        m * C64::new(cap / n, 0.0)
    } else {
        m
    }
}

/// Random input signal on all words up to the horizon.
pub fn random_input(
    rng: &mut impl Rng,
    num_letters: usize,
    dim: usize,
    horizon: usize,
) -> std::collections::BTreeMap<Word, crate::CVec> {
    let mut out = std::collections::BTreeMap::new();
    let mut level: Vec<Word> = vec![Word::empty()];
    for len in 0..=horizon {
        for w in &level {
            out.insert(
                w.clone(),
                crate::CVec::from_fn(dim, |_, _| randc(rng)),
            );
        }
        if len < horizon {
            let mut next = Vec::new();
            for w in &level {
                for e in 0..num_letters {
                    next.push(w.append(e));
                }
            }
            level = next;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::tuple::Side;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from_seed(3);
        let u = haar_unitary(&mut rng, 5);
        let defect = max_abs(&(u.adjoint() * &u - CMat::identity(5, 5)));
        assert!(defect < 1e-12, "defect {defect}");
    }

    #[test]
    fn nilpotent_tuple_is_nilpotent_and_capped() {
        let mut rng = rng_from_seed(5);
        let g = Graph::full(2, 2).unwrap();
        for _ in 0..10 {
            let t = random_nilpotent_tuple(&mut rng, &g, 5, 3, 0.99);
            let order = t.nilpotency_order().expect("nilpotent by construction");
            assert!(order <= 3);
            let z = g.structure_eval_blocks(t.ops()).unwrap();
            assert!(crate::linalg::opnorm(&z) <= 0.99 + 1e-12);
            let cert = crate::tuple::admissibility_sufficient(&g, &t, Side::Left).unwrap();
            assert!(cert.is_admissible());
        }
    }

    #[test]
    fn contraction_capped() {
        let mut rng = rng_from_seed(9);
        let m = random_contraction(&mut rng, 3, 4, 0.9);
        assert!(crate::linalg::opnorm(&m) <= 0.9 + 1e-12);
    }

    #[test]
    fn seeded_reproducibility() {
        let a = random_cmat(&mut rng_from_seed(42), 3, 3, 1.0);
        let b = random_cmat(&mut rng_from_seed(42), 3, 3, 1.0);
        assert!(max_abs(&(a - b)) == 0.0);
    }
}
