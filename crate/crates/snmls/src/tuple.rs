//! Tuples of operators indexed by the edges of an admissible graph, with
//! nilpotency detection and sufficient admissibility certificates.

use crate::graph::Graph;
use crate::linalg::{hcat, opnorm, orthonormal_range, vcat};
use crate::word::Word;
use crate::{CMat, Error, Result};

/// Which evaluation the tuple is meant to feed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A tuple T = (T_e : e in E) of square matrices on a common space.
#[derive(Debug, Clone)]
pub struct OperatorTuple {
    dim: usize,
    ops: Vec<CMat>,
}

impl OperatorTuple {
    pub fn new(ops: Vec<CMat>) -> Result<Self> {
        let dim = ops.first().map(|m| m.nrows()).unwrap_or(0);
        for m in &ops {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::Dim(
                    "tuple entries must be square matrices of equal size".into(),
                ));
            }
        }
        Ok(OperatorTuple { dim, ops })
    }

    pub fn zeros(num_edges: usize, dim: usize) -> Self {
        OperatorTuple {
            dim,
            ops: vec![CMat::zeros(dim, dim); num_edges],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_edges(&self) -> usize {
        self.ops.len()
    }

    pub fn op(&self, e: usize) -> &CMat {
        &self.ops[e]
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }

    pub fn scale(&self, factor: f64) -> Self {
        OperatorTuple {
            dim: self.dim,
            ops: self
                .ops
                .iter()
                .map(|m| m * crate::C64::new(factor, 0.0))
                .collect(),
        }
    }

    /// T^w = T_{e_N} ... T_{e_1} for w = e_N ... e_1.
    pub fn word_eval(&self, w: &Word) -> CMat {
        let mut acc = CMat::identity(self.dim, self.dim);
        for e in w.letters() {
            acc = acc * &self.ops[e];
        }
        acc
    }

    /// All nonzero products T^w for |w| = level, built level by level.
    /// Level 0 is the identity at the empty word.  Products whose largest
    /// entry falls below `drop_tol` are treated as zero and pruned.
    pub fn levels(&self, max_level: usize, drop_tol: f64) -> Vec<Vec<(Word, CMat)>> {
        let mut out = Vec::with_capacity(max_level + 1);
        out.push(vec![(Word::empty(), CMat::identity(self.dim, self.dim))]);
        for level in 1..=max_level {
            let mut next = Vec::new();
            for (w, m) in &out[level - 1] {
                for (e, t) in self.ops.iter().enumerate() {
                    let prod = m * t;
                    if crate::linalg::max_abs(&prod) > drop_tol {
                        // appending on the right: T^{we} = T^w T_e
                        next.push((w.append(e), prod));
                    }
                }
            }
            let empty = next.is_empty();
            out.push(next);
            if empty {
                break;
            }
        }
        out
    }

    /// Smallest k such that every product of k factors vanishes, if the
    /// tuple is nilpotent.  For d x d matrices a nilpotent tuple vanishes
    /// by length d, so the search is capped there.
    pub fn nilpotency_order(&self) -> Option<usize> {
        if self.dim == 0 || self.ops.is_empty() {
            // no nonzero products of positive length exist
            return Some(1);
        }
        // images of orthonormal bases shrink by at most one operator norm
        // per step, so a fixed absolute noise floor is safe here
        let op_scale = self.ops.iter().map(opnorm).fold(1.0, f64::max);
        let mut basis = CMat::identity(self.dim, self.dim);
        for k in 1..=self.dim {
            let images: Vec<CMat> = self.ops.iter().map(|t| t * &basis).collect();
            let stacked = hcat(&images);
            basis = orthonormal_range(&stacked, 1e-12, 1e-10 * op_scale);
            if basis.ncols() == 0 {
                return Some(k);
            }
        }
        None
    }

    /// Operator norm of the row [T_{e_1} ... T_{e_d}].
    pub fn row_norm(&self) -> f64 {
        opnorm(&hcat(&self.ops))
    }

    /// Operator norm of the column stack of the T_e.
    pub fn col_norm(&self) -> f64 {
        opnorm(&vcat(&self.ops))
    }
}

/// Outcome of the sufficient admissibility test.  A failed bound is not a
/// disproof; the certificate only ever affirms.
#[derive(Debug, Clone, PartialEq)]
pub enum AdmissibilityCertificate {
    Nilpotent { order: usize },
    NormBound { norm: f64, bound: f64 },
    Inconclusive { norm: f64, bound: f64 },
}

impl AdmissibilityCertificate {
    pub fn is_admissible(&self) -> bool {
        !matches!(self, AdmissibilityCertificate::Inconclusive { .. })
    }
}

/// Sufficient admissibility of a tuple for one-sided evaluations over the
/// given graph.  Left side: nilpotent, or row norm below sqrt(1/max
/// sources).  Right side: nilpotent, or column norm below sqrt(1/max
/// ranges).
pub fn admissibility_sufficient(
    graph: &Graph,
    tuple: &OperatorTuple,
    side: Side,
) -> Result<AdmissibilityCertificate> {
    if tuple.num_edges() != graph.num_edges() {
        return Err(Error::Dim(format!(
            "tuple has {} entries but the graph has {} edges",
            tuple.num_edges(),
            graph.num_edges()
        )));
    }
    if let Some(order) = tuple.nilpotency_order() {
        return Ok(AdmissibilityCertificate::Nilpotent { order });
    }
    let (norm, bound) = match side {
        Side::Left => (tuple.row_norm(), graph.rho_left().sqrt()),
        Side::Right => (tuple.col_norm(), graph.rho_right().sqrt()),
    };
    if norm < bound {
        Ok(AdmissibilityCertificate::NormBound { norm, bound })
    } else {
        Ok(AdmissibilityCertificate::Inconclusive { norm, bound })
    }
}
