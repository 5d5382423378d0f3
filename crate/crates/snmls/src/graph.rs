//! Admissible graphs: finite bipartite graphs whose path components are
//! complete bipartite.
//!
//! A component k is described by its source count n_k and range count m_k.
//! Sources, ranges and edges carry a canonical ordering: lexicographic in
//! (component, index) for vertices and (component, source index, range
//! index) for edges.  The structure matrix of the graph places the variable
//! attached to edge e at position (source(e), range(e)).

use crate::{C64, CMat, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    comps: Vec<(usize, usize)>,
    // canonical edge list: (component, source index, range index)
    edges: Vec<(usize, usize, usize)>,
    source_comp: Vec<usize>,
    range_comp: Vec<usize>,
    source_offset: Vec<usize>,
    range_offset: Vec<usize>,
}

impl Graph {
    /// Build a graph from (sources, ranges) counts per component.
    pub fn new(comps: Vec<(usize, usize)>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::Graph("at least one component required".into()));
        }
        for (k, &(n, m)) in comps.iter().enumerate() {
            if n == 0 || m == 0 {
                return Err(Error::Graph(format!(
                    "component {k} must have at least one source and one range"
                )));
            }
        }
        let mut edges = Vec::new();
        let mut source_comp = Vec::new();
        let mut range_comp = Vec::new();
        let mut source_offset = Vec::with_capacity(comps.len());
        let mut range_offset = Vec::with_capacity(comps.len());
        for (k, &(n, m)) in comps.iter().enumerate() {
            source_offset.push(source_comp.len());
            range_offset.push(range_comp.len());
            for _ in 0..n {
                source_comp.push(k);
            }
            for _ in 0..m {
                range_comp.push(k);
            }
            for i in 0..n {
                for j in 0..m {
                    edges.push((k, i, j));
                }
            }
        }
        Ok(Graph {
            comps,
            edges,
            source_comp,
            range_comp,
            source_offset,
            range_offset,
        })
    }

    /// Single component with one source and d ranges (row structure matrix,
    /// the noncommutative ball).
    pub fn fm(d: usize) -> Result<Self> {
        Self::new(vec![(1, d)])
    }

    /// d components with one source and one range each (diagonal structure
    /// matrix, the noncommutative polydisk).
    pub fn gr(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Graph("gr graph needs at least one component".into()));
        }
        Self::new(vec![(1, 1); d])
    }

    /// Single complete bipartite component with n sources and m ranges
    /// (full block structure matrix).
    pub fn full(n: usize, m: usize) -> Result<Self> {
        Self::new(vec![(n, m)])
    }

    pub fn components(&self) -> &[(usize, usize)] {
        &self.comps
    }

    pub fn num_components(&self) -> usize {
        self.comps.len()
    }

    pub fn num_sources(&self) -> usize {
        self.source_comp.len()
    }

    pub fn num_ranges(&self) -> usize {
        self.range_comp.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Component of global source index s.
    pub fn source_comp(&self, s: usize) -> usize {
        self.source_comp[s]
    }

    /// Component of global range index r.
    pub fn range_comp(&self, r: usize) -> usize {
        self.range_comp[r]
    }

    /// Global source index of the edge's source vertex.
    pub fn edge_source(&self, e: usize) -> usize {
        let (k, i, _) = self.edges[e];
        self.source_offset[k] + i
    }

    /// Global range index of the edge's range vertex.
    pub fn edge_range(&self, e: usize) -> usize {
        let (k, _, j) = self.edges[e];
        self.range_offset[k] + j
    }

    pub fn edge_comp(&self, e: usize) -> usize {
        self.edges[e].0
    }

    /// The unique edge joining source s and range r, when they share a
    /// component.
    pub fn edge_between(&self, s: usize, r: usize) -> Option<usize> {
        let k = self.source_comp[s];
        if self.range_comp[r] != k {
            return None;
        }
        let i = s - self.source_offset[k];
        let j = r - self.range_offset[k];
        let (n, m) = self.comps[k];
        debug_assert!(i < n && j < m);
        let base: usize = self.comps[..k].iter().map(|&(a, b)| a * b).sum();
        Some(base + i * m + j)
    }

    /// Global source indices belonging to component k.
    pub fn sources_of(&self, k: usize) -> std::ops::Range<usize> {
        self.source_offset[k]..self.source_offset[k] + self.comps[k].0
    }

    /// Global range indices belonging to component k.
    pub fn ranges_of(&self, k: usize) -> std::ops::Range<usize> {
        self.range_offset[k]..self.range_offset[k] + self.comps[k].1
    }

    /// Largest source count over components.
    pub fn max_sources(&self) -> usize {
        self.comps.iter().map(|&(n, _)| n).max().unwrap_or(0)
    }

    /// Largest range count over components.
    pub fn max_ranges(&self) -> usize {
        self.comps.iter().map(|&(_, m)| m).max().unwrap_or(0)
    }

    /// Left admissibility constant 1 / max_sources.
    pub fn rho_left(&self) -> f64 {
        1.0 / self.max_sources() as f64
    }

    /// Right admissibility constant 1 / max_ranges.
    pub fn rho_right(&self) -> f64 {
        1.0 / self.max_ranges() as f64
    }

    /// Position (source row, range column) of each edge variable in the
    /// structure matrix.
    pub fn structure_symbol(&self) -> Vec<(usize, usize)> {
        (0..self.num_edges())
            .map(|e| (self.edge_source(e), self.edge_range(e)))
            .collect()
    }

    /// Structure matrix evaluated at scalar values, one per edge.
    pub fn structure_eval(&self, vals: &[C64]) -> Result<CMat> {
        if vals.len() != self.num_edges() {
            return Err(Error::Dim(format!(
                "expected {} edge values, got {}",
                self.num_edges(),
                vals.len()
            )));
        }
        let mut z = CMat::zeros(self.num_sources(), self.num_ranges());
        for (e, &v) in vals.iter().enumerate() {
            z[(self.edge_source(e), self.edge_range(e))] = v;
        }
        Ok(z)
    }

    /// Amplified structure matrix: block T_e at block position
    /// (source(e), range(e)).  All blocks must be square of equal size.
    pub fn structure_eval_blocks(&self, blocks: &[CMat]) -> Result<CMat> {
        if blocks.len() != self.num_edges() {
            return Err(Error::Dim(format!(
                "expected {} edge blocks, got {}",
                self.num_edges(),
                blocks.len()
            )));
        }
        let dim = blocks.first().map(|b| b.nrows()).unwrap_or(0);
        for b in blocks {
            if b.nrows() != dim || b.ncols() != dim {
                return Err(Error::Dim("edge blocks must be square of equal size".into()));
            }
        }
        let mut z = CMat::zeros(self.num_sources() * dim, self.num_ranges() * dim);
        for (e, b) in blocks.iter().enumerate() {
            let (s, r) = (self.edge_source(e), self.edge_range(e));
            z.view_mut((s * dim, r * dim), (dim, dim)).copy_from(b);
        }
        Ok(z)
    }

    /// The dual graph: sources and ranges swapped within each component.
    pub fn dual(&self) -> Graph {
        Graph::new(self.comps.iter().map(|&(n, m)| (m, n)).collect())
            .expect("dual of a valid graph is valid")
    }

    /// Index of the dual edge in the dual graph's canonical order.  Edge
    /// (k, i, j) maps to (k, j, i).
    pub fn dual_edge(&self, e: usize) -> usize {
        let (k, i, j) = self.edges[e];
        let base: usize = self.comps[..k].iter().map(|&(a, b)| a * b).sum();
        // the dual component has m_k sources and n_k ranges
        let (n, _m) = self.comps[k];
        base + j * n + i
    }

    /// Block offsets of the source-side direct sum when component p carries
    /// a space of dimension dims[p]; the final entry is the total dimension.
    pub fn source_dim_offsets(&self, dims: &[usize]) -> Vec<usize> {
        let mut offs = Vec::with_capacity(self.num_sources() + 1);
        let mut acc = 0;
        for s in 0..self.num_sources() {
            offs.push(acc);
            acc += dims[self.source_comp[s]];
        }
        offs.push(acc);
        offs
    }

    /// Range-side analogue of [`Graph::source_dim_offsets`].
    pub fn range_dim_offsets(&self, dims: &[usize]) -> Vec<usize> {
        let mut offs = Vec::with_capacity(self.num_ranges() + 1);
        let mut acc = 0;
        for r in 0..self.num_ranges() {
            offs.push(acc);
            acc += dims[self.range_comp[r]];
        }
        offs.push(acc);
        offs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::opnorm;

    #[test]
    fn fm_graph_counts() {
        let g = Graph::fm(3).unwrap();
        assert_eq!(g.num_sources(), 1);
        assert_eq!(g.num_ranges(), 3);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.max_sources(), 1);
        assert_eq!(g.max_ranges(), 3);
        assert_eq!(g.structure_symbol(), vec![(0, 0), (0, 1), (0, 2)]);
    }

    #[test]
    fn gr_graph_counts() {
        let g = Graph::gr(2).unwrap();
        assert_eq!(g.num_sources(), 2);
        assert_eq!(g.num_ranges(), 2);
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.structure_symbol(), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn general_graph_counts() {
        let g = Graph::new(vec![(1, 2), (2, 1)]).unwrap();
        assert_eq!(g.num_sources(), 3);
        assert_eq!(g.num_ranges(), 3);
        assert_eq!(g.num_edges(), 4);
        assert_eq!(g.max_sources(), 2);
        assert_eq!(g.max_ranges(), 2);
        // edges: (0,0,0) (0,0,1) (1,0,0) (1,1,0)
        assert_eq!(g.structure_symbol(), vec![(0, 0), (0, 1), (1, 2), (2, 2)]);
        assert!((g.rho_left() - 0.5).abs() < 1e-15);
        assert!((g.rho_right() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn structure_eval_fm() {
        let g = Graph::fm(2).unwrap();
        let z = g
            .structure_eval(&[C64::new(0.5, 0.0), C64::new(0.0, 0.5)])
            .unwrap();
        assert_eq!(z.nrows(), 1);
        assert_eq!(z.ncols(), 2);
        // row vector [0.5, 0.5i] has norm sqrt(0.5)
        assert!((opnorm(&z) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dual_involution() {
        let g = Graph::new(vec![(2, 3), (1, 2), (4, 1)]).unwrap();
        let d = g.dual();
        assert_eq!(d.components(), &[(3, 2), (2, 1), (1, 4)]);
        assert_eq!(d.dual(), g);
        for e in 0..g.num_edges() {
            let ed = g.dual_edge(e);
            assert_eq!(d.dual_edge(ed), e);
            // the dual edge joins the swapped pair
            let (s, r) = (g.edge_source(e), g.edge_range(e));
            let k = g.edge_comp(e);
            let i = s - g.sources_of(k).start;
            let j = r - g.ranges_of(k).start;
            assert_eq!(d.edge_source(ed) - d.sources_of(k).start, j);
            assert_eq!(d.edge_range(ed) - d.ranges_of(k).start, i);
        }
    }

    #[test]
    fn edge_between_round_trip() {
        let g = Graph::new(vec![(2, 2), (1, 3)]).unwrap();
        for e in 0..g.num_edges() {
            let (s, r) = (g.edge_source(e), g.edge_range(e));
            assert_eq!(g.edge_between(s, r), Some(e));
        }
        // cross-component pairs have no edge
        assert_eq!(g.edge_between(0, 2), None);
    }

    #[test]
    fn dim_offsets() {
        let g = Graph::new(vec![(1, 2), (2, 1)]).unwrap();
        let offs = g.source_dim_offsets(&[3, 2]);
        assert_eq!(offs, vec![0, 3, 5, 7]);
        let offr = g.range_dim_offsets(&[3, 2]);
        assert_eq!(offr, vec![0, 3, 6, 8]);
    }
}
