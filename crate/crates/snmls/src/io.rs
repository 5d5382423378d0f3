//! JSON formats for every object the command line reads or writes.
//!
//! Complex scalars serialize as `[re, im]` pairs and matrices as flat
//! row-major pair lists.  Graphs accept either an explicit component list
//! or the presets `"fm:d"`, `"gr:d"`, `"full:n,m"`.  Reports are emitted
//! through [`to_canonical_json`], which sorts keys so output is byte
//! stable for fixed inputs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::colligation::Colligation;
use crate::data::{InterpolationData, SideData};
use crate::graph::Graph;
use crate::linalg::{hcat, vcat};
use crate::series::NcSeries;
use crate::tuple::OperatorTuple;
use crate::word::Word;
use crate::{C64, CMat, CVec, Error, Result};

/// Serialize with alphabetically sorted keys and a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)
        .map_err(|e| Error::Input(format!("serialization failed: {e}")))?;
    let mut s = serde_json::to_string_pretty(&v)
        .map_err(|e| Error::Input(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

pub fn vec_to_pairs(v: &CVec) -> Vec<[f64; 2]> {
    v.iter().map(|z| pair(*z)).collect()
}

pub fn pairs_to_vec(pairs: &[[f64; 2]]) -> CVec {
    CVec::from_iterator(pairs.len(), pairs.iter().map(|p| unpair(*p)))
}

/// Dense complex matrix, `data` in row-major order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_mat(m: &CMat) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push(pair(m[(i, j)]));
            }
        }
        MatrixJson {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn to_mat(&self) -> Result<CMat> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Input(format!(
                "matrix data has {} entries, expected {}x{}",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(CMat::from_fn(self.rows, self.cols, |i, j| {
            unpair(self.data[i * self.cols + j])
        }))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentJson {
    pub sources: usize,
    pub ranges: usize,
}

/// Graph descriptor: explicit component list or a preset string.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphJson {
    Preset(String),
    Components { components: Vec<ComponentJson> },
}

fn parse_preset(s: &str) -> Result<Graph> {
    let (name, args) = s
        .split_once(':')
        .ok_or_else(|| Error::Input(format!("unknown graph preset '{s}'")))?;
    let nums: Vec<usize> = args
        .split(',')
        .map(|a| {
            a.trim()
                .parse::<usize>()
                .map_err(|_| Error::Input(format!("bad number '{a}' in graph preset '{s}'")))
        })
        .collect::<Result<_>>()?;
    match (name, nums.as_slice()) {
        ("fm", [d]) => Graph::fm(*d),
        ("gr", [d]) => Graph::gr(*d),
        ("full", [n, m]) => Graph::full(*n, *m),
        _ => Err(Error::Input(format!(
            "unknown graph preset '{s}' (expected fm:d, gr:d or full:n,m)"
        ))),
    }
}

impl GraphJson {
    pub fn from_graph(g: &Graph) -> Self {
        GraphJson::Components {
            components: g
                .components()
                .iter()
                .map(|&(n, m)| ComponentJson {
                    sources: n,
                    ranges: m,
                })
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<Graph> {
        match self {
            GraphJson::Preset(s) => parse_preset(s),
            GraphJson::Components { components } => {
                Graph::new(components.iter().map(|c| (c.sources, c.ranges)).collect())
            }
        }
    }
}

/// One series coefficient: a word over the edge alphabet and a flat
/// row-major matrix of the series' output-by-input shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub word: Vec<usize>,
    pub matrix: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesJson {
    #[serde(rename = "in")]
    pub dim_in: usize,
    #[serde(rename = "out")]
    pub dim_out: usize,
    pub order: usize,
    pub terms: Vec<TermJson>,
}

impl SeriesJson {
    pub fn from_series(f: &NcSeries) -> Self {
        let terms = f
            .terms()
            .map(|(w, m)| TermJson {
                word: w.letters().collect(),
                matrix: MatrixJson::from_mat(m).data,
            })
            .collect();
        SeriesJson {
            dim_in: f.dim_in(),
            dim_out: f.dim_out(),
            order: f.order(),
            terms,
        }
    }

    pub fn to_series(&self) -> Result<NcSeries> {
        let mut f = NcSeries::zero(self.dim_out, self.dim_in, self.order);
        for t in &self.terms {
            if t.word.len() > self.order {
                return Err(Error::Input(format!(
                    "term word {:?} exceeds the declared order {}",
                    t.word, self.order
                )));
            }
            let m = MatrixJson {
                rows: self.dim_out,
                cols: self.dim_in,
                data: t.matrix.clone(),
            }
            .to_mat()?;
            f.set(Word::from_letters(&t.word), m);
        }
        Ok(f)
    }
}

/// Operator tuple: one `dim`-square matrix per graph edge.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TupleJson {
    pub dim: usize,
    pub ops: Vec<MatrixJson>,
}

impl TupleJson {
    pub fn from_tuple(t: &OperatorTuple) -> Self {
        TupleJson {
            dim: t.dim(),
            ops: t.ops().iter().map(MatrixJson::from_mat).collect(),
        }
    }

    pub fn to_tuple(&self) -> Result<OperatorTuple> {
        let ops = self
            .ops
            .iter()
            .map(|m| {
                let m = m.to_mat()?;
                if m.nrows() != self.dim || m.ncols() != self.dim {
                    return Err(Error::Input(format!(
                        "tuple operator is {}x{}, expected {dim}x{dim}",
                        m.nrows(),
                        m.ncols(),
                        dim = self.dim
                    )));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        OperatorTuple::new(ops)
    }
}

/// Colligation: graph, per-component state dimensions, and the four
/// dense blocks of the system operator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColligationJson {
    pub graph: GraphJson,
    pub state_dims: Vec<usize>,
    pub dim_in: usize,
    pub dim_out: usize,
    pub a: MatrixJson,
    pub b: MatrixJson,
    pub c: MatrixJson,
    pub d: MatrixJson,
}

impl ColligationJson {
    pub fn from_colligation(col: &Colligation) -> Self {
        ColligationJson {
            graph: GraphJson::from_graph(col.graph()),
            state_dims: col.state_dims().to_vec(),
            dim_in: col.dim_in(),
            dim_out: col.dim_out(),
            a: MatrixJson::from_mat(&col.a()),
            b: MatrixJson::from_mat(&col.b()),
            c: MatrixJson::from_mat(&col.c()),
            d: MatrixJson::from_mat(&col.d()),
        }
    }

    pub fn to_colligation(&self) -> Result<Colligation> {
        let g = self.graph.to_graph()?;
        let a = self.a.to_mat()?;
        let b = self.b.to_mat()?;
        let c = self.c.to_mat()?;
        let d = self.d.to_mat()?;
        let u = vcat(&[hcat(&[a, b]), hcat(&[c, d])]);
        Colligation::new(g, self.state_dims.clone(), self.dim_in, self.dim_out, u)
    }
}

/// One side of an interpolation data set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SideDataJson {
    pub t: TupleJson,
    pub x: MatrixJson,
    pub y: MatrixJson,
}

impl SideDataJson {
    pub fn from_side(side: &SideData) -> Self {
        SideDataJson {
            t: TupleJson::from_tuple(&side.t),
            x: MatrixJson::from_mat(&side.x),
            y: MatrixJson::from_mat(&side.y),
        }
    }

    pub fn to_side(&self) -> Result<SideData> {
        Ok(SideData {
            t: self.t.to_tuple()?,
            x: self.x.to_mat()?,
            y: self.y.to_mat()?,
        })
    }
}

/// A word-indexed input vector for simulation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputJson {
    pub word: Vec<usize>,
    pub vector: Vec<[f64; 2]>,
}

/// One commutative interpolation node: a point in the open unit ball
/// with row directions `b` (output side) and `c` (input side).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PickPointJson {
    pub lambda: Vec<[f64; 2]>,
    pub b: Vec<[f64; 2]>,
    pub c: Vec<[f64; 2]>,
}

/// Numeric options; absent fields fall back to mode defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OptionsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_parameters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

/// Feasibility certificate: verdict, per-component Hermitian blocks,
/// residual, and eigenvalue floor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeasibilityReportJson {
    pub verdict: String,
    pub certified: bool,
    pub residual: f64,
    pub min_eig: f64,
    pub iterations: usize,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernels: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forced: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<MatrixJson>,
}

impl FeasibilityReportJson {
    pub fn from_solution(sol: &crate::stein::SteinSolution) -> Self {
        let mats = |ks: &Option<Vec<CMat>>| {
            ks.as_ref()
                .map(|ks| ks.iter().map(MatrixJson::from_mat).collect())
        };
        FeasibilityReportJson {
            verdict: sol.verdict.to_string(),
            certified: sol.certified,
            residual: sol.residual,
            min_eig: sol.min_eig,
            iterations: sol.iterations,
            message: sol.message.clone(),
            kernels: mats(&sol.kernels),
            forced: mats(&sol.forced),
            dual: sol.dual.as_ref().map(MatrixJson::from_mat),
        }
    }
}

/// The one JSON document every subcommand reads.  Which fields are
/// required depends on the mode; the command line validates and reports
/// what is missing.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_in: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_out: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<SideDataJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<SideDataJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SeriesJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colligation: Option<ColligationJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Vec<InputJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<TermJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<PickPointJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsJson>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("invalid problem file: {e}")))
    }

    pub fn require_graph(&self) -> Result<Graph> {
        self.graph
            .as_ref()
            .ok_or_else(|| Error::Input("missing required field 'graph'".into()))?
            .to_graph()
    }

    /// Assemble the interpolation data set for feasibility/solve/verify.
    pub fn interpolation_data(&self) -> Result<InterpolationData> {
        let graph = self.require_graph()?;
        let dim_in = self
            .dim_in
            .ok_or_else(|| Error::Input("missing required field 'dim_in'".into()))?;
        let dim_out = self
            .dim_out
            .ok_or_else(|| Error::Input("missing required field 'dim_out'".into()))?;
        let left = self.left.as_ref().map(|s| s.to_side()).transpose()?;
        let right = self.right.as_ref().map(|s| s.to_side()).transpose()?;
        if left.is_none() && right.is_none() {
            return Err(Error::Input(
                "at least one of 'left' and 'right' data must be present".into(),
            ));
        }
        InterpolationData {
            graph,
            dim_in,
            dim_out,
            left,
            right,
        }
        .validated()
    }

    pub fn simulation_inputs(&self, dim_in: usize) -> Result<BTreeMap<Word, CVec>> {
        let mut map = BTreeMap::new();
        for rec in self.inputs.as_deref().unwrap_or(&[]) {
            if rec.vector.len() != dim_in {
                return Err(Error::Input(format!(
                    "input vector at word {:?} has length {}, expected {dim_in}",
                    rec.word,
                    rec.vector.len()
                )));
            }
            map.insert(Word::from_letters(&rec.word), pairs_to_vec(&rec.vector));
        }
        Ok(map)
    }

    /// Word-indexed targets for the noncommutative Schur problem.
    pub fn nsp_targets(&self, dim_out: usize, dim_in: usize) -> Result<Vec<(Word, CMat)>> {
        let targets = self
            .targets
            .as_ref()
            .ok_or_else(|| Error::Input("missing required field 'targets'".into()))?;
        targets
            .iter()
            .map(|t| {
                let m = MatrixJson {
                    rows: dim_out,
                    cols: dim_in,
                    data: t.matrix.clone(),
                }
                .to_mat()?;
                Ok((Word::from_letters(&t.word), m))
            })
            .collect()
    }
}
