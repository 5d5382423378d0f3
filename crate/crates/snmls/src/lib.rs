//! Structured noncommutative multidimensional linear systems.
//!
//! The building blocks are admissible graphs (disjoint unions of complete
//! bipartite components), formal power series in noncommuting variables
//! indexed by the graph's edges, and conservative structured colligations
//! whose transfer functions fill out the associated Schur-Agler class.
//! On top of those sit Stein-identity feasibility tests for left and right
//! tangential operator-argument interpolation and a linear-fractional
//! parametrization of the solution set.

pub mod colligation;
pub mod data;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod pick;
pub mod quotient;
pub mod random;
pub mod series;
pub mod solve;
pub mod stein;
pub mod tuple;
pub mod universal;
pub mod word;

use num_complex::Complex64;

/// Complex scalar used throughout.
pub type C64 = Complex64;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVec = nalgebra::DVector<Complex64>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error("dimension mismatch: {0}")]
    Dim(String),
    #[error("ill-conditioned operation: {0}")]
    Conditioning(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use colligation::Colligation;
pub use data::{InterpolationData, SideData, SteinOperators};
pub use graph::Graph;
pub use pick::{FmPick, ToeplitzReport};
pub use quotient::IsometryData;
pub use series::{BiSeries, NcSeries};
pub use solve::{SolveOptions, SolveReport, VerifyReport};
pub use stein::{Feasibility, SteinOptions, SteinSolution};
pub use tuple::{OperatorTuple, Side};
pub use universal::{Parameter, SigmaParts, UniversalColligation};
pub use word::Word;
