//! Exact volumes of the lattice polytopes attached to trees under the binary
//! (two-state) Jukes–Cantor model, and the phylogenetic degrees they encode.
//!
//! For a forest `F` with edge set `E` and inner vertices `I`, two polytopes
//! in `R^E` drive everything:
//!
//! * `Q(F)`: the unit cube cut by `sum of x_e over edges at v <= 1` for every
//!   inner vertex `v`;
//! * `P(T)`: the convex hull of the 0/1 vectors whose coordinate sum around
//!   every inner vertex is even; its facets are the cube bounds together
//!   with `S_{v,A}(x) >= 1 - |A|` for every inner `v` and odd subset `A` of
//!   the edges at `v`.
//!
//! The volume of `P(T)`, normalized by `|E|!` and divided by `2^{|I|}`
//! (the index of the lattice spanned by the even-parity vertices), is the
//! degree of the toric variety the tree defines — an integer this crate
//! computes exactly, three independent ways:
//!
//! 1. inclusion–exclusion over inner-vertex subsets, through the contraction
//!    sum `r(F)` and memoized `Q` volumes ([`degree::p_volume_inclusion_exclusion`]);
//! 2. a five-term recursion that never leaves `P` volumes
//!    ([`degree::p_volume_recursive`]);
//! 3. brute-force Ehrhart counting with exact interpolation
//!    ([`oracle`]), the referee the first two are checked against.
//!
//! All arithmetic is exact ([`arith::Rational`]); no floating point is used
//! anywhere. With the default `parallel` feature, the oracle's lattice scans
//! and batch tree evaluation fan out with rayon; disabling the feature gives
//! a fully sequential build with identical results.

// VolumeError carries exact rationals, so Results holding it are large
#![allow(clippy::result_large_err)]

pub mod arith;
pub mod cache;
pub mod canonical;
pub mod degree;
pub mod forest;
pub mod generate;
pub mod oracle;
pub mod parse;
pub mod qvol;
pub mod rfun;

use thiserror::Error;

pub use arith::{
    factorial, lagrange_interpolate, pow2, ArithError, Rational, UnivariatePolynomial,
};
pub use cache::{CacheKind, VolumeCache};
pub use canonical::{canonical_key, serialize_canonical, CanonicalKey};
pub use degree::{phylogenetic_degree, DegreeReport, Method};
pub use forest::{EdgeId, Forest, ForestError, VertexId};
pub use parse::{parse_forest, ParseError};

/// Errors from the volume engines and the lattice-point oracle.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VolumeError {
    /// No edge set hitting every inner vertex exactly once exists, so the
    /// facet-sum route cannot run on this forest.
    #[error("no edge cover with one edge per inner vertex exists")]
    CoverNotFound,
    /// The three-term splitting recursion has no applicable pivot.
    #[error("splitting recursion inapplicable to this forest")]
    SplittingInapplicable,
    #[error("{edges} edges exceed the oracle dimension bound {bound}")]
    DimensionExceedsBound { edges: usize, bound: usize },
    #[error("need {need} samples for a degree-{} interpolation, have {have}", need - 1)]
    InsufficientSamples { have: usize, need: usize },
    #[error("the two volume methods disagree: inclusion-exclusion {inclusion_exclusion}, recursive {recursive}")]
    MethodDisagreement {
        inclusion_exclusion: Rational,
        recursive: Rational,
    },
    #[error("degree is defined for a single tree, not a forest")]
    NotATree,
    /// An exactness guarantee failed; this always signals an implementation
    /// bug, never bad input.
    #[error("internal consistency violation: {0}")]
    Inconsistency(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Forest(#[from] ForestError),
}
