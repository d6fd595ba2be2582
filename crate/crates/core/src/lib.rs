//! Witness-complex persistent homology for graphs.
//!
//! The crate turns a graph into topological features in a few stages:
//!
//! 1. [`graph`]: graphs, edge lists, kNN graphs and geodesic distances.
//! 2. [`landmarks`]: degree-ranked landmarks and the Voronoi cover they induce.
//! 3. [`complexes`]: Vietoris-Rips and lazy witness filtrations.
//! 4. [`persistence`]: persistence diagrams and diagram distances.
//! 5. [`vectorize`]: persistence images.
//! 6. [`encodings`]: per-node local features, a global image and the
//!    topological loss.
//! 7. [`robustness`]: edge-flip perturbations and a drift sweep.
//!
//! The guide under `book/` walks through each stage; its code listings are
//! compiled as doctests of this crate.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod complexes;
pub mod encodings;
mod error;
pub mod graph;
pub mod landmarks;
pub mod persistence;
pub mod robustness;
pub mod synth;
pub mod vectorize;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/landmarks.md")]
    mod landmarks {}
    #[doc = include_str!("../../../book/src/complexes.md")]
    mod complexes {}
    #[doc = include_str!("../../../book/src/persistence.md")]
    mod persistence {}
    #[doc = include_str!("../../../book/src/images.md")]
    mod images {}
    #[doc = include_str!("../../../book/src/encodings.md")]
    mod encodings {}
    #[doc = include_str!("../../../book/src/robustness.md")]
    mod robustness {}
}
