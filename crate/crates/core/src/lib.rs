//! Experimental toolkit for the combinatorics of `H`-partite random graphs.
//!
//! The host `K_n^H` replaces every vertex `i` of a small template graph `H`
//! with a part `V_i` of `n` vertices and every edge `ij` with a complete
//! bipartite block. This crate samples subgraphs of that host, certifies
//! lower-regularity of the blocks, counts canonical copies of patterns and
//! their rooted degrees, runs a constructive deletion method, and estimates
//! how often a lower-regular sample has few canonical copies.
//!
//! Module map:
//!
//! - [`pattern`]: template graphs, 2-density, least-frequent-subgraph
//!   expectation and glued patterns.
//! - [`blowup`]: subgraphs of `K_n^H` stored as bit-matrix blocks, plus the
//!   JSON graph format.
//! - [`sampler`]: seeded uniform sampling, the triangle-free split
//!   construction and the multi-exposure partition.
//! - [`regularity`]: exact, heuristic and spectral lower-regularity checks.
//! - [`census`]: canonical copy counts, degree vectors, second moments,
//!   rich and poor pairs.
//! - [`deletion`]: greedy edge-disjoint families and deletion sets.
//! - [`lab`]: constants chain, Monte Carlo estimator, advancing check,
//!   multi-exposure runs and config-driven experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bits;
pub mod blowup;
pub mod census;
pub mod deletion;
mod error;
pub mod lab;
pub mod logspace;
pub mod pattern;
pub mod regularity;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
