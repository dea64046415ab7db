//! Random graphs whose edge probability decays with vertex distance.
//!
//! The crate is organised by subsystem:
//!
//! * [`structures`]: finite relational structures over `[n]`, restriction,
//!   embeddings, canonical forms, pair types and free amalgamation.
//! * [`sampler`]: edge-probability profiles, reproducible sampling and the
//!   closed-form interval-embedding probabilities.
//! * [`embeddings`]: extension counting/enumeration and disjoint families.
//! * [`closure`]: catalog-driven `cl^k` / `cl^{k,m}` and checkers for the
//!   closure axioms, locality, transparency and definability.
//! * [`logic`]: first-order formulas, parser, evaluators, rank-`d` types and
//!   the addition theorem over free amalgams.
//! * [`experiments`]: Monte Carlo harness, convergence diagnostics and the
//!   empirical pair classifier.

pub mod closure;
pub mod embeddings;
pub mod error;
pub mod experiments;
pub mod logic;
pub mod sampler;
pub mod structures;

pub use error::{Error, Result};
pub use structures::{PartialEmbedding, Structure, Vertex, VertexSet, Vocabulary};
