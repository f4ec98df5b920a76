//! Bilinear tensors of Dirac fields and the bispinor matrices that produce them.
//!
//! Given a quintuple `(m, jᵅ, sᵅ, Hᵅᵝ, n)` the crate builds the 4×4
//! Hermitian matrix `M`, decides whether `M ⪰ 0` (closed form in the real
//! sector, eigensolver otherwise), factors `M = ZZ⁺`, and maps `Z` back to
//! tensors. Components are taken in a local Minkowski frame with
//! `η = diag(−1, 1, 1, 1)`; world components go through a tetrad.
//!
//! Modules:
//!
//! - [`clifford`]: gamma matrices in the real Majorana and complex Dirac
//!   representations, `D`, `C`, spin lifts.
//! - [`frames`]: quintuples, world metrics, tetrads, Lorentz transforms.
//! - [`spectrum`]: `M`, its closed-form and numeric spectrum, feasibility.
//! - [`factorization`]: `Z` from `M`, Hermitian root families, polar form.
//! - [`reduction`]: real Majorana fields and the normalized quadratic system.
//! - [`io`], [`corpus`], [`cli`]: NDJSON corpora and the `bispinor` binary.
//!
//! Runnable examples, one per capability:
//!
//! ```text
//! cargo run --example representations
//! cargo run --example spectrum
//! cargo run --example factorization
//! cargo run --example polar
//! cargo run --example reduction
//! cargo run --example frames
//! cargo run --example pipeline
//! ```

pub mod linalg;
pub mod clifford;
pub mod frames;
pub mod spectrum;
pub mod factorization;
pub mod reduction;
pub mod io;
pub mod corpus;
pub mod cli;
