//! Cosine-expansion lattice rules.
//!
//! Approximates `E[f(Y)]` for a probability measure that is only known
//! through its characteristic function. The integrand is projected onto a
//! half-period cosine space over a box `D`, and the projected integral is
//! evaluated with a tent-transformed rank-1 lattice rule:
//!
//! ```text
//! E[f(Y)] ≈ 1/N Σ_n f(p_n) · w_n,
//! w_n = Σ_{|k|_1 ≤ K} Π_j cos(π k_j φ({n g_j / N})) · e^{-iπ k·a/(b-a)} F_μ(π k/(b-a))
//! ```
//!
//! The weights `w_n` depend only on the measure, the box and the lattice, so
//! they are computed once ([`integrator::build_weight_table`]) and reused for
//! any number of integrands ([`integrator::approximate_expectation`]).
//!
//! The crate is `no_std` and needs only `alloc`. File formats, caching,
//! parallel table construction and the command line live in the `coslat`
//! crate.
//!
//! | module | contents |
//! |--------|----------|
//! | [`lattice`] | rank-1 lattice points, tent transform, box mapping, extensible ordering |
//! | [`cosine_space`] | r-weights, multi-index enumeration, truncated kernel, cosine coefficients |
//! | [`measures`] | characteristic functions and cosine transforms of measures |
//! | [`integrator`] | weight tables and the weighted lattice sum |
//! | [`wavelet`] | cosine scaling-function scheme on a midpoint grid |
//! | [`bounds`] | dual lattice, zeta, worst-case and truncation error bounds |
//! | [`testlab`] | test integrands, closed-form references, quadrature oracles |

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod cosine_space;
mod error;
pub mod integrator;
pub mod lattice;
pub mod linalg;
pub mod measures;
pub mod quadrature;
pub mod sum;
pub mod testlab;
pub mod wavelet;

pub use error::{Error, Result};
pub use num_complex::Complex64;
