//! Multivariate `L_2`-approximation and integration in weighted Korobov spaces
//! of analytic periodic functions.
//!
//! The space `H(K_{s,a,b})` on `[0,1]^s` has Fourier weights
//! `ω_h = ω^{Σ_j a_j |h_j|^{b_j}}`. This crate provides:
//!
//! - [`params`]: `ω`, the sequences `a`, `b` as closed-form families, config parsing;
//! - [`index_set`]: the sets `A(s,M)`, their exact counts and enumeration;
//! - [`space`]: kernel, Fourier polynomials, norms and inner products;
//! - [`spectra`]: ordered eigenvalues and the optimal algorithm from arbitrary linear information;
//! - [`grid`]: regular grids, dual lattices and aliasing;
//! - [`approx_std`]: the grid-sampling algorithm, its mesh rules, bounds and an exact error oracle;
//! - [`integrate`]: grid quadrature and its worst-case error;
//! - [`tractability`]: convergence and tractability verdicts for `(a, b)`;
//! - [`cli`]: the experiment harness behind the `korobov` binary.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx_std;
pub mod cli;
pub mod error;
pub mod grid;
pub mod index_set;
pub mod integrate;
pub mod params;
mod series;
pub mod space;
pub mod spectra;
pub mod tractability;

pub use error::{Error, Result};
pub use index_set::{FrequencyIndex, IndexSet};
pub use params::{KorobovParams, SequenceFamily};
pub use series::Bracketed;
pub use space::FourierPolynomial;
