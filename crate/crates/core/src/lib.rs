//! Desk-scale numerics for the Bellman-function method in harmonic analysis.
//!
//! Each module houses one family of objects together with the checks that
//! exercise them:
//!
//! - [`dyadic`]: Haar analysis on `[0,1]`, martingale transforms, weight
//!   characteristics and Carleson sequences.
//! - [`bellman`]: explicit Bellman candidates (Burkholder's functions, the
//!   power function `x^a y^a`, the John–Nirenberg function) and the
//!   concavity, majorant and constant-chain checks built on them.
//! - [`planar`]: FFT multipliers on a periodic grid, heat extensions, planar
//!   `A_p` characteristics and norm-ratio ascent.
//! - [`laminate`]: line-plus-atom measures in the plane and the ratio that
//!   drives the `p - 1` lower bound.
//! - [`stochastic`]: Brownian drivers, Itô sums and heat martingales.
//! - [`qc`]: radial quasiconformal model maps.
//!
//! The guide under `book/` walks through the same material with runnable
//! snippets; those snippets are compiled as doctests of this crate.

// `!(x > 0.0)` also rejects NaN, which is the point
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bellman;
pub mod dyadic;
pub mod error;
pub mod laminate;
pub mod planar;
pub mod qc;
pub mod quad;
pub mod rng;
pub mod stats;
pub mod stochastic;

pub use error::{Error, Result};

/// Conjugate exponent `max(p, p/(p-1))`.
pub fn p_star(p: f64) -> f64 {
    p.max(p / (p - 1.0))
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/dyadic.md")]
    mod dyadic {}
    #[doc = include_str!("../../../book/src/burkholder.md")]
    mod burkholder {}
    #[doc = include_str!("../../../book/src/constants.md")]
    mod constants {}
    #[doc = include_str!("../../../book/src/planar.md")]
    mod planar {}
    #[doc = include_str!("../../../book/src/laminates.md")]
    mod laminates {}
    #[doc = include_str!("../../../book/src/stochastic.md")]
    mod stochastic {}
    #[doc = include_str!("../../../book/src/qc.md")]
    mod qc {}
}
