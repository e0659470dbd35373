//! Resonance classification and exact trajectory evaluation for harmonic
//! oscillators driven by general (possibly discontinuous) periodic forcing.
//!
//! Given a natural frequency w0 and a periodic forcing of minimal period T2
//! (both exact rationals times a power of pi), the classifier decides among
//! four mutually exclusive outcomes of the zero-data Cauchy problem
//! x'' + w0^2 x = f(t):
//!
//! 1. T2/T1 irrational: bounded, never periodic.
//! 2. T2/T1 = m/n rational but not an integer: periodic with T3 = n T2.
//! 3. T2/T1 integer and both projections of f onto sin(w0 t), cos(w0 t)
//!    over T3 vanish: periodic with T3.
//! 4. T2/T1 integer and a projection survives: resonant, with growth
//!    per cycle sqrt(Q1^2 + Q2^2) / w0.
//!
//! The solver evaluates the exact Duhamel solution at any time in O(1) by
//! splitting t into whole periods plus a remainder, rotating precomputed
//! one-period integrals by the per-period phase, and summing the rotations
//! in closed form.

// `!(x > 0.0)` style checks are deliberate: they reject NaN, which the
// suggested `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod dd;

pub mod analysis;
pub mod classifier;
pub mod damped;
pub mod error;
pub mod exactnum;
pub mod forcing;
pub mod laplace;
pub mod modal;
pub mod oscillator;
pub mod cli;
pub mod quadrature;
pub mod scenario;

pub use error::{Error, Result};
