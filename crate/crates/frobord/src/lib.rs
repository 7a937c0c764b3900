//! Order statistics of symplectic matrices over prime fields, and what they
//! buy you when counting points on curves.
//!
//! The Frobenius endomorphism of a genus-g curve over F_p acts on the
//! l-torsion of its Jacobian through a matrix in GSp_{2g}(F_l), and for
//! p = 1 mod l the action lands in Sp_{2g}(F_l) up to scalars. The order of
//! that action - the least r with M^r scalar - is highly non-uniform: a few
//! values near l^2/2 soak up most of the mass. This crate computes that
//! distribution three ways (exact closed form, exhaustive group census,
//! Monte Carlo), derives the characteristic polynomials compatible with each
//! order from roots of unity, and runs the resulting guess-in-likelihood-order
//! strategy against brute-force point counting on random genus-2 curves.
//!
//! Modules, bottom up:
//!
//! * [`intutil`]: primality, factoring, exact multiplicative orders, CRT.
//! * [`ff`]: F_l and F_{l^k} arithmetic, square roots, roots of unity.
//! * [`symplectic`]: Sp_4(F_l) group orders, membership, characteristic
//!   polynomials, projective orders, uniform sampling, full censuses.
//! * [`classdist`]: the projective-order distribution per conjugacy-class
//!   family, its moments, modes, and aggregated summaries.
//! * [`atkin`]: order -> characteristic-polynomial candidate lists via
//!   power sums of roots of unity, with probability weights.
//! * [`curves`]: random genus-2 curves, point counts over F_p and F_{p^2},
//!   Frobenius characteristic polynomials with Weil-bound checks.
//! * [`experiment`]: head-to-head attempt counts, lexicographic baseline vs
//!   weighted candidate list, plus CRT reassembly of the true coefficients.
//!
//! Determinism is load-bearing throughout: samplers take explicit seeds,
//! field constructions scan lexicographically, and every reported table is
//! byte-identical across runs and thread counts.

pub mod atkin;
pub mod classdist;
pub mod curves;
pub mod error;
pub mod experiment;
pub mod ff;
pub mod intutil;
pub mod symplectic;

pub use error::{Error, Result};
