//! # sievelab-core
//!
//! Computational companion to the inverse large sieve problem: how large can a
//! set of integers be when its reductions modulo many primes avoid many residue
//! classes, and what must such a set look like?
//!
//! ## Module organization
//!
//! - [`numtheory`]: prime tables, Jacobi symbols, squarefree tests and the
//!   weighted prime sums every sieve bound is built from.
//! - [`residue`]: finite integer sets, residue sets mod p (bitsets), constraint
//!   families and the generators for the example sets (squares, intervals,
//!   progressions, primorials, random constrained sets).
//! - [`bounds`]: large sieve, larger sieve, fibre uniformity, miss-count sieve
//!   and paired occupancy scans.
//! - [`energy`]: additive energy over Z and Z/pZ, the energy-lifting
//!   inequality, Pollard profiles, shift sets and the two iterative sieves
//!   (differenced larger sieve, intersecting process).
//! - [`fourier`]: trigonometric majorants, the large-frequency detector,
//!   reciprocal exponential sums, the smoothed divisor weight and the
//!   dense-subinterval scan.
//! - [`quadratic`]: rational quadratics and their integer value sets,
//!   quasisquare censuses, the stability classifier and sumset obstructions.
//!
//! Inner loops over primes, shifts, grid points and corpus instances go
//! through [`exec`], which runs them on rayon when the `parallel` feature is
//! enabled (the default) and sequentially otherwise. Results are always
//! collected in input order, so output never depends on scheduling.

pub mod bounds;
pub mod energy;
mod error;
pub mod exec;
pub mod fourier;
pub mod numtheory;
pub mod quadratic;
pub mod residue;
pub mod rng;

pub use error::{Error, Result};
pub use numtheory::PrimeTable;
pub use residue::{IntegerSet, ResidueConstraintFamily, ResidueSet};
