//! walshlab: exact computation with nilpotent polynomial ergodic averages.
//!
//! Core layers:
//! - [`poly`]: sparse multivariate polynomials over exact rationals;
//! - [`nilgroup`]: UT(n, Z) and permutation arithmetic, prefiltrations;
//! - [`model`]: the acting-group coordinate models Z^r and Heisenberg;
//! - [`polymap`]: polynomial maps, discrete derivatives, the certificate
//!   verifier;
//! - [`systems`]: Walsh tuple systems, reductions, and the complexity
//!   recursion;
//! - [`folner`]: Folner sequences, approximate inclusion, and tempered
//!   subsequence extraction;
//! - [`dynamics`]: finite measure-preserving systems, nonconventional
//!   averages, seminorms, and the inverse-theorem witness;
//! - [`vncircle`]: circle-rotation von Neumann averages and metastability;
//! - [`growth`] and [`rates`]: growth functions and the quantitative
//!   convergence-rate ladders.

pub mod error;
pub mod poly;
pub mod nilgroup;
pub mod model;
pub mod polymap;
pub mod systems;
pub mod folner;
pub mod simplex;
pub mod dynamics;
pub mod vncircle;
pub mod growth;
pub mod rates;
pub mod descriptors;

pub use error::{Error, Result};
pub use model::{GammaArg, GroupModel};
pub use nilgroup::{GroupElement, Length, Prefiltration};
pub use poly::{Int, Poly, Rat};
pub use polymap::{PolyMap, Target, Verdict};
