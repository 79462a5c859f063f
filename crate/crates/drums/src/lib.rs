//! Spectral-geometry toolkit for planar domains with corners.
//!
//! The library computes explicit heat kernels (free plane, half-plane,
//! circular sector) under Dirichlet/Neumann/Robin conditions, short-time
//! heat-trace expansions, and desk-scale Laplace spectra (closed forms,
//! 1D Robin root-finding, P1 finite elements), plus a numerical harness
//! that checks heat-kernel locality and the "hear the corners" classifier.

pub mod eigensolve;
pub mod geometry;
pub mod harness;
pub mod kernels;
pub mod sector;
pub mod specfun;
pub mod trace;
