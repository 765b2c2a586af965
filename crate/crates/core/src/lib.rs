//! Desk-scale simulator for two-dimensional linear wave-structure interaction.
//!
//! A partially immersed body floats at equilibrium in a finite tank. The fluid
//! is inviscid, irrotational and linearized around the rest state, so the
//! velocity potential is harmonic in the frozen equilibrium domain and the
//! dynamics live on the free surface and in the six rigid-body unknowns.
//!
//! The crate is organized along the pipeline:
//!
//! * [`geometry`] - tank/body description, validation, hydrostatics, meshing;
//! * [`elliptic`] - P1 finite elements for the mixed and Neumann Laplace
//!   problems on graded corner meshes;
//! * [`dn_operator`] - the discrete Dirichlet-Neumann operator, its spectrum
//!   and fractional powers;
//! * [`function_spaces`] - homogeneous semi-norms on the free surface,
//!   compatibility conditions at the contact points, reflection/Poisson
//!   extensions;
//! * [`hydrodynamics`] - Kirchhoff potentials, added mass, hydrostatic
//!   stiffness, stability, and the log-singular traces;
//! * [`evolution`] - the coupled surface/body evolution, energy-conserving
//!   implicit midpoint stepping, canonical-momentum and regularity
//!   diagnostics;
//! * [`cummins`] - radiation memory kernel, exciting force, the Cummins
//!   integro-differential equation and cross-validation against the coupled
//!   evolution;
//! * [`singular`] - explicit corner singular functions and the
//!   singular/regular decomposition of harmonic extensions.

pub mod cummins;
pub mod dn_operator;
pub mod elliptic;
pub mod evolution;
pub mod function_spaces;
pub mod geometry;
pub mod hydrodynamics;
pub mod singular;

pub use geometry::{BottomProfile, DomainSpec, Mesh, SegmentTag};
