//! Simulation of intracavity STIRAP state mapping from dissociating molecular
//! fragments onto cavity photons, and cascaded photon transfer between two
//! nodes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod config;
pub mod error;
pub mod feasibility;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod propagator;
pub mod pulse;
pub mod scenario;
