//! Small-amplitude periodic traveling waves in dimer FPUT lattices.

pub mod linear;
pub mod model;
pub mod spectral;
pub mod operator;
pub mod solver;
pub mod symmetry;
pub mod verify;
