//! Exact q-deformed algebra for the type D ASEP.

pub mod asep;
pub mod central;
pub mod classical;
pub mod exactq;
pub mod hamiltonian;
pub mod pairing;
pub mod qgroup;
pub mod suites;
