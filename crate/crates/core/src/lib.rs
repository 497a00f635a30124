//! Packing and covering constants of finite-dimensional normed spaces:
//! norms and convexity moduli, lattice packing/covering certificates,
//! a greedy discrete-subgroup construction, even-integer rounding tilings
//! and the bound chains that connect them.

pub mod acceptance;
pub mod bounds;
pub mod dispersion;
pub mod error;
pub mod interval;
pub mod lattice;
pub mod moduli;
pub(crate) mod linalg;
pub mod norms;
pub mod rng;
pub mod subgroup;
pub mod suptiling;

pub use error::{Error, Result};
pub use interval::CertifiedInterval;
pub use lattice::Lattice;
pub use norms::{Space, SpaceDescriptor};
