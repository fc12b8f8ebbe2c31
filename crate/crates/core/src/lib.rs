//! Generalized pseudospectral solver for the radial spiked harmonic
//! oscillator `-u''/2 + l(l+1)u/(2r^2) + (r^2 + lambda r^-alpha)u/2 = E u`.

pub mod eigensolver;
pub mod error;
pub mod format;
pub mod golden;
pub mod hamiltonian;
pub mod legendre;
pub mod mapping;
pub mod matrix;
pub mod observables;
pub mod oracle;
pub mod solver;

pub use error::{Error, Result};
pub use solver::{Channel, GridSettings};
