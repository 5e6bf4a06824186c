//! Parallel transport, holonomy and monodromy of matrix connections on the
//! punctured plane, with independent reference computations for every
//! quantity that has a closed form.
//!
//! Start with [`transport::parallel_transport`] for a single loop, or
//! [`monodromy::monodromy_representation`] for all generator loops at once.

pub mod builtin;
pub mod cli;
pub mod config;
pub mod connection;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod monodromy;
pub mod oracle;
pub mod transport;
pub mod vacua;
pub mod wong;

pub use connection::{ConnectionSpec, GridRegion, LieBasis};
pub use error::{Error, Result};
pub use geometry::{PathSpec, PlanePoint, PunctureSet};
pub use linalg::CMat;
pub use transport::{parallel_transport, HolonomyResult};
