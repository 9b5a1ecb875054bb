//! Polyhedral-cone scalarization, a minimal-point engine for finite preorders
//! and epsilon-efficiency certificates for finite vector problems.

pub mod analysis;
pub mod cli;
pub mod cone;
pub mod error;
pub mod evp;
pub mod ext_real;
pub mod io;
mod lp;
pub mod order;
pub mod scalarization;

pub use cone::{DirectionSet, Membership, PolyhedralCone, DEFAULT_TOL_FEAS};
pub use error::{Error, Result};
pub use evp::{certify, evp_solve, EvpCertificate, Metric, VectorProblem};
pub use ext_real::ExtReal;
pub use scalarization::{xi_h, xi_k0, ScalarizationResult, DEFAULT_TOL_BISECT};
