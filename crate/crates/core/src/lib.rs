//! Counterdiabatic pulse design for arbitrary state engineering in three- and
//! four-level systems.
//!
//! The crate builds orthonormal moving-state bases ([`basis`]), shapes their
//! angles with rest-to-rest cubics ([`polyshape`]), turns a target state into
//! drive pulses ([`protocols`]), and checks the result by integrating the
//! Schrödinger equation ([`dynamics`]). [`metrics`] compares drive costs and
//! [`cli`] exposes everything as a command-line tool.

pub mod basis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod metrics;
pub mod polyshape;
pub mod protocols;
pub mod table;

pub use error::{Error, Result};
