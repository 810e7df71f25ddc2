//! Exact Airy-function solutions of the streamline-reduced steady
//! Navier-Stokes equations, with numerical oracles that check them.

pub mod airy;
pub mod bvp;
mod dd;
pub mod error;
pub mod field;
pub mod flow;
mod roots;
pub mod suite;
pub mod verify;

pub use airy::{airy_eval, airy_ode_residual, AiryQuartet};
pub use error::{Error, Result};
