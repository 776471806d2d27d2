//! Finite-dimensional operator algebras presented as spans of complex matrices.

pub mod error;
pub mod examples;
pub mod io;
pub mod algebra;
pub mod cb;
pub mod linalg;
pub mod sdp;
pub mod structure;
pub mod report;
pub mod reproduce;
pub mod reversibility;
pub mod search;
pub mod tro;

pub use error::{Error, Result};
pub use linalg::{CMatrix, LinearMapOnSubspace, Subspace, ToleranceConfig};
