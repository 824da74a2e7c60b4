//! Quantization of integrable systems on a lattice of Bohr-Sommerfeld tori.

pub mod cli;
pub mod error;
pub mod expr;
pub mod json;
pub mod ladder;
pub mod lattice;
pub mod model;
pub mod numerics;
pub mod operator;
pub mod verify;

pub use error::{Category, Error, Result};
