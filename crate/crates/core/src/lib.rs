//! Finite extensive-form games with unawareness: validation, extensive-form
//! rationalizability, self-confirming equilibrium and discovery processes.

pub mod dot;
pub mod discovery;
pub mod efr;
pub mod error;
pub mod exec;
pub mod belief;
pub mod format;
pub mod generate;
pub mod lp;
pub mod model;
pub mod profile;
pub mod rational;
pub mod sce;
pub mod strategy;
pub mod validate;

pub use error::{Error, Result};
pub use format::{parse, serialize};
pub use model::Game;
pub use rational::Q;
pub use validate::validate;
