//! MAP estimation for discrete graphical models through nand Markov random
//! fields: build the nand graph, certify it perfect, then solve the
//! set-packing LP or run convergent message passing.

pub mod cli;
pub mod error;
pub mod limits;
pub mod message_passing;
pub mod model;
pub mod nmrf;
pub mod oracle;
pub mod perfection;
pub mod pruning;
pub mod relaxation;
mod text;

pub use error::{Error, Result};
