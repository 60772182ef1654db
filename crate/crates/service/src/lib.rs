//! Command line driver and interactive session backend.

pub mod cli;
pub mod server;
pub mod session;
pub mod wire;
