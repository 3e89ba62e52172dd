//! Library surface of the `ifsm` binary: argument types, command
//! dispatch, and the operation ownership table the integration tests
//! check.

pub mod commands;
pub mod config;
