//! Command-line front end for `gruss-core`: JSON formats for matrices and
//! maps, a rayon trial runner whose aggregates do not depend on the thread
//! count, and the `gruss-lab` binary's dispatch.

pub mod cli;
pub mod io;
pub mod runner;
