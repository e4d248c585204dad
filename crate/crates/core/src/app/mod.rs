//! Command-line facing pieces: certificate checking, file formats, random
//! instances and batch experiments.

pub mod verify;
pub mod format;
pub mod generate;
pub mod experiment;
