//! Configuration, file formats and drivers for the `invnorm` command.

pub mod config;
pub mod files;
pub mod run;
pub mod selftest;
