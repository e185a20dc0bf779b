//! Report documents and renderings behind the `telechan` binary.

pub mod output;
pub mod report;
