//! End-to-end glue: dataset files, the four-stage streaming pipeline,
//! simulation drivers and the command-line interface.

pub mod cli;
pub mod dataset;
pub mod demo;
pub mod pipeline;
pub mod runconfig;
pub mod samples;
pub mod sim;
