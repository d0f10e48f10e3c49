pub mod binary;
pub mod bounds;
pub mod constants;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod kernel;
pub mod resolution;
pub mod resources;
pub mod statevector;
pub mod cli;
