pub mod cli;
pub mod fixtures;
pub mod geometry;
pub mod mapping;
pub mod model;
pub mod quantum;
pub mod rational;

pub use rational::Rational;
