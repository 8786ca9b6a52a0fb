pub mod chain;
pub mod cli;
pub mod deviation;
pub mod equilibrium;
pub mod error;
pub mod etr;
pub mod mdp;
pub mod model;
pub mod payoff;
pub mod rational;
pub mod strategy;
pub mod structure;
