//! Deterministic, seedable e-marketplace testbed for evaluating the robustness
//! of trust models against unfair-rating attacks.
//!
//! A "Duopoly Market" hosts one honest and one dishonest duopoly seller plus a
//! field of common sellers. Honest buyers pick between the duopoly pair with a
//! configurable trust model while attacker entities inject unfair ratings
//! following one of six strategies. Robustness of a (defense, attack) pairing
//! is the normalized transaction-volume gap between the two duopoly sellers.

pub mod acceptance;
pub mod attack;
pub mod beta;
pub mod experiment;
pub mod ledger;
pub mod models;
pub mod sim;
