//! Exact stochastic simulation and analysis of the voter model with bias and
//! cooperation (VMBC) on finite graphs.
//!
//! Two types compete on a finite vertex set: defectors (state 0) carry a
//! selection advantage `alpha`, cooperators (state 1) help neighbors reproduce
//! at rate `gamma`. The crate provides:
//!
//! * kernel construction and validation for tori and complete graphs
//!   ([`kernels`]),
//! * flip-rate evaluation for the cooperative, altruistic, kin-recognition
//!   and biased-voter variants ([`rates`]),
//! * an exact event-driven simulator with incremental rate caching
//!   ([`engine`]),
//! * a monotone coupling against a dominating biased voter model
//!   ([`coupling`]),
//! * the complete-graph frequency process and its logistic scaling limit
//!   ([`meanfield`]),
//! * one-dimensional cluster machinery: flank classification, comparison
//!   jump processes, extinction probabilities ([`cluster`]),
//! * pattern/frequency estimators for clustering diagnostics
//!   ([`observables`]).

pub mod cluster;
pub mod coupling;
pub mod engine;
mod error;
pub mod kernels;
pub mod meanfield;
pub mod observables;
pub mod rates;
pub mod stream;
pub mod sumtree;

pub use error::{Error, Result};
