//! Waiter-Client positional games on graphs.
//!
//! The crate contains a game engine ([`game`], [`engine`]), certificate
//! validation, a pool of Client policies, the constructive Waiter strategies
//! (perfect matchings, Hamilton cycles, pancyclicity, spanning trees and tree
//! factors, triangle factors, biased Hamiltonicity and matchings) with their
//! runtime invariant probes, and an exact minimax solver for tiny boards.

pub mod biased;
pub mod certificate;
pub mod client;
pub mod engine;
pub mod game;
pub mod graph;
pub mod hamilton;
pub mod matching;
pub mod pancyclic;
pub mod registry;
pub mod solver;
pub mod strategy;
pub mod tree;
pub mod transcript;
pub mod triangle;

pub use certificate::{Certificate, RejectCode, Rejection};
pub use client::{ClientPolicy, Target};
pub use engine::{play, PlayError};
pub use game::{BoardKind, BoardSpec, GameError, GameState, Offer, Owner, RoundRecord};
pub use graph::{Edge, Vertex};
pub use registry::{ClientSpec, RunConfig, StrategySpec};
pub use transcript::Transcript;
pub use strategy::{CheckLog, Move, ProbeLevel, StrategyError, SubGame, WaiterStrategy};
