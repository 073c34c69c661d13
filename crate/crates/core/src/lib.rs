//! General game engine with optimised Monte-Carlo playouts.
//!
//! Games are written in a small S-expression ludeme language ([`gdl`]),
//! compiled into an interpreter ([`engine`], [`ludemes`]) and played out by
//! one of four playout implementations ([`playout`]). Which optimised
//! implementation a game admits is detected from the shape of its rules
//! ([`detect`]).

pub mod bench;
pub mod corpus;
pub mod detect;
pub mod engine;
pub mod gdl;
pub mod ludemes;
pub mod mcts;
pub mod playout;
pub mod policy;
