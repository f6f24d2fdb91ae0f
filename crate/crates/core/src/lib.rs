//! Thickness of compact sets in `ℝ^d` defined through systems of balls.
//!
//! The crate builds systems of balls for self-similar sets, 1-D Cantor sets
//! and their images, computes certified enclosures of hole radii and
//! thickness, runs the constructive Gap Lemma to produce intersection
//! witnesses, and evaluates the closed-form bounds that follow from
//! thickness (dimension, perturbation, distance sets, potential games and
//! patterns).

pub mod ballsystem;
pub mod cli;
pub mod dimension;
pub mod selfsimilar;
pub mod metrics;
pub mod error;
pub mod game;
pub mod gaplemma;
pub mod geometry;

pub use error::{Error, Result};
