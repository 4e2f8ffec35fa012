//! Obstructions to unknotting a knot with a single full twist.
//!
//! A single twist on strands passing through an unknotted circle of linking
//! number `l` and sign `±` is recorded as the index `l^±`. This crate decides,
//! from a knot's classical and Heegaard Floer invariants, which indices are
//! obstructed:
//!
//! * [`numeric`] — exact rationals, residue brackets, piecewise-linear
//!   functions, rank-2 symmetric forms;
//! * [`knot_model`] — the invariant record, torus-knot generators,
//!   mirror/connected-sum combinators, dataset ingestion;
//! * [`signature_engine`] — Tristram–Levine signatures of torus knots by
//!   lattice counting, plus sample dispatch;
//! * [`classical_obstructions`] — Arf, signature, gcd, genus and
//!   branched-cover rank obstructions;
//! * [`forms_and_d`] — linking forms, lens-space d-invariants, characteristic
//!   covector minimization, d-invariant matching;
//! * [`floer_engine`] — V-sequence constraints, partner-V feasibility,
//!   Upsilon bounds, the alternating table;
//! * [`engine`] — candidate generation, the obstruction pipeline, reports and
//!   table reproduction.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so the whole crate is safe to use from concurrent readers.

pub mod classical_obstructions;
pub mod engine;
pub mod floer_engine;
pub mod forms_and_d;
pub mod knot_model;
pub mod numeric;
pub mod signature_engine;

pub use engine::{analyze, candidates, reproduce_table, AnalysisConfig, AnalysisReport};
pub use knot_model::{KnotRecord, Sign, TwistIndex, TwistVerdict, VerdictStatus};
pub use numeric::{Form2, PLFunction, Rational};
