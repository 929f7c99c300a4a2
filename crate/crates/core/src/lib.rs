//! Modeling and verification toolkit for cavity electro-optic
//! microwave-optical transduction.
//!
//! The physical system is a whispering-gallery-mode optical resonator
//! embedded in a superconducting microwave cavity. A strong optical pump
//! activates a three-wave-mixing interaction that converts photons between
//! a microwave mode and an optical sideband mode. This crate evaluates the
//! closed-form figures of merit of that process and cross-checks every one
//! of them against an independent time-domain integrator:
//!
//! * [`model`] — shared mode/pump/operating-point types and unit rules
//! * [`electrooptic`] — single-photon coupling rate from an azimuthal field
//!   profile, and the microwave quality-factor budget
//! * [`converter`] — pump photon number, cooperativity, conversion
//!   efficiency (on- and off-resonance), bandwidth, coupling/power sweeps
//! * [`dynamics`] — adaptive Runge-Kutta integrator for the coupled-mode
//!   equations, used as a brute-force oracle for the closed forms
//! * [`qed`] — dispersive readout of a transmon through the transducer
//! * [`entanglement`] — heralded-entanglement counting statistics plus a
//!   seeded Monte Carlo cross-check
//! * [`sensing`] — microwave detection noise spectra, quantum-limit floors,
//!   and the back-action-evading variant
//!
//! The [`figures`], [`sweep`], [`report`] and [`manifest`] modules back the
//! `cavity-eo` command-line tool, which emits machine-readable CSV tables
//! and a reproducibility manifest for every run.
//!
//! Unit convention: all frequencies and rates inside the library are
//! angular (rad/s). Every user-facing surface (CLI keys, config files, CSV
//! columns) uses plain Hz; the factor of 2π is applied exactly once at that
//! boundary.

// Validation deliberately writes `!(x > 0.0)` so NaN fails the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod constants;
pub mod converter;
pub mod csvout;
pub mod dynamics;
pub mod electrooptic;
pub mod entanglement;
pub mod error;
pub mod figures;
pub mod manifest;
pub mod model;
pub mod optimize;
pub mod parallel;
pub mod qed;
pub mod report;
pub mod sensing;
pub mod sweep;

pub use error::{Error, Result};
