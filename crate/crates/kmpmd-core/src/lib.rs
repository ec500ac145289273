//! Core library for min-cost perfect k-way matching with delays (k-MPMD).
//!
//! The crate implements the deterministic primal-dual online algorithm GD-k
//! together with the exact machinery needed to verify its guarantees at desk
//! scale:
//!
//! * [`numerics`] — arbitrary-precision rational arithmetic used everywhere;
//!   no value in this crate is ever rounded.
//! * [`metrics`] — finite H-metric spaces (line diameter, max-pairwise, and
//!   minimum Hamiltonian circuit over a base metric), the induced pair
//!   metric, and brute-force verifiers for the H-metric axioms and the
//!   pair-metric sandwich inequality.
//! * [`instances`] — request sequences, validation, and generators including
//!   the adversarial family `sigma_l` and seeded random instances.
//! * [`gdk`] — the GD-k engine as an exact discrete-event simulation, plus
//!   dual-feasibility, potential, spanning-forest, and cost-accounting
//!   audits.
//! * [`offline`] — exact offline optimum by guarded brute force and the
//!   feasibility / sandwich checks that connect it to the LP relaxation.
//! * [`lp`] — explicit construction of the pairwise LP relaxation and an
//!   exact two-phase rational simplex, enabling verification of the chain
//!   D' <= P' <= OPT.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats, and the CLI
//! live in the companion `kmpmd-cli` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod gdk;
pub mod instances;
pub mod lp;
pub mod metrics;
pub mod numerics;
pub mod offline;
