//! Command-line companion to `kmpmd-core`: instance files, reports, CSV
//! benchmarking, and the `kmpmd` binary's argument handling.
//!
//! The core crate holds all the mathematics; this crate only reads and
//! writes documents around it. Instances travel as JSON with every number
//! rendered as an exact rational string, reports mirror the audit
//! structures one to one, and the bench sweep flattens runs into CSV rows.
//!
//! # Examples
//! ```
//! use kmpmd_cli::formats::{load_instance, save_instance};
//! use kmpmd_core::instances::gen_adversarial_line;
//! use kmpmd_core::numerics::rat;
//!
//! let instance = gen_adversarial_line(2, 1, rat(1, 100)).unwrap();
//! let text = save_instance(&instance);
//! let back = load_instance(&text).unwrap();
//! assert_eq!(save_instance(&back), text);
//! ```

pub mod bench;
pub mod cli;
pub mod formats;
pub mod lowerbound;
