//! Model selection with synthetic surrogate data.
//!
//! The crate has three layers:
//!
//! * exact finite-domain machinery ([`domain`], [`divergence`],
//!   [`rank_analysis`]) that checks when a ranking of two classifiers on a
//!   synthetic distribution must carry over to the real one;
//! * selection protocols over logged evaluation traces ([`selection`]),
//!   with a seeded trace simulator ([`trace_sim`]);
//! * file formats and a command-line front end ([`io_formats`], [`cli`]).
//!
//! All divergences are the un-halved L1 sum `Σ|μ_r − μ_s|`, which lies in
//! `[0, 2]`.

pub mod cli;
pub mod divergence;
pub mod domain;
pub mod error;
pub mod io_formats;
pub mod kmeans;
pub mod rank_analysis;
pub mod seed;
pub mod selection;
pub mod trace_sim;

pub use error::{Error, Result, SchemaError};
