//! Statistical-query learning laboratory over explicit Boolean domains.
//!
//! Everything here works on dense truth tables over `{0,1}^n`: functions,
//! distributions, statistical-query oracles, the approximating-set
//! constructions, SQ dimension computations and a Valiant-style evolution
//! engine built on the SelNB selection rule.
//!
//! Module map:
//!
//! * [`fnspace`] - domains, Boolean/real tables, the `D`-weighted inner product.
//! * [`oracles`] - `STAT(f, D)` and `STAT(A)` oracles plus query decomposition.
//! * [`sqcore`] - approximating-set extraction, the projected learner,
//!   the exhaustive CSQ baseline and the weak agnostic learner.
//! * [`dimensions`] - SQ-DIM, SQD bounds, shifted sets and parity witnesses.
//! * [`evolve`] - fitness, mutation algorithms, SelNB and evolution runs.
//! * [`harness`] - experiment configuration, batch runs and export.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dimensions;
pub mod error;
pub mod evolve;
pub mod fnspace;
pub mod harness;
pub mod oracles;
pub mod par;
pub mod rng;
pub mod sqcore;

pub use error::{Error, Result};
