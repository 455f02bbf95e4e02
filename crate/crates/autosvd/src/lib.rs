//! Hybrid collaborative filtering: latent-factor rating models whose item
//! vectors are anchored by content representations from a contractive
//! auto-encoder.
//!
//! The crate covers the full pipeline:
//!
//! * [`dataset`] — rating/content file ingestion, dense re-indexing, seeded
//!   train/test splits.
//! * [`cae`] — a single-hidden-layer contractive auto-encoder over item
//!   content, and feature extraction from its encoder.
//! * [`factor`] — four SGD-trained rating models (`biased_svd`, `svdpp`,
//!   `autosvd`, `autosvdpp`), including an efficient per-user batched
//!   trainer for the implicit-feedback variants.
//! * [`eval`] — RMSE, end-to-end experiment runs, epoch benchmarking, and
//!   report emission.
//! * [`cli`] — the `prepare` / `train-cae` / `train` / `evaluate` /
//!   `benchmark` subcommands behind the `autosvd` binary.
//!
//! Start with the runnable walkthroughs in `examples/`:
//!
//! ```text
//! examples/
//!   dataset_basics.rs            load, inspect and split a ratings file
//!   content_features.rs          item content -> auto-encoder -> features
//!   train_biased_svd.rs          the plain baseline, epoch by epoch
//!   train_autosvd.rs             content-anchored item vectors
//!   train_autosvdpp_efficient.rs implicit feedback, naive vs batched trainer
//!   benchmark_epoch.rs           relative epoch cost of every variant
//!   evaluate_ml100k.rs           full experiment on a real dataset (path arg)
//! ```
//!
//! Minimal end-to-end use:
//!
//! ```no_run
//! use autosvd::dataset::{load_ratings, split, RatingFormat, SplitSpec};
//! use autosvd::eval::test_rmse;
//! use autosvd::factor::{train, TrainConfig, Trainer, Variant};
//!
//! # fn main() -> autosvd::Result<()> {
//! let ds = load_ratings("u.data".as_ref(), RatingFormat::Ml100kTab)?;
//! let (tr, te) = split(&ds, &SplitSpec::new(0.9, 42))?;
//! let cfg = TrainConfig::for_variant(Variant::BiasedSvd);
//! let (model, trace) = train(Variant::BiasedSvd, &tr, &cfg, None, Trainer::Naive)?;
//! println!(
//!     "test rmse {:.4} after {} epochs",
//!     test_rmse(&model, &tr, &te, true, false)?,
//!     trace.len()
//! );
//! # Ok(())
//! # }
//! ```
//!
//! Every model run is deterministic for a fixed seed: same split, same
//! initialization, same visit order, bit-identical parameters.

// The SGD kernels index flat row-major arrays with plain `for f in 0..k`
// loops that mirror the update formulas; iterator rewrites obscure them.
#![allow(clippy::needless_range_loop)]

pub mod cae;
pub mod cli;
pub mod dataset;
pub mod eval;
pub mod factor;
pub mod store;

mod error;

pub use error::{Error, Result};
