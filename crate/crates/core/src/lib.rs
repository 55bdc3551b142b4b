//! Physics-guided deep neural networks for thin-plate vibration.
//!
//! The crate is organized bottom-up:
//!
//! - [`physics`]: closed-form relations for simply-supported thin rectangular
//!   plates (flexural rigidity, weight, shear modulus, fundamental frequency).
//! - [`datagen`]: the 500-plate material/dimension grid, its train/test split,
//!   nested scarce subsets, the out-of-domain PWB test set, standardization
//!   and CSV I/O.
//! - [`nn`]: a 5-layer ReLU network that can concatenate physics features
//!   into the input of any subset of its layers, with exact backpropagation.
//! - [`optim`]: the Adam optimizer.
//! - [`trainer`]: one seeded training run, prediction and percentage-error
//!   evaluation.
//! - [`harness`]: the experiment grid, 50-seed ensembles and reporting.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod cli;
pub mod datagen;
pub mod error;
pub mod harness;
pub mod nn;
pub mod optim;
pub mod physics;
pub mod seed;
pub mod trainer;

pub use error::{Error, Result};
