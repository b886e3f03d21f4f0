//! Uniform filtering of p-values.
//!
//! Deleting the p-values nearest to a regular grid thins the uniform null
//! background and leaves clusters of alternatives standing out. This crate
//! samples two-group mixtures, runs the fixed-length and random filters,
//! estimates the mode of the alternative p-values with a kernel density
//! estimate, and picks an interval rejection region around that mode under
//! a data-dependent FDR estimate. Monte Carlo drivers reproduce the
//! published remaining-alternatives and Cauchy pipeline tables.
//!
//! ```
//! use unifilter::{mixtures::{sample_pvalues, MixtureModel}, pipeline::{analyze, AnalysisConfig}};
//!
//! let model = MixtureModel::cauchy(0.15, 10.0)?;
//! let sample = sample_pvalues(&model, 1000, 7)?;
//! let analysis = analyze(&sample, &AnalysisConfig::new(0.15, 0.1))?;
//! assert!(analysis.report.fdr_hat <= 0.1);
//! # Ok::<(), unifilter::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::type_complexity)]

pub mod cli;
pub mod density;
pub mod error;
pub mod fdr;
pub mod filters;
pub mod gaps;
pub mod mixtures;
pub mod pipeline;
pub mod reference;
pub mod rng;
pub mod sim;
pub mod special;

pub use error::{Error, Result};
