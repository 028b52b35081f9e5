//! Behavioral models, simulators and a design-space explorer for an
//! ultra-low-power mixer-first OOK receiver front-end in the 401-406 MHz
//! MedRadio band.
//!
//! The crate is organised bottom-up:
//!
//! * [`linkbudget`]: path loss, sensitivity and SNR conversions
//! * [`devicemodels`]: LNA matching/trend model, N-path mixer noise, divider
//!   power, matching network and noise cascade
//! * [`npathsim`]: sample-level switched-RC simulation of the N-path mixer
//! * [`berlab`]: 8b/10b + OOK Monte Carlo BER
//! * [`explorer`]: whole-receiver evaluation, sweeps, Pareto and power optimisation
//! * [`cli`]: the `medrx` command-line front end

pub mod berlab;
pub mod cli;
pub mod config;
pub mod devicemodels;
pub mod error;
pub mod explorer;
pub mod linkbudget;
pub mod npathsim;
pub mod output;
pub mod rng;
pub mod special;
pub mod units;

pub use error::{Error, Result};
