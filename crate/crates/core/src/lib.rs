//! Primitives for label-efficient two-sample testing.
//!
//! The pipeline this crate supports has three stages: model class
//! posteriors from a small uniformly labeled seed set ([`posterior`]),
//! spend the remaining label budget with a query scheme ([`query`]),
//! and run the Friedman-Rafsky minimum-spanning-tree test on the
//! labeled subset ([`geometry`], [`fr`]). The [`theory`] module holds
//! closed-form expectations used to sanity-check the query schemes.
//!
//! The crate is `no_std`-compatible (`alloc` required); disable the
//! default `std` feature for embedded use. All transcendental math goes
//! through `libm`, so results are bit-identical with and without `std`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod fr;
pub mod geometry;
mod math;
pub mod posterior;
pub mod query;
pub mod theory;

pub use error::{Error, Result};
