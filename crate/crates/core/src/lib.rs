//! Numerical toolkit for metric jets: tangency of maps between metric spaces,
//! contacts on contracting spaces and the differentiability ladder they induce.

mod handle;
mod search;

pub mod catalog;
pub mod classify;
pub mod contact;
pub mod extrema;
pub mod spaces;
pub mod tangency;

pub use handle::FunctionHandle;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
