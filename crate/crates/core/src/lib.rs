//! Critical risk indicators (CRIs) from several infrastructure domains,
//! combined into a Granger-causality network and summarized by systemic
//! risk indicators (SRIs).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cri;
pub mod error;
pub mod fixture;
pub mod io;
pub mod series;
pub mod sri;
pub mod var;

pub use error::{Error, ErrorKind, Result};
