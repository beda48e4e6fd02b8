//! Library surface of the command-line tool: spec-file parsing and report
//! formats, shared with the integration tests.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0)` rejects NaN too

pub mod output;
pub mod specfile;
