//! File formats, verdict documents, and executable demos behind the
//! `orbits` command-line tool.
//!
//! Everything the binary prints on standard output is machine-readable and
//! self-contained: verdict documents echo their inputs and embed the
//! certificate or witness, so [`formats::check_document`] can re-validate a
//! decision without re-running it.

pub mod demos;
pub mod formats;
