//! Compressed inverted indexes for highly repetitive (versioned) document
//! collections.
//!
//! The crate is organized bottom-up:
//!
//! - [`codecs`]: gap codecs (Vbyte, Rice, Rice-Runs, Simple9, PforDelta).
//! - [`postings`]: codec-backed lists with optional bitmaps and CM/ST sample
//!   directories, plus merge, set-vs-set and lookup intersections.
//! - [`repair`]: Re-Pair compression of all lists as one sequence, with skip
//!   data and sampled variants.
//! - [`lz`]: per-list Vbyte+LZMA storage and whole-collection Vbyte+LZ-End.
//! - [`text`]: Re-Pair compressed text with sampled extraction and a
//!   document map.
//! - [`index`]: tokenizer, vocabulary, non-positional and positional indexes.

pub mod bytes;
pub mod codecs;
pub mod error;
pub mod index;
pub mod lz;
pub mod postings;
pub mod repair;
pub mod text;

pub use error::{Error, Result};
