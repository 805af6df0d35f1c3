//! Compressed document text with sampled random access, and the mapping
//! from absolute positions to documents.

pub mod docmap;
pub mod store;

pub use docmap::{merge_occs_to_docs, DocMap};
pub use store::{ExtractStats, TextStore};
