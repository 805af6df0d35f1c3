//! Lempel-Ziv backed posting storage.

pub mod backend;
pub mod lzend;
pub mod vlz;
pub mod vlzend;

pub use backend::{LzBackend, Lzma};
pub use lzend::{LzEndParse, Phrase};
pub use vlz::{VLzIndex, DEFAULT_MIN_BCS_SIZE};
pub use vlzend::VLzEndIndex;
