use std::io::{Read, Write};

use lzma_rust2::{LzmaOptions, LzmaReader, LzmaWriter};

use crate::{Error, Result};

/// General-purpose byte compressor used for per-list payloads.
pub trait LzBackend {
    fn name(&self) -> &'static str;
    fn compress(&self, data: &[u8]) -> Result<Vec<u8>>;
    fn decompress(&self, data: &[u8], original_len: usize) -> Result<Vec<u8>>;
}

/// Raw LZMA (no container header; the caller keeps the original length).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lzma {
    pub preset: u32,
}

impl Default for Lzma {
    fn default() -> Self {
        Self { preset: 6 }
    }
}

impl Lzma {
    /// Dictionary sized to the input so small lists stay cheap to set up.
    fn dict_size(len: usize) -> u32 {
        len.clamp(4096, 1 << 26) as u32
    }

    fn options(&self, len: usize) -> LzmaOptions {
        let mut opts = LzmaOptions::with_preset(self.preset);
        opts.dict_size = Self::dict_size(len);
        opts
    }
}

fn backend_err(e: impl std::fmt::Display) -> Error {
    Error::Backend(e.to_string())
}

impl LzBackend for Lzma {
    fn name(&self) -> &'static str {
        "lzma"
    }

    fn compress(&self, data: &[u8]) -> Result<Vec<u8>> {
        let opts = self.options(data.len());
        let mut w = LzmaWriter::new(Vec::new(), &opts, false, false, Some(data.len() as u64))
            .map_err(backend_err)?;
        w.write_all(data).map_err(backend_err)?;
        w.finish().map_err(backend_err)
    }

    fn decompress(&self, data: &[u8], original_len: usize) -> Result<Vec<u8>> {
        let opts = self.options(original_len);
        let mut r = LzmaReader::new_with_props(
            data,
            original_len as u64,
            opts.get_props(),
            opts.dict_size,
            None,
        )
        .map_err(backend_err)?;
        let mut out = Vec::with_capacity(original_len);
        r.read_to_end(&mut out).map_err(backend_err)?;
        if out.len() != original_len {
            return Err(Error::corrupt(format!(
                "lzma payload yielded {} bytes, expected {original_len}",
                out.len()
            )));
        }
        Ok(out)
    }
}
