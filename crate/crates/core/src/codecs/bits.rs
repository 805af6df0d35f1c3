//! MSB-first bit packing used by the Rice family and PforDelta slots.

use crate::{Error, Result};

#[derive(Default, Debug, Clone)]
pub struct BitWriter {
    buf: Vec<u8>,
    /// Number of bits already used in the last byte (0 means byte-aligned).
    used: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bit_len(&self) -> u64 {
        if self.used == 0 {
            self.buf.len() as u64 * 8
        } else {
            (self.buf.len() as u64 - 1) * 8 + u64::from(self.used)
        }
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.used == 0 {
            self.buf.push(0);
        }
        if bit {
            *self.buf.last_mut().unwrap() |= 0x80 >> self.used;
        }
        self.used = (self.used + 1) % 8;
    }

    /// Writes the low `width` bits of `v`, most significant first.
    pub fn push_bits(&mut self, v: u64, width: u32) {
        debug_assert!(width <= 64);
        let mut left = width;
        while left > 0 {
            if self.used == 0 {
                self.buf.push(0);
            }
            let room = 8 - self.used;
            let take = room.min(left);
            let chunk = ((v >> (left - take)) & ((1u64 << take) - 1)) as u8;
            *self.buf.last_mut().unwrap() |= chunk << (room - take);
            self.used = (self.used + take) % 8;
            left -= take;
        }
    }

    /// `q` one bits followed by a zero.
    pub fn push_unary(&mut self, mut q: u64) {
        while q >= 32 {
            self.push_bits(u64::from(u32::MAX), 32);
            q -= 32;
        }
        if q > 0 {
            self.push_bits((1u64 << q) - 1, q as u32);
        }
        self.push_bit(false);
    }

    /// Pads the final byte with zeros.
    pub fn align(&mut self) {
        self.used = 0;
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    buf: &'a [u8],
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn at(buf: &'a [u8], bit_pos: u64) -> Self {
        Self { buf, pos: bit_pos }
    }

    pub fn bit_pos(&self) -> u64 {
        self.pos
    }

    fn total_bits(&self) -> u64 {
        self.buf.len() as u64 * 8
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.total_bits() {
            return Err(Error::corrupt("bit stream truncated"));
        }
        let byte = self.buf[(self.pos / 8) as usize];
        let bit = byte & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, width: u32) -> Result<u64> {
        debug_assert!(width <= 64);
        if self.pos + u64::from(width) > self.total_bits() {
            return Err(Error::corrupt("bit stream truncated"));
        }
        let mut v = 0u64;
        let mut left = width;
        while left > 0 {
            let byte = self.buf[(self.pos / 8) as usize];
            let off = (self.pos % 8) as u32;
            let room = 8 - off;
            let take = room.min(left);
            let chunk = (byte >> (room - take)) & (((1u16 << take) - 1) as u8);
            v = (v << take) | u64::from(chunk);
            self.pos += u64::from(take);
            left -= take;
        }
        Ok(v)
    }

    /// Counts one bits up to (and consuming) the terminating zero.
    pub fn read_unary(&mut self) -> Result<u64> {
        let mut q = 0u64;
        loop {
            let byte_idx = (self.pos / 8) as usize;
            if byte_idx >= self.buf.len() {
                return Err(Error::corrupt("unterminated unary code"));
            }
            let off = (self.pos % 8) as u32;
            // Remaining bits of the current byte, left-aligned.
            let rest = self.buf[byte_idx] << off;
            let ones = rest.leading_ones().min(8 - off);
            q += u64::from(ones);
            self.pos += u64::from(ones);
            if ones < 8 - off {
                self.pos += 1;
                return Ok(q);
            }
        }
    }
}
