//! Named index representations and their parameters.

use std::fmt;
use std::str::FromStr;

use crate::codecs::{CodecId, MonotoneList};
use crate::lz::{VLzEndIndex, VLzIndex, DEFAULT_MIN_BCS_SIZE};
use crate::postings::{Algorithm, HybridConfig, ListConfig, PostingSet, Sampling};
use crate::repair::{Grammar, RePairConfig, RpVariant};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    NonPositional,
    Positional,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::NonPositional => "nonpos",
            Scenario::Positional => "pos",
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonpos" => Ok(Scenario::NonPositional),
            "pos" => Ok(Scenario::Positional),
            _ => Err(Error::Config(format!("unknown scenario {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Rice,
    RiceB,
    RiceRuns,
    Vbyte,
    VbyteB,
    VbyteCm,
    VbyteCmB,
    VbyteSt,
    VbyteStB,
    Simple9,
    PforDelta,
    VbyteLzma,
    VbyteLzend,
    RePair,
    RePairSkip,
    RePairSkipCm,
    RePairSkipSt,
}

impl Method {
    pub const ALL: [Method; 17] = [
        Method::Rice,
        Method::RiceB,
        Method::RiceRuns,
        Method::Vbyte,
        Method::VbyteB,
        Method::VbyteCm,
        Method::VbyteCmB,
        Method::VbyteSt,
        Method::VbyteStB,
        Method::Simple9,
        Method::PforDelta,
        Method::VbyteLzma,
        Method::VbyteLzend,
        Method::RePair,
        Method::RePairSkip,
        Method::RePairSkipCm,
        Method::RePairSkipSt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Rice => "Rice",
            Method::RiceB => "RiceB",
            Method::RiceRuns => "Rice-Runs",
            Method::Vbyte => "Vbyte",
            Method::VbyteB => "VbyteB",
            Method::VbyteCm => "Vbyte-CM",
            Method::VbyteCmB => "Vbyte-CMB",
            Method::VbyteSt => "Vbyte-ST",
            Method::VbyteStB => "Vbyte-STB",
            Method::Simple9 => "Simple9",
            Method::PforDelta => "PforDelta",
            Method::VbyteLzma => "Vbyte-LZMA",
            Method::VbyteLzend => "Vbyte-Lzend",
            Method::RePair => "RePair",
            Method::RePairSkip => "RePair-Skip",
            Method::RePairSkipCm => "RePair-Skip-CM",
            Method::RePairSkipSt => "RePair-Skip-ST",
        }
    }

    fn has_bitmaps(self) -> bool {
        matches!(
            self,
            Method::RiceB | Method::VbyteB | Method::VbyteCmB | Method::VbyteStB
        )
    }

    pub fn is_repair(self) -> bool {
        matches!(
            self,
            Method::RePair | Method::RePairSkip | Method::RePairSkipCm | Method::RePairSkipSt
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

/// A method with every parameter resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodConfig {
    pub method: Method,
    /// CM factor `k`.
    pub k: u32,
    /// ST factor `B`.
    pub b: u32,
    /// LZ-End sampling period.
    pub ds: u32,
    pub len_bitmap_div: u32,
    pub repair_break: f64,
    pub min_bcs_size: u32,
}

impl MethodConfig {
    /// Defaults follow the reported parameterizations for each scenario.
    pub fn new(method: Method, scenario: Scenario) -> Self {
        let pos = scenario == Scenario::Positional;
        let (k, b) = match method {
            Method::RePairSkipCm => (64, 0),
            Method::RePairSkipSt => (0, if pos { 256 } else { 1024 }),
            Method::VbyteCm | Method::VbyteCmB => (32, 0),
            Method::VbyteSt | Method::VbyteStB => (0, 128),
            _ => (0, 0),
        };
        let repair_break = match method {
            Method::RePairSkip | Method::RePairSkipCm | Method::RePairSkipSt => {
                if pos {
                    5e-7
                } else {
                    4e-7
                }
            }
            _ => 0.0,
        };
        Self {
            method,
            k,
            b,
            ds: if method == Method::VbyteLzend { 64 } else { 0 },
            len_bitmap_div: if method.has_bitmaps() { 8 } else { 0 },
            repair_break,
            min_bcs_size: if method == Method::VbyteLzma {
                DEFAULT_MIN_BCS_SIZE
            } else {
                0
            },
        }
    }

    /// Overrides one parameter by name (`k`, `B`, `ds`, `lenBitmapDiv`,
    /// `repairBreak`, `minbcssize`).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::Config(format!("bad value {value:?} for {key}"));
        let int = || value.parse::<u32>().map_err(|_| bad());
        match key {
            "k" => self.k = int()?,
            "B" | "b" => self.b = int()?,
            "ds" => self.ds = int()?,
            "lenBitmapDiv" => self.len_bitmap_div = int()?,
            "repairBreak" => self.repair_break = value.parse().map_err(|_| bad())?,
            "minbcssize" => self.min_bcs_size = int()?,
            _ => return Err(Error::Config(format!("unknown parameter {key:?}"))),
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(format!("{} requires {what}", self.method)))
            }
        };
        match self.method {
            Method::VbyteCm | Method::VbyteCmB | Method::RePairSkipCm => {
                need(self.k >= 1, "k >= 1")?
            }
            Method::VbyteSt | Method::VbyteStB | Method::RePairSkipSt => {
                need(self.b >= 1, "B >= 1")?
            }
            Method::VbyteLzend => need(self.ds >= 1, "ds >= 1")?,
            _ => {}
        }
        if self.method.has_bitmaps() {
            need(self.len_bitmap_div >= 1, "lenBitmapDiv >= 1")?;
        }
        need(
            self.repair_break.is_finite() && self.repair_break >= 0.0,
            "a finite non-negative repairBreak",
        )
    }

    /// Parameter string in the style of the ratio tables, empty if none.
    pub fn params(&self) -> String {
        let mut parts = Vec::new();
        match self.method {
            Method::VbyteCm | Method::VbyteCmB | Method::RePairSkipCm => {
                parts.push(format!("k={}", self.k))
            }
            Method::VbyteSt | Method::VbyteStB | Method::RePairSkipSt => {
                parts.push(format!("B={}", self.b))
            }
            Method::VbyteLzend => parts.push(format!("ds={}", self.ds)),
            Method::VbyteLzma => parts.push(format!("minbcssize={}", self.min_bcs_size)),
            _ => {}
        }
        if self.method.has_bitmaps() {
            parts.push(format!("lenBitmapDiv={}", self.len_bitmap_div));
        }
        if self.method.is_repair() && self.repair_break > 0.0 {
            parts.push(format!("repairBreak={:e}", self.repair_break));
        }
        parts.join(",")
    }

    /// Method name plus parameters, e.g. `Vbyte-CM[k=32]`.
    pub fn label(&self) -> String {
        let p = self.params();
        if p.is_empty() {
            self.method.name().to_string()
        } else {
            format!("{}[{p}]", self.method.name())
        }
    }

    fn list_config(&self) -> Option<(ListConfig, Algorithm)> {
        let hybrid = self.method.has_bitmaps().then_some(HybridConfig {
            len_bitmap_div: self.len_bitmap_div,
        });
        let (codec, sampling, algo) = match self.method {
            Method::Rice | Method::RiceB => (CodecId::Rice, Sampling::None, Algorithm::Merge),
            Method::RiceRuns => (CodecId::RiceRuns, Sampling::None, Algorithm::Merge),
            Method::Vbyte | Method::VbyteB => (CodecId::Vbyte, Sampling::None, Algorithm::Merge),
            Method::VbyteCm | Method::VbyteCmB => {
                (CodecId::Vbyte, Sampling::Cm { k: self.k }, Algorithm::Svs)
            }
            Method::VbyteSt | Method::VbyteStB => (
                CodecId::Vbyte,
                Sampling::St { b: self.b },
                Algorithm::Lookup,
            ),
            Method::Simple9 => (CodecId::Simple9, Sampling::None, Algorithm::Merge),
            Method::PforDelta => (CodecId::PforDelta, Sampling::None, Algorithm::Merge),
            _ => return None,
        };
        Some((
            ListConfig {
                codec,
                param: None,
                sampling,
                hybrid,
            },
            algo,
        ))
    }

    fn repair_config(&self) -> Option<RePairConfig> {
        let variant = match self.method {
            Method::RePair => RpVariant::Plain,
            Method::RePairSkip => RpVariant::Skip,
            Method::RePairSkipCm => RpVariant::SkipCm { k: self.k },
            Method::RePairSkipSt => RpVariant::SkipSt { b: self.b },
            _ => return None,
        };
        Some(RePairConfig::new(variant, self.repair_break))
    }

    /// Builds the posting store for `lists` over `universe`.
    pub fn build(&self, lists: &[MonotoneList], universe: u32) -> Result<PostingStore> {
        self.validate()?;
        if let Some((cfg, algo)) = self.list_config() {
            return Ok(PostingStore::Lists(
                PostingSet::build(lists, universe, cfg)?,
                algo,
            ));
        }
        if let Some(cfg) = self.repair_config() {
            let gaps = lists
                .iter()
                .map(|l| crate::codecs::to_gaps(l.values()))
                .collect::<Result<Vec<_>>>()?;
            return Ok(PostingStore::RePair(Grammar::build(&gaps, universe, cfg)?));
        }
        match self.method {
            Method::VbyteLzma => Ok(PostingStore::Lzma(VLzIndex::build(
                lists,
                universe,
                self.min_bcs_size,
            )?)),
            Method::VbyteLzend => Ok(PostingStore::Lzend(VLzEndIndex::build(
                lists, universe, self.ds,
            )?)),
            _ => unreachable!("every method has a store"),
        }
    }

    /// Intersection algorithm used for list-based stores.
    pub fn algorithm(&self) -> Option<Algorithm> {
        self.list_config().map(|(_, a)| a)
    }
}

/// The serialized posting lists of an index, in whichever family.
#[derive(Debug, Clone, PartialEq)]
pub enum PostingStore {
    Lists(PostingSet, Algorithm),
    RePair(Grammar),
    Lzma(VLzIndex),
    Lzend(VLzEndIndex),
}

impl PostingStore {
    pub fn num_lists(&self) -> usize {
        match self {
            PostingStore::Lists(s, _) => s.lists.len(),
            PostingStore::RePair(g) => g.num_lists(),
            PostingStore::Lzma(v) => v.num_lists(),
            PostingStore::Lzend(v) => v.num_lists(),
        }
    }

    pub fn list_len(&self, i: usize) -> usize {
        match self {
            PostingStore::Lists(s, _) => s.lists[i].len(),
            PostingStore::RePair(g) => g.list_len(i),
            PostingStore::Lzma(v) => v.list_len(i),
            PostingStore::Lzend(v) => v.list_len(i),
        }
    }

    pub fn universe(&self) -> u32 {
        match self {
            PostingStore::Lists(s, _) => s.universe,
            PostingStore::RePair(g) => g.universe(),
            PostingStore::Lzma(v) => v.universe(),
            PostingStore::Lzend(v) => v.universe(),
        }
    }

    pub fn fetch(&self, i: usize) -> Result<Vec<u32>> {
        if i >= self.num_lists() {
            return Err(Error::OutOfRange {
                what: "list",
                index: i as u64,
                limit: self.num_lists() as u64,
            });
        }
        match self {
            PostingStore::Lists(s, _) => s.lists[i].fetch(),
            PostingStore::RePair(g) => g.fetch(i),
            PostingStore::Lzma(v) => v.fetch(i),
            PostingStore::Lzend(v) => v.fetch(i),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            PostingStore::Lists(s, _) => s.to_bytes(),
            PostingStore::RePair(g) => g.to_bytes(),
            PostingStore::Lzma(v) => v.to_bytes(),
            PostingStore::Lzend(v) => v.to_bytes(),
        }
    }

    /// Reads a store written for `cfg`.
    pub fn from_bytes(buf: &[u8], cfg: &MethodConfig) -> Result<Self> {
        if let Some((_, algo)) = cfg.list_config() {
            return Ok(PostingStore::Lists(PostingSet::from_bytes(buf)?, algo));
        }
        if cfg.repair_config().is_some() {
            return Ok(PostingStore::RePair(Grammar::from_bytes(buf)?));
        }
        match cfg.method {
            Method::VbyteLzma => Ok(PostingStore::Lzma(VLzIndex::from_bytes(buf)?)),
            _ => Ok(PostingStore::Lzend(VLzEndIndex::from_bytes(buf)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip_and_defaults() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            MethodConfig::new(m, Scenario::NonPositional)
                .validate()
                .unwrap();
            MethodConfig::new(m, Scenario::Positional)
                .validate()
                .unwrap();
        }
        let c = MethodConfig::new(Method::RePairSkipSt, Scenario::NonPositional);
        assert_eq!(c.label(), "RePair-Skip-ST[B=1024,repairBreak=4e-7]");
        let mut c = MethodConfig::new(Method::VbyteCm, Scenario::Positional);
        c.set("k", "4").unwrap();
        assert_eq!(c.label(), "Vbyte-CM[k=4]");
        assert!(c.set("k", "0").is_err());
        assert!(c.set("zz", "1").is_err());
    }
}
