//! Posting lists over the gap codecs: optional bitmaps for long lists,
//! CM/ST sample directories, and the merge / set-vs-set / lookup
//! intersections.

pub mod bitmap;
pub mod cursor;
pub mod intersect;
pub mod samples;

pub use bitmap::Bitmap;
pub use cursor::{Cursor, ListCursor, SliceCursor};
pub use intersect::IntersectStats;
pub use samples::{CmEntry, CmSamples, StEntry, StSamples};

use crate::bytes::{ByteReader, ByteWriter};
use crate::codecs::{self, vbyte, CodecId, GapReader, MonotoneList};
use crate::{Error, Result};

/// Lists longer than `universe / len_bitmap_div` are stored as bitmaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HybridConfig {
    pub len_bitmap_div: u32,
}

impl Default for HybridConfig {
    fn default() -> Self {
        Self { len_bitmap_div: 8 }
    }
}

impl HybridConfig {
    pub fn new(len_bitmap_div: u32) -> Result<Self> {
        if len_bitmap_div == 0 {
            return Err(Error::Config("lenBitmapDiv must be >= 1".into()));
        }
        Ok(Self { len_bitmap_div })
    }

    /// `len > universe / div`, evaluated without rounding.
    pub fn wants_bitmap(&self, len: usize, universe: u32) -> bool {
        len as u64 * u64::from(self.len_bitmap_div) > u64::from(universe)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    #[default]
    None,
    /// List sampling every `k * ceil(log2 len)` elements.
    Cm { k: u32 },
    /// Domain sampling with buckets of width `2^ceil(log2(u * B / len))`.
    St { b: u32 },
}

impl Sampling {
    fn kind(self) -> u8 {
        match self {
            Sampling::None => 0,
            Sampling::Cm { .. } => 1,
            Sampling::St { .. } => 2,
        }
    }

    fn factor(self) -> u32 {
        match self {
            Sampling::None => 0,
            Sampling::Cm { k } => k,
            Sampling::St { b } => b,
        }
    }

    fn from_parts(kind: u8, factor: u32) -> Result<Self> {
        match kind {
            0 => Ok(Sampling::None),
            1 => Ok(Sampling::Cm { k: factor }),
            2 => Ok(Sampling::St { b: factor }),
            _ => Err(Error::corrupt(format!("unknown sampling kind {kind}"))),
        }
    }
}

/// How every list of a set is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ListConfig {
    pub codec: CodecId,
    /// Codec parameter; `None` lets the codec pick (per-list Rice `b`,
    /// default PforDelta block length).
    pub param: Option<u16>,
    pub sampling: Sampling,
    pub hybrid: Option<HybridConfig>,
}

impl ListConfig {
    pub fn plain(codec: CodecId) -> Self {
        Self {
            codec,
            param: None,
            sampling: Sampling::None,
            hybrid: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.sampling {
            Sampling::None => {}
            Sampling::Cm { .. } | Sampling::St { .. } if self.codec != CodecId::Vbyte => {
                return Err(Error::Config(format!(
                    "sampling requires Vbyte, not {}",
                    self.codec.name()
                )));
            }
            Sampling::St { b: 0 } => return Err(Error::Config("ST factor B must be >= 1".into())),
            _ => {}
        }
        if let Some(h) = self.hybrid {
            HybridConfig::new(h.len_bitmap_div)?;
        }
        Ok(())
    }

    /// Whether the per-list parameter is data dependent and must be stored.
    fn stores_param(&self) -> bool {
        self.param.is_none() && matches!(self.codec, CodecId::Rice | CodecId::RiceRuns)
    }

    fn fixed_param(&self) -> u16 {
        match (self.param, self.codec) {
            (Some(p), _) => p,
            (None, CodecId::PforDelta) => codecs::pfor::DEFAULT_THRESHOLD,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ListRepr {
    Encoded {
        codec: CodecId,
        param: u16,
        body: Vec<u8>,
    },
    Bitmap(Bitmap),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Samples {
    None,
    Cm(CmSamples),
    St(StSamples),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostingList {
    len: u32,
    universe: u32,
    repr: ListRepr,
    samples: Samples,
}

/// Vbyte body plus the byte offset of every element's code.
fn vbyte_with_offsets(gaps: &[u32]) -> (Vec<u8>, Vec<u32>) {
    let mut body = Vec::with_capacity(gaps.len() + gaps.len() / 4);
    let mut offsets = Vec::with_capacity(gaps.len());
    for &g in gaps {
        offsets.push(body.len() as u32);
        vbyte::write(&mut body, g);
    }
    (body, offsets)
}

pub fn build_list(list: &MonotoneList, cfg: &ListConfig) -> Result<PostingList> {
    cfg.validate()?;
    let values = list.values();
    let universe = list.universe();
    let len = u32::try_from(values.len()).map_err(|_| Error::Config("list too long".into()))?;
    if let Some(h) = cfg.hybrid {
        if h.wants_bitmap(values.len(), universe) {
            return Ok(PostingList {
                len,
                universe,
                repr: ListRepr::Bitmap(Bitmap::from_values(values, universe)),
                samples: Samples::None,
            });
        }
    }
    let gaps = codecs::to_gaps(values)?.0;
    let param = match cfg.param {
        Some(p) => p,
        None => cfg.codec.default_param(&gaps)?,
    };
    let (body, samples) = if cfg.codec == CodecId::Vbyte && cfg.sampling != Sampling::None {
        let (body, offsets) = vbyte_with_offsets(&gaps);
        let samples = if values.is_empty() {
            Samples::None
        } else {
            match cfg.sampling {
                Sampling::Cm { k } => Samples::Cm(CmSamples::build(k, values, &offsets)),
                Sampling::St { b } => Samples::St(StSamples::build(
                    b,
                    universe,
                    values,
                    &offsets,
                    body.len() as u32,
                )),
                Sampling::None => unreachable!(),
            }
        };
        (body, samples)
    } else {
        (codecs::encode(&gaps, cfg.codec, param)?, Samples::None)
    };
    Ok(PostingList {
        len,
        universe,
        repr: ListRepr::Encoded {
            codec: cfg.codec,
            param,
            body,
        },
        samples,
    })
}

impl PostingList {
    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn repr(&self) -> &ListRepr {
        &self.repr
    }

    pub fn samples(&self) -> &Samples {
        &self.samples
    }

    pub fn is_bitmap(&self) -> bool {
        matches!(self.repr, ListRepr::Bitmap(_))
    }

    pub fn fetch(&self) -> Result<Vec<u32>> {
        match &self.repr {
            ListRepr::Bitmap(bm) => Ok(bm.to_values()),
            ListRepr::Encoded { codec, param, body } => {
                let mut out = Vec::with_capacity(self.len as usize);
                let mut reader = GapReader::new(body, *codec, self.len as usize, *param)?;
                let mut acc = 0u32;
                while let Some((g, k)) = reader.next_run()? {
                    for _ in 0..k {
                        acc = acc
                            .checked_add(g)
                            .ok_or_else(|| Error::corrupt("list value exceeds 32 bits"))?;
                        out.push(acc);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Cursor that ignores any sample directory.
    pub fn sequential_cursor(&self) -> Result<ListCursor<'_>> {
        ListCursor::new(self, false)
    }

    /// Cursor that uses the sample directory when present.
    pub fn sampled_cursor(&self) -> Result<ListCursor<'_>> {
        ListCursor::new(self, true)
    }

    /// Serialized size in bytes under `cfg` (as written by [`PostingSet`]).
    pub fn stored_bytes(&self, cfg: &ListConfig) -> usize {
        let mut w = ByteWriter::new();
        self.write(&mut w, cfg);
        w.len()
    }

    fn write(&self, w: &mut ByteWriter, cfg: &ListConfig) {
        w.varint(u64::from(self.len));
        match &self.repr {
            ListRepr::Bitmap(bm) => {
                w.u8(1);
                let nbytes = (self.universe as usize).div_ceil(8);
                let raw: Vec<u8> = bm.words().iter().flat_map(|x| x.to_le_bytes()).collect();
                w.bytes(&raw[..nbytes]);
            }
            ListRepr::Encoded { param, body, .. } => {
                w.u8(0);
                if cfg.stores_param() {
                    w.varint(u64::from(*param));
                }
                w.block(body);
                match &self.samples {
                    Samples::None => {}
                    Samples::Cm(cm) => {
                        for e in &cm.entries {
                            w.u32(e.value);
                            w.u32(e.offset);
                        }
                    }
                    Samples::St(st) => {
                        for e in &st.buckets {
                            w.u32(e.idx);
                            w.u32(e.offset);
                            w.u32(e.prev);
                        }
                    }
                }
            }
        }
    }

    fn read(r: &mut ByteReader<'_>, universe: u32, cfg: &ListConfig) -> Result<Self> {
        let len = r.varint_u32()?;
        if len > universe {
            return Err(Error::corrupt("list longer than its universe"));
        }
        match r.u8()? {
            1 => {
                let nbytes = (universe as usize).div_ceil(8);
                let raw = r.take(nbytes)?;
                let mut words = vec![0u64; (universe as usize).div_ceil(64)];
                for (i, &b) in raw.iter().enumerate() {
                    words[i / 8] |= u64::from(b) << (8 * (i % 8));
                }
                let bm = Bitmap::from_words(words, universe);
                if bm.count_ones() != len {
                    return Err(Error::corrupt("bitmap popcount differs from list length"));
                }
                Ok(Self {
                    len,
                    universe,
                    repr: ListRepr::Bitmap(bm),
                    samples: Samples::None,
                })
            }
            0 => {
                let param = if cfg.stores_param() {
                    u16::try_from(r.varint()?).map_err(|_| Error::corrupt("codec param"))?
                } else {
                    cfg.fixed_param()
                };
                let body = r.block()?.to_vec();
                let samples = match cfg.sampling {
                    _ if len == 0 => Samples::None,
                    Sampling::None => Samples::None,
                    Sampling::Cm { k } => {
                        let period = samples::cm_period(k, len as usize);
                        let n = CmSamples::count_for(len as usize, period);
                        let mut entries = Vec::with_capacity(n);
                        for _ in 0..n {
                            entries.push(CmEntry {
                                value: r.u32()?,
                                offset: r.u32()?,
                            });
                        }
                        Samples::Cm(CmSamples { k, period, entries })
                    }
                    Sampling::St { b } => {
                        let shift = samples::st_shift(universe, b, len as usize);
                        let n = samples::st_bucket_count(universe, shift);
                        let mut buckets = Vec::with_capacity(n);
                        for _ in 0..n {
                            let e = StEntry {
                                idx: r.u32()?,
                                offset: r.u32()?,
                                prev: r.u32()?,
                            };
                            if e.idx > len || e.offset as usize > body.len() {
                                return Err(Error::corrupt("ST bucket out of range"));
                            }
                            buckets.push(e);
                        }
                        Samples::St(StSamples { b, shift, buckets })
                    }
                };
                if let Samples::Cm(cm) = &samples {
                    if cm.entries.iter().any(|e| e.offset as usize >= body.len()) {
                        return Err(Error::corrupt("CM sample offset out of range"));
                    }
                }
                Ok(Self {
                    len,
                    universe,
                    repr: ListRepr::Encoded {
                        codec: cfg.codec,
                        param,
                        body,
                    },
                    samples,
                })
            }
            k => Err(Error::corrupt(format!("unknown list kind {k}"))),
        }
    }
}

fn check_universe(lists: &[&PostingList]) -> Result<()> {
    if let Some(first) = lists.first() {
        for l in &lists[1..] {
            if l.universe != first.universe {
                return Err(Error::UniverseMismatch(
                    u64::from(first.universe),
                    u64::from(l.universe),
                ));
            }
        }
    }
    Ok(())
}

/// Intersection strategy over [`PostingList`]s.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Merge,
    Svs,
    Lookup,
}

pub fn intersect(
    algo: Algorithm,
    lists: &[&PostingList],
    stats: &mut IntersectStats,
) -> Result<Vec<u32>> {
    check_universe(lists)?;
    match algo {
        Algorithm::Merge => {
            let mut cs = lists
                .iter()
                .map(|l| l.sequential_cursor())
                .collect::<Result<Vec<_>>>()?;
            intersect::merge(&mut cs, stats)
        }
        Algorithm::Svs | Algorithm::Lookup => {
            if algo == Algorithm::Lookup {
                // Every list but the shortest needs domain samples or a bitmap.
                let shortest = (0..lists.len()).min_by_key(|&i| lists[i].len);
                for (i, l) in lists.iter().enumerate() {
                    if Some(i) != shortest
                        && !l.is_empty()
                        && !l.is_bitmap()
                        && !matches!(l.samples, Samples::St(_))
                    {
                        return Err(Error::MissingSamples(i));
                    }
                }
            }
            let mut cs = lists
                .iter()
                .map(|l| l.sampled_cursor())
                .collect::<Result<Vec<_>>>()?;
            intersect::svs(&mut cs, stats)
        }
    }
}

pub fn intersect_merge(lists: &[&PostingList]) -> Result<Vec<u32>> {
    intersect(Algorithm::Merge, lists, &mut IntersectStats::default())
}

pub fn intersect_svs(lists: &[&PostingList]) -> Result<Vec<u32>> {
    intersect(Algorithm::Svs, lists, &mut IntersectStats::default())
}

pub fn intersect_lookup(lists: &[&PostingList]) -> Result<Vec<u32>> {
    intersect(Algorithm::Lookup, lists, &mut IntersectStats::default())
}

const SET_MAGIC: &[u8; 4] = b"VXPL";

/// All lists of one index, sharing a universe and a [`ListConfig`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostingSet {
    pub config: ListConfig,
    pub universe: u32,
    pub lists: Vec<PostingList>,
}

impl PostingSet {
    pub fn build(lists: &[MonotoneList], universe: u32, config: ListConfig) -> Result<Self> {
        config.validate()?;
        let lists = lists
            .iter()
            .map(|l| {
                if l.universe() != universe {
                    return Err(Error::UniverseMismatch(
                        u64::from(universe),
                        u64::from(l.universe()),
                    ));
                }
                build_list(l, &config)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config,
            universe,
            lists,
        })
    }

    /// Header: magic, universe u32, codec u8, param u16 (0xFFFF = per list),
    /// sampling kind u8, sampling factor u32, lenBitmapDiv u32 (0 = none),
    /// list count varint; then each list.
    pub fn to_bytes(&self) -> Vec<u8> {
        let c = &self.config;
        let mut w = ByteWriter::new();
        w.bytes(SET_MAGIC);
        w.u32(self.universe);
        w.u8(c.codec as u8);
        w.u16(c.param.unwrap_or(u16::MAX));
        w.u8(c.sampling.kind());
        w.u32(c.sampling.factor());
        w.u32(c.hybrid.map_or(0, |h| h.len_bitmap_div));
        w.varint(self.lists.len() as u64);
        for l in &self.lists {
            l.write(&mut w, c);
        }
        w.into_inner()
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(buf);
        r.expect_magic(SET_MAGIC)?;
        let universe = r.u32()?;
        let codec = CodecId::from_u8(r.u8()?)?;
        let param = match r.u16()? {
            u16::MAX => None,
            p => Some(p),
        };
        let sampling = Sampling::from_parts(r.u8()?, r.u32()?)?;
        let hybrid = match r.u32()? {
            0 => None,
            d => Some(HybridConfig::new(d)?),
        };
        let config = ListConfig {
            codec,
            param,
            sampling,
            hybrid,
        };
        config
            .validate()
            .map_err(|e| Error::corrupt(format!("bad list config: {e}")))?;
        let n = r.varint_usize()?;
        let mut lists = Vec::with_capacity(n.min(r.remaining()));
        for _ in 0..n {
            lists.push(PostingList::read(&mut r, universe, &config)?);
        }
        if !r.is_at_end() {
            return Err(Error::corrupt("trailing bytes after posting lists"));
        }
        Ok(Self {
            config,
            universe,
            lists,
        })
    }
}
