//! Binary index files.
//!
//! All integers are little-endian:
//!
//! ```text
//! "FSIX"               magic
//! u32                  format version (1)
//! --- payload ---
//! u32                  fragment length m
//! u32, [u8; k]         alphabet size k and its letters
//! m x (u32, [u8; k])   per position: reduced-alphabet size, letter -> group table
//! u64                  N, number of bins
//! u64                  n, number of fragments
//! [u8; 32]             SHA-256 content hash of the sequence store
//! (N + 1) x u64        bin offsets
//! n x (u32, u32)       frag entries as (record, offset)
//! n x u8               lcp
//! --- end payload ---
//! u32                  CRC32 (IEEE) of the payload
//! ```
//!
//! Sequences are not stored; the index is re-attached to a store rebuilt
//! from the same FASTA and checked against the content hash.

use std::io::{Read, Write};
use std::sync::Arc;

use super::index::FsIndex;
use super::partition::PartitionScheme;
use crate::error::{Error, Result};
use crate::ingest::{FragmentRef, FragmentStore};
use crate::scoring::Alphabet;

pub const MAGIC: &[u8; 4] = b"FSIX";
pub const FORMAT_VERSION: u32 = 1;

/// Index arrays decoded from a file but not yet attached to a store.
#[derive(Debug, Clone)]
pub struct DetachedIndex {
    pub scheme: PartitionScheme,
    pub content_hash: [u8; 32],
    pub bin: Vec<u64>,
    pub frag: Vec<FragmentRef>,
    pub lcp: Vec<u8>,
}

impl DetachedIndex {
    pub fn frag_len(&self) -> usize {
        self.scheme.frag_len()
    }

    /// Checks the file against `store` and validates every array.
    pub fn attach(self, store: Arc<FragmentStore>) -> Result<FsIndex> {
        if self.frag_len() != store.frag_len() {
            return Err(Error::FragmentLengthMismatch {
                index: self.frag_len(),
                store: store.frag_len(),
            });
        }
        if self.scheme.alphabet() != store.alphabet() {
            return Err(Error::Format("alphabet differs from the sequence store".into()));
        }
        if &self.content_hash != store.content_hash() {
            return Err(Error::ContentMismatch);
        }
        let n = self.frag.len() as u64;
        if n != store.len() as u64 {
            return Err(Error::Format(format!(
                "index has {n} fragments, store has {}",
                store.len()
            )));
        }
        if self.bin.first() != Some(&0) || self.bin.last() != Some(&n) || self.bin.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Format("bin offsets are not a valid partition".into()));
        }
        let m = self.frag_len() as u8;
        for (f, &l) in self.frag.iter().zip(&self.lcp) {
            let rec = store.records().get(f.record as usize);
            let ok = rec.is_some_and(|r| f.offset as usize + m as usize <= r.residues.len());
            if !ok || l > m {
                return Err(Error::Format(format!("fragment entry {f:?} out of range")));
            }
        }
        Ok(FsIndex {
            scheme: self.scheme,
            store,
            bin: self.bin,
            frag: self.frag,
            lcp: self.lcp,
        })
    }
}

impl FsIndex {
    pub fn to_bytes(&self) -> Vec<u8> {
        let scheme = &self.scheme;
        let al = scheme.alphabet();
        let mut payload = Vec::with_capacity(64 + self.bin.len() * 8 + self.frag.len() * 9);
        put_u32(&mut payload, scheme.frag_len() as u32);
        put_u32(&mut payload, al.len() as u32);
        payload.extend_from_slice(al.letters());
        for pos in 0..scheme.frag_len() {
            put_u32(&mut payload, scheme.sizes()[pos] as u32);
            payload.extend_from_slice(scheme.table(pos));
        }
        put_u64(&mut payload, scheme.n_bins());
        put_u64(&mut payload, self.frag.len() as u64);
        payload.extend_from_slice(self.store.content_hash());
        for &b in &self.bin {
            put_u64(&mut payload, b);
        }
        for f in &self.frag {
            put_u32(&mut payload, f.record);
            put_u32(&mut payload, f.offset);
        }
        payload.extend_from_slice(&self.lcp);

        let mut out = Vec::with_capacity(payload.len() + 12);
        out.extend_from_slice(MAGIC);
        put_u32(&mut out, FORMAT_VERSION);
        out.extend_from_slice(&payload);
        put_u32(&mut out, crc32fast::hash(&payload));
        out
    }

    pub fn save<W: Write>(&self, mut sink: W) -> Result<()> {
        sink.write_all(&self.to_bytes())?;
        sink.flush()?;
        Ok(())
    }

    pub fn load<R: Read>(mut source: R, store: Arc<FragmentStore>) -> Result<FsIndex> {
        let mut bytes = Vec::new();
        source.read_to_end(&mut bytes)?;
        decode(&bytes)?.attach(store)
    }
}

/// Decodes an index file without a store.
pub fn decode(bytes: &[u8]) -> Result<DetachedIndex> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::Format("bad magic bytes".into()));
    }
    if bytes.len() < 12 {
        return Err(Error::Format("truncated header".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::Version(version));
    }
    let (payload, crc) = bytes[8..].split_at(bytes.len() - 12);
    let stored = u32::from_le_bytes(crc.try_into().unwrap());
    let computed = crc32fast::hash(payload);
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }

    let mut r = Reader { buf: payload, pos: 0 };
    let m = r.u32()? as usize;
    let k = r.u32()? as usize;
    let alphabet = Alphabet::new(r.bytes(k)?)?;
    let mut tables = Vec::with_capacity(m);
    let mut sizes = Vec::with_capacity(m);
    for _ in 0..m {
        sizes.push(r.u32()? as usize);
        tables.push(r.bytes(k)?.to_vec());
    }
    let scheme = PartitionScheme::from_tables(alphabet, tables)?;
    if scheme.sizes() != sizes.as_slice() {
        return Err(Error::Format("partition sizes disagree with tables".into()));
    }
    let n_bins = r.u64()?;
    if n_bins != scheme.n_bins() {
        return Err(Error::Format(format!("bin count {n_bins} disagrees with partitions")));
    }
    let n = r.u64()? as usize;
    let content_hash: [u8; 32] = r.bytes(32)?.try_into().unwrap();
    // Check the remaining length before allocating.
    let need = (n_bins as usize + 1) * 8 + n * 9;
    if r.remaining() != need {
        return Err(Error::Format(format!(
            "payload holds {} array bytes, expected {need}",
            r.remaining()
        )));
    }
    let bin = (0..=n_bins).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
    let frag = (0..n)
        .map(|_| {
            Ok(FragmentRef {
                record: r.u32()?,
                offset: r.u32()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lcp = r.bytes(n)?.to_vec();
    Ok(DetachedIndex {
        scheme,
        content_hash,
        bin,
        frag,
        lcp,
    })
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn bytes(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::Format("truncated payload".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes(8)?.try_into().unwrap()))
    }
}
