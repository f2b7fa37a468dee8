use std::collections::BTreeMap;
use std::sync::Arc;

use super::partition::PartitionScheme;
use crate::error::{Error, Result};
use crate::ingest::{FragmentRef, FragmentStore};

/// Bin-sorted fragment index.
///
/// `frag` lists every fragment of the store grouped by bin rank; bin `u`
/// occupies `frag[bin[u]..bin[u + 1]]`, sorted lexicographically by letter
/// code with ties kept in store order. `lcp[i]` is the common prefix length
/// of `frag[i - 1]` and `frag[i]`, and is 0 at the first entry of each bin.
#[derive(Debug, Clone)]
pub struct FsIndex {
    pub(crate) scheme: PartitionScheme,
    pub(crate) store: Arc<FragmentStore>,
    pub(crate) bin: Vec<u64>,
    pub(crate) frag: Vec<FragmentRef>,
    pub(crate) lcp: Vec<u8>,
}

/// Shape statistics of a built index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinSummary {
    pub fragments: u64,
    pub bins: u64,
    pub non_empty_bins: u64,
    pub max_bin_size: u64,
    /// Bin size -> number of bins of that size (empty bins included).
    pub size_histogram: BTreeMap<u64, u64>,
}

impl FsIndex {
    pub fn build(store: Arc<FragmentStore>, scheme: PartitionScheme) -> Result<Self> {
        if store.frag_len() != scheme.frag_len() {
            return Err(Error::FragmentLengthMismatch {
                index: scheme.frag_len(),
                store: store.frag_len(),
            });
        }
        if store.alphabet() != scheme.alphabet() {
            return Err(Error::InvalidArgument("store and partition alphabets differ".into()));
        }
        let n_bins = scheme.n_bins() as usize;
        let n = store.len();

        // Count bin sizes, shifted by one so the prefix sum yields start offsets.
        let ranks: Vec<u64> = store
            .fragments()
            .iter()
            .map(|&f| scheme.rank_codes(store.codes(f)))
            .collect();
        let mut bin = vec![0u64; n_bins + 1];
        for &u in &ranks {
            bin[u as usize + 1] += 1;
        }
        for i in 1..=n_bins {
            bin[i] += bin[i - 1];
        }

        // Stable placement keeps store order inside each bin.
        let mut cursor = bin.clone();
        let mut frag = vec![FragmentRef { record: 0, offset: 0 }; n];
        for (&f, &u) in store.fragments().iter().zip(&ranks) {
            let slot = &mut cursor[u as usize];
            frag[*slot as usize] = f;
            *slot += 1;
        }

        let mut lcp = vec![0u8; n];
        for u in 0..n_bins {
            let (lo, hi) = (bin[u] as usize, bin[u + 1] as usize);
            if hi - lo < 2 {
                continue;
            }
            let entries = &mut frag[lo..hi];
            entries.sort_by(|&a, &b| store.codes(a).cmp(store.codes(b)));
            for i in lo + 1..hi {
                let (s, t) = (store.codes(frag[i - 1]), store.codes(frag[i]));
                lcp[i] = s.iter().zip(t).take_while(|(a, b)| a == b).count() as u8;
            }
        }

        Ok(FsIndex {
            scheme,
            store,
            bin,
            frag,
            lcp,
        })
    }

    pub fn scheme(&self) -> &PartitionScheme {
        &self.scheme
    }

    pub fn store(&self) -> &FragmentStore {
        &self.store
    }

    pub fn store_arc(&self) -> &Arc<FragmentStore> {
        &self.store
    }

    pub fn frag_len(&self) -> usize {
        self.scheme.frag_len()
    }

    pub fn len(&self) -> usize {
        self.frag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frag.is_empty()
    }

    pub fn n_bins(&self) -> u64 {
        self.scheme.n_bins()
    }

    pub fn bin_offsets(&self) -> &[u64] {
        &self.bin
    }

    pub fn frag(&self) -> &[FragmentRef] {
        &self.frag
    }

    pub fn lcp(&self) -> &[u8] {
        &self.lcp
    }

    /// Range of `frag` covered by bin `u`.
    #[inline]
    pub fn bin_range(&self, u: u64) -> std::ops::Range<usize> {
        self.bin[u as usize] as usize..self.bin[u as usize + 1] as usize
    }

    pub fn bin_len(&self, u: u64) -> usize {
        self.bin_range(u).len()
    }

    /// Fragments of bin `u` in index order.
    pub fn bin_entries(&self, u: u64) -> &[FragmentRef] {
        &self.frag[self.bin_range(u)]
    }

    pub fn summary(&self) -> BinSummary {
        let mut size_histogram = BTreeMap::new();
        let mut non_empty = 0;
        let mut max = 0;
        for w in self.bin.windows(2) {
            let s = w[1] - w[0];
            *size_histogram.entry(s).or_insert(0) += 1;
            non_empty += u64::from(s > 0);
            max = max.max(s);
        }
        BinSummary {
            fragments: self.frag.len() as u64,
            bins: self.n_bins(),
            non_empty_bins: non_empty,
            max_bin_size: max,
            size_histogram,
        }
    }

    /// Structural equality: same scheme, same store content, same arrays.
    pub fn same_structure(&self, other: &FsIndex) -> bool {
        self.scheme == other.scheme
            && self.store.content_hash() == other.store.content_hash()
            && self.store.frag_len() == other.store.frag_len()
            && self.bin == other.bin
            && self.frag == other.frag
            && self.lcp == other.lcp
    }
}
