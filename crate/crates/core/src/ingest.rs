//! FASTA parsing and extraction of fixed-length fragments.

use std::io::BufRead;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scoring::{Alphabet, INVALID};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceRecord {
    pub id: String,
    pub description: String,
    pub residues: String,
}

/// Parses FASTA text. Residues are upper-cased and whitespace is removed.
pub fn parse_fasta(text: &str) -> Result<Vec<SequenceRecord>> {
    parse_fasta_reader(text.as_bytes())
}

pub fn parse_fasta_reader<R: BufRead>(reader: R) -> Result<Vec<SequenceRecord>> {
    let mut records: Vec<SequenceRecord> = Vec::new();
    let mut header_line = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end();
        if let Some(header) = line.strip_prefix('>') {
            if let Some(prev) = records.last() {
                if prev.residues.is_empty() {
                    return Err(Error::Parse {
                        line: header_line,
                        msg: format!("record '{}' has no residues", prev.id),
                    });
                }
            }
            let header = header.trim();
            let (id, description) = match header.split_once(char::is_whitespace) {
                Some((id, rest)) => (id.to_string(), rest.trim().to_string()),
                None => (header.to_string(), String::new()),
            };
            if id.is_empty() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "empty sequence id".into(),
                });
            }
            header_line = i + 1;
            records.push(SequenceRecord {
                id,
                description,
                residues: String::new(),
            });
        } else if !line.trim().is_empty() {
            let Some(rec) = records.last_mut() else {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "sequence before first header".into(),
                });
            };
            rec.residues.extend(
                line.chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| c.to_ascii_uppercase()),
            );
        }
    }
    match records.last() {
        None => Err(Error::Empty("FASTA input")),
        Some(r) if r.residues.is_empty() => Err(Error::Parse {
            line: header_line,
            msg: format!("record '{}' has no residues", r.id),
        }),
        Some(_) => Ok(records),
    }
}

/// A fragment of the store: the window of `m` residues of record `record`
/// starting at 0-based `offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FragmentRef {
    pub record: u32,
    pub offset: u32,
}

/// The fragment dataset: every length-`m` window whose letters all belong to
/// the alphabet. Duplicate windows are kept as separate points.
#[derive(Debug, Clone)]
pub struct FragmentStore {
    alphabet: Alphabet,
    records: Vec<SequenceRecord>,
    encoded: Vec<Vec<u8>>,
    frag_len: usize,
    fragments: Vec<FragmentRef>,
    background: Option<Vec<f64>>,
    rejected_windows: usize,
    content_hash: [u8; 32],
}

impl FragmentStore {
    pub fn build(records: Vec<SequenceRecord>, frag_len: usize) -> Result<Self> {
        Self::build_with(records, frag_len, Alphabet::protein())
    }

    pub fn build_with(records: Vec<SequenceRecord>, frag_len: usize, alphabet: Alphabet) -> Result<Self> {
        if frag_len < 1 {
            return Err(Error::InvalidArgument("fragment length must be at least 1".into()));
        }
        if frag_len > u8::MAX as usize {
            return Err(Error::InvalidArgument(format!(
                "fragment length {frag_len} exceeds {}",
                u8::MAX
            )));
        }
        if records.len() > u32::MAX as usize {
            return Err(Error::InvalidArgument("too many records".into()));
        }
        let encoded: Vec<Vec<u8>> = records
            .iter()
            .map(|r| r.residues.bytes().map(|b| alphabet.code_or_invalid(b)).collect())
            .collect();

        let mut fragments = Vec::new();
        let mut rejected = 0;
        for (ri, seq) in encoded.iter().enumerate() {
            if seq.len() < frag_len {
                continue;
            }
            if seq.len() > u32::MAX as usize {
                return Err(Error::InvalidArgument(format!("record {} is too long", records[ri].id)));
            }
            // Number of foreign letters inside the current window.
            let mut bad = seq[..frag_len].iter().filter(|&&c| c == INVALID).count();
            for off in 0..=seq.len() - frag_len {
                if off > 0 {
                    bad -= usize::from(seq[off - 1] == INVALID);
                    bad += usize::from(seq[off + frag_len - 1] == INVALID);
                }
                if bad == 0 {
                    fragments.push(FragmentRef {
                        record: ri as u32,
                        offset: off as u32,
                    });
                } else {
                    rejected += 1;
                }
            }
        }

        let content_hash = content_hash(&records);
        let mut store = FragmentStore {
            alphabet,
            records,
            encoded,
            frag_len,
            fragments,
            background: None,
            rejected_windows: rejected,
            content_hash,
        };
        if !store.fragments.is_empty() {
            store.background = Some(store.count_background());
        }
        Ok(store)
    }

    /// Each fragment string becomes its own record, named `f0`, `f1`, ...
    pub fn from_fragments<S: AsRef<str>>(alphabet: Alphabet, fragments: &[S], frag_len: usize) -> Result<Self> {
        let records = fragments
            .iter()
            .enumerate()
            .map(|(i, f)| SequenceRecord {
                id: format!("f{i}"),
                description: String::new(),
                residues: f.as_ref().to_ascii_uppercase(),
            })
            .collect();
        Self::build_with(records, frag_len, alphabet)
    }

    fn count_background(&self) -> Vec<f64> {
        let mut counts = vec![0u64; self.alphabet.len()];
        for f in &self.fragments {
            for &c in self.codes(*f) {
                counts[c as usize] += 1;
            }
        }
        let total: u64 = counts.iter().sum();
        counts.iter().map(|&c| c as f64 / total as f64).collect()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn records(&self) -> &[SequenceRecord] {
        &self.records
    }

    pub fn frag_len(&self) -> usize {
        self.frag_len
    }

    pub fn fragments(&self) -> &[FragmentRef] {
        &self.fragments
    }

    pub fn len(&self) -> usize {
        self.fragments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fragments.is_empty()
    }

    /// Windows of length `m` skipped because they touch a foreign letter.
    pub fn rejected_windows(&self) -> usize {
        self.rejected_windows
    }

    /// SHA-256 over record ids and residues.
    pub fn content_hash(&self) -> &[u8; 32] {
        &self.content_hash
    }

    /// Letter codes of a fragment.
    #[inline]
    pub fn codes(&self, f: FragmentRef) -> &[u8] {
        let off = f.offset as usize;
        &self.encoded[f.record as usize][off..off + self.frag_len]
    }

    pub fn fragment_text(&self, f: FragmentRef) -> &str {
        let off = f.offset as usize;
        &self.records[f.record as usize].residues[off..off + self.frag_len]
    }

    pub fn record_id(&self, f: FragmentRef) -> &str {
        &self.records[f.record as usize].id
    }

    /// Relative letter frequencies over all residues of all fragments.
    pub fn background_frequencies(&self) -> Result<&[f64]> {
        self.background.as_deref().ok_or(Error::Empty("fragment store"))
    }
}

fn content_hash(records: &[SequenceRecord]) -> [u8; 32] {
    let mut h = Sha256::new();
    for r in records {
        h.update(r.id.as_bytes());
        h.update([0u8]);
        h.update(r.residues.as_bytes());
        h.update([0u8]);
    }
    h.finalize().into()
}
