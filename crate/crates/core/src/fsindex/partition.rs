use crate::error::{Error, Result};
use crate::scoring::{Alphabet, INVALID};

/// Largest number of bins an index may address.
pub const MAX_BINS: u64 = 1 << 32;

/// Per-position alphabet reductions and the mixed-radix bin ranking built on
/// them.
///
/// Position `i` maps each letter to a reduced letter in `0..sizes[i]`; the
/// rank of a fragment is `sum_i pi_i(x_i) * prod_{j>i} sizes[j]`, most
/// significant position first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionScheme {
    alphabet: Alphabet,
    tables: Vec<Vec<u8>>,
    sizes: Vec<usize>,
    strides: Vec<u64>,
    n_bins: u64,
}

impl PartitionScheme {
    /// Builds a scheme from per-position letter -> reduced-letter tables.
    pub fn from_tables(alphabet: Alphabet, tables: Vec<Vec<u8>>) -> Result<Self> {
        if tables.is_empty() {
            return Err(Error::InvalidPartition("no positions".into()));
        }
        let k = alphabet.len();
        let mut sizes = Vec::with_capacity(tables.len());
        for (pos, t) in tables.iter().enumerate() {
            if t.len() != k {
                return Err(Error::InvalidPartition(format!(
                    "position {pos}: table has {} entries, alphabet has {k}",
                    t.len()
                )));
            }
            let size = *t.iter().max().unwrap() as usize + 1;
            let mut used = vec![false; size];
            for &r in t {
                if r == INVALID {
                    return Err(Error::InvalidPartition(format!("position {pos}: unassigned letter")));
                }
                used[r as usize] = true;
            }
            if let Some(gap) = used.iter().position(|u| !u) {
                return Err(Error::InvalidPartition(format!("position {pos}: group {gap} is empty")));
            }
            sizes.push(size);
        }
        let m = tables.len();
        let mut strides = vec![1u64; m];
        let mut n_bins = 1u64;
        for i in (0..m).rev() {
            strides[i] = n_bins;
            n_bins = n_bins
                .checked_mul(sizes[i] as u64)
                .filter(|&n| n <= MAX_BINS)
                .ok_or_else(|| Error::InvalidPartition(format!("more than {MAX_BINS} bins")))?;
        }
        Ok(PartitionScheme {
            alphabet,
            tables,
            sizes,
            strides,
            n_bins,
        })
    }

    /// Parses `"TSAN,ILVM,KR,DEQ,WFYH,GPC"`-style specs. Groups are separated
    /// by `,` and positions by `#`; a single position is applied to all `m`
    /// positions. Reduced letters are numbered in group order.
    pub fn parse(spec: &str, m: usize, alphabet: &Alphabet) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("fragment length must be at least 1".into()));
        }
        let positions: Vec<&str> = spec.split('#').collect();
        let tables: Vec<Vec<u8>> = positions
            .iter()
            .map(|p| parse_position(p, alphabet))
            .collect::<Result<_>>()?;
        let tables = match tables.len() {
            1 => vec![tables[0].clone(); m],
            n if n == m => tables,
            n => {
                return Err(Error::InvalidPartition(format!(
                    "{n} positions given for fragment length {m}"
                )))
            }
        };
        Self::from_tables(alphabet.clone(), tables)
    }

    /// Inverse of [`PartitionScheme::parse`]; broadcast specs are written once.
    pub fn to_spec(&self) -> String {
        let positions: Vec<String> = (0..self.frag_len()).map(|i| self.position_spec(i)).collect();
        if positions.iter().all(|p| *p == positions[0]) {
            positions[0].clone()
        } else {
            positions.join("#")
        }
    }

    fn position_spec(&self, i: usize) -> String {
        let mut groups = vec![String::new(); self.sizes[i]];
        for (a, &r) in self.tables[i].iter().enumerate() {
            groups[r as usize].push(self.alphabet.letter(a as u8) as char);
        }
        groups.join(",")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn frag_len(&self) -> usize {
        self.tables.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn n_bins(&self) -> u64 {
        self.n_bins
    }

    pub fn table(&self, pos: usize) -> &[u8] {
        &self.tables[pos]
    }

    /// Reduced letter of letter code `a` at position `pos`.
    #[inline]
    pub fn project_letter(&self, pos: usize, a: u8) -> u8 {
        self.tables[pos][a as usize]
    }

    /// `prod_{j>pos} sizes[j]`.
    #[inline]
    pub fn stride(&self, pos: usize) -> u64 {
        self.strides[pos]
    }

    /// Weight of reduced letter `sigma` at position `pos`.
    #[inline]
    pub fn xi(&self, pos: usize, sigma: u8) -> u64 {
        sigma as u64 * self.strides[pos]
    }

    /// Bin rank of an encoded fragment. The caller guarantees length and
    /// letter validity.
    #[inline]
    pub fn rank_codes(&self, x: &[u8]) -> u64 {
        x.iter()
            .enumerate()
            .map(|(i, &a)| self.xi(i, self.tables[i][a as usize]))
            .sum()
    }

    pub fn rank(&self, x: &[u8]) -> Result<u64> {
        if x.len() != self.frag_len() {
            return Err(Error::LengthMismatch {
                expected: self.frag_len(),
                actual: x.len(),
            });
        }
        Ok(self.rank_codes(&self.alphabet.encode(x)?))
    }

    /// Reduced fragment of a bin rank.
    pub fn unrank(&self, mut u: u64) -> Vec<u8> {
        let mut out = vec![0u8; self.frag_len()];
        for i in (0..self.frag_len()).rev() {
            let s = self.sizes[i] as u64;
            out[i] = (u % s) as u8;
            u /= s;
        }
        out
    }
}

fn parse_position(spec: &str, alphabet: &Alphabet) -> Result<Vec<u8>> {
    let mut table = vec![INVALID; alphabet.len()];
    for (g, group) in spec.split(',').enumerate() {
        let group = group.trim();
        if group.is_empty() {
            return Err(Error::InvalidPartition(format!("empty group in '{spec}'")));
        }
        for b in group.bytes() {
            let code = alphabet.code(b).ok_or(Error::InvalidLetter(b as char))?;
            if table[code as usize] != INVALID {
                return Err(Error::DuplicateLetter(b.to_ascii_uppercase() as char));
            }
            table[code as usize] = g as u8;
        }
    }
    if let Some(missing) = table.iter().position(|&r| r == INVALID) {
        return Err(Error::MissingLetter(alphabet.letter(missing as u8) as char));
    }
    Ok(table)
}
