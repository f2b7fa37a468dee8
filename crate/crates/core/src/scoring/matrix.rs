use std::fmt::Write as _;
use std::path::Path;

use super::alphabet::Alphabet;
use crate::error::{Error, Result};

macro_rules! builtin {
    ($($name:literal),* $(,)?) => {
        /// BLOSUM matrices shipped with the crate, as NCBI text.
        pub const BUILTIN_MATRICES: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../../data/matrices/", $name))),)*
        ];
    };
}

builtin!(
    "BLOSUM30",
    "BLOSUM35",
    "BLOSUM40",
    "BLOSUM45",
    "BLOSUM50",
    "BLOSUM55",
    "BLOSUM60",
    "BLOSUM62",
    "BLOSUM65",
    "BLOSUM70",
    "BLOSUM75",
    "BLOSUM80",
    "BLOSUM85",
    "BLOSUM90",
    "BLOSUM100",
    "BLOSUMN",
);

/// Integer similarity scores `s(a, b)` over an alphabet, in the matrix's own
/// units (half-bits for BLOSUM62).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreMatrix {
    alphabet: Alphabet,
    scores: Vec<i32>,
    name: String,
}

impl ScoreMatrix {
    pub fn new(alphabet: Alphabet, scores: Vec<i32>, name: impl Into<String>) -> Result<Self> {
        let k = alphabet.len();
        if scores.len() != k * k {
            return Err(Error::LengthMismatch {
                expected: k * k,
                actual: scores.len(),
            });
        }
        Ok(ScoreMatrix {
            alphabet,
            scores,
            name: name.into(),
        })
    }

    /// Parses an NCBI-style matrix and keeps only the standard amino acids.
    pub fn parse_ncbi(text: &str, name: impl Into<String>) -> Result<Self> {
        Self::parse_ncbi_with(text, Alphabet::protein(), name)
    }

    /// Parses an NCBI-style matrix (comment lines start with `#`, a header
    /// row of column letters, then one row per letter) and restricts it to
    /// `alphabet`. Extra rows and columns such as `B`, `Z`, `X` and `*` are
    /// dropped.
    pub fn parse_ncbi_with(text: &str, alphabet: Alphabet, name: impl Into<String>) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (hline, header) = lines.next().ok_or(Error::Empty("score matrix"))?;
        let columns: Vec<u8> = header
            .split_whitespace()
            .map(|tok| match tok.as_bytes() {
                [b] => Ok(b.to_ascii_uppercase()),
                _ => Err(Error::Parse {
                    line: hline,
                    msg: format!("bad column label '{tok}'"),
                }),
            })
            .collect::<Result<_>>()?;
        let col_code: Vec<Option<u8>> = columns.iter().map(|&b| alphabet.code(b)).collect();

        let k = alphabet.len();
        let mut scores = vec![0i32; k * k];
        let mut seen_row = vec![false; k];
        let mut seen_col = vec![false; k];
        for c in col_code.iter().flatten() {
            seen_col[*c as usize] = true;
        }

        for (line, row) in lines {
            let mut tokens = row.split_whitespace();
            let label = tokens.next().expect("non-empty line");
            let label = match label.as_bytes() {
                [b] => b.to_ascii_uppercase(),
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("bad row label '{label}'"),
                    })
                }
            };
            let values: Vec<i32> = tokens
                .map(|t| {
                    t.parse::<i32>().map_err(|e| Error::Parse {
                        line,
                        msg: format!("bad score '{t}': {e}"),
                    })
                })
                .collect::<Result<_>>()?;
            if values.len() != columns.len() {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {} scores, found {}", columns.len(), values.len()),
                });
            }
            let Some(r) = alphabet.code(label) else {
                continue;
            };
            if seen_row[r as usize] {
                return Err(Error::DuplicateLetter(label as char));
            }
            seen_row[r as usize] = true;
            for (v, c) in values.iter().zip(&col_code) {
                if let Some(c) = c {
                    scores[r as usize * k + *c as usize] = *v;
                }
            }
        }

        for (i, &l) in alphabet.letters().iter().enumerate() {
            if !seen_row[i] || !seen_col[i] {
                return Err(Error::MissingLetter(l as char));
            }
        }
        ScoreMatrix::new(alphabet, scores, name)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::parse_ncbi(&text, name)
    }

    /// Looks up a bundled matrix by name (case-insensitive), e.g. `"BLOSUM62"`.
    pub fn builtin(name: &str) -> Option<Self> {
        BUILTIN_MATRICES
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(n, text)| Self::parse_ncbi(text, *n).expect("bundled matrix parses"))
    }

    pub fn blosum62() -> Self {
        Self::builtin("BLOSUM62").expect("BLOSUM62 is bundled")
    }

    /// A bundled matrix name or a path to a matrix file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        match Self::builtin(name_or_path) {
            Some(m) => Ok(m),
            None => Self::from_file(name_or_path),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn score(&self, a: u8, b: u8) -> i32 {
        self.scores[a as usize * self.alphabet.len() + b as usize]
    }

    /// Score by letter rather than code.
    pub fn score_letters(&self, a: u8, b: u8) -> Result<i32> {
        let ca = self.alphabet.code(a).ok_or(Error::InvalidLetter(a as char))?;
        let cb = self.alphabet.code(b).ok_or(Error::InvalidLetter(b as char))?;
        Ok(self.score(ca, cb))
    }

    /// Row `s(a, .)` as a slice indexed by letter code.
    pub fn row(&self, a: u8) -> &[i32] {
        let k = self.alphabet.len();
        &self.scores[a as usize * k..(a as usize + 1) * k]
    }

    pub fn is_symmetric(&self) -> bool {
        let k = self.alphabet.len() as u8;
        (0..k).all(|a| (0..k).all(|b| self.score(a, b) == self.score(b, a)))
    }

    pub fn to_ncbi(&self) -> String {
        let mut out = String::new();
        out.push(' ');
        for &l in self.alphabet.letters() {
            let _ = write!(out, " {:>3}", l as char);
        }
        out.push('\n');
        for (a, &l) in self.alphabet.letters().iter().enumerate() {
            out.push(l as char);
            for v in self.row(a as u8) {
                let _ = write!(out, " {v:>3}");
            }
            out.push('\n');
        }
        out
    }
}
