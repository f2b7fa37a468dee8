use std::fmt::Write as _;

use super::alphabet::Alphabet;
use super::matrix::ScoreMatrix;
use crate::error::{Error, Result};

/// Position-specific scoring matrix: `scores[i][a]` is the integer score of
/// letter `a` at position `i`, in half-bits when produced by the profile
/// builder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pssm {
    alphabet: Alphabet,
    length: usize,
    scores: Vec<i32>,
    column_min: Vec<i32>,
    column_max: Vec<i32>,
}

impl Pssm {
    pub fn new(alphabet: Alphabet, length: usize, scores: Vec<i32>) -> Result<Self> {
        let k = alphabet.len();
        if length == 0 {
            return Err(Error::Empty("PSSM"));
        }
        if scores.len() != length * k {
            return Err(Error::LengthMismatch {
                expected: length * k,
                actual: scores.len(),
            });
        }
        let mut p = Pssm {
            alphabet,
            length,
            scores,
            column_min: vec![],
            column_max: vec![],
        };
        p.recompute_extremes();
        Ok(p)
    }

    pub fn from_rows(alphabet: Alphabet, rows: &[Vec<i32>]) -> Result<Self> {
        let k = alphabet.len();
        for r in rows {
            if r.len() != k {
                return Err(Error::LengthMismatch {
                    expected: k,
                    actual: r.len(),
                });
            }
        }
        Pssm::new(alphabet, rows.len(), rows.concat())
    }

    /// Replicates matrix rows along a query: `M[i][a] = s(query[i], a)`.
    pub fn from_matrix_rows(s: &ScoreMatrix, query: &[u8]) -> Self {
        let scores = query.iter().flat_map(|&q| s.row(q).iter().copied()).collect();
        Pssm::new(s.alphabet().clone(), query.len(), scores).expect("dimensions agree")
    }

    fn recompute_extremes(&mut self) {
        let k = self.alphabet.len();
        self.column_min = self.scores.chunks(k).map(|r| *r.iter().min().unwrap()).collect();
        self.column_max = self.scores.chunks(k).map(|r| *r.iter().max().unwrap()).collect();
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    #[inline]
    pub fn score_at(&self, i: usize, a: u8) -> i32 {
        self.scores[i * self.alphabet.len() + a as usize]
    }

    pub fn row(&self, i: usize) -> &[i32] {
        let k = self.alphabet.len();
        &self.scores[i * k..(i + 1) * k]
    }

    pub fn set(&mut self, i: usize, a: u8, value: i32) {
        let k = self.alphabet.len();
        self.scores[i * k + a as usize] = value;
        self.recompute_extremes();
    }

    /// Per-position minimum score.
    pub fn valuation_shift(&self) -> &[i32] {
        &self.column_min
    }

    pub fn valuation_shift_sum(&self) -> i64 {
        self.column_min.iter().map(|&v| v as i64).sum()
    }

    pub fn column_max(&self) -> &[i32] {
        &self.column_max
    }

    /// Highest attainable score.
    pub fn max_score(&self) -> i64 {
        self.column_max.iter().map(|&v| v as i64).sum()
    }

    /// Per-position best letter; ties go to the lowest letter code.
    pub fn argmax(&self) -> Vec<u8> {
        (0..self.length)
            .map(|i| {
                let row = self.row(i);
                let best = self.column_max[i];
                row.iter().position(|&v| v == best).unwrap() as u8
            })
            .collect()
    }

    fn check_len(&self, x: &[u8]) -> Result<()> {
        if x.len() != self.length {
            return Err(Error::LengthMismatch {
                expected: self.length,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// `sum_i scores[i][x_i]` for an encoded fragment.
    pub fn score_codes(&self, x: &[u8]) -> Result<i64> {
        self.check_len(x)?;
        Ok(x.iter().enumerate().map(|(i, &a)| self.score_at(i, a) as i64).sum())
    }

    /// Distance-like valuation `sum_i (max_b scores[i][b] - scores[i][x_i])`.
    pub fn valuation_codes(&self, x: &[u8]) -> Result<u64> {
        self.check_len(x)?;
        Ok(x.iter()
            .enumerate()
            .map(|(i, &a)| (self.column_max[i] - self.score_at(i, a)) as u64)
            .sum())
    }

    pub fn score(&self, x: &[u8]) -> Result<i64> {
        self.score_codes(&self.alphabet.encode(x)?)
    }

    pub fn valuation(&self, x: &[u8]) -> Result<u64> {
        self.valuation_codes(&self.alphabet.encode(x)?)
    }

    /// Tab-separated text: a header of alphabet letters, then one row of
    /// integer scores per position.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self
            .alphabet
            .letters()
            .iter()
            .map(|&l| (l as char).to_string())
            .collect();
        out.push_str(&header.join("\t"));
        out.push('\n');
        for i in 0..self.length {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", row.join("\t"));
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Empty("PSSM"))?;
        let letters: Vec<u8> = header
            .split('\t')
            .enumerate()
            .map(|(i, t)| match t.trim().as_bytes() {
                [b] => Ok(*b),
                _ => Err(Error::Parse {
                    line: 1,
                    msg: format!("bad header field {i}: '{t}'"),
                }),
            })
            .collect::<Result<_>>()?;
        let alphabet = Alphabet::new(&letters)?;
        let mut rows = Vec::new();
        for (i, l) in lines {
            let row: Vec<i32> = l
                .split('\t')
                .map(|t| {
                    t.trim().parse::<i32>().map_err(|e| Error::Parse {
                        line: i + 1,
                        msg: format!("bad score '{t}': {e}"),
                    })
                })
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        Pssm::from_rows(alphabet, &rows)
    }
}
