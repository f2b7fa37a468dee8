use super::alphabet::Alphabet;
use super::matrix::ScoreMatrix;
use crate::error::{Error, Result};

/// Letter-level quasi-metric `d(a, b) = s(a, a) - s(a, b)` together with the
/// co-weight `w(a) = s(a, a)`.
///
/// For a symmetric score matrix the asymmetry is carried entirely by the
/// co-weight: `d(a, b) + w(b) = d(b, a) + w(a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiMetric {
    alphabet: Alphabet,
    dist: Vec<u32>,
    co_weight: Vec<i32>,
    name: String,
}

/// An ordered triple `(a, b, c)` with `d(a, b) + d(b, c) < d(a, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleFailure {
    pub a: u8,
    pub b: u8,
    pub c: u8,
    /// `d(a, b) + d(b, c) - d(a, c)`; negative for every reported failure.
    pub margin: i64,
}

impl QuasiMetric {
    /// Converts similarity scores to distances. Requires `s(a, a) > 0` and
    /// `s(a, a) >= s(a, b)`; the triangle inequality is not checked here,
    /// see [`QuasiMetric::audit_triangle`].
    pub fn from_scores(s: &ScoreMatrix) -> Result<Self> {
        let alphabet = s.alphabet().clone();
        let k = alphabet.len() as u8;
        let mut dist = Vec::with_capacity(k as usize * k as usize);
        let mut co_weight = Vec::with_capacity(k as usize);
        for a in 0..k {
            let self_score = s.score(a, a);
            if self_score <= 0 {
                return Err(Error::NonPositiveSelfScore(alphabet.letter(a) as char));
            }
            co_weight.push(self_score);
            for b in 0..k {
                let d = self_score - s.score(a, b);
                if d < 0 {
                    return Err(Error::SelfScoreNotMaximal(
                        alphabet.letter(a) as char,
                        alphabet.letter(b) as char,
                    ));
                }
                dist.push(d as u32);
            }
        }
        Ok(QuasiMetric {
            alphabet,
            dist,
            co_weight,
            name: s.name().to_string(),
        })
    }

    /// Builds a quasi-metric from an explicit distance table. Used for toy
    /// alphabets in tests; co-weights are set to zero.
    pub fn from_distances(alphabet: Alphabet, dist: Vec<u32>) -> Result<Self> {
        let k = alphabet.len();
        if dist.len() != k * k {
            return Err(Error::LengthMismatch {
                expected: k * k,
                actual: dist.len(),
            });
        }
        Ok(QuasiMetric {
            alphabet,
            dist,
            co_weight: vec![0; k],
            name: "custom".into(),
        })
    }

    /// The discrete metric: 0 on the diagonal, 1 elsewhere.
    pub fn hamming(alphabet: Alphabet) -> Self {
        let k = alphabet.len();
        let dist = (0..k * k).map(|i| u32::from(i / k != i % k)).collect();
        QuasiMetric {
            alphabet,
            dist,
            co_weight: vec![0; k],
            name: "hamming".into(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn dist(&self, a: u8, b: u8) -> u32 {
        self.dist[a as usize * self.alphabet.len() + b as usize]
    }

    pub fn co_weight(&self, a: u8) -> i32 {
        self.co_weight[a as usize]
    }

    /// Row `d(a, .)` indexed by letter code.
    pub fn row(&self, a: u8) -> &[u32] {
        let k = self.alphabet.len();
        &self.dist[a as usize * k..(a as usize + 1) * k]
    }

    /// The associated metric `max(d(a, b), d(b, a))`.
    pub fn associated_metric(&self) -> QuasiMetric {
        let k = self.alphabet.len() as u8;
        let mut dist = Vec::with_capacity(self.dist.len());
        for a in 0..k {
            for b in 0..k {
                dist.push(self.dist(a, b).max(self.dist(b, a)));
            }
        }
        QuasiMetric {
            alphabet: self.alphabet.clone(),
            dist,
            co_weight: self.co_weight.clone(),
            name: format!("{}-metric", self.name),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let k = self.alphabet.len() as u8;
        (0..k).all(|a| (0..k).all(|b| self.dist(a, b) == self.dist(b, a)))
    }

    /// Every ordered triple violating the triangle inequality.
    pub fn audit_triangle(&self) -> Vec<TriangleFailure> {
        let k = self.alphabet.len() as u8;
        let mut out = Vec::new();
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    let margin = self.dist(a, b) as i64 + self.dist(b, c) as i64 - self.dist(a, c) as i64;
                    if margin < 0 {
                        out.push(TriangleFailure { a, b, c, margin });
                    }
                }
            }
        }
        out
    }

    /// Sum of per-position distances between two encoded fragments.
    #[inline]
    pub fn fragment_distance_codes(&self, x: &[u8], y: &[u8]) -> u64 {
        debug_assert_eq!(x.len(), y.len());
        x.iter().zip(y).map(|(&a, &b)| self.dist(a, b) as u64).sum()
    }

    /// Distance between two fragments given as letters.
    pub fn fragment_distance(&self, x: &[u8], y: &[u8]) -> Result<u64> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                actual: y.len(),
            });
        }
        let x = self.alphabet.encode(x)?;
        let y = self.alphabet.encode(y)?;
        Ok(self.fragment_distance_codes(&x, &y))
    }
}
