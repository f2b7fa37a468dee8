//! Exact score distributions of random fragments under an i.i.d. letter
//! background, and the E-values derived from them.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::search::CostTable;

/// A discrete probability mass function on consecutive integer scores
/// starting at `lo`.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    pub lo: i64,
    pub pmf: Vec<f64>,
}

impl Density {
    pub fn hi(&self) -> i64 {
        self.lo + self.pmf.len() as i64 - 1
    }

    pub fn prob(&self, t: i64) -> f64 {
        if t < self.lo || t > self.hi() {
            0.0
        } else {
            self.pmf[(t - self.lo) as usize]
        }
    }

    pub fn mean(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(i, p)| p * (self.lo + i as i64) as f64)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.pmf
            .iter()
            .enumerate()
            .map(|(i, p)| p * ((self.lo + i as i64) as f64 - mu).powi(2))
            .sum()
    }
}

/// Distribution of the score `S_j(a)` of one position when `a` is drawn
/// from `freq`.
pub fn positional_density(scores: &[i32], freq: &[f64]) -> Result<Density> {
    if scores.is_empty() {
        return Err(Error::Empty("score row"));
    }
    if scores.len() != freq.len() {
        return Err(Error::LengthMismatch {
            expected: scores.len(),
            actual: freq.len(),
        });
    }
    if let Some(p) = freq.iter().find(|p| !(**p >= 0.0)) {
        return Err(Error::InvalidArgument(format!("letter frequency {p} is negative")));
    }
    let total: f64 = freq.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!("letter frequencies sum to {total}")));
    }
    let lo = *scores.iter().min().unwrap() as i64;
    let hi = *scores.iter().max().unwrap() as i64;
    let mut pmf = vec![0.0; (hi - lo + 1) as usize];
    for (&s, &p) in scores.iter().zip(freq) {
        pmf[(s as i64 - lo) as usize] += p;
    }
    Ok(Density { lo, pmf })
}

/// Exact distribution of a fragment score `S = sum_j S_j` for a dataset of
/// `dataset_size` fragments.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreDistribution {
    density: Density,
    /// `survival[i] = P(S >= lo + i)`.
    survival: Vec<f64>,
    frag_len: usize,
    dataset_size: u64,
}

/// Outcome of converting a target E-value into a score threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    /// Least score whose E-value is at most the target.
    Score(i64),
    /// Even the maximum score is expected more often than the target.
    Unattainable,
}

/// Direct convolution of independent positional densities.
pub fn convolve_densities(densities: &[Density], dataset_size: u64) -> Result<ScoreDistribution> {
    let (first, rest) = densities.split_first().ok_or(Error::Empty("density list"))?;
    let mut acc = first.clone();
    for d in rest {
        let mut pmf = vec![0.0; acc.pmf.len() + d.pmf.len() - 1];
        for (i, &p) in acc.pmf.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (j, &q) in d.pmf.iter().enumerate() {
                pmf[i + j] += p * q;
            }
        }
        acc = Density { lo: acc.lo + d.lo, pmf };
    }
    let mut survival = vec![0.0; acc.pmf.len()];
    let mut tail = 0.0;
    for i in (0..acc.pmf.len()).rev() {
        tail += acc.pmf[i];
        survival[i] = tail.min(1.0);
    }
    Ok(ScoreDistribution {
        density: acc,
        survival,
        frag_len: densities.len(),
        dataset_size,
    })
}

impl ScoreDistribution {
    /// Distribution of the score carried by `costs` with letters drawn from
    /// `freq`.
    pub fn for_query(costs: &CostTable, freq: &[f64], dataset_size: u64) -> Result<Self> {
        let densities = (0..costs.frag_len())
            .map(|j| {
                let row = costs.score_row(j).ok_or_else(|| {
                    Error::InvalidArgument("query has no score; use a score-matrix or PSSM query".into())
                })?;
                positional_density(row, freq)
            })
            .collect::<Result<Vec<_>>>()?;
        convolve_densities(&densities, dataset_size)
    }

    pub fn lo(&self) -> i64 {
        self.density.lo
    }

    pub fn hi(&self) -> i64 {
        self.density.hi()
    }

    pub fn frag_len(&self) -> usize {
        self.frag_len
    }

    pub fn dataset_size(&self) -> u64 {
        self.dataset_size
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn pmf(&self, t: i64) -> f64 {
        self.density.prob(t)
    }

    /// `P(S >= t)`.
    pub fn survival(&self, t: i64) -> f64 {
        if t <= self.lo() {
            1.0
        } else if t > self.hi() {
            0.0
        } else {
            self.survival[(t - self.lo()) as usize]
        }
    }

    pub fn mean(&self) -> f64 {
        self.density.mean()
    }

    pub fn variance(&self) -> f64 {
        self.density.variance()
    }

    /// Expected number of dataset fragments scoring at least `t`.
    pub fn evalue(&self, t: i64) -> f64 {
        self.dataset_size as f64 * self.survival(t)
    }

    /// Least score `t` with `evalue(t) <= target`.
    pub fn score_threshold_for_evalue(&self, target: f64) -> Result<Threshold> {
        if !(target > 0.0) {
            return Err(Error::InvalidArgument(format!("E-value {target} must be positive")));
        }
        if self.evalue(self.hi()) > target {
            return Ok(Threshold::Unattainable);
        }
        // survival is non-increasing, so the qualifying scores form a suffix.
        let n = self.dataset_size as f64;
        let first = self.survival.partition_point(|&s| n * s > target);
        Ok(Threshold::Score(self.lo() + first as i64))
    }

    /// Two columns, `score` and `P(S >= score)`, one line per score.
    pub fn survival_table(&self) -> String {
        let mut out = String::from("score\tsurvival\n");
        for (i, s) in self.survival.iter().enumerate() {
            writeln!(out, "{}\t{:e}", self.lo() + i as i64, s).unwrap();
        }
        out
    }
}
