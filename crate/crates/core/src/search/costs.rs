use crate::error::{Error, Result};
use crate::scoring::{Pssm, QuasiMetric};

/// Per-position letter costs of a query: the distance to a fragment `x` is
/// `sum_j cost(j, x_j)`. Every position has minimum cost 0.
///
/// A matrix query centred at `omega` has `cost(j, a) = d(omega_j, a)`; a PSSM
/// query has `cost(j, a) = max_b S_j(b) - S_j(a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostTable {
    m: usize,
    k: usize,
    cost: Vec<u32>,
    score_offset: Option<i64>,
    score_rows: Option<Vec<i32>>,
}

impl CostTable {
    pub fn new(m: usize, k: usize, cost: Vec<u32>) -> Result<Self> {
        if m == 0 || k == 0 {
            return Err(Error::Empty("cost table"));
        }
        if cost.len() != m * k {
            return Err(Error::LengthMismatch {
                expected: m * k,
                actual: cost.len(),
            });
        }
        if let Some(j) = cost.chunks(k).position(|r| *r.iter().min().unwrap() != 0) {
            return Err(Error::InvalidArgument(format!("position {j} has no zero-cost letter")));
        }
        Ok(CostTable {
            m,
            k,
            cost,
            score_offset: None,
            score_rows: None,
        })
    }

    /// Costs for the quasi-metric ball centred at the encoded fragment `omega`.
    /// Scores are reported as `sum_j w(omega_j) - distance`, which is the raw
    /// matrix score when the quasi-metric came from a score matrix.
    pub fn for_fragment(q: &QuasiMetric, omega: &[u8]) -> Result<Self> {
        let k = q.alphabet().len();
        check_codes(omega, k)?;
        let cost: Vec<u32> = omega.iter().flat_map(|&w| q.row(w).iter().copied()).collect();
        let mut t = CostTable::new(omega.len(), k, cost)?;
        t.score_offset = Some(omega.iter().map(|&w| q.co_weight(w) as i64).sum());
        t.score_rows = Some(
            omega
                .iter()
                .flat_map(|&w| q.row(w).iter().map(move |&d| q.co_weight(w) - d as i32))
                .collect(),
        );
        Ok(t)
    }

    /// Costs under the associated metric `max(d(a, b), d(b, a))`, summed over
    /// positions. No score is attached.
    pub fn for_fragment_metric(q: &QuasiMetric, omega: &[u8]) -> Result<Self> {
        let k = q.alphabet().len();
        check_codes(omega, k)?;
        let mut cost = Vec::with_capacity(omega.len() * k);
        for &w in omega {
            for a in 0..k as u8 {
                cost.push(q.dist(w, a).max(q.dist(a, w)));
            }
        }
        CostTable::new(omega.len(), k, cost)
    }

    pub fn for_pssm(p: &Pssm) -> Self {
        let k = p.alphabet().len();
        let mut cost = Vec::with_capacity(p.len() * k);
        let mut rows = Vec::with_capacity(p.len() * k);
        for i in 0..p.len() {
            let top = p.column_max()[i];
            for &s in p.row(i) {
                cost.push((top - s) as u32);
                rows.push(s);
            }
        }
        let mut t = CostTable::new(p.len(), k, cost).expect("PSSM costs are normalized");
        t.score_offset = Some(p.max_score());
        t.score_rows = Some(rows);
        t
    }

    pub fn frag_len(&self) -> usize {
        self.m
    }

    pub fn alphabet_len(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn cost(&self, j: usize, a: u8) -> u32 {
        self.cost[j * self.k + a as usize]
    }

    pub fn row(&self, j: usize) -> &[u32] {
        &self.cost[j * self.k..(j + 1) * self.k]
    }

    /// `score = offset - distance` when the query carries a score.
    pub fn score_offset(&self) -> Option<i64> {
        self.score_offset
    }

    pub fn score_of(&self, distance: u64) -> Option<i64> {
        self.score_offset.map(|o| o - distance as i64)
    }

    /// Per-position score functions `S_j(a)`, when the query carries scores.
    pub fn score_row(&self, j: usize) -> Option<&[i32]> {
        self.score_rows.as_ref().map(|r| &r[j * self.k..(j + 1) * self.k])
    }

    /// Distance threshold equivalent to a minimum score `t`, or `None` when
    /// no fragment can reach `t`.
    pub fn epsilon_for_score(&self, t: i64) -> Option<u64> {
        let off = self.score_offset?;
        (t <= off).then(|| (off - t) as u64)
    }

    #[inline]
    pub fn distance(&self, x: &[u8]) -> u64 {
        x.iter().enumerate().map(|(j, &a)| self.cost(j, a) as u64).sum()
    }

    /// Per-position lowest-cost letter, ties to the lowest code.
    pub fn home_letters(&self) -> Vec<u8> {
        (0..self.m)
            .map(|j| self.row(j).iter().position(|&c| c == 0).unwrap() as u8)
            .collect()
    }
}

fn check_codes(omega: &[u8], k: usize) -> Result<()> {
    if omega.is_empty() {
        return Err(Error::Empty("query fragment"));
    }
    if omega.iter().any(|&c| c as usize >= k) {
        return Err(Error::InvalidArgument("query letter outside the alphabet".into()));
    }
    Ok(())
}
