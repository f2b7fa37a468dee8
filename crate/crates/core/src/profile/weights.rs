use crate::error::{Error, Result};

/// Equal-length fragments with positive weights summing to the number of
/// fragments.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedHitSet {
    pub fragments: Vec<Vec<u8>>,
    pub weights: Vec<f64>,
}

impl WeightedHitSet {
    pub fn len(&self) -> usize {
        self.fragments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fragments.is_empty()
    }

    pub fn frag_len(&self) -> usize {
        self.fragments.first().map_or(0, Vec::len)
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weighted letter counts at position `j` over an alphabet of size `k`.
    pub fn counts(&self, j: usize, k: usize) -> Vec<f64> {
        let mut c = vec![0.0; k];
        for (f, w) in self.fragments.iter().zip(&self.weights) {
            c[f[j] as usize] += w;
        }
        c
    }
}

/// Position-based weights: at each position a fragment gets `1 / (r * c)`,
/// `r` the number of distinct letters in the column and `c` the number of
/// fragments sharing its letter. Weights are summed over positions and
/// rescaled so the total equals the number of fragments.
pub fn henikoff_weights(fragments: Vec<Vec<u8>>) -> Result<WeightedHitSet> {
    let m = fragments.first().ok_or(Error::Empty("hit set"))?.len();
    if let Some(f) = fragments.iter().find(|f| f.len() != m) {
        return Err(Error::LengthMismatch {
            expected: m,
            actual: f.len(),
        });
    }
    let mut weights = vec![0.0; fragments.len()];
    let mut counts = [0usize; 256];
    for j in 0..m {
        counts.fill(0);
        for f in &fragments {
            counts[f[j] as usize] += 1;
        }
        let r = counts.iter().filter(|&&c| c > 0).count() as f64;
        for (w, f) in weights.iter_mut().zip(&fragments) {
            *w += 1.0 / (r * counts[f[j] as usize] as f64);
        }
    }
    let scale = fragments.len() as f64 / weights.iter().sum::<f64>();
    for w in &mut weights {
        *w *= scale;
    }
    Ok(WeightedHitSet { fragments, weights })
}
