use super::dirichlet::{dirichlet_posterior, DirichletMixture};
use super::weights::WeightedHitSet;
use crate::error::{Error, Result};
use crate::scoring::Pssm;

/// `round(2 log2(q / p))`, halves rounded away from zero.
pub fn half_bit_score(q: f64, p: f64) -> i32 {
    (2.0 * (q / p).log2()).round() as i32
}

/// Log-odds PSSM in half-bit units from the posterior letter distribution
/// at each position of a weighted hit set.
pub fn build_pssm(weighted: &WeightedHitSet, background: &[f64], mixture: &DirichletMixture) -> Result<Pssm> {
    if weighted.is_empty() {
        return Err(Error::Empty("hit set"));
    }
    let alphabet = mixture.alphabet();
    let k = alphabet.len();
    if background.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            actual: background.len(),
        });
    }
    let m = weighted.frag_len();
    let mut scores = Vec::with_capacity(m * k);
    for j in 0..m {
        let q = dirichlet_posterior(&weighted.counts(j, k), mixture)?;
        for (a, (&qa, &pa)) in q.iter().zip(background).enumerate() {
            if pa <= 0.0 && qa > 0.0 {
                return Err(Error::ZeroBackground(alphabet.letter(a as u8) as char));
            }
            scores.push(half_bit_score(qa, pa));
        }
    }
    Pssm::new(alphabet.clone(), m, scores)
}
