//! Seeded generators for synthetic fragments and queries.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// The generator used for every seeded run.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Letters drawn i.i.d. from `freq`.
#[derive(Debug, Clone)]
pub struct BackgroundModel {
    letters: WeightedIndex<f64>,
}

impl BackgroundModel {
    pub fn new(freq: &[f64]) -> Result<Self> {
        let letters =
            WeightedIndex::new(freq).map_err(|e| Error::InvalidArgument(format!("letter frequencies: {e}")))?;
        Ok(BackgroundModel { letters })
    }

    pub fn uniform(k: usize) -> Self {
        BackgroundModel::new(&vec![1.0; k]).expect("positive weights")
    }

    pub fn fragment<R: Rng + ?Sized>(&self, rng: &mut R, m: usize) -> Vec<u8> {
        (0..m).map(|_| self.letters.sample(rng) as u8).collect()
    }

    pub fn fragments<R: Rng + ?Sized>(&self, rng: &mut R, m: usize, count: usize) -> Vec<Vec<u8>> {
        (0..count).map(|_| self.fragment(rng, m)).collect()
    }
}

/// Copies `motif` and substitutes at most `max_subs` distinct positions with
/// uniformly drawn different letters.
pub fn mutate<R: Rng + ?Sized>(rng: &mut R, motif: &[u8], k: usize, max_subs: usize) -> Vec<u8> {
    let mut x = motif.to_vec();
    let subs = rng.random_range(0..=max_subs.min(motif.len()));
    for pos in rand::seq::index::sample(rng, motif.len(), subs) {
        let shift = rng.random_range(1..k) as u8;
        x[pos] = ((x[pos] as usize + shift as usize) % k) as u8;
    }
    x
}

/// Fragments whose letters are i.i.d. from a distribution drawn afresh for
/// each fragment from a Dirichlet mixture.
pub fn mixture_fragments<R: Rng + ?Sized>(
    rng: &mut R,
    mixture: &crate::profile::DirichletMixture,
    m: usize,
    count: usize,
) -> Vec<Vec<u8>> {
    (0..count)
        .map(|_| {
            let p = mixture.sample_distribution(rng);
            BackgroundModel::new(&p).expect("sampled distribution").fragment(rng, m)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::DirichletMixture;
    use crate::scoring::Alphabet;

    #[test]
    fn same_seed_same_fragments() {
        let g = BackgroundModel::uniform(20);
        assert_eq!(g.fragments(&mut seeded(9), 6, 10), g.fragments(&mut seeded(9), 6, 10));
        assert_ne!(g.fragments(&mut seeded(9), 6, 10), g.fragments(&mut seeded(10), 6, 10));
    }

    #[test]
    fn background_frequencies_are_followed() {
        let mut freq = vec![0.0; 20];
        freq[3] = 0.75;
        freq[4] = 0.25;
        let frags = BackgroundModel::new(&freq).unwrap().fragments(&mut seeded(1), 10, 1000);
        let n3 = frags.iter().flatten().filter(|&&c| c == 3).count();
        assert!(frags.iter().flatten().all(|&c| c == 3 || c == 4));
        // 10000 draws, p = 0.75: sd about 43.
        assert!((n3 as i64 - 7500).abs() < 200);
        assert!(BackgroundModel::new(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn mutations_stay_within_budget() {
        let mut rng = seeded(2);
        let motif: Vec<u8> = (0..9).collect();
        for _ in 0..200 {
            let x = mutate(&mut rng, &motif, 20, 2);
            assert!(x.iter().zip(&motif).filter(|(a, b)| a != b).count() <= 2);
            assert!(x.iter().all(|&c| c < 20));
        }
    }

    #[test]
    fn mixture_fragments_use_the_alphabet() {
        let mix = DirichletMixture::uniform(Alphabet::protein(), 0.5);
        let frags = mixture_fragments(&mut seeded(3), &mix, 7, 50);
        assert_eq!(frags.len(), 50);
        assert!(frags.iter().all(|f| f.len() == 7 && f.iter().all(|&c| c < 20)));
    }
}
