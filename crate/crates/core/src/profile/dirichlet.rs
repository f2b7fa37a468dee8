use rand::Rng;
use rand_distr::{Distribution, Gamma};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::scoring::Alphabet;

/// Letter order assumed by mixture files without an `Order=` line.
const UCSC_ORDER: &[u8] = b"ACDEFGHIKLMNPQRSTVWY";

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletComponent {
    pub weight: f64,
    /// Parameters in alphabet code order.
    pub alpha: Vec<f64>,
}

impl DirichletComponent {
    pub fn alpha_sum(&self) -> f64 {
        self.alpha.iter().sum()
    }
}

/// A mixture of Dirichlet densities over letter distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletMixture {
    pub name: String,
    alphabet: Alphabet,
    components: Vec<DirichletComponent>,
}

impl DirichletMixture {
    pub fn new(alphabet: Alphabet, components: Vec<DirichletComponent>, name: impl Into<String>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Empty("Dirichlet mixture"));
        }
        for c in &components {
            if c.alpha.len() != alphabet.len() {
                return Err(Error::LengthMismatch {
                    expected: alphabet.len(),
                    actual: c.alpha.len(),
                });
            }
            if !c.alpha.iter().all(|&a| a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidArgument("Dirichlet parameters must be positive".into()));
            }
            if !(c.weight >= 0.0 && c.weight.is_finite()) {
                return Err(Error::InvalidArgument(
                    "mixture coefficients must be non-negative".into(),
                ));
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("mixture coefficients sum to {total}")));
        }
        Ok(DirichletMixture {
            name: name.into(),
            alphabet,
            components,
        })
    }

    /// One component with every parameter equal to `alpha`.
    pub fn uniform(alphabet: Alphabet, alpha: f64) -> Self {
        let k = alphabet.len();
        let c = DirichletComponent {
            weight: 1.0,
            alpha: vec![alpha; k],
        };
        DirichletMixture::new(alphabet, vec![c], "uniform").expect("valid uniform prior")
    }

    /// Parses the UCSC plain-text mixture format: `Mixture=` gives a
    /// component's coefficient and the following `Alpha=` line its
    /// parameters, optionally preceded by their sum. `Order=` names the
    /// letter order (default `ACDEFGHIKLMNPQRSTVWY`). Coefficients are
    /// renormalized when they sum to 1 within 1e-3, as published files are
    /// rounded.
    pub fn parse_ucsc(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let mut name = String::from("mixture");
        let mut order: Vec<u8> = UCSC_ORDER.to_vec();
        let mut weights = Vec::new();
        let mut alphas: Vec<Vec<f64>> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let Some((key, value)) = line.split_once('=') else {
                continue;
            };
            let parse_err = |msg: String| Error::Parse { line: i + 1, msg };
            let nums = || {
                value
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|e| parse_err(format!("bad number '{t}': {e}")))
                    })
                    .collect::<Result<Vec<f64>>>()
            };
            match key.trim() {
                "Name" => name = value.trim().to_string(),
                "Order" => order = value.split_whitespace().flat_map(|t| t.bytes()).collect(),
                "Mixture" => {
                    let v = nums()?;
                    if v.len() != 1 {
                        return Err(parse_err("Mixture= takes one value".into()));
                    }
                    weights.push(v[0]);
                }
                "Alpha" => {
                    if alphas.len() + 1 != weights.len() {
                        return Err(parse_err("Alpha= without a preceding Mixture=".into()));
                    }
                    alphas.push(nums()?);
                }
                _ => {}
            }
        }
        if weights.len() != alphas.len() {
            return Err(Error::Format("Mixture= without Alpha=".into()));
        }
        let k = order.len();
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-3 {
            return Err(Error::InvalidArgument(format!("mixture coefficients sum to {total}")));
        }
        let mut components = Vec::with_capacity(weights.len());
        for (w, a) in weights.into_iter().zip(alphas) {
            let a = match a.len() {
                n if n == k + 1 => a[1..].to_vec(),
                n if n == k => a,
                n => return Err(Error::LengthMismatch { expected: k, actual: n }),
            };
            let mut alpha = vec![f64::NAN; alphabet.len()];
            for (&letter, v) in order.iter().zip(a) {
                if let Some(c) = alphabet.code(letter) {
                    alpha[c as usize] = v;
                }
            }
            if let Some(missing) = alpha.iter().position(|a| a.is_nan()) {
                return Err(Error::MissingLetter(alphabet.letter(missing as u8) as char));
            }
            components.push(DirichletComponent {
                weight: w / total,
                alpha,
            });
        }
        DirichletMixture::new(alphabet.clone(), components, name)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn components(&self) -> &[DirichletComponent] {
        &self.components
    }

    /// `P(component | counts)` for each component.
    pub fn responsibilities(&self, counts: &[f64]) -> Vec<f64> {
        let n: f64 = counts.iter().sum();
        let log_post: Vec<f64> = self
            .components
            .iter()
            .map(|c| {
                let a = c.alpha_sum();
                let mut l = c.weight.ln() + ln_gamma(a) - ln_gamma(n + a);
                for (&x, &al) in counts.iter().zip(&c.alpha) {
                    l += ln_gamma(x + al) - ln_gamma(al);
                }
                l
            })
            .collect();
        let top = log_post.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = log_post.iter().map(|l| (l - top).exp()).collect();
        let z: f64 = raw.iter().sum();
        raw.iter().map(|r| r / z).collect()
    }

    /// Draws a letter distribution: a component by coefficient, then a
    /// probability vector from its Dirichlet density.
    pub fn sample_distribution<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut u: f64 = rng.random();
        let mut comp = self.components.last().unwrap();
        for c in &self.components {
            if u < c.weight {
                comp = c;
                break;
            }
            u -= c.weight;
        }
        let g: Vec<f64> = comp
            .alpha
            .iter()
            .map(|&a| Gamma::new(a, 1.0).expect("positive shape").sample(rng))
            .collect();
        let total: f64 = g.iter().sum();
        if total > 0.0 {
            g.iter().map(|x| x / total).collect()
        } else {
            // Every draw underflowed; fall back to the component mean.
            let a = comp.alpha_sum();
            comp.alpha.iter().map(|x| x / a).collect()
        }
    }
}

/// Posterior mean letter distribution given weighted counts.
pub fn dirichlet_posterior(counts: &[f64], mixture: &DirichletMixture) -> Result<Vec<f64>> {
    if counts.len() != mixture.alphabet().len() {
        return Err(Error::LengthMismatch {
            expected: mixture.alphabet().len(),
            actual: counts.len(),
        });
    }
    if let Some(c) = counts.iter().find(|c| !(**c >= 0.0 && c.is_finite())) {
        return Err(Error::InvalidArgument(format!("count {c} is negative")));
    }
    let n: f64 = counts.iter().sum();
    let resp = mixture.responsibilities(counts);
    let mut p = vec![0.0; counts.len()];
    for (c, r) in mixture.components().iter().zip(resp) {
        let denom = n + c.alpha_sum();
        for ((pa, &x), &al) in p.iter_mut().zip(counts).zip(&c.alpha) {
            *pa += r * (x + al) / denom;
        }
    }
    Ok(p)
}
