//! Distance-exponent estimation from sampled pairwise distances.
//!
//! The distance exponent of a dataset is the limit of `log F(r) / log r` as
//! `r -> 0`, where `F` is the distribution function of the distance between
//! two random points. Two estimators are provided: the least-squares slope of
//! the log-log plot of the empirical `F`, and the best-fitting monomial
//! `a x^p` over a range of window ends.

use std::fmt::Write;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::ingest::FragmentStore;
use crate::scoring::QuasiMetric;

/// Empirical distance distribution: `f[j]` is the fraction of sampled pairs
/// at distance `<= r[j]`, and `counts[j]` their number.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistanceCdf {
    pub r: Vec<f64>,
    pub f: Vec<f64>,
    pub counts: Vec<u64>,
    pub points: usize,
    pub pairs: u64,
}

impl EmpiricalDistanceCdf {
    pub fn from_distances(mut d: Vec<f64>, points: usize) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::InsufficientData("no distances".into()));
        }
        if d.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidArgument(
                "distances must be finite and non-negative".into(),
            ));
        }
        d.sort_by(f64::total_cmp);
        let pairs = d.len() as u64;
        let (mut r, mut counts) = (Vec::new(), Vec::new());
        for (i, &x) in d.iter().enumerate() {
            if r.last() == Some(&x) {
                *counts.last_mut().unwrap() = i as u64 + 1;
            } else {
                r.push(x);
                counts.push(i as u64 + 1);
            }
        }
        let f = counts.iter().map(|&c| c as f64 / pairs as f64).collect();
        Ok(EmpiricalDistanceCdf {
            r,
            f,
            counts,
            points,
            pairs,
        })
    }

    /// A distribution given by its values on a grid, as if it had been
    /// estimated from `pairs` pairs.
    pub fn from_curve(r: Vec<f64>, f: Vec<f64>, pairs: u64) -> Result<Self> {
        if r.len() != f.len() {
            return Err(Error::LengthMismatch {
                expected: r.len(),
                actual: f.len(),
            });
        }
        if r.windows(2).any(|w| w[0] >= w[1]) || f.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument(
                "grid must be increasing and F non-decreasing".into(),
            ));
        }
        let counts = f.iter().map(|&x| (x * pairs as f64).round() as u64).collect();
        Ok(EmpiricalDistanceCdf {
            r,
            f,
            counts,
            points: 0,
            pairs,
        })
    }

    /// `F(t)`, the fraction of pairs at distance `<= t`.
    pub fn eval(&self, t: f64) -> f64 {
        match self.r.partition_point(|&x| x <= t) {
            0 => 0.0,
            i => self.f[i - 1],
        }
    }

    /// Smallest sampled distance with `F >= level`.
    pub fn percentile(&self, level: f64) -> Option<f64> {
        self.f.iter().position(|&x| x >= level).map(|i| self.r[i])
    }

    pub fn scaled(&self, c: f64) -> Self {
        EmpiricalDistanceCdf {
            r: self.r.iter().map(|x| x * c).collect(),
            ..self.clone()
        }
    }

    /// Two columns, `r` and `F(r)`.
    pub fn to_table(&self) -> String {
        let mut out = String::from("r\tF\n");
        for (r, f) in self.r.iter().zip(&self.f) {
            writeln!(out, "{r:e}\t{f:e}").unwrap();
        }
        out
    }
}

/// Number of points whose within-subset pairs come closest to `budget`.
pub fn subset_size(budget: u64) -> usize {
    let s = (1.0 + (1.0 + 8.0 * budget as f64).sqrt()) / 2.0;
    (s.round() as usize).max(2)
}

/// Samples a random subset of `points` with about `pair_budget` pairs and
/// returns the distribution of all distances within it.
pub fn sample_distance_cdf<P, R, D>(
    points: &[P],
    dist: D,
    pair_budget: u64,
    rng: &mut R,
) -> Result<EmpiricalDistanceCdf>
where
    R: Rng + ?Sized,
    D: Fn(&P, &P) -> f64,
{
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} point(s); need at least 2",
            points.len()
        )));
    }
    let s = subset_size(pair_budget).min(points.len());
    let mut chosen = index::sample(rng, points.len(), s).into_vec();
    chosen.sort_unstable();
    let mut d = Vec::with_capacity(s * (s - 1) / 2);
    for (i, &a) in chosen.iter().enumerate() {
        for &b in &chosen[i + 1..] {
            d.push(dist(&points[a], &points[b]));
        }
    }
    EmpiricalDistanceCdf::from_distances(d, s)
}

/// Pairwise distances between fragments under the metric
/// `max(d(x, y), d(y, x))` associated with `q`.
pub fn fragment_distance_cdf<R: Rng + ?Sized>(
    store: &FragmentStore,
    q: &QuasiMetric,
    pair_budget: u64,
    rng: &mut R,
) -> Result<EmpiricalDistanceCdf> {
    let metric = q.associated_metric();
    sample_distance_cdf(
        store.fragments(),
        |&a, &b| metric.fragment_distance_codes(store.codes(a), store.codes(b)) as f64,
        pair_budget,
        rng,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogLogConfig {
    /// The window ends at the smallest distance reaching this fraction.
    pub percentile_cap: f64,
    /// Points backed by fewer pairs than this are skipped.
    pub min_pairs: u64,
}

impl Default for LogLogConfig {
    fn default() -> Self {
        LogLogConfig {
            percentile_cap: 0.05,
            min_pairs: 5,
        }
    }
}

/// Least-squares slope of `log F` against `log r` over the window.
pub fn estimate_log_log_slope(cdf: &EmpiricalDistanceCdf, config: &LogLogConfig) -> Result<f64> {
    let b = cdf
        .percentile(config.percentile_cap)
        .ok_or_else(|| Error::InsufficientData("distribution never reaches the cap".into()))?;
    let pts: Vec<(f64, f64)> = cdf
        .r
        .iter()
        .zip(&cdf.f)
        .zip(&cdf.counts)
        .filter(|&((&r, &f), &c)| r > 0.0 && r <= b && f > 0.0 && c >= config.min_pairs)
        .map(|((&r, &f), _)| (r.ln(), f.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} usable point(s) in the log-log window",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("log-log window has a single distance".into()));
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonomialConfig {
    pub candidates: Vec<f64>,
    /// Window ends, as levels of `F`: each window ends at the smallest
    /// distance whose `F` reaches the level.
    pub window_levels: Vec<f64>,
    /// Refine each window's best candidate by golden-section search
    /// between its neighbours.
    pub refine: bool,
}

impl Default for MonomialConfig {
    fn default() -> Self {
        MonomialConfig {
            candidates: (1..=20).map(f64::from).collect(),
            window_levels: vec![0.002, 0.005, 0.01, 0.02, 0.05, 0.1],
            refine: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowFit {
    pub level: f64,
    pub end: f64,
    pub points: usize,
    pub best: f64,
    /// Testing error per candidate.
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonomialFit {
    pub estimate: f64,
    pub windows: Vec<WindowFit>,
}

/// Step-function samples `(x_j, y_j)` meaning F = y_j on `[x_j, x_{j+1})`
/// and F = 0 before `x_1`, all scaled so the window ends at 1.
struct Steps {
    x: Vec<f64>,
    y: Vec<f64>,
}

/// Coefficient of the monomial `a x^p` closest in L2 to the step function on
/// `[0, x_m]`: `a = (2p+1) / ((p+1) L^(2p+1)) * sum_j y_j (x_{j+1}^(p+1) - x_j^(p+1))`.
pub fn monomial_coefficient(x: &[f64], y: &[f64], p: f64) -> f64 {
    let l = *x.last().unwrap();
    let s: f64 = (0..x.len() - 1)
        .map(|j| y[j] * (x[j + 1].powf(p + 1.0) - x[j].powf(p + 1.0)))
        .sum();
    (2.0 * p + 1.0) / ((p + 1.0) * l.powf(2.0 * p + 1.0)) * s
}

/// `integral_0^{x_m} (F(x) - a x^p)^2 dx` for the step function, evaluated
/// exactly segment by segment.
pub fn monomial_error(x: &[f64], y: &[f64], p: f64, a: f64) -> f64 {
    let seg = |x0: f64, x1: f64, v: f64| {
        v * v * (x1 - x0) - 2.0 * a * v * (x1.powf(p + 1.0) - x0.powf(p + 1.0)) / (p + 1.0)
            + a * a * (x1.powf(2.0 * p + 1.0) - x0.powf(2.0 * p + 1.0)) / (2.0 * p + 1.0)
    };
    let mut e = seg(0.0, x[0], 0.0);
    for j in 0..x.len() - 1 {
        e += seg(x[j], x[j + 1], y[j]);
    }
    e
}

impl Steps {
    fn error_for(&self, test: &Steps, p: f64) -> f64 {
        let a = monomial_coefficient(&self.x, &self.y, p);
        monomial_error(&test.x, &test.y, p, a)
    }
}

/// Fits monomials on alternate points of each window and scores them on the
/// others; the estimate is the largest per-window best exponent.
pub fn estimate_monomial_fit(cdf: &EmpiricalDistanceCdf, config: &MonomialConfig) -> Result<MonomialFit> {
    if config.candidates.is_empty() {
        return Err(Error::InvalidArgument("no candidate exponents".into()));
    }
    let mut windows = Vec::new();
    for &level in &config.window_levels {
        let Some(m) = cdf.f.iter().position(|&f| f >= level) else {
            continue;
        };
        let end = cdf.r[m];
        if end <= 0.0 || m + 1 < 4 {
            continue;
        }
        let (mut train, mut test) = (Steps { x: vec![], y: vec![] }, Steps { x: vec![], y: vec![] });
        for j in 0..=m {
            let s = if j % 2 == 0 { &mut train } else { &mut test };
            s.x.push(cdf.r[j] / end);
            s.y.push(cdf.f[j]);
        }
        let errors: Vec<f64> = config.candidates.iter().map(|&p| train.error_for(&test, p)).collect();
        let i = (0..errors.len())
            .min_by(|&a, &b| errors[a].total_cmp(&errors[b]))
            .unwrap();
        let mut best = config.candidates[i];
        if config.refine {
            let lo = if i > 0 { config.candidates[i - 1] } else { best * 0.5 };
            let hi = config.candidates.get(i + 1).copied().unwrap_or(best * 1.5);
            best = golden_section(|p| train.error_for(&test, p), lo, hi, 1e-6);
        }
        windows.push(WindowFit {
            level,
            end,
            points: m + 1,
            best,
            errors,
        });
    }
    let estimate = windows
        .iter()
        .map(|w| w.best)
        .max_by(f64::total_cmp)
        .ok_or_else(|| Error::InsufficientData("every monomial window is degenerate".into()))?;
    Ok(MonomialFit { estimate, windows })
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    while (b - a).abs() > tol {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    (a + b) / 2.0
}

/// Point clouds of known dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// Uniform on `[0, 1]^n`.
    Cube,
    /// Standard normal on `R^n`.
    Gaussian,
    /// Uniform on the unit sphere in `R^n`, of dimension `n - 1`.
    Sphere,
}

impl Generator {
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R, dim: usize, count: usize) -> Vec<Vec<f64>> {
        (0..count)
            .map(|_| match self {
                Generator::Cube => (0..dim).map(|_| rng.random::<f64>()).collect(),
                Generator::Gaussian => (0..dim).map(|_| StandardNormal.sample(rng)).collect(),
                Generator::Sphere => loop {
                    let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm > 0.0 {
                        break v.iter().map(|x| x / norm).collect();
                    }
                },
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointMetric {
    L1,
    L2,
    LInf,
    /// Great-circle distance between unit vectors.
    Geodesic,
}

impl PointMetric {
    pub fn distance(self, x: &[f64], y: &[f64]) -> f64 {
        let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
        match self {
            PointMetric::L1 => diffs.sum(),
            PointMetric::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            PointMetric::LInf => diffs.fold(0.0, f64::max),
            PointMetric::Geodesic => x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>().clamp(-1.0, 1.0).acos(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::seeded;

    #[test]
    fn two_points_and_identical_points() {
        let mut rng = seeded(1);
        let cdf = sample_distance_cdf(
            &[vec![0.0], vec![1.0]],
            |a, b| PointMetric::L2.distance(a, b),
            10,
            &mut rng,
        )
        .unwrap();
        assert_eq!(
            (cdf.r.as_slice(), cdf.f.as_slice()),
            ([1.0].as_slice(), [1.0].as_slice())
        );
        assert_eq!(cdf.eval(0.5), 0.0);
        let same = vec![vec![0.3, 0.3]; 10];
        let cdf = sample_distance_cdf(&same, |a, b| PointMetric::LInf.distance(a, b), 100, &mut rng).unwrap();
        assert_eq!(cdf.r, [0.0]);
        assert_eq!(cdf.f, [1.0]);
        assert!(sample_distance_cdf(&same[..1], |a, b| PointMetric::LInf.distance(a, b), 100, &mut rng).is_err());
    }

    #[test]
    fn cdf_invariants() {
        let cdf = EmpiricalDistanceCdf::from_distances(vec![3.0, 1.0, 1.0, 2.0, 3.0, 3.0], 4).unwrap();
        assert_eq!(cdf.r, [1.0, 2.0, 3.0]);
        assert_eq!(cdf.counts, [2, 3, 6]);
        assert_eq!(cdf.f, [2.0 / 6.0, 0.5, 1.0]);
    }

    #[test]
    fn subset_matches_budget() {
        assert_eq!(subset_size(200_000), 633);
        assert_eq!(subset_size(1), 2);
        let s = subset_size(12_345) as u64;
        assert!((s * (s - 1) / 2).abs_diff(12_345) < s);
    }

    #[test]
    fn square_linf_closed_form() {
        let mut rng = seeded(2);
        let pts = Generator::Cube.sample(&mut rng, 2, 5000);
        let cdf = sample_distance_cdf(&pts, |a, b| PointMetric::LInf.distance(a, b), 200_000, &mut rng).unwrap();
        assert!((cdf.eval(0.5) - 0.5625).abs() < 0.02);
    }

    fn power_curve(p: f64, c: f64) -> EmpiricalDistanceCdf {
        let r: Vec<f64> = (1..=1000).map(|i| i as f64 / 1000.0).collect();
        let f = r.iter().map(|x| c * x.powf(p)).collect();
        EmpiricalDistanceCdf::from_curve(r, f, 1 << 40).unwrap()
    }

    #[test]
    fn log_log_slope_on_exact_power_law() {
        for p in [1.0, 3.0, 4.5] {
            let est = estimate_log_log_slope(&power_curve(p, 0.7), &LogLogConfig::default()).unwrap();
            assert!((est - p).abs() < 1e-6, "{p}: {est}");
        }
    }

    #[test]
    fn monomial_fit_on_exact_power_law() {
        let fit = estimate_monomial_fit(
            &power_curve(4.0, 1.0),
            &MonomialConfig {
                candidates: (1..=8).map(f64::from).collect(),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(fit.estimate, 4.0);
    }

    #[test]
    fn refinement_stays_near_the_grid_optimum() {
        let fit = estimate_monomial_fit(
            &power_curve(2.5, 1.0),
            &MonomialConfig {
                refine: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((fit.estimate - 2.5).abs() < 0.05, "{}", fit.estimate);
    }

    #[test]
    fn closed_form_matches_numerical_least_squares() {
        let mut rng = seeded(3);
        for _ in 0..20 {
            let n = rng.random_range(3..12);
            let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
            x.sort_by(f64::total_cmp);
            x.dedup();
            let mut y: Vec<f64> = (0..x.len()).map(|_| rng.random::<f64>()).collect();
            y.sort_by(f64::total_cmp);
            let p = rng.random_range(1..6) as f64;
            let a = monomial_coefficient(&x, &y, p);
            // Least squares a = <F, x^p> / <x^p, x^p> by composite Simpson.
            let simpson = |g: &dyn Fn(f64) -> f64, lo: f64, hi: f64| {
                let k = 2000;
                let h = (hi - lo) / k as f64;
                let mut s = g(lo) + g(hi);
                for i in 1..k {
                    s += g(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                s * h / 3.0
            };
            let mut num = 0.0;
            for j in 0..x.len() - 1 {
                num += y[j] * simpson(&|t: f64| t.powf(p), x[j], x[j + 1]);
            }
            let den = simpson(&|t: f64| t.powf(2.0 * p), 0.0, *x.last().unwrap());
            assert!((a - num / den).abs() <= 1e-9 * a.abs().max(1.0), "{a} vs {}", num / den);
            // The error is minimal at that coefficient.
            let e = monomial_error(&x, &y, p, a);
            assert!(e <= monomial_error(&x, &y, p, a * 1.001));
            assert!(e <= monomial_error(&x, &y, p, a * 0.999));
        }
    }

    #[test]
    fn estimates_are_scale_invariant() {
        let mut rng = seeded(4);
        let pts = Generator::Cube.sample(&mut rng, 3, 3000);
        let cdf = sample_distance_cdf(&pts, |a, b| PointMetric::LInf.distance(a, b), 50_000, &mut rng).unwrap();
        let ll = estimate_log_log_slope(&cdf, &LogLogConfig::default()).unwrap();
        let mono = estimate_monomial_fit(&cdf, &MonomialConfig::default())
            .unwrap()
            .estimate;
        for c in [0.01, 7.0, 1e4] {
            let s = cdf.scaled(c);
            assert!((estimate_log_log_slope(&s, &LogLogConfig::default()).unwrap() - ll).abs() < 1e-9);
            assert_eq!(
                estimate_monomial_fit(&s, &MonomialConfig::default()).unwrap().estimate,
                mono
            );
        }
    }

    #[test]
    fn cube_estimates() {
        let mut rng = seeded(5);
        for (dim, metric) in [(2, PointMetric::LInf), (3, PointMetric::LInf), (2, PointMetric::L2)] {
            let pts = Generator::Cube.sample(&mut rng, dim, 5000);
            let cdf = sample_distance_cdf(&pts, |a, b| metric.distance(a, b), 200_000, &mut rng).unwrap();
            let mono = estimate_monomial_fit(&cdf, &MonomialConfig::default()).unwrap();
            assert_eq!(mono.estimate, dim as f64, "{metric:?} {:?}", mono.windows);
            let ll = estimate_log_log_slope(&cdf, &LogLogConfig::default()).unwrap();
            assert!((ll - dim as f64).abs() <= 0.5, "{ll}");
        }
    }

    #[test]
    fn high_dimensional_gaussian_is_underestimated() {
        let mut rng = seeded(6);
        let pts = Generator::Gaussian.sample(&mut rng, 9, 5000);
        let cdf = sample_distance_cdf(&pts, |a, b| PointMetric::L2.distance(a, b), 200_000, &mut rng).unwrap();
        assert!(estimate_log_log_slope(&cdf, &LogLogConfig::default()).unwrap() < 9.0);
    }

    #[test]
    fn sphere_points_are_unit_vectors() {
        let mut rng = seeded(7);
        for v in Generator::Sphere.sample(&mut rng, 4, 50) {
            assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let d = PointMetric::Geodesic.distance(&[1.0, 0.0], &[0.0, 1.0]);
        assert!((d - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn degenerate_inputs() {
        let cdf = EmpiricalDistanceCdf::from_distances(vec![1.0, 1.0, 1.0], 3).unwrap();
        assert!(estimate_log_log_slope(&cdf, &LogLogConfig::default()).is_err());
        assert!(estimate_monomial_fit(&cdf, &MonomialConfig::default()).is_err());
    }
}
