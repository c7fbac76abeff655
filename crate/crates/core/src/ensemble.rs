//! Reproducible repeated single-shot experiments.
//!
//! Draw `i` of a run with seed `s` always uses the stream `(s, i)`, so a run
//! gives the same readings whether it executes serially or on a thread pool.
//! Sums go through [`ExactSum`], which makes means independent of the order
//! in which partial results are merged.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math;
use crate::{Error, Result};

/// A counter-derived random stream: `(seed, stream_id)` fixes every draw.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.random::<u64>()
    }
}

/// Correctly rounded floating-point summation (Shewchuk's partials).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExactSum {
    partials: Vec<f64>,
    special: f64,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut x: f64) {
        if !x.is_finite() {
            self.special += x;
            return;
        }
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if math::abs(x) < math::abs(y) {
                core::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    pub fn merge(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(p);
        }
        self.special += other.special;
    }

    pub fn value(&self) -> f64 {
        if self.special != 0.0 || self.special.is_nan() {
            return self.special;
        }
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            let y = p[n - 1];
            n -= 1;
            hi = x + y;
            lo = y - (hi - x);
            if lo != 0.0 {
                break;
            }
        }
        // round-half-even across the remaining partials
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

impl Extend<f64> for ExactSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Mergeable count, sum and sum of squares.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunningStats {
    n: u64,
    sum: ExactSum,
    sum_sq: ExactSum,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum.add(x);
        self.sum_sq.add(x * x);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        self.n += other.n;
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.sum.value() / self.n as f64
    }

    /// Unbiased sample variance; zero for fewer than two readings.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let s = self.sum.value();
        f64::max(0.0, (self.sum_sq.value() - s * s / n) / (n - 1.0))
    }

    pub fn std_error(&self) -> f64 {
        math::sqrt(self.variance() / self.n as f64)
    }
}

impl Extend<f64> for RunningStats {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

/// Equal-width bins; `edges.len() == counts.len() + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Bins spanning `[min, max]` padded by 1% of the range on each side.
    pub fn build(readings: &[f64], bins: usize) -> Result<Self> {
        if readings.is_empty() {
            return Err(Error::EmptyInput("histogram needs at least one reading"));
        }
        if bins == 0 {
            return Err(Error::invalid("bins", "must be at least 1"));
        }
        let lo = readings.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = readings.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        let pad = if span > 0.0 {
            0.01 * span
        } else {
            0.01 * f64::max(math::abs(lo), 1.0)
        };
        let (lo, hi) = (lo - pad, hi + pad);
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|k| lo + k as f64 * width).collect();
        let mut counts = alloc::vec![0u64; bins];
        for &x in readings {
            let k = ((x - lo) / width) as usize;
            counts[k.min(bins - 1)] += 1;
        }
        Ok(Histogram { edges, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Bin centres with their counts.
    pub fn centres(&self) -> impl Iterator<Item = (f64, u64)> + '_ {
        self.edges
            .windows(2)
            .zip(&self.counts)
            .map(|(e, &c)| (0.5 * (e[0] + e[1]), c))
    }
}

/// Summary of a run of single-shot readings.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleReport {
    pub n: usize,
    pub mean: f64,
    pub std_error: f64,
    pub histogram: Histogram,
    pub seed: Option<u64>,
}

/// Histogram bin count used when a caller does not choose one.
pub const DEFAULT_BINS: usize = 64;

/// Mean, standard error (sample std / √n) and histogram of `readings`.
pub fn summarize(readings: &[f64], bins: usize) -> Result<EnsembleReport> {
    if readings.is_empty() {
        return Err(Error::EmptyInput("no readings to summarize"));
    }
    let n = readings.len();
    let mut sum = ExactSum::new();
    sum.extend(readings.iter().copied());
    let mean = sum.value() / n as f64;
    let std_error = if n > 1 {
        let mut dev = ExactSum::new();
        dev.extend(readings.iter().map(|x| (x - mean) * (x - mean)));
        math::sqrt(dev.value() / (n as f64 - 1.0) / n as f64)
    } else {
        0.0
    };
    Ok(EnsembleReport {
        n,
        mean,
        std_error,
        histogram: Histogram::build(readings, bins)?,
        seed: None,
    })
}

/// Execution policy for embarrassingly parallel work.
///
/// `Parallel` uses rayon when the `parallel` feature is enabled and runs
/// serially otherwise. Results never depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    Serial,
    #[default]
    Parallel,
}

/// Applies `f` to `0..n`, keeping index order in the output.
pub fn map_indexed<T, F>(n: usize, schedule: Schedule, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match schedule {
        #[cfg(feature = "parallel")]
        Schedule::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Runs `n` single shots; shot `i` draws from `RngStream::new(seed, i)`.
pub fn collect_samples<T, F>(n: usize, seed: u64, schedule: Schedule, shot: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RngStream) -> T + Sync + Send,
{
    map_indexed(n, schedule, |i| shot(&mut RngStream::new(seed, i as u64)))
}

/// Runs `n` single shots and summarizes the readings.
pub fn run_ensemble<F>(
    n: usize,
    seed: u64,
    bins: usize,
    schedule: Schedule,
    shot: F,
) -> Result<EnsembleReport>
where
    F: Fn(&mut RngStream) -> f64 + Sync + Send,
{
    if n == 0 {
        return Err(Error::EmptyInput("ensemble size must be at least 1"));
    }
    let readings = collect_samples(n, seed, schedule, shot);
    let mut report = summarize(&readings, bins)?;
    report.seed = Some(seed);
    Ok(report)
}

/// Inverse-CDF sampler for a density tabulated on increasing nodes.
///
/// The CDF accumulates trapezoids between nodes and is inverted by linear
/// interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseCdf {
    nodes: Vec<f64>,
    cdf: Vec<f64>,
}

/// A sampled value with the node interval it fell into.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfSample {
    pub value: f64,
    /// Index of the left node of the interval.
    pub node: usize,
    /// Position inside the interval, in `[0, 1]`.
    pub fraction: f64,
}

impl CdfSample {
    /// The node closer to the sampled value.
    pub fn nearest_node(&self) -> usize {
        if self.fraction > 0.5 {
            self.node + 1
        } else {
            self.node
        }
    }
}

impl InverseCdf {
    pub fn new(nodes: Vec<f64>, density: &[f64]) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != density.len() {
            return Err(Error::EmptyInput("inverse CDF needs matching nodes and density"));
        }
        let mut cdf = Vec::with_capacity(nodes.len());
        let mut acc = ExactSum::new();
        cdf.push(0.0);
        for k in 1..nodes.len() {
            let a = f64::max(density[k - 1], 0.0);
            let b = f64::max(density[k], 0.0);
            acc.add(0.5 * (a + b) * (nodes[k] - nodes[k - 1]));
            cdf.push(acc.value());
        }
        let total = *cdf.last().expect("at least two nodes");
        if !(total > 1e-300) || !total.is_finite() {
            return Err(Error::NormalizationUnderflow { integral: total });
        }
        for c in cdf.iter_mut() {
            *c /= total;
        }
        Ok(InverseCdf { nodes, cdf })
    }

    /// Maps `u ∈ [0, 1)` to a sample.
    pub fn sample(&self, u: f64) -> CdfSample {
        let last = self.cdf.len() - 1;
        let target = u.clamp(0.0, 1.0);
        // first index with cdf > target, so the interval has positive mass
        let upper = self.cdf.partition_point(|&c| c <= target).clamp(1, last);
        let lower = upper - 1;
        let width = self.cdf[upper] - self.cdf[lower];
        let fraction = if width > 0.0 {
            ((target - self.cdf[lower]) / width).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let value = self.nodes[lower] + fraction * (self.nodes[upper] - self.nodes[lower]);
        CdfSample {
            value,
            node: lower,
            fraction,
        }
    }

    pub fn draw(&self, rng: &mut RngStream) -> CdfSample {
        self.sample(rng.uniform())
    }
}

/// Index `i` drawn with probability `weights[i] / Σ weights`.
pub fn sample_discrete(weights: &[f64], u: f64) -> usize {
    let total: f64 = weights.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sum_is_correctly_rounded() {
        let mut s = ExactSum::new();
        s.extend([1e100, 1.0, -1e100, 1e-100]);
        assert_eq!(s.value(), 1.0);
        let mut t = ExactSum::new();
        t.extend((0..10).map(|_| 0.1));
        assert_eq!(t.value(), 1.0);
    }

    #[test]
    fn same_stream_same_draws() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 3);
        let mut c = RngStream::new(7, 4);
        let xa: Vec<f64> = (0..5).map(|_| a.uniform()).collect();
        let xb: Vec<f64> = (0..5).map(|_| b.uniform()).collect();
        let xc: Vec<f64> = (0..5).map(|_| c.uniform()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn summarize_basics() {
        let r = summarize(&[1.0, 2.0, 3.0], 4).unwrap();
        assert_eq!(r.mean, 2.0);
        assert_eq!(r.histogram.total(), 3);
        let c = summarize(&[4.0; 10], 5).unwrap();
        assert_eq!(c.std_error, 0.0);
        assert_eq!(c.histogram.total(), 10);
        assert!(matches!(summarize(&[], 4), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn histogram_padding() {
        let h = Histogram::build(&[0.0, 10.0], 10).unwrap();
        assert!((h.edges[0] + 0.1).abs() < 1e-12);
        assert!((h.edges[10] - 10.1).abs() < 1e-12);
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[9], 1);
    }

    #[test]
    fn inverse_cdf_uniform_density_is_linear() {
        let nodes: Vec<f64> = (0..11).map(|k| k as f64).collect();
        let cdf = InverseCdf::new(nodes, &[1.0; 11]).unwrap();
        assert!((cdf.sample(0.25).value - 2.5).abs() < 1e-12);
        assert!((cdf.sample(0.0).value).abs() < 1e-12);
        let s = cdf.sample(0.999_999_9);
        assert_eq!(s.node, 9);
    }

    #[test]
    fn inverse_cdf_skips_empty_intervals() {
        let nodes: Vec<f64> = (0..5).map(|k| k as f64).collect();
        let cdf = InverseCdf::new(nodes, &[0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        for u in [0.0, 0.3, 0.5, 0.9] {
            let v = cdf.sample(u).value;
            assert!((2.0..=4.0).contains(&v), "{v}");
        }
        assert!(InverseCdf::new(alloc::vec![0.0, 1.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn discrete_sampling_respects_zero_weights() {
        assert_eq!(sample_discrete(&[0.0, 1.0, 0.0], 0.0), 1);
        assert_eq!(sample_discrete(&[0.0, 1.0, 0.0], 0.999), 1);
        assert_eq!(sample_discrete(&[0.25, 0.75], 0.2), 0);
        assert_eq!(sample_discrete(&[0.25, 0.75], 0.3), 1);
    }
}
