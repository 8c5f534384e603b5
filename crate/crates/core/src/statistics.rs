//! Empirical fine-scale statistics of points on the circle `R/Z`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::cmp::Ordering;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `count / N`.
    RawPairs,
    /// `count / (N · bin width)`.
    PairCorrelation,
}

/// Bin counts on `[lo, hi)`; a value exactly on an interior edge belongs to
/// the bin on its right.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub normalization: Normalization,
    /// Number of points `N` the statistic is normalized by.
    pub n_points: usize,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize, normalization: Normalization, n_points: usize) -> Result<Self> {
        if bins == 0 || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInput(format!("bad histogram range [{lo}, {hi}) with {bins} bins")));
        }
        Ok(Histogram { lo, hi, counts: vec![0; bins], normalization, n_points })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn bin_of(&self, v: f64) -> Option<usize> {
        if !(v >= self.lo && v < self.hi) {
            return None;
        }
        let i = ((v - self.lo) / self.width()).floor() as usize;
        Some(i.min(self.bins() - 1))
    }

    pub fn add(&mut self, v: f64) {
        if let Some(i) = self.bin_of(v) {
            self.counts[i] += 1;
        }
    }

    pub fn bin_edges(&self, i: usize) -> (f64, f64) {
        let w = self.width();
        (self.lo + i as f64 * w, self.lo + (i + 1) as f64 * w)
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        let (a, b) = self.bin_edges(i);
        0.5 * (a + b)
    }

    pub fn values(&self) -> Vec<f64> {
        let scale = match self.normalization {
            Normalization::RawPairs => 1.0 / self.n_points as f64,
            Normalization::PairCorrelation => 1.0 / (self.n_points as f64 * self.width()),
        };
        self.counts.iter().map(|&c| c as f64 * scale).collect()
    }

    pub fn with_normalization(&self, normalization: Normalization) -> Histogram {
        Histogram { normalization, ..self.clone() }
    }

    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.lo != other.lo
            || self.hi != other.hi
            || self.bins() != other.bins()
            || self.normalization != other.normalization
            || self.n_points != other.n_points
        {
            return Err(Error::InvalidInput("histogram configurations differ".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }
}

/// A point `μ/m` of the circle kept as an exact fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0 && num < den, "fraction {num}/{den} is not in [0, 1)");
        Fraction { num, den }
    }

    fn cmp_exact(&self, o: &Fraction) -> Ordering {
        (self.num as u128 * o.den as u128).cmp(&(o.num as u128 * self.den as u128))
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Forward circle gap from `a` to `b` (plus `wrap` full turns) multiplied by `n`:
/// one rounding of an exact ratio.
fn scaled_gap(a: &Fraction, b: &Fraction, wrap: u64, n: usize) -> f64 {
    let num = (b.num as i128 + wrap as i128 * b.den as i128) * a.den as i128 - a.num as i128 * b.den as i128;
    let den = a.den as i128 * b.den as i128;
    (n as i128 * num) as f64 / den as f64
}

fn pair_counts<T: Sync>(
    sorted: &[T],
    lo: f64,
    hi: f64,
    bins: usize,
    gap: impl Fn(&T, &T, u64) -> f64 + Sync,
) -> Result<Histogram> {
    let n = sorted.len();
    let mut hist = Histogram::new(lo, hi, bins, Normalization::RawPairs, n)?;
    if n < 2 || hi <= lo {
        return Ok(hist);
    }
    let reach = lo.abs().max(hi.abs());
    let half = n as f64 / 2.0;
    let block = 4096usize;
    let partials: Vec<Histogram> = (0..n.div_ceil(block))
        .into_par_iter()
        .map(|bi| {
            let mut h = hist.clone();
            for i in bi * block..((bi + 1) * block).min(n) {
                for step in 1..n {
                    let j = (i + step) % n;
                    let wrap = u64::from(i + step >= n);
                    let g = gap(&sorted[i], &sorted[j], wrap);
                    if g > reach && reach < half {
                        break;
                    }
                    if reach < half {
                        h.add(g);
                        h.add(-g);
                    } else if j > i {
                        // Full scan: map the forward gap into [−N/2, N/2).
                        let d = if g >= half { g - n as f64 } else { g };
                        h.add(d);
                        h.add(if -d >= half { -d - n as f64 } else { -d });
                    }
                }
            }
            h
        })
        .collect();
    for p in &partials {
        hist.merge(p)?;
    }
    Ok(hist)
}

/// Counts ordered pairs `i ≠ j` with `N·((xᵢ − xⱼ) mod 1) ∈ [lo, hi)`, the
/// difference taken in `[−½, ½)`.
pub fn pair_correlation(points: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Histogram> {
    if points.iter().any(|&x| !(0.0..1.0).contains(&x)) {
        return Err(Error::InvalidInput("points must lie in [0, 1)".into()));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let mut h = pair_counts(&sorted, lo, hi, bins, |a, b, wrap| (b + wrap as f64 - a) * n as f64)?;
    h.normalization = Normalization::PairCorrelation;
    Ok(h)
}

/// As [`pair_correlation`] for exact fractions, with differences formed exactly.
pub fn pair_correlation_exact(points: &[Fraction], lo: f64, hi: f64, bins: usize) -> Result<Histogram> {
    let mut sorted = points.to_vec();
    sorted.par_sort_unstable_by(|a, b| a.cmp_exact(b));
    let n = sorted.len();
    let mut h = pair_counts(&sorted, lo, hi, bins, |a, b, wrap| scaled_gap(a, b, wrap, n))?;
    h.normalization = Normalization::PairCorrelation;
    Ok(h)
}

/// Reference O(N²) count of ordered pairs.
pub fn pair_correlation_brute(points: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Histogram> {
    let n = points.len();
    let mut h = Histogram::new(lo, hi, bins, Normalization::PairCorrelation, n)?;
    for (i, &a) in points.iter().enumerate() {
        for (j, &b) in points.iter().enumerate() {
            if i != j {
                let mut d = a - b;
                d -= d.floor();
                if d >= 0.5 {
                    d -= 1.0;
                }
                h.add(n as f64 * d);
            }
        }
    }
    Ok(h)
}

/// `#{j ≤ N : x_j − x ∈ N⁻¹[a, b) + Z}`, counting every integer shift.
pub fn counting_function(points: &[f64], x: f64, n: usize, a: f64, b: f64) -> usize {
    let nf = n as f64;
    points
        .iter()
        .take(n)
        .map(|&p| {
            let mut delta = p - x;
            delta -= delta.floor();
            let hi = (b / nf - delta).ceil();
            let lo = (a / nf - delta).ceil();
            (hi - lo).max(0.0) as usize
        })
        .sum()
}

/// Sorted copy of the first `n` points, for repeated window counts.
#[derive(Clone, Debug)]
pub struct SortedPoints {
    pts: Vec<f64>,
}

impl SortedPoints {
    pub fn new(points: &[f64]) -> Self {
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        SortedPoints { pts }
    }

    fn below(&self, t: f64) -> usize {
        self.pts.partition_point(|&p| p < t)
    }

    /// Number of points (with multiplicity over integer shifts) in `[s, e)` on the line.
    pub fn count_in(&self, s: f64, e: f64) -> usize {
        if e <= s {
            return 0;
        }
        let n = self.pts.len();
        let k0 = s.floor();
        let mut total = 0usize;
        let mut k = k0;
        while k < e {
            let lo = (s - k).max(0.0);
            let hi = (e - k).min(1.0);
            if hi > lo {
                total += if hi >= 1.0 { n - self.below(lo) } else { self.below(hi) - self.below(lo) };
            }
            k += 1.0;
        }
        total
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountDistribution {
    pub probabilities: Vec<f64>,
    pub mean: f64,
    pub samples: usize,
}

/// Empirical law of `counting_function(·, x, N, I)` for `x` on an equispaced
/// grid with one random offset.
pub fn count_distribution(points: &[f64], n: usize, a: f64, b: f64, samples: usize, seed: u64) -> Result<CountDistribution> {
    if samples == 0 || n == 0 || n > points.len() {
        return Err(Error::InvalidInput("need 1 ≤ N ≤ #points and at least one sample".into()));
    }
    let sp = SortedPoints::new(&points[..n]);
    let offset: f64 = ChaCha8Rng::seed_from_u64(seed).gen();
    let nf = n as f64;
    let counts: Vec<usize> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let x = (i as f64 + offset) / samples as f64;
            sp.count_in(x + a / nf, x + b / nf)
        })
        .collect();
    let kmax = counts.iter().copied().max().unwrap_or(0);
    let mut probabilities = vec![0.0; kmax + 1];
    for &c in &counts {
        probabilities[c] += 1.0;
    }
    for p in probabilities.iter_mut() {
        *p /= samples as f64;
    }
    let mean = counts.iter().sum::<usize>() as f64 / samples as f64;
    Ok(CountDistribution { probabilities, mean, samples })
}

/// Kolmogorov–Smirnov distance between the empirical law and the uniform law on `[0, 1)`.
pub fn ks_uniform(points: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidInput("need at least one point".into()));
    }
    let mut s = points.to_vec();
    s.par_sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len() as f64;
    Ok(s.iter()
        .enumerate()
        .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn opening_points_pair_count() {
        let pts = [0.0, 0.5, 0.25, 0.75];
        let h = pair_correlation(&pts, -1.1, 1.1, 1).unwrap();
        assert_eq!(h.counts, vec![8]);
        assert_eq!(h.with_normalization(Normalization::RawPairs).values(), vec![2.0]);
        let h = pair_correlation(&[0.0, 0.5], -0.5, 0.5, 1).unwrap();
        assert_eq!(h.counts, vec![0]);
        let h = pair_correlation(&pts, 1.0, 1.0, 1).unwrap();
        assert_eq!(h.counts, vec![0]);
    }

    #[test]
    fn counting_examples() {
        let pts = [0.0, 0.5, 0.25, 0.75];
        assert_eq!(counting_function(&pts, 0.0, 4, 0.0, 1.0), 1);
        assert_eq!(counting_function(&pts, 0.0, 4, 0.0, 4.0), 4);
        assert_eq!(counting_function(&pts, 0.0, 4, 1.0, 1.0), 0);
        let sp = SortedPoints::new(&pts);
        assert_eq!(sp.count_in(0.0, 0.25), 1);
        assert_eq!(sp.count_in(0.0, 1.0), 4);
        assert_eq!(sp.count_in(-0.5, 1.5), 8);
    }

    #[test]
    fn ks_extremes() {
        let eq: Vec<f64> = (0..100).map(|k| k as f64 / 100.0).collect();
        assert!(ks_uniform(&eq).unwrap() <= 0.01 + 1e-12);
        assert!(ks_uniform(&[0.0; 50]).unwrap() > 0.99);
    }

    #[test]
    fn count_distribution_mean() {
        let pts: Vec<f64> = (0..1000).map(|k| ((k as f64) * 0.618_033_988_75).fract()).collect();
        let cd = count_distribution(&pts, 1000, 0.0, 1.0, 5000, 1).unwrap();
        assert!((cd.mean - 1.0).abs() < 0.05);
        assert!((cd.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let empty = count_distribution(&pts, 1000, 0.5, 0.5, 100, 1).unwrap();
        assert_eq!(empty.probabilities, vec![1.0]);
    }
}
