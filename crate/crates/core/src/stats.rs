//! Distribution comparison over sampled probability densities: stratified
//! sampling, consensus histogram binning, entropies and divergences,
//! rank-based two-sample tests, Cliff's delta and moment summaries.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::propagator::Trajectory;

pub const DEFAULT_SAMPLES: usize = 100_000;

/// Densities at or below this value are numerical vacuum (transform round-off
/// far from the packet) and are not part of the sampled population.
pub const DEFAULT_DENSITY_FLOOR: f64 = 1e-9;

/// Additive regularization applied to both histograms before KL.
pub const KL_EPSILON: f64 = 1e-12;

const MAX_BINS: usize = 512;
const MIN_BINS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPolicy {
    pub n_total: usize,
    pub seed: u64,
    pub density_floor: f64,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        Self {
            n_total: DEFAULT_SAMPLES,
            seed: crate::propagator::DEFAULT_SEED,
            density_floor: DEFAULT_DENSITY_FLOOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub run_id: String,
    pub strata: String,
    pub seed: u64,
    pub density_floor: f64,
    pub requested: usize,
    pub drawn: usize,
}

/// Complex amplitudes drawn frame-by-frame from a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct StratifiedSample {
    pub amplitudes: Vec<Complex64>,
    pub provenance: Provenance,
}

impl StratifiedSample {
    pub fn densities(&self) -> SampleSet {
        SampleSet {
            values: self.amplitudes.iter().map(|z| z.norm_sqr()).collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn phase_points(&self) -> crate::phase_space::PhasePointSet {
        crate::phase_space::PhasePointSet {
            points: self.amplitudes.iter().map(|z| (z.re, z.im)).collect(),
            provenance: self.provenance.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl SampleSet {
    pub fn from_values(values: Vec<f64>) -> Self {
        let n = values.len();
        Self {
            values,
            provenance: Provenance {
                run_id: String::new(),
                strata: "none".into(),
                seed: 0,
                density_floor: 0.0,
                requested: n,
                drawn: n,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Per-frame quotas proportional to each frame's eligible point count, by
/// largest remainder with ties going to the earliest frames. Equal-sized
/// frames get `n / frames` each, the remainder spread over the earliest.
/// Requests beyond the eligible total are clamped to every eligible point.
fn frame_quotas(capacity: &[usize], n_total: usize) -> Vec<usize> {
    let total: usize = capacity.iter().sum();
    if n_total >= total {
        return capacity.to_vec();
    }
    let (n, c) = (n_total as u128, total as u128);
    let mut quota: Vec<usize> = capacity.iter().map(|&k| (n * k as u128 / c) as usize).collect();
    let mut order: Vec<usize> = (0..capacity.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(n * capacity[i] as u128 % c), i));
    let short = n_total - quota.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        quota[i] += 1;
    }
    quota
}

/// Draws `policy.n_total` grid points across all frames, each frame a stratum,
/// uniformly without replacement within a frame. Points at or below the
/// density floor are excluded before allocation.
pub fn stratified_sample(
    trajectory: &Trajectory<f64>,
    policy: &SamplingPolicy,
    run_id: &str,
) -> Result<StratifiedSample> {
    let frames = trajectory.frames.len();
    if frames == 0 {
        return Err(Error::Contract("trajectory has no frames".into()));
    }
    if policy.n_total < frames {
        return Err(Error::Contract(format!(
            "sample size {} is smaller than the {frames} frames",
            policy.n_total
        )));
    }
    let floor = policy.density_floor;
    let eligible: Vec<Vec<usize>> = trajectory
        .frames
        .iter()
        .map(|f| {
            f.amplitudes
                .iter()
                .enumerate()
                .filter(|(_, z)| floor <= 0.0 || z.norm_sqr() > floor)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let capacity: Vec<usize> = eligible.iter().map(Vec::len).collect();
    let available: usize = capacity.iter().sum();
    if available < policy.n_total {
        log::warn!(
            "requested {} samples but only {available} grid points are eligible; clamping",
            policy.n_total
        );
    }
    let quotas = frame_quotas(&capacity, policy.n_total);

    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    rng.set_stream(1);
    let mut amplitudes = Vec::with_capacity(policy.n_total.min(available));
    for ((frame, idx), &q) in trajectory.frames.iter().zip(&eligible).zip(&quotas) {
        let mut picks = rand::seq::index::sample(&mut rng, idx.len(), q).into_vec();
        picks.sort_unstable();
        amplitudes.extend(picks.into_iter().map(|p| frame.amplitudes[idx[p]]));
    }
    let drawn = amplitudes.len();
    Ok(StratifiedSample {
        amplitudes,
        provenance: Provenance {
            run_id: run_id.to_string(),
            strata: format!("{frames} frames, proportional allocation, uniform within frame"),
            seed: policy.seed,
            density_floor: floor,
            requested: policy.n_total,
            drawn,
        },
    })
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Central moments m2, m3, m4 (population form).
fn central_moments(values: &[f64]) -> (f64, f64, f64, f64) {
    let mu = mean(values);
    let n = values.len() as f64;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in values {
        let d = x - mu;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (mu, m2 / n, m3 / n, m4 / n)
}

/// Candidate bin counts from the six classical rules and their median.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinningRules {
    pub sturges: usize,
    pub scott: Option<usize>,
    pub freedman_diaconis: Option<usize>,
    pub rice: usize,
    pub sqrt: usize,
    pub doane: Option<usize>,
    pub consensus: usize,
}

pub fn binning_rules(values: &[f64]) -> Result<BinningRules> {
    let n = values.len();
    if n < 8 {
        return Err(Error::Contract(format!("binning needs at least 8 values, got {n}")));
    }
    let nf = n as f64;
    let s = sorted(values);
    let range = s[n - 1] - s[0];
    let (_, m2, m3, _) = central_moments(values);
    let sd = (m2 * nf / (nf - 1.0)).sqrt();
    let iqr = quantile(&s, 0.75) - quantile(&s, 0.25);
    let cube = nf.powf(-1.0 / 3.0);
    let count = |x: f64| (x.ceil().max(1.0)) as usize;

    let sturges = nf.log2().ceil() as usize + 1;
    let scott = (sd > 0.0 && range > 0.0).then(|| count(range / (3.49 * sd * cube)));
    let freedman_diaconis = (iqr > 0.0 && range > 0.0).then(|| count(range / (2.0 * iqr * cube)));
    let rice = (2.0 * nf.cbrt()).ceil() as usize;
    let sqrt = nf.sqrt().ceil() as usize;
    let doane = (m2 > 0.0).then(|| {
        let g1 = m3 / m2.powf(1.5);
        let sigma_g1 = (6.0 * (nf - 2.0) / ((nf + 1.0) * (nf + 3.0))).sqrt();
        count(1.0 + nf.log2() + (1.0 + g1.abs() / sigma_g1).log2())
    });

    let consensus = if range > 0.0 && sd > 0.0 {
        let mut c = vec![sturges, rice, sqrt];
        c.extend([scott, freedman_diaconis, doane].into_iter().flatten());
        c.sort_unstable();
        c[(c.len() - 1) / 2].clamp(MIN_BINS, MAX_BINS)
    } else {
        sqrt.clamp(MIN_BINS, MAX_BINS)
    };
    Ok(BinningRules {
        sturges,
        scott,
        freedman_diaconis,
        rice,
        sqrt,
        doane,
        consensus,
    })
}

/// Median of the six rule counts (lower middle), clamped to [2, 512];
/// `⌈√n⌉` for a constant sample.
pub fn consensus_bins(values: &[f64]) -> Result<usize> {
    binning_rules(values).map(|r| r.consensus)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub n_bins: usize,
    pub range: (f64, f64),
    pub probabilities: Vec<f64>,
}

/// Equal-width histogram on `range`; the last bin is closed on the right.
pub fn histogram(values: &[f64], n_bins: usize, range: (f64, f64)) -> Result<HistogramSpec> {
    if n_bins < MIN_BINS {
        return Err(Error::Contract(format!("need at least {MIN_BINS} bins")));
    }
    if values.is_empty() {
        return Err(Error::Contract("cannot histogram an empty sample".into()));
    }
    let (mut lo, mut hi) = range;
    if hi <= lo {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = hi - lo;
    let mut counts = vec![0u64; n_bins];
    let mut inside = 0u64;
    for &x in values {
        if x < lo || x > hi {
            continue;
        }
        let b = (((x - lo) / width) * n_bins as f64) as usize;
        counts[b.min(n_bins - 1)] += 1;
        inside += 1;
    }
    if inside == 0 {
        return Err(Error::Contract("no values fall inside the histogram range".into()));
    }
    let total = inside as f64;
    Ok(HistogramSpec {
        n_bins,
        range: (lo, hi),
        probabilities: counts.into_iter().map(|c| c as f64 / total).collect(),
    })
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    })
}

/// Histogram of a single sample over its own range with consensus binning.
pub fn auto_histogram(values: &[f64]) -> Result<HistogramSpec> {
    histogram(values, consensus_bins(values)?, min_max(values))
}

/// `-Σ p log₂ p` over occupied bins.
pub fn shannon_entropy(hist: &HistogramSpec) -> f64 {
    entropy_bits(&hist.probabilities)
}

pub(crate) fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

fn check_aligned(p: &HistogramSpec, q: &HistogramSpec) -> Result<()> {
    if p.n_bins != q.n_bins || p.range != q.range || p.probabilities.len() != q.probabilities.len() {
        return Err(Error::Contract("histograms do not share bins and range".into()));
    }
    Ok(())
}

fn regularized(p: &[f64]) -> Vec<f64> {
    let total: f64 = p.iter().map(|x| x + KL_EPSILON).sum();
    p.iter().map(|x| (x + KL_EPSILON) / total).collect()
}

fn kl_raw(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &b)| a * (a / b).log2())
        .sum::<f64>()
        .max(0.0)
}

/// `Σ p log₂(p/q)` after adding [`KL_EPSILON`] to every bin of both and
/// renormalizing.
pub fn kl_divergence(p: &HistogramSpec, q: &HistogramSpec) -> Result<f64> {
    check_aligned(p, q)?;
    Ok(kl_raw(&regularized(&p.probabilities), &regularized(&q.probabilities)))
}

/// Jensen-Shannon divergence in bits, in [0, 1].
pub fn js_divergence(p: &HistogramSpec, q: &HistogramSpec) -> Result<f64> {
    check_aligned(p, q)?;
    let (p, q) = (&p.probabilities, &q.probabilities);
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    Ok((0.5 * kl_raw(p, &m) + 0.5 * kl_raw(q, &m)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestName {
    Ks,
    MannWhitney,
    KruskalWallis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test_name: TestName,
    pub statistic: f64,
    pub p_value: f64,
}

fn nonempty(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Contract("both samples must be non-empty".into()));
    }
    Ok(())
}

/// Survival function of the Kolmogorov distribution, `P(K > λ)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = if lambda < 1.18 {
        // Small-λ form converges fast here.
        let c = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let s: f64 = (1..=20)
            .map(|k| {
                let j = (2 * k - 1) as f64;
                (c * j * j).exp()
            })
            .sum();
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let k = k as f64;
                let sign = if k as i64 % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * k * k * lambda * lambda).exp()
            })
            .sum();
        2.0 * s
    };
    p.clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value at
/// effective size `nm / (n + m)`.
pub fn ks_test(a: &[f64], b: &[f64]) -> Result<TestResult> {
    nonempty(a, b)?;
    let (xa, xb) = (sorted(a), sorted(b));
    let (n, m) = (xa.len(), xb.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = xa[i].min(xb[j]);
        while i < n && xa[i] <= x {
            i += 1;
        }
        while j < m && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    Ok(TestResult {
        test_name: TestName::Ks,
        statistic: d,
        p_value: kolmogorov_survival(ne.sqrt() * d),
    })
}

/// Midranks of the pooled sample: (rank sum of `a`, Σ(t³ - t) over tie groups).
fn pooled_ranks(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&x| (x, true))
        .chain(b.iter().map(|&x| (x, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut rank_sum_a = 0.0;
    let mut ties = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let t = (j - i) as f64;
        let midrank = (i + j + 1) as f64 / 2.0;
        rank_sum_a += midrank * pooled[i..j].iter().filter(|p| p.1).count() as f64;
        ties += t * t * t - t;
        i = j;
    }
    (rank_sum_a, ties)
}

fn two_sided_normal(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Mann-Whitney U for `a` (pairs with `a > b`, ties counted half) with a
/// tie-corrected, continuity-corrected normal approximation.
pub fn mann_whitney(a: &[f64], b: &[f64]) -> Result<TestResult> {
    nonempty(a, b)?;
    let (n, m) = (a.len() as f64, b.len() as f64);
    let big_n = n + m;
    let (ra, ties) = pooled_ranks(a, b);
    let u = ra - n * (n + 1.0) / 2.0;
    let mu = n * m / 2.0;
    let var = n * m / 12.0 * ((big_n + 1.0) - ties / (big_n * (big_n - 1.0)).max(1.0));
    let p_value = if var > 0.0 {
        let z = ((u - mu).abs() - 0.5).max(0.0) / var.sqrt();
        two_sided_normal(z)
    } else {
        1.0
    };
    Ok(TestResult {
        test_name: TestName::MannWhitney,
        statistic: u,
        p_value,
    })
}

/// Two-group Kruskal-Wallis H with tie correction; chi-square, 1 dof.
pub fn kruskal_wallis(a: &[f64], b: &[f64]) -> Result<TestResult> {
    nonempty(a, b)?;
    let (n, m) = (a.len() as f64, b.len() as f64);
    let big_n = n + m;
    let (ra, ties) = pooled_ranks(a, b);
    let rb = big_n * (big_n + 1.0) / 2.0 - ra;
    let h_raw = 12.0 / (big_n * (big_n + 1.0)) * (ra * ra / n + rb * rb / m) - 3.0 * (big_n + 1.0);
    let correction = 1.0 - ties / (big_n * big_n * big_n - big_n);
    let h = if correction > 0.0 {
        (h_raw / correction).max(0.0)
    } else {
        0.0
    };
    Ok(TestResult {
        test_name: TestName::KruskalWallis,
        statistic: h,
        p_value: erfc((h / 2.0).sqrt()).clamp(0.0, 1.0),
    })
}

/// `(#{a > b} - #{a < b}) / (N M)` via binary search in sorted `b`.
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> Result<f64> {
    nonempty(a, b)?;
    let sb = sorted(b);
    let m = sb.len() as u64;
    let (mut greater, mut less) = (0u64, 0u64);
    for &x in a {
        let below = sb.partition_point(|&y| y < x) as u64;
        let at_or_below = sb.partition_point(|&y| y <= x) as u64;
        greater += below;
        less += m - at_or_below;
    }
    Ok((greater as f64 - less as f64) / (a.len() as f64 * m as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectMagnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl EffectMagnitude {
    /// Romano et al. cut-offs 0.147 / 0.33 / 0.474.
    pub fn classify(delta: f64) -> Self {
        match delta.abs() {
            d if d < 0.147 => EffectMagnitude::Negligible,
            d if d < 0.33 => EffectMagnitude::Small,
            d if d < 0.474 => EffectMagnitude::Medium,
            _ => EffectMagnitude::Large,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Descriptive {
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Mean, sample sd, median, adjusted Fisher-Pearson skewness and
/// bias-corrected excess kurtosis.
pub fn descriptive(values: &[f64]) -> Result<Descriptive> {
    let n = values.len();
    if n < 4 {
        return Err(Error::Undefined(format!("kurtosis needs at least 4 values, got {n}")));
    }
    let nf = n as f64;
    let (mu, m2, m3, m4) = central_moments(values);
    if m2 <= 0.0 {
        return Err(Error::Undefined(
            "zero-variance sample has no skewness or kurtosis".into(),
        ));
    }
    let g1 = m3 / m2.powf(1.5);
    let g2 = m4 / (m2 * m2) - 3.0;
    let skewness = g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0);
    let excess_kurtosis = ((nf + 1.0) * g2 + 6.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0));
    Ok(Descriptive {
        mean: mu,
        sd: (m2 * nf / (nf - 1.0)).sqrt(),
        median: quantile(&sorted(values), 0.5),
        skewness,
        excess_kurtosis,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub n: usize,
    pub descriptive: Descriptive,
    pub bins: BinningRules,
    pub entropy_bits: f64,
}

pub fn summarize(sample: &SampleSet) -> Result<DistributionSummary> {
    let bins = binning_rules(&sample.values)?;
    let hist = histogram(&sample.values, bins.consensus, min_max(&sample.values))?;
    Ok(DistributionSummary {
        n: sample.len(),
        descriptive: descriptive(&sample.values)?,
        entropy_bits: shannon_entropy(&hist),
        bins,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledBinning {
    pub n_bins: usize,
    pub range: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub a: DistributionSummary,
    pub b: DistributionSummary,
    pub pooled_binning: PooledBinning,
    pub kl_ab_bits: f64,
    pub kl_ba_bits: f64,
    pub js_bits: f64,
    pub tests: Vec<TestResult>,
    pub cliffs_delta: f64,
    pub effect_magnitude: EffectMagnitude,
}

/// Builds both histograms on the pooled range with the pooled consensus
/// bin count.
pub fn pooled_histograms(a: &[f64], b: &[f64]) -> Result<(HistogramSpec, HistogramSpec)> {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n_bins = consensus_bins(&pooled)?;
    let range = min_max(&pooled);
    Ok((histogram(a, n_bins, range)?, histogram(b, n_bins, range)?))
}

pub fn compare(a: &SampleSet, b: &SampleSet) -> Result<ComparisonReport> {
    let (pa, pb) = pooled_histograms(&a.values, &b.values)?;
    let delta = cliffs_delta(&a.values, &b.values)?;
    Ok(ComparisonReport {
        a: summarize(a)?,
        b: summarize(b)?,
        pooled_binning: PooledBinning {
            n_bins: pa.n_bins,
            range: pa.range,
        },
        kl_ab_bits: kl_divergence(&pa, &pb)?,
        kl_ba_bits: kl_divergence(&pb, &pa)?,
        js_bits: js_divergence(&pa, &pb)?,
        tests: vec![
            ks_test(&a.values, &b.values)?,
            mann_whitney(&a.values, &b.values)?,
            kruskal_wallis(&a.values, &b.values)?,
        ],
        cliffs_delta: delta,
        effect_magnitude: EffectMagnitude::classify(delta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::Frame;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn normal_sample(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.sample(StandardNormal)).collect()
    }

    fn hist(p: &[f64]) -> HistogramSpec {
        HistogramSpec {
            n_bins: p.len(),
            range: (0.0, 1.0),
            probabilities: p.to_vec(),
        }
    }

    fn toy_trajectory(frames: usize, n: usize) -> Trajectory<f64> {
        Trajectory {
            x_min: 0.0,
            dx: 1.0,
            frames: (0..frames)
                .map(|f| Frame {
                    time: f as f64,
                    amplitudes: (0..n).map(|i| Complex64::new(1.0 + i as f64, f as f64)).collect(),
                })
                .collect(),
            scalars: vec![],
            absorbed: 0.0,
        }
    }

    #[test]
    fn quotas_follow_frames() {
        let t = toy_trajectory(200, 2048);
        let s = stratified_sample(
            &t,
            &SamplingPolicy {
                n_total: 100_000,
                seed: 1,
                density_floor: 0.0,
            },
            "r",
        )
        .unwrap();
        assert_eq!(s.amplitudes.len(), 100_000);
        for f in 0..200 {
            assert_eq!(s.amplitudes.iter().filter(|z| z.im == f as f64).count(), 500);
        }
        assert_eq!(frame_quotas(&[10, 10, 10], 7), vec![3, 2, 2]);
        assert_eq!(frame_quotas(&[1, 10, 10], 9), vec![1, 4, 4]);
        assert_eq!(frame_quotas(&[1, 2], 9), vec![1, 2]);
        assert_eq!(frame_quotas(&[100, 300], 8), vec![2, 6]);
        let q = frame_quotas(&[345, 346, 1943, 2048, 17], 1000);
        assert_eq!(q.iter().sum::<usize>(), 1000);
    }

    #[test]
    fn exhaustive_single_frame() {
        let t = toy_trajectory(1, 2048);
        for seed in [0, 99] {
            let s = stratified_sample(
                &t,
                &SamplingPolicy {
                    n_total: 2048,
                    seed,
                    density_floor: 0.0,
                },
                "r",
            )
            .unwrap();
            assert_eq!(s.amplitudes, t.frames[0].amplitudes);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let t = toy_trajectory(7, 300);
        let p = SamplingPolicy {
            n_total: 1000,
            seed: 5,
            density_floor: 0.0,
        };
        assert_eq!(
            stratified_sample(&t, &p, "r").unwrap(),
            stratified_sample(&t, &p, "r").unwrap()
        );
        let other = SamplingPolicy { seed: 6, ..p };
        assert_ne!(
            stratified_sample(&t, &p, "r").unwrap(),
            stratified_sample(&t, &other, "r").unwrap()
        );
    }

    #[test]
    fn sampling_respects_floor_and_clamps() {
        let mut t = toy_trajectory(2, 10);
        t.frames[0].amplitudes[3] = Complex64::new(1e-6, 0.0);
        let s = stratified_sample(
            &t,
            &SamplingPolicy {
                n_total: 100,
                seed: 0,
                density_floor: 1e-9,
            },
            "r",
        )
        .unwrap();
        assert_eq!(s.amplitudes.len(), 19);
        assert_eq!(s.provenance.drawn, 19);
        assert!(stratified_sample(
            &t,
            &SamplingPolicy {
                n_total: 1,
                seed: 0,
                density_floor: 0.0
            },
            "r"
        )
        .is_err());
    }

    #[test]
    fn bin_rules_on_normal_sample() {
        let x = normal_sample(100_000, 3);
        let r = binning_rules(&x).unwrap();
        assert_eq!(r.sturges, 18);
        assert_eq!(r.rice, 93);
        assert_eq!(r.sqrt, 317);
        // Independent evaluation of the remaining rules.
        let s = sorted(&x);
        let n = x.len() as f64;
        let range = s[s.len() - 1] - s[0];
        let mu = x.iter().sum::<f64>() / n;
        let sd = (x.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let scott = (range / (3.49 * sd * n.powf(-1.0 / 3.0))).ceil() as usize;
        assert_eq!(r.scott, Some(scott));
        let mut all = [
            r.sturges,
            r.rice,
            r.sqrt,
            scott,
            r.freedman_diaconis.unwrap(),
            r.doane.unwrap(),
        ];
        all.sort_unstable();
        assert_eq!(r.consensus, all[2]);
    }

    #[test]
    fn bin_rule_edge_cases() {
        assert_eq!(consensus_bins(&[2.5; 100]).unwrap(), 10);
        let u: Vec<f64> = (0..8).map(|i| i as f64).collect();
        assert_eq!(binning_rules(&u).unwrap().sturges, 4);
        assert!(consensus_bins(&[1.0; 7]).is_err());
    }

    #[test]
    fn entropy_cases() {
        assert_relative_eq!(shannon_entropy(&hist(&[0.125; 8])), 3.0);
        assert_eq!(shannon_entropy(&hist(&[0.0, 1.0, 0.0])), 0.0);
    }

    #[test]
    fn kl_cases() {
        let p = hist(&[0.3, 0.7]);
        assert!(kl_divergence(&p, &p).unwrap().abs() < 1e-15);
        let d = kl_divergence(&hist(&[1.0, 0.0]), &hist(&[0.5, 0.5])).unwrap();
        assert_relative_eq!(d, 1.0, epsilon = 1e-9);
        let q = HistogramSpec {
            n_bins: 3,
            range: (0.0, 1.0),
            probabilities: vec![0.2, 0.3, 0.5],
        };
        assert!(kl_divergence(&p, &q).is_err());
        assert!(js_divergence(&p, &q).is_err());
    }

    #[test]
    fn js_cases() {
        let p = hist(&[0.25, 0.75]);
        assert_eq!(js_divergence(&p, &p).unwrap(), 0.0);
        assert_relative_eq!(js_divergence(&hist(&[1.0, 0.0]), &hist(&[0.0, 1.0])).unwrap(), 1.0);
    }

    #[test]
    fn ks_cases() {
        let a = normal_sample(500, 1);
        let r = ks_test(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        let b: Vec<f64> = a.iter().map(|x| x + 100.0).collect();
        let r = ks_test(&a, &b).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!(r.p_value < 1e-10);
        assert!(ks_test(&[], &a).is_err());
    }

    #[test]
    fn kolmogorov_distribution_values() {
        // Classical critical values: P(K > 1.358) = 0.05, P(K > 1.628) = 0.01.
        assert!((kolmogorov_survival(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_survival(1.6276) - 0.01).abs() < 1e-3);
        // Both series agree where they meet.
        let lo = kolmogorov_survival(1.18 - 1e-12);
        let hi = kolmogorov_survival(1.18);
        assert!((lo - hi).abs() < 1e-10);
    }

    #[test]
    fn rank_test_cases() {
        let a = normal_sample(300, 2);
        let mw = mann_whitney(&a, &a).unwrap();
        assert_relative_eq!(mw.statistic, 300.0 * 300.0 / 2.0);
        assert!(mw.p_value > 0.99);
        let kw = kruskal_wallis(&a, &a).unwrap();
        assert!(kw.statistic.abs() < 1e-9);
        assert!(kw.p_value > 0.99);

        let b: Vec<f64> = a.iter().map(|x| x - 50.0).collect();
        let mw = mann_whitney(&a, &b).unwrap();
        assert_eq!(mw.statistic, 300.0 * 300.0);
        assert!(mw.p_value < 1e-10);
        assert!(kruskal_wallis(&a, &b).unwrap().p_value < 1e-10);
    }

    #[test]
    fn cliffs_delta_cases() {
        assert_eq!(cliffs_delta(&[5.0, 6.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(cliffs_delta(&[1.0, 2.0, 2.0], &[2.0, 1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(EffectMagnitude::classify(-0.018), EffectMagnitude::Negligible);
        assert_eq!(EffectMagnitude::classify(0.2), EffectMagnitude::Small);
        assert_eq!(EffectMagnitude::classify(-0.4), EffectMagnitude::Medium);
        assert_eq!(EffectMagnitude::classify(0.9), EffectMagnitude::Large);
    }

    #[test]
    fn moments_of_normal_fixture() {
        let d = descriptive(&normal_sample(100_000, 11)).unwrap();
        assert!(d.skewness.abs() < 0.03, "{}", d.skewness);
        assert!(d.excess_kurtosis.abs() < 0.06, "{}", d.excess_kurtosis);
        assert!((d.sd - 1.0).abs() < 0.01);
        assert!(descriptive(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn descriptive_small_exact() {
        let d = descriptive(&[1.0, 2.0, 3.0, 4.0, 10.0]).unwrap();
        assert_relative_eq!(d.mean, 4.0);
        assert_relative_eq!(d.median, 3.0);
        assert_relative_eq!(d.sd, 12.5f64.sqrt());
        // scipy.stats.skew(bias=False) / kurtosis(bias=False)
        assert_relative_eq!(d.skewness, 1.6970562748477143, max_relative = 1e-12);
        assert_relative_eq!(d.excess_kurtosis, 3.152000000000001, max_relative = 1e-12);
    }

    #[test]
    fn self_comparison_is_null() {
        let s = SampleSet::from_values(normal_sample(2000, 4).iter().map(|x| x * x).collect());
        let r = compare(&s, &s).unwrap();
        assert!(r.kl_ab_bits.abs() < 1e-12 && r.kl_ba_bits.abs() < 1e-12);
        assert_eq!(r.js_bits, 0.0);
        assert_eq!(r.cliffs_delta, 0.0);
        assert_eq!(r.tests[0].statistic, 0.0);
    }

    fn brute_delta(a: &[f64], b: &[f64]) -> f64 {
        let (mut gt, mut lt) = (0i64, 0i64);
        for x in a {
            for y in b {
                if x > y {
                    gt += 1;
                } else if x < y {
                    lt += 1;
                }
            }
        }
        (gt - lt) as f64 / (a.len() * b.len()) as f64
    }

    proptest::proptest! {
        #[test]
        fn delta_matches_definition(
            a in proptest::collection::vec(-20i32..20, 1..60),
            b in proptest::collection::vec(-20i32..20, 1..60),
        ) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let d = cliffs_delta(&a, &b).unwrap();
            proptest::prop_assert_eq!(d, brute_delta(&a, &b));
            proptest::prop_assert_eq!(cliffs_delta(&b, &a).unwrap(), -d);
        }

        #[test]
        fn rank_tests_invariant_under_monotone_maps(
            a in proptest::collection::vec(0.01f64..10.0, 2..50),
            b in proptest::collection::vec(0.01f64..10.0, 2..50),
        ) {
            let f = |v: &[f64]| v.iter().map(|x| x.ln() * 3.0 + 1.0).collect::<Vec<_>>();
            let (fa, fb) = (f(&a), f(&b));
            proptest::prop_assert_eq!(mann_whitney(&a, &b).unwrap().statistic, mann_whitney(&fa, &fb).unwrap().statistic);
            proptest::prop_assert_eq!(kruskal_wallis(&a, &b).unwrap().statistic, kruskal_wallis(&fa, &fb).unwrap().statistic);
            proptest::prop_assert_eq!(ks_test(&a, &b).unwrap().statistic, ks_test(&fa, &fb).unwrap().statistic);
            let d = ks_test(&a, &b).unwrap().statistic;
            proptest::prop_assert!((0.0..=1.0).contains(&d));
        }
    }
}
