//! Parallel Monte Carlo ensemble runs with scheduler-independent results.
//!
//! Samples are indexed; sample `i` always draws from RNG substream `i`, and
//! accumulation happens in fixed-size batches merged in batch order, so the
//! emitted statistics are bit-identical for every worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cg::CgTable;
use crate::ensembles::{
    sample_cue, sample_majorana, sample_symmetric_projection, EnsembleKind, RngStream,
};
use crate::error::{Error, Result};
use crate::half_integer::HalfInt;
use crate::multipole::{multipoles_with, projected_multipoles, MultipoleSpectrum};
use crate::oracles::{cs_multipole_lengths, cs_quantumness};

/// Largest spin the engine accepts (S = 150).
pub const MAX_SPIN: HalfInt = HalfInt::from_twice(300);

/// Samples per accumulation batch; fixed so that batch boundaries (and hence
/// float summation order) never depend on the worker count.
const BATCH_SIZE: u64 = 512;

/// Batches evaluated per parallel wave before a serial in-order merge.
const MERGE_WAVE: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum HistogramScale {
    #[serde(rename = "log")]
    Log,
    #[serde(rename = "linear")]
    Linear,
}

/// Full description of one ensemble run; serializes bit-stably into the run
/// manifest.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub spin: HalfInt,
    pub ensemble: EnsembleKind,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub histogram_bins: usize,
    pub histogram_scale: HistogramScale,
}

impl RunConfig {
    pub fn new(spin: HalfInt, ensemble: EnsembleKind, samples: u64, seed: u64) -> Self {
        RunConfig {
            spin,
            ensemble,
            samples,
            seed,
            workers: 1,
            histogram_bins: 120,
            histogram_scale: HistogramScale::Log,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.spin.twice() < 1 {
            return Err(Error::Domain("spin must be at least 1/2".into()));
        }
        if self.spin > MAX_SPIN {
            return Err(Error::OutOfRange {
                spin: self.spin,
                max: MAX_SPIN,
            });
        }
        if self.samples == 0 {
            return Err(Error::Domain("need at least one sample".into()));
        }
        if self.histogram_bins == 0 {
            return Err(Error::Domain("need at least one histogram bin".into()));
        }
        Ok(())
    }
}

/// Accumulated ensemble statistics. Variances are population variances over
/// the drawn samples; histogram column `k` counts every sample's `L_K` value
/// (clamped into the edge bins), so each column sums to `n_samples`.
///
/// For the symmetric-projection ensemble the statistics describe the
/// unnormalized projected states; `renormalized_quantumness` gives the
/// ensemble-level quantumness after the total-purity rescaling.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub spin: HalfInt,
    pub ensemble: EnsembleKind,
    pub n_samples: u64,
    pub mean_l: Vec<f64>,
    pub var_l: Vec<f64>,
    pub mean_a: Vec<f64>,
    pub var_a: Vec<f64>,
    pub mean_e: f64,
    pub var_e: f64,
    /// Mean `|rho_Kq|²` packed ascending `(K, q)` at index `K² + (K+q)`.
    pub mean_sq_rho: Vec<f64>,
    pub hist_edges: Vec<f64>,
    /// `hist[k][bin]` counts of `L_K` per bin.
    pub hist: Vec<Vec<u64>>,
    /// Moments of the per-sample pair `u = Σ_{K>=1} L_K/(2K+1)`,
    /// `v = Σ_{K>=1} L_K`, feeding the renormalized quantumness ratio.
    pub mean_u: f64,
    pub mean_v: f64,
    pub var_u: f64,
    pub var_v: f64,
    pub cov_uv: f64,
}

impl EnsembleStats {
    pub fn stderr_l(&self, k: u32) -> f64 {
        (self.var_l[k as usize] / self.n_samples as f64).sqrt()
    }

    pub fn stderr_a(&self, m: u32) -> f64 {
        (self.var_a[m as usize] / self.n_samples as f64).sqrt()
    }

    pub fn stderr_e(&self) -> f64 {
        (self.var_e / self.n_samples as f64).sqrt()
    }

    /// Ensemble-level quantumness with the spin-dependent total-purity
    /// rescaling (`Σ_{K>=1,q} mean|rho_Kq|² -> 2S/(2S+1)`, monopole pinned),
    /// plus a delta-method standard error for the ratio estimator.
    pub fn renormalized_quantumness(&self) -> (f64, f64) {
        let s2 = self.spin.twice() as f64;
        let target = s2 / (s2 + 1.0);
        let ratio = self.mean_u / self.mean_v;
        let value = 1.0 - 1.0 / (s2 + 1.0) - target * ratio;
        let n = self.n_samples as f64;
        let var_ratio = (self.var_u - 2.0 * ratio * self.cov_uv + ratio * ratio * self.var_v)
            / (self.mean_v * self.mean_v)
            / n;
        (value, target * var_ratio.max(0.0).sqrt())
    }
}

fn histogram_edges(bins: usize, scale: HistogramScale) -> Vec<f64> {
    match scale {
        HistogramScale::Log => (0..=bins)
            .map(|i| 10f64.powf(-16.0 + 16.0 * i as f64 / bins as f64))
            .collect(),
        HistogramScale::Linear => (0..=bins).map(|i| i as f64 / bins as f64).collect(),
    }
}

fn histogram_bin(value: f64, bins: usize, scale: HistogramScale) -> usize {
    let t = match scale {
        HistogramScale::Log => (value.log10() + 16.0) / 16.0,
        HistogramScale::Linear => value,
    };
    if !t.is_finite() || t < 0.0 {
        return 0;
    }
    ((t * bins as f64) as usize).min(bins - 1)
}

/// Vector Welford accumulator (mean + second central moment).
#[derive(Clone)]
struct Moments {
    n: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(dim: usize) -> Self {
        Moments {
            n: 0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
        }
    }

    fn push(&mut self, values: &[f64]) {
        self.n += 1;
        let n = self.n as f64;
        for (i, &x) in values.iter().enumerate() {
            let d = x - self.mean[i];
            self.mean[i] += d / n;
            self.m2[i] += d * (x - self.mean[i]);
        }
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other.clone();
            return;
        }
        let(na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * nb / n;
            self.m2[i] += other.m2[i] + d * d * na * nb / n;
        }
        self.n += other.n;
    }

    fn population_variance(&self) -> Vec<f64> {
        self.m2.iter().map(|&m| m / self.n as f64).collect()
    }
}

/// Bivariate Welford for the quantumness ratio pair.
#[derive(Clone)]
struct PairMoments {
    n: u64,
    mean_u: f64,
    mean_v: f64,
    m2_u: f64,
    m2_v: f64,
    c_uv: f64,
}

impl PairMoments {
    fn new() -> Self {
        PairMoments {
            n: 0,
            mean_u: 0.0,
            mean_v: 0.0,
            m2_u: 0.0,
            m2_v: 0.0,
            c_uv: 0.0,
        }
    }

    fn push(&mut self, u: f64, v: f64) {
        self.n += 1;
        let n = self.n as f64;
        let du = u - self.mean_u;
        self.mean_u += du / n;
        self.m2_u += du * (u - self.mean_u);
        let dv = v - self.mean_v;
        self.mean_v += dv / n;
        self.m2_v += dv * (v - self.mean_v);
        self.c_uv += du * (v - self.mean_v);
    }

    fn merge(&mut self, other: &PairMoments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let du = other.mean_u - self.mean_u;
        let dv = other.mean_v - self.mean_v;
        self.m2_u += other.m2_u + du * du * na * nb / n;
        self.m2_v += other.m2_v + dv * dv * na * nb / n;
        self.c_uv += other.c_uv + du * dv * na * nb / n;
        self.mean_u += du * nb / n;
        self.mean_v += dv * nb / n;
        self.n += other.n;
    }
}

struct BatchAcc {
    l: Moments,
    a: Moments,
    e: Moments,
    sq: Moments,
    pair: PairMoments,
    hist: Vec<u64>,
}

impl BatchAcc {
    fn new(dim: usize, bins: usize) -> Self {
        BatchAcc {
            l: Moments::new(dim),
            a: Moments::new(dim),
            e: Moments::new(1),
            sq: Moments::new(dim * dim),
            pair: PairMoments::new(),
            hist: vec![0; dim * bins],
        }
    }

    fn push_spectrum(&mut self, spec: &MultipoleSpectrum, cfg: &RunConfig) {
        let dim = spec.spin().dimension();
        let lengths = spec.lengths();
        self.l.push(lengths);
        let mut a = vec![0.0; dim];
        for k in 1..dim {
            a[k] = a[k - 1] + lengths[k];
        }
        self.a.push(&a);
        self.e.push(&[spec.quantumness()]);
        let mut sq = vec![0.0; dim * dim];
        let mut u = 0.0;
        for k in 0..dim as u32 {
            for q in -(k as i32)..=(k as i32) {
                let idx = (k as usize) * (k as usize) + (k as i64 + i64::from(q)) as usize;
                sq[idx] = spec.rho(k, q).norm_sqr();
            }
            if k >= 1 {
                u += lengths[k as usize] / f64::from(2 * k + 1);
            }
        }
        self.sq.push(&sq);
        self.pair.push(u, a[dim - 1]);
        for (k, &l) in lengths.iter().enumerate() {
            let bin = histogram_bin(l, cfg.histogram_bins, cfg.histogram_scale);
            self.hist[k * cfg.histogram_bins + bin] += 1;
        }
    }

    fn merge(&mut self, other: &BatchAcc) {
        self.l.merge(&other.l);
        self.a.merge(&other.a);
        self.e.merge(&other.e);
        self.sq.merge(&other.sq);
        self.pair.merge(&other.pair);
        for (h, o) in self.hist.iter_mut().zip(&other.hist) {
            *h += o;
        }
    }
}

fn sample_spectrum(cfg: &RunConfig, table: &CgTable, index: u64) -> MultipoleSpectrum {
    let stream = RngStream::new(cfg.seed, index);
    match cfg.ensemble {
        EnsembleKind::MajoranaUniform => {
            let (_, state) = sample_majorana(cfg.spin, &stream);
            multipoles_with(table, &state)
        }
        EnsembleKind::Cue => multipoles_with(table, &sample_cue(cfg.spin, &stream)),
        EnsembleKind::SymmetricProjection => {
            let (projected, _) = sample_symmetric_projection(cfg.spin, &stream);
            projected_multipoles(&projected)
        }
    }
}

/// Runs the configured ensemble and accumulates its statistics. The result
/// is independent of `cfg.workers`, bit for bit.
pub fn run_ensemble(cfg: &RunConfig) -> Result<EnsembleStats> {
    cfg.validate()?;
    let dim = cfg.spin.dimension();
    let table = CgTable::shared(cfg.spin);
    // warm the full table once, single-threaded, before workers share it
    for k in 0..=(cfg.spin.twice() as u32) {
        for q in -(k as i32)..=(k as i32) {
            table.row(k, q);
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;

    let n_batches = cfg.samples.div_ceil(BATCH_SIZE);
    let mut total = BatchAcc::new(dim, cfg.histogram_bins);
    let mut wave_start = 0u64;
    while wave_start < n_batches {
        let wave_end = (wave_start + MERGE_WAVE as u64).min(n_batches);
        let accs: Vec<BatchAcc> = pool.install(|| {
            (wave_start..wave_end)
                .into_par_iter()
                .map(|b| {
                    let lo = b * BATCH_SIZE;
                    let hi = ((b + 1) * BATCH_SIZE).min(cfg.samples);
                    let mut acc = BatchAcc::new(dim, cfg.histogram_bins);
                    for i in lo..hi {
                        let spec = sample_spectrum(cfg, &table, i);
                        acc.push_spectrum(&spec, cfg);
                    }
                    acc
                })
                .collect()
        });
        for acc in &accs {
            total.merge(acc);
        }
        wave_start = wave_end;
    }

    let bins = cfg.histogram_bins;
    Ok(EnsembleStats {
        spin: cfg.spin,
        ensemble: cfg.ensemble,
        n_samples: cfg.samples,
        mean_l: total.l.mean.clone(),
        var_l: total.l.population_variance(),
        mean_a: total.a.mean.clone(),
        var_a: total.a.population_variance(),
        mean_e: total.e.mean[0],
        var_e: total.e.population_variance()[0],
        mean_sq_rho: total.sq.mean.clone(),
        hist_edges: histogram_edges(bins, cfg.histogram_scale),
        hist: (0..dim)
            .map(|k| total.hist[k * bins..(k + 1) * bins].to_vec())
            .collect(),
        mean_u: total.pair.mean_u,
        mean_v: total.pair.mean_v,
        var_u: total.pair.m2_u / cfg.samples as f64,
        var_v: total.pair.m2_v / cfg.samples as f64,
        cov_uv: total.pair.c_uv / cfg.samples as f64,
    })
}

// ---------------------------------------------------------------------------
// K_max scaling fit
// ---------------------------------------------------------------------------

/// What family the scaling fit samples from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitFamily {
    Random(EnsembleKind),
    /// Deterministic coherent-state baseline (no sampling).
    Coherent,
}

/// Through-origin least-squares fit of the dominant multipole order against
/// `sqrt(S)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingFit {
    pub spins: Vec<HalfInt>,
    pub kmax: Vec<u32>,
    /// Coefficient of `K_max = a sqrt(S)`.
    pub a: f64,
    /// Root-mean-square residual in multipole-order units.
    pub residual: f64,
    /// Set when the residual shows the family does not follow `a sqrt(S)`
    /// (e.g. fully random amplitudes, whose mean lengths grow with K).
    pub rejected: bool,
}

/// RMS residual above which the sqrt fit is flagged as rejected.
const FIT_REJECT_RESIDUAL: f64 = 1.0;

fn argmax_k(mean_l: &[f64]) -> u32 {
    let mut best = 1usize;
    for k in 2..mean_l.len() {
        if mean_l[k] > mean_l[best] {
            best = k;
        }
    }
    best as u32
}

/// Fits `K_max = a sqrt(S)` over at least four spins, each with `S >= 4`.
/// Random families run one ensemble per spin (seed offset by the spin index);
/// the coherent baseline uses closed-form lengths.
pub fn fit_kmax_scaling(
    spins: &[HalfInt],
    family: FitFamily,
    template: &RunConfig,
) -> Result<ScalingFit> {
    if spins.len() < 4 {
        return Err(Error::Domain("scaling fit needs at least 4 spins".into()));
    }
    if spins.iter().any(|s| s.twice() < 8) {
        return Err(Error::Domain("scaling fit needs S >= 4 throughout".into()));
    }
    let mut kmax = Vec::with_capacity(spins.len());
    for (i, &spin) in spins.iter().enumerate() {
        let k = match family {
            FitFamily::Coherent => argmax_k(&cs_multipole_lengths(spin)),
            FitFamily::Random(kind) => {
                let mut cfg = template.clone();
                cfg.spin = spin;
                cfg.ensemble = kind;
                cfg.seed = template.seed.wrapping_add(i as u64);
                argmax_k(&run_ensemble(&cfg)?.mean_l)
            }
        };
        kmax.push(k);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (&spin, &k) in spins.iter().zip(&kmax) {
        let s = spin.to_f64();
        num += s.sqrt() * f64::from(k);
        den += s;
    }
    let a = num / den;
    let ss: f64 = spins
        .iter()
        .zip(&kmax)
        .map(|(&spin, &k)| {
            let r = f64::from(k) - a * spin.to_f64().sqrt();
            r * r
        })
        .sum();
    let residual = (ss / spins.len() as f64).sqrt();
    Ok(ScalingFit {
        spins: spins.to_vec(),
        kmax,
        a,
        residual,
        rejected: residual > FIT_REJECT_RESIDUAL,
    })
}

// ---------------------------------------------------------------------------
// three-ensemble comparison
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuantumnessEntry {
    pub kind: EnsembleKind,
    pub value: f64,
    pub stderr: f64,
}

/// Whether the expected quantumness ordering
/// `symproj < majorana < cue` holds with 3-sigma separated gaps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderingOutcome {
    Confirmed,
    /// Standard-error intervals overlap; more samples needed.
    Inconclusive,
    Violated,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleComparison {
    pub spin: HalfInt,
    pub samples: u64,
    pub stats: Vec<EnsembleStats>,
    pub cs_lengths: Vec<f64>,
    pub cs_quantumness: f64,
    /// Mean quantumness per ensemble: per-sample mean for majorana/cue, the
    /// renormalized ensemble-level value for symproj.
    pub quantumness: Vec<QuantumnessEntry>,
    pub ordering: OrderingOutcome,
}

/// Runs all three ensembles at the same spin and sample count (plus the
/// deterministic coherent baseline) and checks the quantumness ordering.
pub fn compare_ensembles(
    spin: HalfInt,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<EnsembleComparison> {
    let mut stats = Vec::new();
    for kind in EnsembleKind::ALL {
        let cfg = RunConfig::new(spin, kind, samples, seed).with_workers(workers);
        stats.push(run_ensemble(&cfg)?);
    }
    let entry = |s: &EnsembleStats| -> QuantumnessEntry {
        match s.ensemble {
            EnsembleKind::SymmetricProjection => {
                let (value, stderr) = s.renormalized_quantumness();
                QuantumnessEntry {
                    kind: s.ensemble,
                    value,
                    stderr,
                }
            }
            _ => QuantumnessEntry {
                kind: s.ensemble,
                value: s.mean_e,
                stderr: s.stderr_e(),
            },
        }
    };
    let quantumness: Vec<QuantumnessEntry> = stats.iter().map(entry).collect();
    let by_kind = |kind: EnsembleKind| -> &QuantumnessEntry {
        quantumness.iter().find(|e| e.kind == kind).unwrap()
    };
    let sym = by_kind(EnsembleKind::SymmetricProjection);
    let maj = by_kind(EnsembleKind::MajoranaUniform);
    let cue = by_kind(EnsembleKind::Cue);
    let gap_ok = |lo: &QuantumnessEntry, hi: &QuantumnessEntry| {
        let sigma = (lo.stderr * lo.stderr + hi.stderr * hi.stderr).sqrt();
        if hi.value - lo.value > 3.0 * sigma {
            OrderingOutcome::Confirmed
        } else if lo.value - hi.value > 3.0 * sigma {
            OrderingOutcome::Violated
        } else {
            OrderingOutcome::Inconclusive
        }
    };
    let ordering = match (gap_ok(sym, maj), gap_ok(maj, cue)) {
        (OrderingOutcome::Confirmed, OrderingOutcome::Confirmed) => OrderingOutcome::Confirmed,
        (OrderingOutcome::Violated, _) | (_, OrderingOutcome::Violated) => {
            OrderingOutcome::Violated
        }
        _ => OrderingOutcome::Inconclusive,
    };
    Ok(EnsembleComparison {
        spin,
        samples,
        stats,
        cs_lengths: cs_multipole_lengths(spin),
        cs_quantumness: cs_quantumness(spin),
        quantumness,
        ordering,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{cue_cumulative, cue_mean_quantumness};
    use approx::assert_abs_diff_eq;

    fn quick_cfg(s2: i64, kind: EnsembleKind, samples: u64, seed: u64) -> RunConfig {
        RunConfig::new(HalfInt::from_twice(s2), kind, samples, seed)
    }

    #[test]
    fn stats_are_bit_identical_across_worker_counts() {
        let mut baseline: Option<String> = None;
        for workers in [1usize, 3, 8] {
            let cfg = quick_cfg(9, EnsembleKind::MajoranaUniform, 700, 42).with_workers(workers);
            let stats = run_ensemble(&cfg).unwrap();
            let json = serde_json::to_string(&stats).unwrap();
            match &baseline {
                None => baseline = Some(json),
                Some(b) => assert_eq!(&json, b, "workers = {workers} diverged"),
            }
        }
    }

    #[test]
    fn single_sample_run_has_zero_variance() {
        let cfg = quick_cfg(5, EnsembleKind::Cue, 1, 7);
        let stats = run_ensemble(&cfg).unwrap();
        for (&v, &m) in stats.var_l.iter().zip(&stats.mean_l) {
            assert_eq!(v, 0.0);
            assert!(m.is_finite());
        }
        assert_eq!(stats.var_e, 0.0);
        // the single sample's spectrum is the mean
        let spec = sample_spectrum(&cfg, &CgTable::shared(cfg.spin), 0);
        for k in 0..=5u32 {
            assert_abs_diff_eq!(stats.mean_l[k as usize], spec.length(k), epsilon = 1e-15);
        }
    }

    #[test]
    fn cue_means_match_the_closed_forms() {
        let spin = HalfInt::from_int(5);
        let cfg = quick_cfg(10, EnsembleKind::Cue, 20_000, 11).with_workers(8);
        let stats = run_ensemble(&cfg).unwrap();
        for m in 1..=10u32 {
            let oracle = cue_cumulative(spin, m);
            let se = stats.stderr_a(m);
            assert!(
                (stats.mean_a[m as usize] - oracle).abs() < 4.0 * se,
                "A_{m}: {:.5e} vs {oracle:.5e} (se {se:.1e})",
                stats.mean_a[m as usize]
            );
        }
        let e_oracle = cue_mean_quantumness(spin);
        assert!((stats.mean_e - e_oracle).abs() < 4.0 * stats.stderr_e());
        // purity of means
        let total: f64 = stats.mean_l.iter().sum();
        assert!((total - 1.0).abs() < 5.0 / (stats.n_samples as f64).sqrt());
    }

    #[test]
    fn histogram_columns_sum_to_sample_count() {
        let cfg = quick_cfg(6, EnsembleKind::MajoranaUniform, 300, 3);
        let stats = run_ensemble(&cfg).unwrap();
        for column in &stats.hist {
            let total: u64 = column.iter().sum();
            assert_eq!(total, 300);
        }
        assert_eq!(stats.hist_edges.len(), cfg.histogram_bins + 1);
    }

    #[test]
    fn cue_quantumness_concentrates_with_spin() {
        let mut previous = f64::MAX;
        for s2 in [4i64, 10, 20, 40] {
            let cfg = quick_cfg(s2, EnsembleKind::Cue, 2_000, 5).with_workers(8);
            let stats = run_ensemble(&cfg).unwrap();
            assert!(
                stats.var_e < previous,
                "var_e should decrease with S (S2 = {s2})"
            );
            previous = stats.var_e;
        }
    }

    #[test]
    fn uniform_constellations_carry_more_low_order_weight_than_cue() {
        // at M = 1 the uniform-constellation mean cumulative exceeds the
        // fully random one: random amplitudes hide their weight in high K
        let spin = HalfInt::ONE;
        let cfg = quick_cfg(2, EnsembleKind::MajoranaUniform, 20_000, 19).with_workers(8);
        let stats = run_ensemble(&cfg).unwrap();
        let cue_a1 = cue_cumulative(spin, 1);
        let gap = stats.mean_a[1] - cue_a1;
        assert!(
            gap > 3.0 * stats.stderr_a(1),
            "expected uniform-constellation A_1 above the cue mean: gap {gap:.4}"
        );
        // analytic check of the uniform-constellation value, 2 ln2 - 1
        assert_abs_diff_eq!(
            stats.mean_a[1],
            2.0 * std::f64::consts::LN_2 - 1.0,
            epsilon = 4.0 * stats.stderr_a(1)
        );
    }

    #[test]
    fn all_ensembles_coincide_at_spin_half() {
        // L_1 and E are constants at S = 1/2; the component moments
        // E|rho_1q|² = 1/6 do fluctuate and must agree across families
        let mut means = Vec::new();
        for kind in EnsembleKind::ALL {
            let cfg = quick_cfg(1, kind, 8_000, 23).with_workers(4);
            let stats = run_ensemble(&cfg).unwrap();
            let sq10 = stats.mean_sq_rho[1 + 1]; // pack (1, 0)
            let sq11 = stats.mean_sq_rho[1 + 2]; // pack (1, 1)
            means.push((sq10, sq11));
        }
        // Var(|rho_10|²) = (1/5 - 1/9)/4 at S=1/2, so se ≈ 1.7e-3 here
        for &(sq10, sq11) in &means {
            assert_abs_diff_eq!(sq10, 1.0 / 6.0, epsilon = 0.01);
            assert_abs_diff_eq!(sq11, 1.0 / 6.0, epsilon = 0.01);
        }
        for pair in means.windows(2) {
            assert_abs_diff_eq!(pair[0].0, pair[1].0, epsilon = 0.01);
            assert_abs_diff_eq!(pair[0].1, pair[1].1, epsilon = 0.01);
        }
    }

    #[test]
    fn comparison_orders_the_three_families() {
        let cmp = compare_ensembles(HalfInt::from_int(2), 6_000, 31, 8).unwrap();
        assert_eq!(cmp.ordering, OrderingOutcome::Confirmed);
        let value = |kind| {
            cmp.quantumness
                .iter()
                .find(|e: &&QuantumnessEntry| e.kind == kind)
                .unwrap()
                .value
        };
        assert!(value(EnsembleKind::SymmetricProjection) < value(EnsembleKind::MajoranaUniform));
        assert!(value(EnsembleKind::MajoranaUniform) < value(EnsembleKind::Cue));
        assert!(cmp.cs_quantumness < value(EnsembleKind::SymmetricProjection));
        // cue mean sits near its closed form
        assert_abs_diff_eq!(
            value(EnsembleKind::Cue),
            cue_mean_quantumness(HalfInt::from_int(2)),
            epsilon = 0.01
        );
    }

    #[test]
    fn coherent_fit_tracks_sqrt_spin() {
        let spins: Vec<HalfInt> = [9i64, 16, 25, 36, 49].iter().map(|&s| HalfInt::from_int(s)).collect();
        let template = quick_cfg(2, EnsembleKind::MajoranaUniform, 1, 0);
        let fit = fit_kmax_scaling(&spins, FitFamily::Coherent, &template).unwrap();
        for (&spin, &k) in fit.spins.iter().zip(&fit.kmax) {
            let estimate = spin.to_f64().sqrt() - 0.5;
            assert!(
                (f64::from(k) - estimate).abs() <= 1.0,
                "S = {spin}: k_max {k} vs sqrt(S)-1/2 = {estimate:.2}"
            );
        }
        assert!(!fit.rejected, "coherent baseline should fit sqrt(S)");
    }

    #[test]
    fn cue_fit_is_rejected() {
        // fully random amplitudes have mean lengths growing with K, so the
        // dominant order is 2S itself and the sqrt model fails loudly
        let spins: Vec<HalfInt> = [4i64, 5, 6, 8].iter().map(|&s| HalfInt::from_int(s)).collect();
        let template = quick_cfg(2, EnsembleKind::Cue, 400, 13).with_workers(4);
        let fit = fit_kmax_scaling(&spins, FitFamily::Random(EnsembleKind::Cue), &template).unwrap();
        for (&spin, &k) in fit.spins.iter().zip(&fit.kmax) {
            assert_eq!(i64::from(k), spin.twice(), "cue k_max should be 2S");
        }
        assert!(fit.rejected);
    }

    #[test]
    fn config_validation() {
        assert!(run_ensemble(&quick_cfg(400, EnsembleKind::Cue, 10, 0)).is_err());
        assert!(run_ensemble(&quick_cfg(4, EnsembleKind::Cue, 0, 0)).is_err());
        let mut bad = quick_cfg(4, EnsembleKind::Cue, 10, 0);
        bad.histogram_bins = 0;
        assert!(run_ensemble(&bad).is_err());
    }
}
