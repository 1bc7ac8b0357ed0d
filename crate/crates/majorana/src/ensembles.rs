//! Seedable samplers for the three random-state families.
//!
//! Every sampler draws from a counter-based substream: `(seed, stream)`
//! selects an independent ChaCha stream, so sample `i` of a run is the same
//! bit-for-bit no matter how samples are scheduled across threads.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::half_integer::HalfInt;
use crate::sphere::Direction;
use crate::states::{
    projected_state, state_from_constellation, Constellation, ProjectedState, SpinState,
};

/// The random-state families compared throughout.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum EnsembleKind {
    /// 2S independent uniform points on the sphere, state rebuilt from them.
    #[serde(rename = "majorana")]
    MajoranaUniform,
    /// Haar-uniform state vector in dimension 2S+1.
    #[serde(rename = "cue")]
    Cue,
    /// 2S independent uniform qubits projected onto the symmetric subspace,
    /// without per-sample renormalization.
    #[serde(rename = "symproj")]
    SymmetricProjection,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 3] = [
        EnsembleKind::MajoranaUniform,
        EnsembleKind::Cue,
        EnsembleKind::SymmetricProjection,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EnsembleKind::MajoranaUniform => "majorana",
            EnsembleKind::Cue => "cue",
            EnsembleKind::SymmetricProjection => "symproj",
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnsembleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "majorana" => Ok(EnsembleKind::MajoranaUniform),
            "cue" => Ok(EnsembleKind::Cue),
            "symproj" => Ok(EnsembleKind::SymmetricProjection),
            other => Err(format!(
                "unknown ensemble {other:?} (expected majorana, cue, or symproj)"
            )),
        }
    }
}

/// A reproducible substream: identical `(seed, stream)` yields bit-identical
/// draws on every run and thread count.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Uniform (Haar) direction: `cos θ ~ U(-1,1)`, `φ ~ U[0,2π)`.
pub fn sample_uniform_direction<R: Rng>(rng: &mut R) -> Direction {
    let cos_theta: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    Direction::new(cos_theta.acos(), phi)
}

/// 2S i.i.d. uniform points and the state they define.
pub fn sample_majorana(spin: HalfInt, stream: &RngStream) -> (Constellation, SpinState) {
    let mut rng = stream.rng();
    let points: Vec<Direction> = (0..spin.twice())
        .map(|_| sample_uniform_direction(&mut rng))
        .collect();
    let constellation = Constellation::new(points).expect("spin >= 1/2");
    let state = state_from_constellation(&constellation)
        .expect("valid constellations always produce a state");
    (constellation, state)
}

/// Haar-uniform pure state in dimension 2S+1: normalized i.i.d. standard
/// complex Gaussians, identical in law to the first column of a
/// circular-unitary-ensemble matrix at O(S) cost.
pub fn sample_cue(spin: HalfInt, stream: &RngStream) -> SpinState {
    let mut rng = stream.rng();
    let amps: Vec<Complex64> = (0..spin.dimension())
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    SpinState::from_unnormalized(spin, amps).expect("gaussian vector is nonzero a.s.")
}

/// 2S i.i.d. uniform qubits projected onto the symmetric subspace: the
/// unnormalized projection (for averaged-multipole analysis) plus its
/// normalized companion.
pub fn sample_symmetric_projection(
    spin: HalfInt,
    stream: &RngStream,
) -> (ProjectedState, SpinState) {
    let mut rng = stream.rng();
    let qubits: Vec<Direction> = (0..spin.twice())
        .map(|_| sample_uniform_direction(&mut rng))
        .collect();
    let projected = projected_state(&qubits).expect("spin >= 1/2");
    let normalized = projected
        .normalized()
        .expect("projection of generic qubits has nonzero norm");
    (projected, normalized)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kind_strings_round_trip() {
        for kind in EnsembleKind::ALL {
            assert_eq!(kind.as_str().parse::<EnsembleKind>().unwrap(), kind);
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json, format!("\"{kind}\""));
        }
        assert!("gue".parse::<EnsembleKind>().is_err());
    }

    #[test]
    fn streams_are_reproducible_and_disjoint() {
        let a: Vec<f64> = {
            let mut r = RngStream::new(5, 10).rng();
            (0..8).map(|_| r.gen()).collect()
        };
        let b: Vec<f64> = {
            let mut r = RngStream::new(5, 10).rng();
            (0..8).map(|_| r.gen()).collect()
        };
        let c: Vec<f64> = {
            let mut r = RngStream::new(5, 11).rng();
            (0..8).map(|_| r.gen()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_direction_moments() {
        // mean cos θ ≈ 0 and mean cos²θ ≈ 1/3 within standard-error bounds
        let mut rng = RngStream::new(42, 0).rng();
        let n = 100_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let c = sample_uniform_direction(&mut rng).theta.cos();
            s1 += c;
            s2 += c * c;
        }
        assert_abs_diff_eq!(s1 / n as f64, 0.0, epsilon = 0.01);
        assert_abs_diff_eq!(s2 / n as f64, 1.0 / 3.0, epsilon = 0.01);
    }

    #[test]
    fn cosine_distribution_is_uniform() {
        // two-sided Kolmogorov-Smirnov against U(-1,1) at alpha = 0.001
        let mut rng = RngStream::new(7, 0).rng();
        let n = 1_000_000usize;
        let mut xs: Vec<f64> = (0..n)
            .map(|_| sample_uniform_direction(&mut rng).theta.cos())
            .collect();
        xs.sort_by(f64::total_cmp);
        let mut d = 0.0f64;
        for (i, &x) in xs.iter().enumerate() {
            let cdf = (x + 1.0) / 2.0;
            d = d
                .max((cdf - i as f64 / n as f64).abs())
                .max(((i + 1) as f64 / n as f64 - cdf).abs());
        }
        // K-S critical value at alpha = 0.001: 1.9495 / sqrt(n)
        assert!(d < 1.9495 / (n as f64).sqrt(), "KS statistic {d:.3e}");
    }

    #[test]
    fn cue_pair_moments_match_haar_integrals() {
        // E|ψ_m|²|ψ_n|² = (1 + δ_mn) / ((2S+1)(2S+2)) within 3 standard errors
        let spin = HalfInt::from_int(3);
        let dim = spin.dimension();
        let n = 100_000u64;
        let mut acc = vec![vec![0.0f64; dim]; dim];
        let mut acc_sq = vec![vec![0.0f64; dim]; dim];
        for i in 0..n {
            let state = sample_cue(spin, &RngStream::new(99, i));
            for a in 0..dim {
                for b in 0..dim {
                    let v = state.amps()[a].norm_sqr() * state.amps()[b].norm_sqr();
                    acc[a][b] += v;
                    acc_sq[a][b] += v * v;
                }
            }
        }
        let denom = (dim as f64) * (dim as f64 + 1.0);
        for a in 0..dim {
            for b in 0..dim {
                let mean = acc[a][b] / n as f64;
                let var = acc_sq[a][b] / n as f64 - mean * mean;
                let se = (var / n as f64).sqrt();
                let expected = if a == b { 2.0 / denom } else { 1.0 / denom };
                assert!(
                    (mean - expected).abs() < 3.0 * se + 1e-12,
                    "pair ({a},{b}): {mean:.5e} vs {expected:.5e} ± {se:.1e}"
                );
            }
        }
    }

    #[test]
    fn symmetric_projection_norm_is_one_for_identical_qubits() {
        // the sampler's unnormalized output matches the projection convention
        let (projected, normalized) = sample_symmetric_projection(
            HalfInt::from_int(2),
            &RngStream::new(1, 0),
        );
        assert!(projected.norm_sq() <= 1.0 + 1e-12);
        let n: f64 = normalized.amps().iter().map(|a| a.norm_sqr()).sum();
        assert_abs_diff_eq!(n, 1.0, epsilon = 1e-12);
    }
}
