//! Multipole spectra: the expansion of a state over irreducible tensor
//! operators, per-order squared lengths, cumulative distributions, and the
//! multipole-based quantumness measure.

use num_complex::Complex64;

use crate::cg::CgTable;
use crate::half_integer::HalfInt;
use crate::states::{ProjectedState, SpinState};

/// Complex multipoles `rho_Kq` for `0 <= K <= 2S`, `-K <= q <= K`, with the
/// per-order squared lengths `L_K = Σ_q |rho_Kq|²`.
///
/// For a normalized pure state `L_0 = 1/(2S+1)` and `Σ_K L_K = 1`; spectra of
/// unnormalized projections scale both accordingly.
#[derive(Clone, Debug)]
pub struct MultipoleSpectrum {
    spin: HalfInt,
    rho: Vec<Complex64>,
    lengths: Vec<f64>,
}

#[inline]
fn pack_index(k: u32, q: i32) -> usize {
    debug_assert!(q.unsigned_abs() <= k);
    (k as usize) * (k as usize) + (k as i64 + i64::from(q)) as usize
}

impl MultipoleSpectrum {
    /// Assembles a spectrum from packed `rho` values, recomputing lengths.
    pub(crate) fn from_parts(spin: HalfInt, rho: Vec<Complex64>) -> Self {
        let dim = spin.dimension();
        assert_eq!(rho.len(), dim * dim);
        let mut lengths = vec![0.0; dim];
        for (k, length) in lengths.iter_mut().enumerate() {
            *length = kahan_sum(
                (-(k as i32)..=(k as i32)).map(|q| rho[pack_index(k as u32, q)].norm_sqr()),
            );
        }
        MultipoleSpectrum { spin, rho, lengths }
    }

    pub fn spin(&self) -> HalfInt {
        self.spin
    }

    pub fn k_range(&self) -> u32 {
        self.spin.twice() as u32
    }

    pub fn rho(&self, k: u32, q: i32) -> Complex64 {
        self.rho[pack_index(k, q)]
    }

    /// `L_K` for `K = 0..=2S`.
    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn length(&self, k: u32) -> f64 {
        self.lengths[k as usize]
    }

    /// Cumulative distribution `A_M = Σ_{K=1..M} L_K`; the monopole is
    /// normalization only and is excluded.
    pub fn cumulative(&self, m: u32) -> f64 {
        assert!(m <= self.k_range(), "M must not exceed 2S");
        if m == 0 {
            return 0.0;
        }
        self.lengths[1..=(m as usize)].iter().sum()
    }

    /// `Σ_{K,q} |rho_Kq|²`; equals 1 for normalized pure states.
    pub fn purity(&self) -> f64 {
        kahan_sum(self.lengths.iter().copied())
    }

    /// Quantumness `E = 1 - Σ_{K,q} |rho_Kq|² / (2K+1)`, in
    /// `[0, 2S/(2S+1)]` for normalized states.
    pub fn quantumness(&self) -> f64 {
        1.0 - kahan_sum(
            self.lengths
                .iter()
                .enumerate()
                .map(|(k, &l)| l / (2.0 * k as f64 + 1.0)),
        )
    }

    /// The smallest `K >= 1` maximizing `L_K`.
    pub fn k_max(&self) -> u32 {
        let mut best = 1u32;
        for k in 2..=self.k_range() {
            if self.lengths[k as usize] > self.lengths[best as usize] {
                best = k;
            }
        }
        best
    }
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0, 0.0);
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Core evaluation: `rho_Kq = Σ_m w(K,q,m) ψ_{m+q} ψ*_m` with the tensor
/// weights `w = sqrt((2K+1)/(2S+1)) C^{S,m+q}_{S m, K q}`. The conjugation
/// orientation is the one under which hermiticity
/// `rho_{K,-q} = (-1)^q rho*_{Kq}` holds and `rho_{K0} > 0` for the coherent
/// state along +z.
fn multipoles_of_amps(spin: HalfInt, amps: &[Complex64], table: &CgTable) -> MultipoleSpectrum {
    let s2 = spin.twice();
    let k_range = s2 as u32;
    let dim = spin.dimension();
    let nonzero: Vec<bool> = amps.iter().map(|a| a.norm_sqr() != 0.0).collect();
    let mut rho = vec![Complex64::new(0.0, 0.0); (dim) * (dim)];
    let mut lengths = vec![0.0f64; dim];
    for k in 0..=k_range {
        let mut acc_l = 0.0f64;
        let mut comp_l = 0.0f64;
        for q in -(k as i32)..=(k as i32) {
            // skip rows whose every product vanishes (sparse states)
            let touched = (0..dim).any(|i| {
                let iq = i as i64 + i64::from(q);
                iq >= 0 && (iq as usize) < dim && nonzero[i] && nonzero[iq as usize]
            });
            if !touched {
                continue;
            }
            let row = table.row(k, q);
            let mut acc = Complex64::new(0.0, 0.0);
            for entry in row.iter() {
                let i = ((entry.twice_m + s2) / 2) as usize;
                let iq = (i as i64 + i64::from(q)) as usize;
                acc += entry.weight * amps[iq] * amps[i].conj();
            }
            rho[pack_index(k, q)] = acc;
            let y = acc.norm_sqr() - comp_l;
            let t = acc_l + y;
            comp_l = (t - acc_l) - y;
            acc_l = t;
        }
        lengths[k as usize] = acc_l;
    }
    MultipoleSpectrum {
        spin,
        rho,
        lengths,
    }
}

/// Multipole spectrum of a normalized state, using the shared exact table
/// for its spin.
pub fn multipoles(state: &SpinState) -> MultipoleSpectrum {
    multipoles_with(&CgTable::shared(state.spin()), state)
}

/// Same, against a caller-supplied table (e.g. an alternate evaluation mode).
pub fn multipoles_with(table: &CgTable, state: &SpinState) -> MultipoleSpectrum {
    assert_eq!(table.spin(), state.spin(), "table spin must match the state");
    multipoles_of_amps(state.spin(), state.amps(), table)
}

/// Multipole spectrum of an unnormalized symmetric projection; lengths carry
/// the projection norm rather than summing to 1.
pub fn projected_multipoles(projected: &ProjectedState) -> MultipoleSpectrum {
    let table = CgTable::shared(projected.spin());
    multipoles_of_amps(projected.spin(), projected.amps(), &table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_cue, sample_majorana, RngStream};
    use crate::oracles::{cs_cumulative, cs_multipole_lengths};
    use crate::sphere::{rotation_matrix, Direction};
    use crate::states::{make_coherent_state, state_from_constellation, SpinState};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use rand::Rng;

    #[test]
    fn spin_half_spectrum_is_universal() {
        // every normalized spin-1/2 state: rho_00 = 1/sqrt(2), L_1 = 1/2
        let mut rng = RngStream::new(2, 0).rng();
        for _ in 0..20 {
            let amps = vec![
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
            ];
            let state = SpinState::from_unnormalized(HalfInt::HALF, amps).unwrap();
            let spec = multipoles(&state);
            assert_abs_diff_eq!(
                spec.rho(0, 0).re,
                std::f64::consts::FRAC_1_SQRT_2,
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(spec.length(1), 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(spec.quantumness(), 1.0 / 3.0, epsilon = 1e-12);
            assert_eq!(spec.k_max(), 1);
        }
    }

    #[test]
    fn coherent_state_spectrum_is_aligned() {
        // CS along +z: rho_Kq = δ_q0 sqrt((2K+1)/(2S+1)) C^{SS}_{SS,K0}
        for s2 in [2i64, 5, 11] {
            let spin = HalfInt::from_twice(s2);
            let spec = multipoles(&make_coherent_state(spin, Direction::Z_PLUS));
            for k in 0..=(s2 as u32) {
                let expected = (f64::from(2 * k + 1) / (s2 as f64 + 1.0)).sqrt()
                    * crate::cg::cs_alignment_weight(spin, k);
                assert_abs_diff_eq!(spec.rho(k, 0).re, expected, epsilon = 1e-12);
                assert!(spec.rho(k, 0).re > 0.0);
                assert_abs_diff_eq!(spec.rho(k, 0).im, 0.0, epsilon = 1e-13);
                for q in 1..=(k as i32) {
                    assert_abs_diff_eq!(spec.rho(k, q).norm(), 0.0, epsilon = 1e-13);
                }
            }
            // cumulative matches the closed form at every M
            for m in 1..=(s2 as u32) {
                assert_abs_diff_eq!(
                    spec.cumulative(m),
                    cs_cumulative(spin, m).unwrap(),
                    epsilon = 1e-11
                );
            }
        }
    }

    #[test]
    fn dicke_state_spectrum() {
        // |1,0>: the dipole vanishes, L_2 = 2/3, quantumness 8/15, k_max 2
        let state = SpinState::new(
            HalfInt::ONE,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let spec = multipoles(&state);
        for q in -1..=1 {
            assert_abs_diff_eq!(spec.rho(1, q).norm(), 0.0, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(spec.length(2), 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.quantumness(), 8.0 / 15.0, epsilon = 1e-12);
        assert_eq!(spec.k_max(), 2);
        assert_abs_diff_eq!(spec.cumulative(0), 0.0);
    }

    #[test]
    fn purity_and_monopole_for_random_states() {
        for s2 in [1i64, 4, 20, 100] {
            let spin = HalfInt::from_twice(s2);
            for i in 0..8 {
                let state = sample_cue(spin, &RngStream::new(31, i));
                let spec = multipoles(&state);
                assert_abs_diff_eq!(spec.purity(), 1.0, epsilon = 1e-10);
                assert_abs_diff_eq!(
                    spec.length(0),
                    1.0 / (s2 as f64 + 1.0),
                    epsilon = 1e-12
                );
                assert_abs_diff_eq!(
                    spec.cumulative(s2 as u32),
                    s2 as f64 / (s2 as f64 + 1.0),
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn hermiticity_of_computed_spectra() {
        for i in 0..10 {
            let (_, state) = sample_majorana(HalfInt::from_twice(9), &RngStream::new(8, i));
            let spec = multipoles(&state);
            for k in 0..=spec.k_range() {
                for q in 0..=(k as i32) {
                    let lhs = spec.rho(k, -q);
                    let rhs = spec.rho(k, q).conj() * if q % 2 == 0 { 1.0 } else { -1.0 };
                    assert_abs_diff_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn lengths_are_rotation_invariant() {
        let spin = HalfInt::from_int(6);
        let mut rng = RngStream::new(17, 0).rng();
        for i in 0..10 {
            let (c, state) = sample_majorana(spin, &RngStream::new(18, i));
            let spec = multipoles(&state);
            let rot = rotation_matrix(
                [
                    rng.gen::<f64>() - 0.5,
                    rng.gen::<f64>() - 0.5,
                    rng.gen::<f64>() - 0.5,
                ],
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            let rotated = multipoles(&state_from_constellation(&c.rotated(&rot)).unwrap());
            for k in 0..=spec.k_range() {
                assert_abs_diff_eq!(spec.length(k), rotated.length(k), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn coherent_cumulative_majorizes_random_states() {
        for s2 in [2i64, 4, 10, 20] {
            let spin = HalfInt::from_twice(s2);
            let cs: Vec<f64> = (0..=(s2 as u32))
                .map(|m| if m == 0 { 0.0 } else { cs_cumulative(spin, m).unwrap() })
                .collect();
            for i in 0..200 {
                let (_, state) = sample_majorana(spin, &RngStream::new(40 + s2 as u64, i));
                let spec = multipoles(&state);
                for m in 1..=(s2 as u32) {
                    assert!(spec.cumulative(m) <= cs[m as usize] + 1e-10);
                }
                let e = spec.quantumness();
                assert!(e >= 0.0 && e <= s2 as f64 / (s2 as f64 + 1.0) + 1e-12);
            }
        }
    }

    #[test]
    fn coherent_k_max_tracks_sqrt_spin() {
        let spin = HalfInt::from_int(25);
        let spec = multipoles(&make_coherent_state(spin, Direction::new(1.0, 2.0)));
        let k = spec.k_max();
        assert!((4..=6).contains(&k), "k_max = {k}");
        // argmax of the closed-form lengths agrees
        let lengths = cs_multipole_lengths(spin);
        let oracle_k = (1..lengths.len()).max_by(|&a, &b| {
            lengths[a].partial_cmp(&lengths[b]).unwrap()
        });
        assert_eq!(oracle_k.unwrap() as u32, k);
    }
}
