//! Forward and inverse transforms between multipole spectra and the Husimi
//! function on the sphere.
//!
//! Forward: `Q(n) = sqrt(4π/(2S+1)) Σ_{K,q} C_K rho_Kq Y_Kq(n)` with
//! `C_K = C^{SS}_{SS,K0}`. Inverse: `rho_Kq = 𝒞_K ∫ Q Y*_Kq d²n` with
//! `𝒞_K = sqrt((2S+1)/4π) / C_K`, evaluated on a Gauss-Legendre × trapezoid
//! product grid that integrates the band-limited integrand exactly. Which of
//! the pair carries the conjugate is tied to the coherent-state phase
//! convention fixed in [`crate::states::coherent_amplitude`]; the orientation
//! here is the one under which the synthesis reproduces `|<n|psi>|²`
//! pointwise and the analysis inverts it.
//!
//! `1/C_K` grows combinatorially with K, so the inverse amplifies the float
//! noise floor of the sampled Q values; the conditioning warning fires once
//! `log10 𝒞_K` passes 12, where recovered high-K multipoles lose all
//! absolute accuracy in f64.

use num_complex::Complex64;

use crate::cg::cs_alignment_weight;
use crate::error::Result;
use crate::half_integer::HalfInt;
use crate::harmonics::ThetaHarmonics;
use crate::multipole::MultipoleSpectrum;
use crate::sphere::{Direction, SphereGrid};
use crate::states::{coherent_amplitude, SpinState};

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

fn forward_prefactor(spin: HalfInt) -> f64 {
    (FOUR_PI / (spin.twice() as f64 + 1.0)).sqrt()
}

/// Alignment weights `C^{SS}_{SS,K0}` for `K = 0..=2S`.
fn alignment_weights(spin: HalfInt) -> Vec<f64> {
    (0..=spin.twice() as u32)
        .map(|k| cs_alignment_weight(spin, k))
        .collect()
}

/// Husimi value at one direction from a multipole spectrum. The structurally
/// imaginary part cancels pairwise and is never materialized; values can dip
/// a few ulp below zero at the function's zeros.
pub fn q_function(spec: &MultipoleSpectrum, n: Direction) -> f64 {
    let s2 = spec.spin().twice() as u32;
    let weights = alignment_weights(spec.spin());
    let table = ThetaHarmonics::eval(s2, n.theta.cos(), n.theta.sin());
    let phase_step = Complex64::new(0.0, n.phi).exp();
    let mut total = 0.0;
    let mut phase = Complex64::new(1.0, 0.0);
    for q in 0..=s2 {
        let mut b = Complex64::new(0.0, 0.0);
        for k in q..=s2 {
            b += weights[k as usize] * spec.rho(k, q as i32) * table.get(k, q);
        }
        if q == 0 {
            total += b.re;
        } else {
            total += 2.0 * (b * phase).re;
        }
        phase *= phase_step;
    }
    forward_prefactor(spec.spin()) * total
}

/// Husimi value via the amplitude route, `|<n|psi>|²`; an independent
/// computation path cross-checked against [`q_function`].
pub fn q_function_from_state(state: &SpinState, n: Direction) -> f64 {
    coherent_amplitude(state, n).norm_sqr()
}

/// Husimi values over a product grid, theta-major (`i * n_phi + j`).
/// Row-separable evaluation: one Legendre table per polar node, one phase
/// recurrence per azimuthal node.
pub fn q_on_grid(spec: &MultipoleSpectrum, grid: &SphereGrid) -> Vec<f64> {
    let s2 = spec.spin().twice() as u32;
    let weights = alignment_weights(spec.spin());
    let pref = forward_prefactor(spec.spin());
    let n_phi = grid.n_phi();
    let mut out = vec![0.0; grid.theta_nodes().len() * n_phi];
    for (i, node) in grid.theta_nodes().iter().enumerate() {
        let table = ThetaHarmonics::eval(s2, node.cos_theta, node.sin_theta);
        let b: Vec<Complex64> = (0..=s2)
            .map(|q| {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in q..=s2 {
                    acc += weights[k as usize] * spec.rho(k, q as i32) * table.get(k, q);
                }
                acc
            })
            .collect();
        for j in 0..n_phi {
            let phase_step = Complex64::new(0.0, grid.phi(j)).exp();
            let mut phase = phase_step;
            let mut total = b[0].re;
            for bq in &b[1..] {
                total += 2.0 * (bq * phase).re;
                phase *= phase_step;
            }
            out[i * n_phi + j] = pref * total;
        }
    }
    out
}

/// `∫ Q d²n` under the grid's quadrature; `4π/(2S+1)` for any normalized
/// pure state.
pub fn integrate_q(q_values: &[f64], grid: &SphereGrid) -> f64 {
    assert_eq!(q_values.len(), grid.node_count());
    let wphi = grid.phi_weight();
    let (mut sum, mut comp) = (0.0, 0.0);
    for (i, node) in grid.theta_nodes().iter().enumerate() {
        let mut row = 0.0;
        for j in 0..grid.n_phi() {
            row += q_values[i * grid.n_phi() + j];
        }
        let y = node.weight * wphi * row - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Recovers the multipole spectrum of a spin-`spin` state from its Husimi
/// values on `grid` (theta-major layout matching [`q_on_grid`]).
///
/// The grid must integrate degree `2S + K` exactly for every recovered `K`,
/// i.e. carry degree at least `4S`.
pub fn multipoles_from_q(
    q_values: &[f64],
    grid: &SphereGrid,
    spin: HalfInt,
) -> Result<MultipoleSpectrum> {
    let s2 = spin.twice() as u32;
    grid.check_band_limit(spin, s2)?;
    assert_eq!(q_values.len(), grid.node_count(), "grid/value mismatch");
    let weights = alignment_weights(spin);
    let worst_amplification = weights[s2 as usize].recip().log10();
    if worst_amplification > 12.0 {
        log::warn!(
            "inverse Husimi transform at spin {spin} amplifies by up to 1e{worst_amplification:.0}; \
             high-K multipoles will be noise-dominated"
        );
    }

    let n_phi = grid.n_phi();
    let wphi = grid.phi_weight();
    // azimuthal analysis: f_q(theta_i) = Σ_j Q_ij e^{-i q phi_j} w_phi
    let n_theta = grid.theta_nodes().len();
    let mut fourier = vec![Complex64::new(0.0, 0.0); n_theta * (s2 as usize + 1)];
    for i in 0..n_theta {
        for j in 0..n_phi {
            let q_val = q_values[i * n_phi + j];
            let phase_step = Complex64::new(0.0, -grid.phi(j)).exp();
            let mut phase = Complex64::new(wphi, 0.0);
            for q in 0..=s2 as usize {
                fourier[i * (s2 as usize + 1) + q] += q_val * phase;
                phase *= phase_step;
            }
        }
    }

    let tables: Vec<ThetaHarmonics> = grid
        .theta_nodes()
        .iter()
        .map(|t| ThetaHarmonics::eval(s2, t.cos_theta, t.sin_theta))
        .collect();
    let inv_pref = ((spin.twice() as f64 + 1.0) / FOUR_PI).sqrt();
    let mut rho = vec![Complex64::new(0.0, 0.0); spin.dimension() * spin.dimension()];
    for k in 0..=s2 {
        for q in 0..=k {
            let (mut sum, mut comp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for (i, node) in grid.theta_nodes().iter().enumerate() {
                let term = node.weight
                    * tables[i].get(k, q)
                    * fourier[i * (s2 as usize + 1) + q as usize];
                let y = term - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
            let value = inv_pref / weights[k as usize] * sum;
            let idx_pos = (k as usize) * (k as usize) + (k + q) as usize;
            rho[idx_pos] = value;
            if q > 0 {
                // Q is real, so the negative-q integral is exactly the
                // conjugate with the harmonic's reflection phase
                let idx_neg = (k as usize) * (k as usize) + (k - q) as usize;
                let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
                rho[idx_neg] = sign * value.conj();
            }
        }
    }
    Ok(MultipoleSpectrum::from_parts(spin, rho))
}
