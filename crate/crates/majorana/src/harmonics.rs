//! Orthonormal spherical harmonics via stable normalized-Legendre recurrences.
//!
//! The fully normalized associated Legendre functions are generated by an
//! ascending-degree recurrence whose coefficients keep every intermediate at
//! unit scale, so no overflow occurs even at degree 512. The Condon-Shortley
//! phase is folded into the diagonal seed.

use std::f64::consts::PI;

use num_complex::Complex64;

/// All normalized associated Legendre values `P̄_k^q(cos θ)` for one polar
/// angle, `0 <= q <= k <= kmax`, such that `Y_kq = P̄_k^q e^{i q φ}` is the
/// orthonormal spherical harmonic and `Y_{k,-q} = (-1)^q conj(Y_kq)`.
pub struct ThetaHarmonics {
    kmax: usize,
    vals: Vec<f64>,
}

#[inline]
fn tri_index(k: usize, q: usize) -> usize {
    k * (k + 1) / 2 + q
}

impl ThetaHarmonics {
    pub fn eval(kmax: u32, cos_theta: f64, sin_theta: f64) -> Self {
        let kmax = kmax as usize;
        let mut vals = vec![0.0; tri_index(kmax + 1, 0)];
        vals[0] = (4.0 * PI).sqrt().recip();
        // diagonal P̄_q^q with the Condon-Shortley sign
        for q in 1..=kmax {
            let qf = q as f64;
            vals[tri_index(q, q)] = -((2.0 * qf + 1.0) / (2.0 * qf)).sqrt()
                * sin_theta
                * vals[tri_index(q - 1, q - 1)];
        }
        // first off-diagonal, then ascending degree
        for q in 0..kmax {
            let qf = q as f64;
            vals[tri_index(q + 1, q)] = (2.0 * qf + 3.0).sqrt() * cos_theta * vals[tri_index(q, q)];
            for k in (q + 2)..=kmax {
                let kf = k as f64;
                let qf2 = qf * qf;
                let a = ((4.0 * kf * kf - 1.0) / (kf * kf - qf2)).sqrt();
                let b = (((kf - 1.0) * (kf - 1.0) - qf2) / (4.0 * (kf - 1.0) * (kf - 1.0) - 1.0))
                    .sqrt();
                vals[tri_index(k, q)] =
                    a * (cos_theta * vals[tri_index(k - 1, q)] - b * vals[tri_index(k - 2, q)]);
            }
        }
        ThetaHarmonics { kmax, vals }
    }

    pub fn kmax(&self) -> u32 {
        self.kmax as u32
    }

    /// `P̄_k^{|q|}(cos θ)` for `|q| <= k <= kmax`.
    #[inline]
    pub fn get(&self, k: u32, q_abs: u32) -> f64 {
        self.vals[tri_index(k as usize, q_abs as usize)]
    }

    /// Signed-`q` value including the `(-1)^q` reflection.
    #[inline]
    pub fn get_signed(&self, k: u32, q: i32) -> f64 {
        let p = self.get(k, q.unsigned_abs());
        if q < 0 && q % 2 != 0 {
            -p
        } else {
            p
        }
    }
}

/// Orthonormal spherical harmonic `Y_kq(θ, φ)` with Condon-Shortley phase.
pub fn spherical_harmonic(k: u32, q: i32, theta: f64, phi: f64) -> Complex64 {
    assert!(q.unsigned_abs() <= k, "|q| must not exceed k");
    let table = ThetaHarmonics::eval(k, theta.cos(), theta.sin());
    let p = table.get_signed(k, q);
    p * Complex64::new(0.0, f64::from(q) * phi).exp()
}
