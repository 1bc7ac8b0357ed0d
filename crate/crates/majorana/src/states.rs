//! Pure spin-S states and their point constellations on the sphere.
//!
//! A spin-S state is equivalent to the multiset of 2S zeros of its
//! coherent-state amplitude. Construction multiplies one linear factor per
//! zero into a degree-2S polynomial; the inverse finds the polynomial's
//! roots. Conventions fixed here:
//!
//! * a `Constellation` is the zero set itself (not the antipodal qubit set);
//! * stereographic coordinate `w = tan(theta/2) e^{-i phi}`, projected from
//!   the south pole, so `theta = pi` is the point at infinity and shows up
//!   as polynomial degree deficiency;
//! * amplitudes are stored ascending in `m` and the global phase is never
//!   canonicalized.

use num_complex::Complex64;

use crate::cg::log_factorial;
use crate::error::{Error, Result};
use crate::half_integer::HalfInt;
use crate::roots::{cluster_roots, polynomial_roots};
use crate::sphere::Direction;

/// Largest matrix accepted by the permanent evaluator (Ryser cost 2^n).
pub const PERMANENT_CAP: usize = 14;

/// How many linear factors are convolved between max-modulus rescales.
const RESCALE_STRIDE: usize = 32;


/// The multiset of 2S Husimi zeros of a pure spin-S state.
#[derive(Clone, Debug)]
pub struct Constellation {
    points: Vec<Direction>,
}

impl Constellation {
    /// Builds from 2S points; repeated points are permitted.
    pub fn new(points: Vec<Direction>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain(
                "a constellation needs at least one point (2S >= 1)".into(),
            ));
        }
        Ok(Constellation { points })
    }

    pub fn spin(&self) -> HalfInt {
        HalfInt::from_twice(self.points.len() as i64)
    }

    pub fn points(&self) -> &[Direction] {
        &self.points
    }

    pub fn rotated(&self, r: &[[f64; 3]; 3]) -> Self {
        Constellation {
            points: self.points.iter().map(|p| p.rotated(r)).collect(),
        }
    }
}

/// A normalized pure spin-S state, amplitudes `psi_m` for `m = -S..S`.
#[derive(Clone, Debug)]
pub struct SpinState {
    spin: HalfInt,
    amps: Vec<Complex64>,
}

impl SpinState {
    /// Validates dimension and unit norm (within 1e-9), then snaps the norm
    /// exactly to 1 so downstream identities hold at full precision.
    pub fn new(spin: HalfInt, amps: Vec<Complex64>) -> Result<Self> {
        Self::check_dim(spin, &amps)?;
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "state norm² = {norm_sq:.12} deviates from 1"
            )));
        }
        Ok(Self::renormalized(spin, amps))
    }

    /// Accepts any nonzero amplitude vector and normalizes it.
    pub fn from_unnormalized(spin: HalfInt, amps: Vec<Complex64>) -> Result<Self> {
        Self::check_dim(spin, &amps)?;
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq == 0.0 {
            return Err(Error::DegenerateState);
        }
        Ok(Self::renormalized(spin, amps))
    }

    fn check_dim(spin: HalfInt, amps: &[Complex64]) -> Result<()> {
        if spin.twice() < 1 {
            return Err(Error::Domain("spin must be at least 1/2".into()));
        }
        if amps.len() != spin.dimension() {
            return Err(Error::Domain(format!(
                "spin {spin} needs {} amplitudes, got {}",
                spin.dimension(),
                amps.len()
            )));
        }
        Ok(())
    }

    fn renormalized(spin: HalfInt, mut amps: Vec<Complex64>) -> Self {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        SpinState { spin, amps }
    }

    pub fn spin(&self) -> HalfInt {
        self.spin
    }

    /// Amplitudes ascending in `m`; `amps()[i]` belongs to `m = -S + i`.
    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude of `|S, m>`.
    pub fn amp(&self, m: HalfInt) -> Complex64 {
        let idx = (m.twice() + self.spin.twice()) / 2;
        self.amps[idx as usize]
    }

    /// `|<self|other>|²`.
    pub fn fidelity(&self, other: &SpinState) -> f64 {
        assert_eq!(self.spin, other.spin);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }
}

/// The symmetric-subspace projection of a product of 2S qubits, kept
/// unnormalized: its norm is at most 1 and carries the geometry of the
/// qubit overlaps.
#[derive(Clone, Debug)]
pub struct ProjectedState {
    spin: HalfInt,
    amps: Vec<Complex64>,
}

impl ProjectedState {
    pub fn spin(&self) -> HalfInt {
        self.spin
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<SpinState> {
        SpinState::from_unnormalized(self.spin, self.amps.clone())
    }
}

/// `sqrt(C(n, k))` via the cached log-factorial table.
pub(crate) fn sqrt_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    (0.5 * (log_factorial(n) - log_factorial(k) - log_factorial(n - k))).exp()
}

/// Convolves linear factors `a_i x + b_i y` into the coefficients of `y^j`,
/// rescaling to unit max-modulus every few factors; returns the coefficients
/// and the natural log of the factored-out scale.
fn convolve_factors(factors: &[(f64, Complex64)]) -> Result<(Vec<Complex64>, f64)> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    let mut log_scale = 0.0f64;
    for (idx, &(a, b)) in factors.iter().enumerate() {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (j, &c) in coeffs.iter().enumerate() {
            next[j] += a * c;
            next[j + 1] += b * c;
        }
        coeffs = next;
        if (idx + 1) % RESCALE_STRIDE == 0 {
            let peak = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if peak == 0.0 {
                return Err(Error::DegenerateState);
            }
            for c in &mut coeffs {
                *c /= peak;
            }
            log_scale += peak.ln();
        }
    }
    Ok((coeffs, log_scale))
}

/// Symmetric projection of qubits placed at `directions`, with the
/// state-independent normalization convention: the returned amplitudes are
/// exactly `<S,m| P (|q_1> ⊗ ... ⊗ |q_2S>)`, norm <= 1.
pub fn projected_state(directions: &[Direction]) -> Result<ProjectedState> {
    if directions.is_empty() {
        return Err(Error::Domain("need at least one qubit".into()));
    }
    let factors: Vec<(f64, Complex64)> = directions
        .iter()
        .map(|d| {
            let (s, c) = (0.5 * d.theta).sin_cos();
            (c, s * Complex64::new(0.0, d.phi).exp())
        })
        .collect();
    let (coeffs, log_scale) = convolve_factors(&factors)?;
    let scale = log_scale.exp();
    let s2 = directions.len() as u64;
    let amps = weighted_amps(&coeffs, s2, scale);
    Ok(ProjectedState {
        spin: HalfInt::from_twice(s2 as i64),
        amps,
    })
}

/// `psi_m = scale * c_{S-m} / sqrt(C(2S, S+m))`, reordered ascending in `m`.
fn weighted_amps(coeffs: &[Complex64], s2: u64, scale: f64) -> Vec<Complex64> {
    let dim = s2 as usize + 1;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for (j, &c) in coeffs.iter().enumerate() {
        // m = S - j  ->  ascending index i = 2S - j
        amps[dim - 1 - j] = scale * c / sqrt_binomial(s2, j as u64);
    }
    amps
}

/// Builds the normalized state whose Husimi function vanishes exactly at the
/// constellation points. Points at `theta = pi` degenerate their linear
/// factor (polynomial degree drops); no division occurs anywhere.
pub fn state_from_constellation(c: &Constellation) -> Result<SpinState> {
    // zero at u  <=>  qubit factor at the antipode of u
    let factors: Vec<(f64, Complex64)> = c
        .points()
        .iter()
        .map(|d| {
            let (s, co) = (0.5 * d.theta).sin_cos();
            (s, -co * Complex64::new(0.0, d.phi).exp())
        })
        .collect();
    let (coeffs, _) = convolve_factors(&factors)?;
    let s2 = c.points().len() as u64;
    let amps = weighted_amps(&coeffs, s2, 1.0);
    SpinState::from_unnormalized(c.spin(), amps)
}

/// The spin coherent state aimed along `n`:
/// `psi_m = sqrt(C(2S,S+m)) cos^{S+m}(θ/2) (sin(θ/2) e^{iφ})^{S-m}`.
pub fn make_coherent_state(spin: HalfInt, n: Direction) -> SpinState {
    assert!(spin.twice() >= 1, "spin must be at least 1/2");
    let s2 = spin.twice() as u64;
    let dim = spin.dimension();
    let (st, ct) = (0.5 * n.theta).sin_cos();
    let swing = st * Complex64::new(0.0, n.phi).exp();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for i in 0..dim {
        // ascending m: S+m = i, S-m = 2S-i
        let j = (s2 as usize - i) as u32;
        amps[i] = sqrt_binomial(s2, i as u64) * ct.powi(i as i32) * swing.powu(j);
    }
    SpinState::renormalized(spin, amps)
}

/// Coherent-state amplitude `<n|psi>` with the phase convention
/// `<n|S,m> = sqrt(C(2S,S+m)) cos^{S+m}(θ/2) sin^{S-m}(θ/2) e^{-i(S-m)φ}`.
/// Only `|<n|psi>|²` is convention-free.
pub fn coherent_amplitude(state: &SpinState, n: Direction) -> Complex64 {
    let s2 = state.spin().twice() as u64;
    let (st, ct) = (0.5 * n.theta).sin_cos();
    let swing = st * Complex64::new(0.0, -n.phi).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &a) in state.amps().iter().enumerate() {
        let j = (s2 as usize - i) as u32;
        acc += a * sqrt_binomial(s2, i as u64) * ct.powi(i as i32) * swing.powu(j);
    }
    acc
}

/// Recovers the constellation as the roots of the Majorana polynomial
/// `p(w) = Σ_j sqrt(C(2S,j)) psi_{S-j} w^j`; missing degree contributes
/// points at the projection pole `theta = pi`.
pub fn constellation_from_state(state: &SpinState) -> Result<Constellation> {
    let s2 = state.spin().twice() as usize;
    let mut p = vec![Complex64::new(0.0, 0.0); s2 + 1];
    for j in 0..=s2 {
        // psi_{S-j} sits at ascending index 2S - j
        p[j] = sqrt_binomial(s2 as u64, j as u64) * state.amps()[s2 - j];
    }
    // Only exact zeros count as missing degree: a point lying numerically at
    // the pole produces a tiny-but-nonzero coefficient whose genuine root at
    // huge |w| maps back to theta ~ pi by itself.
    let mut hi = s2;
    while hi > 0 && p[hi].norm() == 0.0 {
        hi -= 1;
    }
    let mut lo = 0;
    while lo < hi && p[lo].norm() == 0.0 {
        lo += 1;
    }
    let n_pole = s2 - hi;
    let n_origin = lo;

    let mut points = Vec::with_capacity(s2);
    points.extend(std::iter::repeat_n(Direction::new(0.0, 0.0), n_origin));
    if hi > lo {
        let mut roots = polynomial_roots(&p[lo..=hi])?;
        cluster_roots(&mut roots, 1e-6);
        for w in roots {
            // w = tan(theta/2) e^{-i phi}
            let theta = 2.0 * w.norm().atan();
            let phi = (-w.arg()).rem_euclid(2.0 * std::f64::consts::PI);
            points.push(Direction::new(theta, phi));
        }
    }
    points.extend(std::iter::repeat_n(
        Direction::new(std::f64::consts::PI, 0.0),
        n_pole,
    ));
    Constellation::new(points)
}

/// Permanent of a complex square matrix by Ryser's formula with Gray-code
/// subset updates, `O(2^n n)`.
pub fn ryser_permanent(matrix: &[Vec<Complex64>]) -> Result<Complex64> {
    let n = matrix.len();
    if n > PERMANENT_CAP {
        return Err(Error::SizeLimit {
            size: n,
            cap: PERMANENT_CAP,
        });
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    for row in matrix {
        assert_eq!(row.len(), n, "permanent needs a square matrix");
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray_prev = 0u64;
    for k in 1u64..(1 << n) {
        let gray = k ^ (k >> 1);
        let flipped = (gray ^ gray_prev).trailing_zeros() as usize;
        let added = gray & (gray ^ gray_prev) != 0;
        for (i, row) in matrix.iter().enumerate() {
            if added {
                row_sums[i] += row[flipped];
            } else {
                row_sums[i] -= row[flipped];
            }
        }
        gray_prev = gray;
        let product: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 0 {
            total -= product;
        } else {
            total += product;
        }
    }
    if n % 2 == 0 {
        total = -total;
    }
    Ok(total)
}

/// Squared normalization `N² = perm(M)` of the symmetric projection, where
/// `M_ij = cos(θi/2)cos(θj/2) + sin(θi/2)sin(θj/2) e^{i(φi-φj)}` is the Gram
/// matrix of qubits at the constellation points. The permanent of a Gram
/// matrix is real; the imaginary residue is checked against 1e-10 relative.
pub fn normalization_permanent(c: &Constellation) -> Result<f64> {
    let pts = c.points();
    let n = pts.len();
    let half: Vec<(f64, Complex64)> = pts
        .iter()
        .map(|d| {
            let (s, co) = (0.5 * d.theta).sin_cos();
            (co, s * Complex64::new(0.0, d.phi).exp())
        })
        .collect();
    let matrix: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| half[i].0 * half[j].0 + half[i].1 * half[j].1.conj())
                .collect()
        })
        .collect();
    let perm = ryser_permanent(&matrix)?;
    if perm.im.abs() > 1e-10 * perm.re.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Domain(format!(
            "permanent of a Gram matrix came out non-real: {perm}"
        )));
    }
    Ok(perm.re)
}

/// `(2S)!` as f64; exact for every dimension this crate handles.
pub fn factorial_f64(n: u64) -> f64 {
    log_factorial(n).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_uniform_direction, RngStream};
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use std::f64::consts::PI;

    fn constellation_of(points: &[(f64, f64)]) -> Constellation {
        Constellation::new(
            points
                .iter()
                .map(|&(t, p)| Direction::new(t, p))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn coincident_points_give_antipodal_coherent_state() {
        for s2 in [1usize, 2, 5, 10] {
            let c = constellation_of(&vec![(0.0, 0.0); s2]);
            let state = state_from_constellation(&c).unwrap();
            // all weight on m = -S
            assert_abs_diff_eq!(state.amps()[0].norm(), 1.0, epsilon = 1e-12);
            for a in &state.amps()[1..] {
                assert_abs_diff_eq!(a.norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn equatorial_single_point_balances_spin_half() {
        let c = constellation_of(&[(PI / 2.0, 0.0)]);
        let state = state_from_constellation(&c).unwrap();
        assert_abs_diff_eq!(state.amps()[0].norm(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(state.amps()[1].norm(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn north_south_pair_is_the_balanced_dicke_state() {
        let c = constellation_of(&[(0.0, 0.0), (PI, 0.0)]);
        let state = state_from_constellation(&c).unwrap();
        assert_abs_diff_eq!(state.amp(HalfInt::ZERO).norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(state.amp(HalfInt::ONE).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(state.amp(-HalfInt::ONE).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_state_endpoints() {
        let s = HalfInt::from_twice(7);
        let cs = make_coherent_state(s, Direction::new(0.0, 0.0));
        assert_abs_diff_eq!(cs.amps().last().unwrap().norm(), 1.0, epsilon = 1e-14);
        let cs = make_coherent_state(s, Direction::new(PI, 0.3));
        assert_abs_diff_eq!(cs.amps()[0].norm(), 1.0, epsilon = 1e-14);
        let cs = make_coherent_state(HalfInt::HALF, Direction::new(PI / 2.0, 0.0));
        assert_abs_diff_eq!(cs.amps()[0].norm(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(cs.amps()[1].norm(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
    }

    #[test]
    fn coherent_overlaps_have_closed_form() {
        let spin = HalfInt::from_int(6);
        let n0 = Direction::new(1.1, 2.7);
        let cs = make_coherent_state(spin, n0);
        assert_abs_diff_eq!(coherent_amplitude(&cs, n0).norm(), 1.0, epsilon = 1e-12);
        let cs_z = make_coherent_state(spin, Direction::Z_PLUS);
        for theta in [0.2, 0.9, 2.4] {
            let amp = coherent_amplitude(&cs_z, Direction::new(theta, 0.0));
            assert_abs_diff_eq!(
                amp.norm(),
                (0.5 * theta).cos().powi(spin.twice() as i32),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn husimi_vanishes_at_every_constellation_point() {
        for s2 in [1i64, 2, 10, 20, 40] {
            let stream = RngStream::new(77, s2 as u64);
            let mut rng = stream.rng();
            for _ in 0..50 {
                let pts: Vec<Direction> =
                    (0..s2).map(|_| sample_uniform_direction(&mut rng)).collect();
                let c = Constellation::new(pts).unwrap();
                let state = state_from_constellation(&c).unwrap();
                for &p in c.points() {
                    let q = coherent_amplitude(&state, p).norm_sqr();
                    assert!(q < 1e-20, "Q = {q:.3e} at a constellation point, 2S = {s2}");
                }
            }
        }
    }

    #[test]
    fn construction_preserves_norm_under_clustering() {
        // tightly clustered points stress the convolution rescaling
        let stream = RngStream::new(3, 0);
        let mut rng = stream.rng();
        let base = sample_uniform_direction(&mut rng);
        let pts: Vec<Direction> = (0..120)
            .map(|_| {
                Direction::new(
                    (base.theta + rng.gen_range(-1e-4..1e-4)).clamp(0.0, PI),
                    base.phi + rng.gen_range(-1e-4..1e-4),
                )
            })
            .collect();
        let state = state_from_constellation(&Constellation::new(pts).unwrap()).unwrap();
        let norm: f64 = state.amps().iter().map(|a| a.norm_sqr()).sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pole_states_round_trip_exactly() {
        // CS along +z: all roots at the projection pole
        let spin = HalfInt::from_int(4);
        let cs = make_coherent_state(spin, Direction::Z_PLUS);
        let c = constellation_from_state(&cs).unwrap();
        assert_eq!(c.points().len(), 8);
        for p in c.points() {
            assert_abs_diff_eq!(p.theta, PI, epsilon = 1e-12);
        }
        // balanced Dicke state: north + south
        let state = SpinState::new(
            HalfInt::ONE,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let c = constellation_from_state(&state).unwrap();
        let mut thetas: Vec<f64> = c.points().iter().map(|p| p.theta).collect();
        thetas.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(thetas[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(thetas[1], PI, epsilon = 1e-12);
    }

    #[test]
    fn random_constellations_round_trip_as_multisets() {
        // S=10 exercises the companion path, S=40 the Aberth path
        for (spin, reps, tol) in [
            (HalfInt::from_int(10), 100, 1e-7),
            (HalfInt::from_int(40), 10, 1e-6),
        ] {
            let stream = RngStream::new(123, spin.twice() as u64);
            let mut rng = stream.rng();
            for _ in 0..reps {
                let pts: Vec<Direction> = (0..spin.twice())
                    .map(|_| sample_uniform_direction(&mut rng))
                    .collect();
                let c = Constellation::new(pts).unwrap();
                let state = state_from_constellation(&c).unwrap();
                let recovered = constellation_from_state(&state).unwrap();
                // greedy nearest-point matching
                let mut remaining: Vec<Direction> = recovered.points().to_vec();
                for &p in c.points() {
                    let (idx, dist) = remaining
                        .iter()
                        .enumerate()
                        .map(|(i, r)| (i, p.angle_to(*r)))
                        .min_by(|a, b| a.1.total_cmp(&b.1))
                        .unwrap();
                    assert!(dist < tol, "unmatched point, nearest at {dist:.2e} rad");
                    remaining.swap_remove(idx);
                }
            }
        }
    }

    #[test]
    fn permanent_of_special_pairs() {
        // coincident points reduce the Gram matrix to all-ones: perm = (2S)!
        let c = constellation_of(&[(0.7, 1.2), (0.7, 1.2)]);
        assert_abs_diff_eq!(normalization_permanent(&c).unwrap(), 2.0, epsilon = 1e-12);
        // antipodal pair: identity Gram matrix
        let c = constellation_of(&[(0.4, 0.9), (PI - 0.4, 0.9 + PI)]);
        assert_abs_diff_eq!(normalization_permanent(&c).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn permanent_matches_projection_norm() {
        // perm(Gram) = (2S)! * |P |q_1...q_2S>|²  for qubits at the points
        let stream = RngStream::new(55, 1);
        let mut rng = stream.rng();
        for s2 in [2usize, 3, 4, 6, 8] {
            for _ in 0..40 {
                let pts: Vec<Direction> =
                    (0..s2).map(|_| sample_uniform_direction(&mut rng)).collect();
                let c = Constellation::new(pts.clone()).unwrap();
                let perm = normalization_permanent(&c).unwrap();
                let proj = projected_state(&pts).unwrap();
                let via_norm = factorial_f64(s2 as u64) * proj.norm_sq();
                assert_abs_diff_eq!(perm, via_norm, epsilon = 1e-9 * perm.abs());
                // and through the antipodal qubits used by state construction
                let anti: Vec<Direction> = pts.iter().map(|p| p.antipode()).collect();
                let via_anti = factorial_f64(s2 as u64)
                    * projected_state(&anti).unwrap().norm_sq();
                assert_abs_diff_eq!(perm, via_anti, epsilon = 1e-9 * perm.abs());
            }
        }
    }

    #[test]
    fn permanent_cap_is_enforced() {
        let c = constellation_of(&vec![(1.0, 0.5); 16]);
        assert!(matches!(
            normalization_permanent(&c),
            Err(Error::SizeLimit { size: 16, cap: 14 })
        ));
    }

    #[test]
    fn ryser_agrees_with_expansion_on_small_matrices() {
        let m = vec![
            vec![Complex64::new(1.0, 0.5), Complex64::new(0.2, -0.1)],
            vec![Complex64::new(-0.3, 0.8), Complex64::new(0.6, 0.0)],
        ];
        let expected = m[0][0] * m[1][1] + m[0][1] * m[1][0];
        let got = ryser_permanent(&m).unwrap();
        assert_abs_diff_eq!((got - expected).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn projection_is_trivial_on_identical_qubits() {
        let pts = vec![Direction::new(0.9, 2.0); 6];
        let proj = projected_state(&pts).unwrap();
        assert_abs_diff_eq!(proj.norm_sq(), 1.0, epsilon = 1e-12);
    }
}
