//! All-roots solvers for complex polynomials.
//!
//! Companion-matrix Schur eigenvalues carry low degrees robustly; the
//! Aberth-Ehrlich simultaneous iteration scales to the high-degree
//! polynomials produced by large constellations.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Degrees at or below this use the companion-matrix eigensolver.
pub const COMPANION_MAX_DEGREE: usize = 64;

/// A root is accepted when `|p(z)| / scale(z)` stays below this, with
/// `scale(z) = Σ |c_j| |z|^j` the evaluation's own magnitude budget.
pub const RESIDUAL_LIMIT: f64 = 1e-6;

const ABERTH_MAX_ITER: usize = 400;

/// All `deg` roots of `Σ c_j z^j`, `c` ascending, requiring nonzero first and
/// last coefficients (the caller strips exact zeros at either end).
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len().saturating_sub(1);
    assert!(deg >= 1, "constant polynomials have no roots to find");
    assert!(coeffs[deg].norm() > 0.0 && coeffs[0].norm() > 0.0);

    let roots = match deg {
        1 => vec![-coeffs[0] / coeffs[1]],
        2 => quadratic_roots(coeffs),
        _ if deg <= COMPANION_MAX_DEGREE => {
            companion_roots(coeffs).unwrap_or_else(|| aberth_roots(coeffs))
        }
        _ => aberth_roots(coeffs),
    };

    let eval = PolyEval::new(coeffs);
    for &z in &roots {
        let (residual, _) = eval.residual_and_newton(z);
        if residual > RESIDUAL_LIMIT {
            return Err(Error::RootFinding {
                residual,
                limit: RESIDUAL_LIMIT,
            });
        }
    }
    Ok(roots)
}

/// Overflow-free polynomial evaluation: outside the unit disk the reversed
/// polynomial is evaluated at `1/z`, which keeps every intermediate bounded
/// for arbitrarily large roots (points near the projection pole).
struct PolyEval {
    coeffs: Vec<Complex64>,
    reversed: Vec<Complex64>,
}

impl PolyEval {
    fn new(coeffs: &[Complex64]) -> Self {
        let mut reversed = coeffs.to_vec();
        reversed.reverse();
        PolyEval {
            coeffs: coeffs.to_vec(),
            reversed,
        }
    }

    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `(|p(z)| / Σ|c_j||z|^j, p(z)/p'(z))`.
    fn residual_and_newton(&self, z: Complex64) -> (f64, Complex64) {
        if z.norm() <= 1.0 {
            let (p, dp, scale) = horner(&self.coeffs, z);
            let newton = if dp.norm() > 0.0 {
                p / dp
            } else {
                Complex64::new(f64::EPSILON, f64::EPSILON)
            };
            (p.norm() / scale, newton)
        } else {
            // p(z) = z^n q(1/z): |p|/α(z) = |q(u)|/α_rev(u) and
            // p/p' = z q / (n q - u q')
            let u = z.inv();
            let (q, dq, scale) = horner(&self.reversed, u);
            let n = self.degree() as f64;
            let denom = n * q - u * dq;
            let newton = if denom.norm() > 0.0 {
                z * q / denom
            } else {
                Complex64::new(f64::EPSILON, f64::EPSILON)
            };
            (q.norm() / scale, newton)
        }
    }
}

/// Horner evaluation returning `(p(z), p'(z), Σ |c_j||z|^j)`; callers keep
/// `|z| <= 1` so nothing overflows.
fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let az = z.norm();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
        scale = scale * az + c.norm();
    }
    (p, dp, scale.max(f64::MIN_POSITIVE))
}

/// Initial-guess radii from the upper convex hull of `(j, ln|c_j|)`; each
/// hull edge of width `w` contributes `w` guesses at its implied root
/// modulus. Handles coefficient magnitudes spanning many decades.
fn initial_guesses(coeffs: &[Complex64]) -> Vec<Complex64> {
    let pts: Vec<(f64, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(j, c)| (j as f64, c.norm().ln()))
        .collect();
    // monotone chain, upper hull
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if (b.0 - a.0) * (p.1 - a.1) - (p.0 - a.0) * (b.1 - a.1) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let n = coeffs.len() - 1;
    let mut guesses = Vec::with_capacity(n);
    for seg in hull.windows(2) {
        let (k1, y1) = seg[0];
        let (k2, y2) = seg[1];
        let width = (k2 - k1).round() as usize;
        let radius = ((y1 - y2) / (k2 - k1)).exp();
        for t in 0..width {
            let angle = 2.0 * std::f64::consts::PI * (t as f64 + 0.5) / width as f64
                + 0.376
                + 0.13 * k1;
            guesses.push(radius * Complex64::new(angle.cos(), angle.sin()));
        }
    }
    // zero coefficients inside the hull can make the count short; pad on the
    // unit circle
    while guesses.len() < n {
        let angle = 1.2 + guesses.len() as f64;
        guesses.push(Complex64::new(angle.cos(), angle.sin()));
    }
    guesses.truncate(n);
    guesses
}

fn quadratic_roots(c: &[Complex64]) -> Vec<Complex64> {
    let (a, b, c0) = (c[2], c[1], c[0]);
    let disc = (b * b - 4.0 * a * c0).sqrt();
    // pick the sign that avoids cancellation in -b ± disc
    let s = if (b.conj() * disc).re >= 0.0 { disc } else { -disc };
    let q = -0.5 * (b + s);
    if q.norm() == 0.0 {
        return vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
    }
    vec![c0 / q, q / a]
}

fn companion_roots(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let mut m = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-14, 20_000)?;
    let t = schur.unpack().1;
    Some((0..deg).map(|i| t[(i, i)]).collect())
}

fn aberth_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    let eval = PolyEval::new(coeffs);
    let mut z = initial_guesses(coeffs);

    for _ in 0..ABERTH_MAX_ITER {
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let (residual, newton) = eval.residual_and_newton(z[i]);
            if residual <= 1e-16 {
                continue;
            }
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    let d = z[i] - zj;
                    if d.norm() > 0.0 {
                        repulsion += d.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            z[i] -= step;
            max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

/// Groups near-coincident roots (relative radius `tol`) and replaces each
/// group by its centroid, preserving multiplicity.
pub fn cluster_roots(roots: &mut [Complex64], tol: f64) {
    let n = roots.len();
    let mut assigned = vec![usize::MAX; n];
    let mut next_cluster = 0;
    for i in 0..n {
        if assigned[i] != usize::MAX {
            continue;
        }
        assigned[i] = next_cluster;
        for j in (i + 1)..n {
            if assigned[j] == usize::MAX {
                let scale = roots[i].norm().max(1.0);
                if (roots[i] - roots[j]).norm() <= tol * scale {
                    assigned[j] = next_cluster;
                }
            }
        }
        next_cluster += 1;
    }
    for cluster in 0..next_cluster {
        let members: Vec<usize> = (0..n).filter(|&i| assigned[i] == cluster).collect();
        if members.len() > 1 {
            let centroid =
                members.iter().map(|&i| roots[i]).sum::<Complex64>() / members.len() as f64;
            for &i in &members {
                roots[i] = centroid;
            }
        }
    }
}
