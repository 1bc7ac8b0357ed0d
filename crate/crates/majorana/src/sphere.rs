//! Directions on the unit sphere and product quadrature grids.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half_integer::HalfInt;

/// A point on the unit sphere in spherical coordinates, `theta` polar from
/// the +z axis in `[0, pi]`, `phi` azimuthal in `[0, 2pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Self {
        debug_assert!((-1e-12..=PI + 1e-12).contains(&theta), "theta out of range");
        let theta = theta.clamp(0.0, PI);
        let phi = phi.rem_euclid(2.0 * PI);
        Direction { theta, phi }
    }

    pub const Z_PLUS: Direction = Direction {
        theta: 0.0,
        phi: 0.0,
    };

    pub fn to_unit_vector(self) -> [f64; 3] {
        let (st, ct) = (self.theta.sin(), self.theta.cos());
        [st * self.phi.cos(), st * self.phi.sin(), ct]
    }

    pub fn from_unit_vector(v: [f64; 3]) -> Self {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        debug_assert!(norm > 0.0);
        let theta = (v[2] / norm).clamp(-1.0, 1.0).acos();
        let phi = v[1].atan2(v[0]).rem_euclid(2.0 * PI);
        Direction { theta, phi }
    }

    pub fn antipode(self) -> Self {
        Direction::new(PI - self.theta, self.phi + PI)
    }

    /// Great-circle angle to another direction.
    pub fn angle_to(self, other: Direction) -> f64 {
        let a = self.to_unit_vector();
        let b = other.to_unit_vector();
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        dot.clamp(-1.0, 1.0).acos()
    }

    /// Applies a 3x3 rotation matrix (row-major) to the direction.
    pub fn rotated(self, r: &[[f64; 3]; 3]) -> Self {
        let v = self.to_unit_vector();
        let mut out = [0.0; 3];
        for (i, row) in r.iter().enumerate() {
            out[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
        }
        Direction::from_unit_vector(out)
    }
}

/// Rotation matrix for a rotation by `angle` about a unit `axis` (Rodrigues).
pub fn rotation_matrix(axis: [f64; 3], angle: f64) -> [[f64; 3]; 3] {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let (x, y, z) = (axis[0] / n, axis[1] / n, axis[2] / n);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Newton iteration on the recurrence-evaluated Legendre polynomial; nodes
/// converge to machine precision in a handful of steps.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P'_n at x
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// One polar row of a product quadrature grid.
#[derive(Clone, Copy, Debug)]
pub struct ThetaNode {
    pub theta: f64,
    pub cos_theta: f64,
    pub sin_theta: f64,
    pub weight: f64,
}

/// Product quadrature on the sphere: Gauss-Legendre in `cos(theta)` times a
/// uniform trapezoid in `phi`. Exact for band-limited integrands up to the
/// stated `degree`.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    thetas: Vec<ThetaNode>,
    n_phi: usize,
    degree: u32,
}

impl SphereGrid {
    /// Grid integrating spherical polynomials up to `degree` exactly:
    /// `ceil((degree+1)/2)` polar nodes and `degree + 1` azimuthal nodes.
    pub fn with_degree(degree: u32) -> Self {
        let n_theta = (degree as usize + 2) / 2;
        let n_phi = degree as usize + 1;
        let (x, w) = gauss_legendre(n_theta.max(1));
        let thetas = x
            .iter()
            .zip(&w)
            .map(|(&c, &w)| ThetaNode {
                theta: c.clamp(-1.0, 1.0).acos(),
                cos_theta: c,
                sin_theta: (1.0 - c * c).max(0.0).sqrt(),
                weight: w,
            })
            .collect();
        SphereGrid {
            thetas,
            n_phi: n_phi.max(1),
            degree,
        }
    }

    /// Grid sufficient to recover every multipole of a spin-`spin` state
    /// from its Husimi values (band limit `2S` squared against itself).
    pub fn for_spin(spin: HalfInt) -> Self {
        let s2 = spin.twice().max(0) as u32;
        Self::with_degree(2 * s2)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn theta_nodes(&self) -> &[ThetaNode] {
        &self.thetas
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn phi(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_phi as f64
    }

    pub fn phi_weight(&self) -> f64 {
        2.0 * PI / self.n_phi as f64
    }

    pub fn node_count(&self) -> usize {
        self.thetas.len() * self.n_phi
    }

    /// Flat iteration over `(direction, weight)`, theta-major.
    pub fn nodes(&self) -> impl Iterator<Item = (Direction, f64)> + '_ {
        let wphi = self.phi_weight();
        self.thetas.iter().flat_map(move |t| {
            (0..self.n_phi).map(move |j| {
                (
                    Direction {
                        theta: t.theta,
                        phi: self.phi(j),
                    },
                    t.weight * wphi,
                )
            })
        })
    }

    /// Fails unless the grid can integrate `Q * Y_Kq` exactly for a spin-S
    /// state and every `K <= k_target`.
    pub fn check_band_limit(&self, spin: HalfInt, k_target: u32) -> Result<()> {
        let needed = spin.twice().max(0) as u32 + k_target;
        if self.degree < needed {
            return Err(Error::QuadratureDegreeTooLow {
                degree: self.degree,
                needed,
                spin,
            });
        }
        Ok(())
    }
}
