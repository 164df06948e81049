//! Closed-form solution for a single plane wave `A₃ = a₃₁ e₁ + i b₃₂ e₂` travelling along `e₃`.
//!
//! `E_v(X) = e^{iΦ(X)} J(ζ)` with `k₀ζ = 2π(X₃ − X₄)`. `J` is a rank-2 projector and
//! the phase is linear in `X` plus a periodic part. Nothing here touches the
//! lattice solver, so the module serves as an independent check on it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::evolution::fd;
use crate::field::FieldSpec;
use crate::gamma::DSet;
use crate::{Bispinor, Error, Mat4, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolkovParams {
    pub a31: f64,
    pub b32: f64,
    /// Spatial wave vector `q`.
    pub q: [f64; 3],
    pub q4: f64,
    pub omega: f64,
}

impl VolkovParams {
    pub fn new(a31: f64, b32: f64, q: [f64; 3], q4: f64, omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(format!("Omega must be positive, got {omega}")));
        }
        if [a31, b32, q4].iter().chain(&q).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("Volkov parameters must be finite".into()));
        }
        if q4 == q[2] {
            return Err(Error::Singular { det: 0.0 });
        }
        Ok(VolkovParams { a31, b32, q, q4, omega })
    }

    /// `I_A = 2(a₃₁² + b₃₂²)`.
    pub fn intensity(&self) -> f64 {
        2.0 * (self.a31 * self.a31 + self.b32 * self.b32)
    }

    pub fn field(&self) -> FieldSpec {
        FieldSpec::single_wave(self.a31, self.b32)
    }

    /// `J₄ = 1 / (2(q₄ − q₃))`.
    pub fn j4(&self) -> f64 {
        0.5 / (self.q4 - self.q[2])
    }

    /// Shift `c` with `Q′ = Q − c N₃`.
    fn shift(&self) -> f64 {
        let q2: f64 = self.q.iter().map(|x| x * x).sum();
        (1.0 + q2 - self.q4 * self.q4 + self.intensity()) / (2.0 * (self.q[2] - self.q4))
    }

    /// `Q′ = (q₁, q₂, q₃ − c, q₄ − c)`; the fourth entry is the coefficient of `i`.
    pub fn q_prime(&self) -> [f64; 4] {
        let c = self.shift();
        [self.q[0], self.q[1], self.q[2] - c, self.q4 - c]
    }

    /// `1 + Q′² + I_A` with the Euclidean `Q′² = q′₁² + q′₂² + q′₃² − q′₄²`.
    pub fn dispersion_residual(&self) -> f64 {
        let [a, b, c, d] = self.q_prime();
        // Grouped so the cancelling pair is subtracted first.
        1.0 + a * a + b * b + (c - d) * (c + d) + self.intensity()
    }
}

/// `k₀ζ = 2π(X₃ − X₄)`.
pub fn wave_phase(x: [f64; 4]) -> f64 {
    2.0 * PI * (x[2] - x[3])
}

/// The D-set of `J` at wave phase `k₀ζ`.
pub fn volkov_j_dset(k0z: f64, p: &VolkovParams) -> DSet {
    let j4 = p.j4();
    let (s, c) = k0z.sin_cos();
    let j10 = j4 * (p.q[0] - 2.0 * p.a31 * c);
    let j11 = j4 * (p.q[1] + 2.0 * p.b32 * s);
    let mut d = [C64::new(0.0, 0.0); 16];
    d[0] = C64::new(0.5, 0.0);
    d[2] = C64::new(0.0, -j11);
    d[3] = C64::new(0.0, j10);
    d[4] = C64::new(j4, 0.0);
    d[9] = C64::new(-0.5, 0.0);
    d[10] = C64::new(j10, 0.0);
    d[11] = C64::new(j11, 0.0);
    d[13] = C64::new(0.0, -j4);
    DSet(d)
}

pub fn volkov_j(k0z: f64, p: &VolkovParams) -> Mat4 {
    volkov_j_dset(k0z, p).to_matrix()
}

/// `Φ(X)`: the linear phase of `Q′` plus the periodic correction.
pub fn volkov_phase(x: [f64; 4], p: &VolkovParams) -> f64 {
    let [q1, q2, q3, q4] = p.q_prime();
    let linear = 2.0 * PI / p.omega * (q1 * x[0] + q2 * x[1] + q3 * x[2] - q4 * x[3]);
    let k0z = wave_phase(x);
    let (s, c) = k0z.sin_cos();
    let periodic = 4.0 * p.b32 * p.q[1] * (1.0 - c) - 4.0 * p.a31 * p.q[0] * s
        + (p.a31 * p.a31 - p.b32 * p.b32) * (2.0 * k0z).sin();
    linear + p.j4() / p.omega * periodic
}

/// `E_v(X) = e^{iΦ(X)} J(ζ)`.
pub fn volkov_ev(x: [f64; 4], p: &VolkovParams) -> Mat4 {
    volkov_j(wave_phase(x), p) * C64::from_polar(1.0, volkov_phase(x, p))
}

/// `|𝒟Ψ| / |Ψ|` at `x` for `Ψ = E_v a₀`, with `𝒟` applied by finite differences.
pub fn fd_residual(p: &VolkovParams, x: [f64; 4], a0: &Bispinor, h: f64) -> f64 {
    let field = p.field();
    let ev = |y: [f64; 4]| volkov_ev(y, p);
    let pot = |y: [f64; 4]| field.potential(y);
    let d = fd::dirac_fd(&ev, &pot, p.omega, x, h) * a0;
    let psi = volkov_ev(x, p) * a0;
    d.norm() / psi.norm().max(f64::MIN_POSITIVE)
}

/// `ξ_V = √(1+q²+I_A) − √(1+q²)`, evaluated without cancellation.
pub fn xi_v(q: [f64; 3], intensity: f64) -> f64 {
    let base = 1.0 + q.iter().map(|x| x * x).sum::<f64>();
    intensity / ((base + intensity).sqrt() + base.sqrt())
}
