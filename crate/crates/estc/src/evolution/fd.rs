//! Finite-difference application of the dimensionless Dirac operator.
//!
//! `𝒟 = Σ_k α_k(−i(Ω/2π)∂_k − A_k) − i(Ω/2π)∂₄ + α₄` in coordinates `X`
//! measured in lattice wavelengths. Used only to cross-check the Fourier-space
//! residual and closed-form solutions.

use std::f64::consts::PI;

use crate::gamma::Gamma;
use crate::{Mat4, C64};

/// Central-difference weights for offsets `±1 … ±4`.
const WEIGHTS: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

/// Eighth-order central derivative of `f` along axis `mu` at `x`.
pub fn partial<F: Fn([f64; 4]) -> Mat4>(f: &F, x: [f64; 4], mu: usize, h: f64) -> Mat4 {
    let shifted = |t: f64| {
        let mut y = x;
        y[mu] += t;
        f(y)
    };
    WEIGHTS
        .iter()
        .enumerate()
        .fold(Mat4::zeros(), |acc, (i, &w)| {
            let t = (i + 1) as f64 * h;
            acc + (shifted(t) - shifted(-t)) * C64::new(w, 0.0)
        })
        / C64::new(h, 0.0)
}

/// `𝒟 F(X)` for a matrix-valued `F`, with the derivatives taken numerically.
pub fn dirac_fd<F, P>(f: &F, potential: &P, omega: f64, x: [f64; 4], h: f64) -> Mat4
where
    F: Fn([f64; 4]) -> Mat4,
    P: Fn([f64; 4]) -> [f64; 3],
{
    let k = C64::new(0.0, -omega / (2.0 * PI));
    let value = f(x);
    let a = potential(x);
    let mut out = Gamma::ALPHA[3].matrix() * value + partial(f, x, 3, h) * k;
    for i in 0..3 {
        let term = partial(f, x, i, h) * k - value * C64::new(a[i], 0.0);
        out += Gamma::ALPHA[i].matrix() * term;
    }
    out
}
