//! The two-line ground state: energies, spin means, and the precessing mixture.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::pipeline::SpectralLine;
use crate::evolution::{quad, Observable, SolutionFamily};
use crate::gamma::Gamma;
use crate::{Bispinor, Error, Result, C64};

/// Unit conversions for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// `m_e c² / h` in Hz.
    pub rest_frequency_hz: f64,
    /// Compton wavelength `h / m_e c` in metres.
    pub compton_wavelength_m: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants { rest_frequency_hz: 1.235_589_964e20, compton_wavelength_m: 2.426_310_238_67e-12 }
    }
}

impl PhysicalConstants {
    /// Field wavelength `λ₀ = λ_C / Ω` in metres.
    pub fn wavelength_m(&self, omega: f64) -> f64 {
        self.compton_wavelength_m / omega
    }

    /// `Δξ · m_e c² / h`.
    pub fn frequency_hz(&self, delta_xi: f64) -> f64 {
        delta_xi * self.rest_frequency_hz
    }
}

/// Summary of lines `a` (lower `ξ₀`) and `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Doublet {
    pub line_a: SpectralLine,
    pub line_b: SpectralLine,
    pub xi_m: f64,
    pub delta_xi: f64,
    pub energy_a: f64,
    pub energy_b: f64,
    pub delta_e: f64,
    /// `1 − u_a / u_b` with `u = a₀† U_E a₀` for unit `a₀`.
    pub u0: f64,
    pub v0: f64,
    pub sigma1_a: f64,
    pub sigma1_b: f64,
    pub nu_pr_hz: f64,
    /// `+1` when the transverse spin turns from `e₃` towards `e₂`, `−1` for the reverse.
    pub handedness: f64,
    /// Both lines sit at the same `ξ₀`.
    pub degenerate: bool,
}

/// Overlap `Σ_n a(n)† O b(n)` over the common domain.
fn cross(fam_a: &SolutionFamily, a0: &Bispinor, fam_b: &SolutionFamily, b0: &Bispinor, op: &crate::Mat4) -> C64 {
    fam_a
        .blocks()
        .iter()
        .filter_map(|(n, sa)| fam_b.blocks().get(n).map(|sb| ((sa * a0).adjoint() * op * (sb * b0))[(0, 0)]))
        .sum()
}

/// Doublet quantities from lines refined on `fam_a` and `fam_b`.
pub fn doublet_analysis(
    line_a: &SpectralLine,
    fam_a: &SolutionFamily,
    line_b: &SpectralLine,
    fam_b: &SolutionFamily,
    constants: &PhysicalConstants,
) -> Result<Doublet> {
    let (a0, b0) = (&line_a.a0, &line_b.a0);
    let u_a = quad(&fam_a.ue(), a0);
    let u_b = quad(&fam_b.ue(), b0);
    if !(u_b > 0.0 && u_a > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let (offset_a, offset_b) = (fam_a.energy_offset(a0)?, fam_b.energy_offset(b0)?);
    let m2 = cross(fam_a, a0, fam_b, b0, Gamma::SIGMA[1].matrix());
    let m3 = cross(fam_a, a0, fam_b, b0, Gamma::SIGMA[2].matrix());
    let handedness = if m2.im * m3.re < 0.0 { -1.0 } else { 1.0 };
    let delta_xi = line_b.fit.xi0 - line_a.fit.xi0;
    Ok(Doublet {
        line_a: line_a.clone(),
        line_b: line_b.clone(),
        xi_m: 0.5 * (line_a.fit.xi0 + line_b.fit.xi0),
        delta_xi,
        energy_a: 1.0 + offset_a,
        energy_b: 1.0 + offset_b,
        delta_e: offset_b - offset_a,
        u0: 1.0 - u_a / u_b,
        v0: 1.0 + m3.re / u_b,
        sigma1_a: fam_a.mean_value(Observable::Spin(1), a0)?,
        sigma1_b: fam_b.mean_value(Observable::Spin(1), b0)?,
        nu_pr_hz: constants.frequency_hz(delta_xi),
        handedness,
        degenerate: delta_xi == 0.0,
    })
}

/// The superposition `a₀ = a₀ₐ e^{iδ} cos α + a₀_b sin α` in closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixedState {
    pub alpha: f64,
    pub delta: f64,
    pub energy: f64,
    sigma1_a: f64,
    u0: f64,
    v0: f64,
    handedness: f64,
    nu_pr_hz: f64,
}

impl MixedState {
    pub fn new(doublet: &Doublet, alpha: f64, delta: f64) -> Result<Self> {
        if !(0.0..=PI / 2.0).contains(&alpha) || !(0.0..=2.0 * PI).contains(&delta) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} or delta = {delta} out of range")));
        }
        let (s, c) = alpha.sin_cos();
        let energy = doublet.energy_a + doublet.delta_e * s * s / (1.0 - doublet.u0 * c * c);
        Ok(MixedState {
            alpha,
            delta,
            energy,
            sigma1_a: doublet.sigma1_a,
            u0: doublet.u0,
            v0: doublet.v0,
            handedness: doublet.handedness,
            nu_pr_hz: doublet.nu_pr_hz,
        })
    }

    /// Precession angle `φ = δ + 2π ν_pr t`.
    pub fn phase(&self, t: f64) -> f64 {
        self.delta + 2.0 * PI * self.nu_pr_hz * t
    }

    /// `⟨Σ⟩` at time `t` in seconds.
    pub fn spin(&self, t: f64) -> [f64; 3] {
        self.spin_at_phase(self.phase(t))
    }

    pub fn spin_at_phase(&self, phi: f64) -> [f64; 3] {
        let c2 = self.alpha.cos().powi(2);
        let den = 1.0 - self.u0 * c2;
        let axial = self.sigma1_a * ((2.0 * self.alpha).cos() - self.u0 * c2) / den;
        let rho = (self.v0 - 1.0) * (2.0 * self.alpha).sin() / den;
        let (s, c) = phi.sin_cos();
        [axial, rho * self.handedness * s, rho * c]
    }
}

/// `⟨Σ⟩` of the two-line superposition with relative phase `φ`, summed over Fourier blocks.
pub fn mixed_spin_direct(
    fam_a: &SolutionFamily,
    a0: &Bispinor,
    fam_b: &SolutionFamily,
    b0: &Bispinor,
    alpha: f64,
    phi: f64,
) -> [f64; 3] {
    let (s, c) = alpha.sin_cos();
    let norm = c * c * quad(&fam_a.ue(), a0) + s * s * quad(&fam_b.ue(), b0);
    let rot = C64::from_polar(1.0, -phi);
    std::array::from_fn(|k| {
        let op = Gamma::SIGMA[k].matrix();
        let diag_a = quad(&fam_a.observable_form(Observable::Spin(k + 1)).expect("valid component"), a0);
        let diag_b = quad(&fam_b.observable_form(Observable::Spin(k + 1)).expect("valid component"), b0);
        let x = (rot * cross(fam_a, a0, fam_b, b0, op)).re;
        (c * c * diag_a + s * s * diag_b + 2.0 * s * c * x) / norm
    })
}
