//! Wave functions built from the fundamental solution and their unit-cell averages.
//!
//! For amplitude `a₀` at the origin, `Ψ(X) = E_v(X) a₀` with
//! `E_v = Σ_n e^{iφ_n(X)} S(n)`. Averages over the unit 4-cell reduce to
//! sums over Fourier blocks because the phases are orthogonal.

pub mod fd;

use std::f64::consts::PI;
use std::sync::Arc;

use crate::field::{free_block, FieldSpec, WaveParams};
use crate::gamma::Gamma;
use crate::lattice::{FiniteModel, MultiIndex};
use crate::projector::{build_fundamental, origin_column, stencil_blocks, SolutionBlocks};
use crate::{Bispinor, Error, Mat4, Result, C64};

/// Which construction produces the fundamental solution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    /// Householder QR of the banded stacked system (fast).
    #[default]
    Banded,
    /// Sequential merge of node projectors.
    Merge,
}

/// Observables with unit-cell mean values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    Identity,
    /// Normalized energy `⟨H⟩ / m c²`.
    Energy,
    /// Normalized kinetic momentum component `k ∈ 1..=3`.
    Momentum(usize),
    /// Current component, reported as `⟨α_k⟩`.
    Current(usize),
    /// Spin component `⟨Σ_k⟩`.
    Spin(usize),
}

/// The solution family `c(n) = S(n) a₀` at fixed field and wave parameters.
#[derive(Clone, Debug)]
pub struct SolutionFamily {
    model: Arc<FiniteModel>,
    field: FieldSpec,
    wp: WaveParams,
    blocks: SolutionBlocks,
}

impl SolutionFamily {
    pub fn build(model: Arc<FiniteModel>, field: &FieldSpec, wp: WaveParams, solver: Solver) -> Result<Self> {
        let blocks = match solver {
            Solver::Banded => {
                let b = origin_column(&model, field, &wp)?;
                b.verify(&model, field, &wp)?;
                b
            }
            Solver::Merge => build_fundamental(&model, field, &wp)?.blocks,
        };
        Ok(Self::from_blocks(model, field.clone(), wp, blocks))
    }

    pub fn from_blocks(model: Arc<FiniteModel>, field: FieldSpec, wp: WaveParams, blocks: SolutionBlocks) -> Self {
        SolutionFamily { model, field, wp, blocks }
    }

    pub fn model(&self) -> &FiniteModel {
        &self.model
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn wave_params(&self) -> &WaveParams {
        &self.wp
    }

    pub fn blocks(&self) -> &SolutionBlocks {
        &self.blocks
    }

    /// `φ_n(X) = 2π[(n + q/Ω)·X − (n₄ + q₄/Ω) X₄]`.
    pub fn phase(&self, n: MultiIndex, x: [f64; 4]) -> f64 {
        let c = n.coords();
        let om = self.wp.omega;
        let spatial: f64 = (0..3).map(|k| (c[k] as f64 + self.wp.q[k] / om) * x[k]).sum();
        2.0 * PI * (spatial - (c[3] as f64 + self.wp.q4() / om) * x[3])
    }

    /// `E_v(X) = Σ_n e^{iφ_n(X)} S(n)`.
    pub fn evaluate_ev(&self, x: [f64; 4]) -> Mat4 {
        self.blocks.iter().fold(Mat4::zeros(), |acc, (n, s)| acc + s * C64::from_polar(1.0, self.phase(n, x)))
    }

    /// `Ψ_D(X) = 𝒟 E_v(X)` assembled from the Fourier blocks `γ₄ 𝒱_S(n)`.
    pub fn residual_field(&self, x: [f64; 4]) -> Mat4 {
        let stencil = stencil_blocks(&self.field);
        let g4 = Gamma::GAMMA[3].matrix();
        let mut out = Mat4::zeros();
        for n in self.model.nodes().iter().copied().chain(self.model.boundary()) {
            let v = self.blocks.residual_block(n, &stencil, &self.wp);
            out += g4 * v * C64::from_polar(1.0, self.phase(n, x));
        }
        out
    }

    /// `c(n) = S(n) a₀` over the solution domain.
    pub fn amplitudes(&self, a0: &Bispinor) -> Vec<(MultiIndex, Bispinor)> {
        self.blocks.iter().map(|(n, s)| (n, s * a0)).collect()
    }

    /// `U_E = Σ_n S(n)† S(n)`.
    pub fn ue(&self) -> Mat4 {
        self.blocks.iter().fold(Mat4::zeros(), |acc, (_, s)| acc + s.adjoint() * s)
    }

    /// Fourier blocks `R(n) = −iγ₄ 𝒱_S(n)` of `𝒟Ψ` at nodes outside the equation set.
    ///
    /// `R(n)` is the α-form of the residual; `γ₄` is unitary, so `R†R = 𝒱_S†𝒱_S`.
    pub fn residual_blocks(&self) -> Vec<(MultiIndex, Mat4)> {
        let stencil = stencil_blocks(&self.field);
        let factor = Gamma::GAMMA[3].matrix() * C64::new(0.0, -1.0);
        self.model
            .boundary()
            .into_iter()
            .map(|n| (n, factor * self.blocks.residual_block(n, &stencil, &self.wp)))
            .filter(|(_, r)| r.iter().any(|c| c.norm() > 0.0))
            .collect()
    }

    /// Largest relative `|𝒱_S(n)|` over equation nodes.
    pub fn interior_residual(&self) -> f64 {
        self.blocks.interior_residual(&self.model, &self.field, &self.wp).1
    }

    /// `U_D = Σ_n R(n)† R(n)` over the boundary.
    pub fn ud(&self) -> Mat4 {
        self.residual_blocks().iter().fold(Mat4::zeros(), |acc, (_, r)| acc + r.adjoint() * r)
    }

    /// `R = √(a₀† U_D a₀ / a₀† U_E a₀)`.
    pub fn residual(&self, a0: &Bispinor) -> Result<f64> {
        let den = quad(&self.ue(), a0);
        if den <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok((quad(&self.ud(), a0) / den).max(0.0).sqrt())
    }

    /// Matrix `A_E` of the quadratic form whose ratio to `U_E` is the mean of `obs`.
    pub fn observable_form(&self, obs: Observable) -> Result<Mat4> {
        let sandwich = |o: &Mat4| self.blocks.iter().fold(Mat4::zeros(), |acc, (_, s)| acc + s.adjoint() * o * s);
        match obs {
            Observable::Identity => Ok(self.ue()),
            Observable::Spin(k) => Ok(sandwich(Gamma::SIGMA[component(k)?].matrix())),
            Observable::Current(k) => Ok(sandwich(Gamma::ALPHA[component(k)?].matrix())),
            Observable::Momentum(k) => self.momentum_form(component(k)?),
            Observable::Energy => Ok(self.ue() + self.energy_offset_form()),
        }
    }

    fn momentum_form(&self, k: usize) -> Result<Mat4> {
        let shifts: Vec<(MultiIndex, C64)> = self
            .model
            .shifts()
            .iter()
            .filter_map(|&s| self.field.coupling(s).map(|a| (s, a[k])))
            .filter(|(_, a)| a.norm() > 0.0)
            .collect();
        let mut out = Mat4::zeros();
        for (n, s) in self.blocks.iter() {
            let mut ps = s * C64::new(self.wp.w(n)[k], 0.0);
            for &(sh, a) in &shifts {
                if let Some(t) = self.blocks.get(n + sh) {
                    ps -= t * a;
                }
            }
            out += s.adjoint() * ps;
        }
        Ok(out)
    }

    /// `Σ_n S(n)† (γ₄ 𝒱_S(n) + (w₄(n) − 1) S(n))`, the form of `H − 1`.
    fn energy_offset_form(&self) -> Mat4 {
        let stencil = stencil_blocks(&self.field);
        let g4 = Gamma::GAMMA[3].matrix();
        self.blocks.iter().fold(Mat4::zeros(), |acc, (n, s)| {
            let hs = g4 * self.blocks.residual_block(n, &stencil, &self.wp) + s * C64::new(self.wp.eps4(n), 0.0);
            acc + s.adjoint() * hs
        })
    }

    /// `⟨O⟩ = a₀† A_E a₀ / a₀† U_E a₀`.
    pub fn mean_value(&self, obs: Observable, a0: &Bispinor) -> Result<f64> {
        let den = quad(&self.ue(), a0);
        if den <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(quad(&self.observable_form(obs)?, a0) / den)
    }

    /// `⟨H⟩ − 1`, free of the cancellation in `⟨H⟩` itself.
    pub fn energy_offset(&self, a0: &Bispinor) -> Result<f64> {
        let den = quad(&self.ue(), a0);
        if den <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(quad(&self.energy_offset_form(), a0) / den)
    }
}

fn component(k: usize) -> Result<usize> {
    if (1..=3).contains(&k) {
        Ok(k - 1)
    } else {
        Err(Error::InvalidParameter(format!("vector component {k} is outside 1..=3")))
    }
}

/// Real part of `a† M a`.
pub fn quad(m: &Mat4, a: &Bispinor) -> f64 {
    (a.adjoint() * m * a)[(0, 0)].re
}

/// `Σ_n b(n)† a(n)` over the union of both domains.
pub fn orthogonality(fam_a: &SolutionFamily, a0: &Bispinor, fam_b: &SolutionFamily, b0: &Bispinor) -> C64 {
    fam_a
        .blocks
        .iter()
        .filter_map(|(n, sa)| fam_b.blocks.get(n).map(|sb| ((sb * b0).adjoint() * (sa * a0))[(0, 0)]))
        .sum()
}

/// `V(n, 0)` re-exported for callers that assemble residuals by hand.
pub fn free_coefficient(n: MultiIndex, wp: &WaveParams) -> Mat4 {
    free_block(n, wp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(xi: f64, g: u32) -> SolutionFamily {
        let field = FieldSpec::two_wave_circular(0.01);
        let wp = WaveParams::new([0.0; 3], xi, 0.1).unwrap();
        let model = Arc::new(FiniteModel::build(g, &field.active_shifts()).unwrap());
        SolutionFamily::build(model, &field, wp, Solver::Banded).unwrap()
    }

    fn a_plus() -> Bispinor {
        let h = 0.5f64.sqrt();
        Bispinor::new(C64::new(h, 0.0), C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    }

    #[test]
    fn residual_at_line_a() {
        let fam = family(1.98760360297e-4, 4);
        let r = fam.residual(&a_plus()).unwrap();
        assert!(r < 1e-5, "{r}");
        assert!(fam.interior_residual() < 1e-12);
    }

    #[test]
    fn ev_at_origin_and_periodicity() {
        let fam = family(1.9e-4, 3);
        let sum = fam.blocks().iter().fold(Mat4::zeros(), |acc, (_, s)| acc + s);
        assert!((fam.evaluate_ev([0.0; 4]) - sum).norm() < 1e-12);
        let x = [0.31, 0.2, -0.4, 0.77];
        let y = [1.31, 0.2, -0.4, 0.77];
        assert!((fam.evaluate_ev(x) - fam.evaluate_ev(y)).norm() < 1e-11);
    }

    #[test]
    fn forms_are_hermitian_psd() {
        let fam = family(1.98760360297e-4, 4);
        for m in [fam.ue(), fam.ud()] {
            assert!((m - m.adjoint()).norm() < 1e-12 * m.norm());
            let eig = nalgebra::SymmetricEigen::new(m);
            assert!(eig.eigenvalues.iter().all(|&l| l > -1e-12 * m.norm()));
        }
        let a0 = a_plus();
        assert!((fam.mean_value(Observable::Identity, &a0).unwrap() - 1.0).abs() < 1e-14);
        assert!(fam.mean_value(Observable::Spin(4), &a0).is_err());
    }

    #[test]
    fn fourier_residual_matches_finite_differences() {
        let fam = family(1.95e-4, 3);
        let ev = |x: [f64; 4]| fam.evaluate_ev(x);
        let pot = |x: [f64; 4]| fam.field().potential(x);
        for x in [[0.13, -0.4, 0.25, 0.61], [0.7, 0.05, -0.3, 0.2]] {
            let fd = fd::dirac_fd(&ev, &pot, fam.wave_params().omega, x, 2e-3);
            let fourier = fam.residual_field(x);
            assert!((fd - fourier).norm() < 1e-7, "{}", (fd - fourier).norm());
        }
    }
}
