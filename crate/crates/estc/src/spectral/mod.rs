//! Residual spectra over the frequency offset `ξ` and the lines they contain.
//!
//! At each `ξ` the residual of `Ψ = E_v a₀` is a Rayleigh quotient of the pencil
//! `(U_D, U_E)`. Its four generalized eigenvalues `λ_j = R_j²` give the spectral
//! curves; sharp minima of `R₁(ξ)` are the spectral lines.

mod doublet;
mod line;
mod pipeline;

use std::sync::Arc;

use nalgebra::{DMatrix, Matrix4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use doublet::{doublet_analysis, mixed_spin_direct, Doublet, MixedState, PhysicalConstants};
pub use line::{fit_parabola, golden_section, refine_minimum, Bracket, LineFit, RefineOptions};
pub use pipeline::{ground_state, GroundState, GroundStateRequest, SpectralLine, Warning};

use crate::evolution::{SolutionFamily, Solver};
use crate::field::{FieldSpec, WaveParams};
use crate::lattice::FiniteModel;
use crate::{Bispinor, Error, Mat4, Result, C64};

/// Generalized eigen-decomposition of `(U_D, U_E)` at one `ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPoint {
    pub xi: f64,
    /// `λ₁ ≤ … ≤ λ₄`.
    pub eigenvalues: [f64; 4],
    /// `c_j` with `c_j† U_E c_k = δ_jk`.
    pub vectors: [Bispinor; 4],
}

impl SpectralPoint {
    /// `R_j = √λ_j`.
    pub fn residuals(&self) -> [f64; 4] {
        self.eigenvalues.map(|l| l.max(0.0).sqrt())
    }

    pub fn r1(&self) -> f64 {
        self.residuals()[0]
    }
}

/// Eigenpairs of `U_D c = λ U_E c` via the Cholesky factor of `U_E`.
pub fn eigen4(ud: &Mat4, ue: &Mat4) -> Result<([f64; 4], [Bispinor; 4])> {
    if ue.symmetric_eigenvalues().iter().any(|&l| l <= 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let chol = ue.cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let l_inv = l.try_inverse().ok_or(Error::NotPositiveDefinite)?;
    let m = l_inv * ud * l_inv.adjoint();
    let m = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = m.symmetric_eigen();
    let back = l_inv.adjoint() * eig.eigenvectors;
    Ok(sorted(eig.eigenvalues.iter().copied(), |j| back.column(j).into_owned()))
}

/// Spectrum of a solution family without forming `U_D` and `U_E`.
///
/// With `C = Q R_c` the stacked blocks `S(n)` and `W` the stacked residual
/// blocks, the singular values of `W R_c⁻¹` are the `R_j` and `R_c⁻¹ v_j` the
/// eigenvectors. Unlike the Cholesky route this keeps `R₁` accurate far below
/// `√ε · R₄`.
pub fn spectrum(fam: &SolutionFamily) -> Result<SpectralPoint> {
    let stack = |blocks: &mut dyn Iterator<Item = Mat4>| {
        let blocks: Vec<Mat4> = blocks.collect();
        let mut m = DMatrix::zeros(4 * blocks.len(), 4);
        for (i, b) in blocks.iter().enumerate() {
            m.view_mut((4 * i, 0), (4, 4)).copy_from(b);
        }
        m
    };
    let c = stack(&mut fam.blocks().iter().map(|(_, s)| *s));
    let w = stack(&mut fam.residual_blocks().into_iter().map(|(_, r)| r));
    let r: Matrix4<C64> = c.qr().r().fixed_view::<4, 4>(0, 0).into_owned();
    let r_inv = r.try_inverse().ok_or(Error::NotPositiveDefinite)?;
    let xi = fam.wave_params().xi;
    if w.nrows() == 0 {
        let vectors = std::array::from_fn(|j| r_inv.column(j).into_owned());
        return Ok(SpectralPoint { xi, eigenvalues: [0.0; 4], vectors });
    }
    let b = w * r_inv;
    let svd = b.svd(false, true);
    let v = svd.v_t.expect("requested").adjoint();
    let (eigenvalues, vectors) = sorted(svd.singular_values.iter().map(|s| s * s), |j| r_inv * v.column(j));
    Ok(SpectralPoint { xi, eigenvalues, vectors })
}

fn sorted(values: impl Iterator<Item = f64>, vector: impl Fn(usize) -> Bispinor) -> ([f64; 4], [Bispinor; 4]) {
    let mut pairs: Vec<(f64, usize)> = values.enumerate().map(|(j, v)| (v, j)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    (std::array::from_fn(|j| pairs[j].0), std::array::from_fn(|j| vector(pairs[j].1)))
}

/// Scales `a` to unit length and rotates its largest component onto the positive real axis.
///
/// Components within `1e-6` (relative) of the largest count as ties; the last one wins.
pub fn fix_phase(a: &Bispinor) -> Bispinor {
    let norm = a.norm();
    if norm == 0.0 {
        return *a;
    }
    let big = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let pivot = a.iter().rposition(|c| c.norm() >= big * (1.0 - 1e-6)).expect("nonempty");
    a * (a[pivot].conj() / (a[pivot].norm() * norm))
}

/// Uniform grid `min, …, max` of `steps` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanWindow {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl ScanWindow {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        let w = ScanWindow { min, max, steps };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidParameter("xi window bounds must be finite".into()));
        }
        if self.steps < 2 || self.max <= self.min {
            return Err(Error::InvalidParameter(format!(
                "empty xi window [{:e}, {:e}] with {} steps",
                self.min, self.max, self.steps
            )));
        }
        if self.min <= -1.0 {
            return Err(Error::InvalidParameter("xi window must lie above -1".into()));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.steps - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.steps).map(|i| if i + 1 == self.steps { self.max } else { self.min + h * i as f64 }).collect()
    }
}

/// Builds the solution family and its spectrum at one `ξ`.
pub fn evaluate(model: &Arc<FiniteModel>, field: &FieldSpec, wp: WaveParams, solver: Solver) -> Result<(SolutionFamily, SpectralPoint)> {
    let run = || {
        let fam = SolutionFamily::build(Arc::clone(model), field, wp, solver)?;
        let point = spectrum(&fam)?;
        Ok((fam, point))
    };
    run().map_err(|e: Error| e.at_xi(wp.xi))
}

/// Spectral points over `xis`, evaluated in parallel and returned in input order.
pub fn scan(model: &Arc<FiniteModel>, field: &FieldSpec, wp: WaveParams, xis: &[f64], solver: Solver) -> Result<Vec<SpectralPoint>> {
    xis.par_iter().map(|&xi| evaluate(model, field, wp.with_xi(xi), solver).map(|(_, p)| p)).collect()
}

/// Interior grid minima of `R₁`, as brackets sorted by depth.
pub fn local_minima(points: &[SpectralPoint]) -> Vec<Bracket> {
    let r: Vec<f64> = points.iter().map(SpectralPoint::r1).collect();
    let mut out: Vec<Bracket> = (1..points.len().saturating_sub(1))
        .filter(|&i| r[i] < r[i - 1] && r[i] <= r[i + 1])
        .map(|i| Bracket { lo: points[i - 1].xi, mid: points[i].xi, hi: points[i + 1].xi, value: r[i] })
        .collect();
    out.sort_by(|a, b| a.value.total_cmp(&b.value));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: [f64; 4]) -> Mat4 {
        Mat4::from_diagonal(&nalgebra::Vector4::from(d.map(|x| C64::new(x, 0.0))))
    }

    #[test]
    fn eigen4_trivial_pencils() {
        let (l, _) = eigen4(&Mat4::identity(), &Mat4::identity()).unwrap();
        assert!(l.iter().all(|x| (x - 1.0).abs() < 1e-14));
        let (l, v) = eigen4(&diag([4.0, 1.0, 0.0, 9.0]), &Mat4::identity()).unwrap();
        assert_eq!(l.map(|x| x.round()), [0.0, 1.0, 4.0, 9.0]);
        assert!((v[0][2].norm() - 1.0).abs() < 1e-14);
        assert!(eigen4(&Mat4::identity(), &diag([1.0, -1.0, 1.0, 1.0])).is_err());
    }

    #[test]
    fn window_rejects_empty_ranges() {
        assert!(ScanWindow::new(1e-4, 1e-4, 10).is_err());
        assert!(ScanWindow::new(1e-4, 2e-4, 1).is_err());
        let w = ScanWindow::new(0.0, 1.0, 5).unwrap();
        assert_eq!(w.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn phase_fix_prefers_later_ties() {
        let h = 0.5f64.sqrt();
        let i = C64::new(0.0, 1.0);
        let a = Bispinor::new(-i * h, -i * h, C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        let f = fix_phase(&a);
        assert!((f[1] - C64::new(h, 0.0)).norm() < 1e-15);
        assert!((f[0] - C64::new(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn factored_spectrum_matches_cholesky_away_from_lines() {
        let field = FieldSpec::two_wave_circular(0.01);
        let wp = WaveParams::new([0.0; 3], 1.9e-4, 0.1).unwrap();
        let model = Arc::new(FiniteModel::build(3, &field.active_shifts()).unwrap());
        let (fam, p) = evaluate(&model, &field, wp, Solver::Banded).unwrap();
        let (l, _) = eigen4(&fam.ud(), &fam.ue()).unwrap();
        for j in 0..4 {
            assert!((l[j] - p.eigenvalues[j]).abs() < 1e-10 * l[3], "{l:?} {:?}", p.eigenvalues);
        }
        let (ud, ue) = (fam.ud(), fam.ue());
        for (lam, c) in p.eigenvalues.iter().zip(&p.vectors) {
            let d = ud * c - ue * c * C64::new(*lam, 0.0);
            assert!(d.norm() < 1e-10);
            assert!(((c.adjoint() * ue * c)[(0, 0)].re - 1.0).abs() < 1e-10);
        }
    }
}
