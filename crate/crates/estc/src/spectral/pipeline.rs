//! Scan, bracket, refine: from a field configuration to its ground-state doublet.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    doublet_analysis, evaluate, fix_phase, local_minima, refine_minimum, scan, Bracket, Doublet, LineFit,
    PhysicalConstants, RefineOptions, ScanWindow, SpectralPoint,
};
use crate::evolution::{SolutionFamily, Solver};
use crate::field::{FieldSpec, WaveParams};
use crate::lattice::FiniteModel;
use crate::{Bispinor, Error, Result};

/// A refined line with its phase-fixed amplitude and all four residuals at `ξ₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralLine {
    pub fit: LineFit,
    /// Unit `c₁(ξ₀)` (or `c₂` for the second member of a degenerate pair).
    pub a0: Bispinor,
    pub residuals: [f64; 4],
}

/// Non-fatal conditions reported alongside a partial or degenerate result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "code")]
pub enum Warning {
    #[serde(rename = "degenerate.doublet")]
    DegenerateDoublet,
    #[serde(rename = "lines.missing")]
    MissingLines { requested: usize, found: usize },
}

impl Warning {
    pub fn code(&self) -> &'static str {
        match self {
            Warning::DegenerateDoublet => "degenerate.doublet",
            Warning::MissingLines { .. } => "lines.missing",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundStateRequest {
    pub q: [f64; 3],
    pub omega: f64,
    pub g_max: u32,
    pub window: ScanWindow,
    /// Lines to refine, 1 or 2.
    pub lines: usize,
    pub solver: Solver,
    pub refine: RefineOptions,
    /// Level for the half-width; `√I_A` when absent.
    pub r_av: Option<f64>,
    /// `R₂/R₃` at the deepest line below which its first two eigenvectors form a degenerate pair.
    pub degeneracy_ratio: f64,
}

impl GroundStateRequest {
    pub fn new(q: [f64; 3], omega: f64, g_max: u32, window: ScanWindow) -> Self {
        GroundStateRequest {
            q,
            omega,
            g_max,
            window,
            lines: 2,
            solver: Solver::Banded,
            refine: RefineOptions::default(),
            r_av: None,
            degeneracy_ratio: 1e-3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub model: Arc<FiniteModel>,
    pub points: Vec<SpectralPoint>,
    /// Refined lines in ascending `ξ₀`.
    pub lines: Vec<SpectralLine>,
    /// The family at each line's `ξ₀`.
    pub families: Vec<SolutionFamily>,
    pub doublet: Option<Doublet>,
    pub warnings: Vec<Warning>,
}

fn refine(
    model: &Arc<FiniteModel>,
    field: &FieldSpec,
    wp: WaveParams,
    req: &GroundStateRequest,
    bracket: Bracket,
    r_av: f64,
) -> Result<(SpectralLine, SolutionFamily, SpectralPoint)> {
    let r1 = |xi: f64| evaluate(model, field, wp.with_xi(xi), req.solver).map(|(_, p)| p.r1());
    let fit = refine_minimum(r1, bracket, r_av, &req.refine)?;
    let (fam, point) = evaluate(model, field, wp.with_xi(fit.xi0), req.solver)?;
    let line = SpectralLine { fit, a0: fix_phase(&point.vectors[0]), residuals: point.residuals() };
    Ok((line, fam, point))
}

/// Scans `req.window`, refines the deepest minima and, for two lines, analyses the doublet.
pub fn ground_state(field: &FieldSpec, req: &GroundStateRequest, constants: &PhysicalConstants) -> Result<GroundState> {
    req.window.validate()?;
    if !(1..=2).contains(&req.lines) {
        return Err(Error::InvalidParameter(format!("lines must be 1 or 2, got {}", req.lines)));
    }
    let intensity = field.intensity();
    if intensity == 0.0 {
        return Err(Error::ZeroIntensity);
    }
    let r_av = req.r_av.unwrap_or_else(|| intensity.sqrt());
    let model = Arc::new(FiniteModel::build(req.g_max, &field.active_shifts())?);
    let wp = WaveParams::new(req.q, req.window.min, req.omega)?;
    let points = scan(&model, field, wp, &req.window.points(), req.solver)?;
    let brackets = local_minima(&points);

    let mut warnings = Vec::new();
    let candidates: Vec<Bracket> = brackets.into_iter().take(req.lines).collect();
    let refined = match candidates.as_slice() {
        [] => Vec::new(),
        [one] => vec![refine(&model, field, wp, req, *one, r_av)?],
        [first, second, ..] => {
            let (a, b) = rayon::join(
                || refine(&model, field, wp, req, *first, r_av),
                || refine(&model, field, wp, req, *second, r_av),
            );
            // A shallow second minimum is plateau noise, not a line.
            match b {
                Err(Error::ShallowMinimum { .. }) => vec![a?],
                b => vec![a?, b?],
            }
        }
    };

    let mut lines = Vec::new();
    let mut families = Vec::new();
    let mut degenerate = false;
    if let Some((deepest, fam, point)) = refined.first() {
        let r = point.residuals();
        if req.lines == 2 && r[1] < req.degeneracy_ratio * r[2] {
            degenerate = true;
            let partner = SpectralLine { a0: fix_phase(&point.vectors[1]), ..deepest.clone() };
            lines = vec![deepest.clone(), partner];
            families = vec![fam.clone(), fam.clone()];
        }
    }
    if !degenerate {
        let mut sorted: Vec<_> = refined.into_iter().map(|(l, f, _)| (l, f)).collect();
        sorted.sort_by(|a, b| a.0.fit.xi0.total_cmp(&b.0.fit.xi0));
        for (l, f) in sorted {
            lines.push(l);
            families.push(f);
        }
    }
    if lines.len() < req.lines {
        warnings.push(Warning::MissingLines { requested: req.lines, found: lines.len() });
    }
    if degenerate {
        warnings.push(Warning::DegenerateDoublet);
    }
    let doublet = match (lines.as_slice(), families.as_slice()) {
        ([a, b], [fa, fb]) => Some(doublet_analysis(a, fa, b, fb, constants)?),
        _ => None,
    };
    Ok(GroundState { model, points, lines, families, doublet, warnings })
}
