//! Line refinement: golden-section search on `R₁` and the parabola model
//! `R₁² ≈ R₀² + β₀²(ξ − ξ₀)²`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Grid triple `lo < mid < hi` with `R₁(mid)` below both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub mid: f64,
    pub hi: f64,
    /// `R₁(mid)`.
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RefineOptions {
    /// Absolute width at which golden-section stops; `0` runs to float resolution.
    pub xi_tol: f64,
    /// Samples in the parabola fit.
    pub fit_points: usize,
    /// Half-span of the fit window in units of the half-width `δξ`.
    pub fit_span: f64,
    /// Maximum refits while `δξ` settles.
    pub fit_iterations: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions { xi_tol: 0.0, fit_points: 10, fit_span: 5.0, fit_iterations: 4 }
    }
}

/// A refined line: position, depth, curvature and half-width at `R_av`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub xi0: f64,
    pub r0: f64,
    pub beta0: f64,
    /// `δξ = √(R_av² − R₀²) / β₀`.
    pub halfwidth: f64,
    /// Intercept of the fitted `R₁²`; close to `R₀²` when the model holds.
    pub intercept: f64,
}

const INV_PHI2: f64 = 0.381_966_011_250_105_1;

/// Minimizes `f` inside `bracket` by golden-section search; returns `(x, f(x))`.
pub fn golden_section<F>(mut f: F, bracket: Bracket, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b, mut c) = (bracket.lo, bracket.mid, bracket.hi);
    if !(a < b && b < c) {
        return Err(Error::NoBracket);
    }
    let mut fb = bracket.value;
    for _ in 0..400 {
        if c - a <= tol {
            break;
        }
        let right = c - b > b - a;
        let x = if right { b + INV_PHI2 * (c - b) } else { b - INV_PHI2 * (b - a) };
        if x <= a || x >= c || x == b {
            break;
        }
        let fx = f(x)?;
        if fx < fb {
            if right {
                a = b;
            } else {
                c = b;
            }
            b = x;
            fb = fx;
        } else if right {
            c = x;
        } else {
            a = x;
        }
    }
    Ok((b, fb))
}

/// Least-squares `R² = c₀ + β²(ξ − ξ₀)²` over `samples` of `(ξ, R)`; returns `(c₀, β)`.
pub fn fit_parabola(samples: &[(f64, f64)], xi0: f64) -> Result<(f64, f64)> {
    let scale = samples.iter().map(|(x, _)| (x - xi0).abs()).fold(0.0, f64::max);
    if samples.len() < 2 || scale == 0.0 {
        return Err(Error::InvalidParameter("parabola fit needs two distinct offsets".into()));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(x, r)| (((x - xi0) / scale).powi(2), r * r)).collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x, sy + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx).powi(2), b + (x - mx) * (y - my)));
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("parabola fit needs two distinct offsets".into()));
    }
    let slope = sxy / sxx;
    let c0 = my - slope * mx;
    Ok((c0, slope.max(0.0).sqrt() / scale))
}

/// Golden-section minimum of `f` followed by the iterated parabola fit at level `r_av`.
pub fn refine_minimum<F>(mut f: F, bracket: Bracket, r_av: f64, opts: &RefineOptions) -> Result<LineFit>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (xi0, r0) = golden_section(&mut f, bracket, opts.xi_tol)?;
    if !(r_av > r0) {
        return Err(Error::ShallowMinimum { r0, level: r_av });
    }

    // Coarse curvature from a symmetric pair inside the level set `R₁ < R_av`.
    let mut d = 0.5 * (bracket.hi - bracket.lo);
    let mut beta = 0.0;
    for _ in 0..80 {
        let r = 0.5 * (f(xi0 + d)?.powi(2) + f(xi0 - d)?.powi(2));
        if r.sqrt() > r_av {
            d *= 0.25;
            continue;
        }
        beta = (r - r0 * r0).max(0.0).sqrt() / d;
        break;
    }
    if beta == 0.0 {
        return Err(Error::NoBracket);
    }

    let level = (r_av * r_av - r0 * r0).sqrt();
    let mut fit = LineFit { xi0, r0, beta0: beta, halfwidth: level / beta, intercept: r0 * r0 };
    let m = opts.fit_points.max(2);
    for _ in 0..opts.fit_iterations.max(1) {
        let span = opts.fit_span * fit.halfwidth;
        let samples = (0..m)
            .map(|i| {
                let x = xi0 - span + 2.0 * span * i as f64 / (m - 1) as f64;
                Ok((x, f(x)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let (c0, beta) = fit_parabola(&samples, xi0)?;
        if beta == 0.0 {
            return Err(Error::NoBracket);
        }
        let previous = fit.halfwidth;
        fit = LineFit { xi0, r0, beta0: beta, halfwidth: level / beta, intercept: c0 };
        if (fit.halfwidth - previous).abs() <= 1e-9 * previous {
            break;
        }
    }
    Ok(fit)
}
