//! The JSON run configuration shared by every command.

use std::f64::consts::FRAC_PI_4;
use std::path::Path;

use estc::evolution::Solver;
use estc::field::{FieldComponent, FieldSpec, WaveParams};
use estc::spectral::{GroundStateRequest, PhysicalConstants, RefineOptions, ScanWindow};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Nonzero amplitude components `(A_j)_k = a + i b`.
    pub field: Vec<FieldComponent>,
    pub omega: f64,
    #[serde(default)]
    pub q: [f64; 3],
    pub xi: ScanWindow,
    pub g_max: u32,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub options: Options,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Bound on `‖P² − P‖` for projector checks.
    pub idempotency: f64,
    /// Golden-section stopping width in `ξ`; `0` runs to float resolution.
    pub refine: f64,
    /// Relative singular-value cutoff of the dense oracle.
    pub rank: f64,
    /// Bound on engine-versus-oracle and closed-form residual checks.
    pub agreement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { idempotency: 1e-11, refine: 0.0, rank: 1e-12, agreement: 1e-10 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    pub solver: Solver,
    pub lines: Option<usize>,
    pub r_av: Option<f64>,
    pub degeneracy_ratio: Option<f64>,
    pub constants: PhysicalConstants,
    pub precession: PrecessionOptions,
    pub volkov: VolkovOptions,
    pub oracle: OracleOptions,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrecessionOptions {
    pub alpha: f64,
    pub delta: f64,
    /// Time grid in seconds; `t_stop` defaults to two precession periods.
    pub t_start: f64,
    pub t_stop: Option<f64>,
    pub steps: usize,
}

impl Default for PrecessionOptions {
    fn default() -> Self {
        PrecessionOptions { alpha: FRAC_PI_4, delta: 0.0, t_start: 0.0, t_stop: None, steps: 201 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VolkovOptions {
    pub a31: f64,
    pub b32: f64,
    pub q4: f64,
    pub samples: usize,
    pub seed: u64,
    /// Finite-difference step in lattice wavelengths.
    pub step: f64,
}

impl Default for VolkovOptions {
    fn default() -> Self {
        VolkovOptions { a31: 0.01, b32: 0.007, q4: 1.2, samples: 16, seed: 0, step: 1e-3 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleOptions {
    /// Frequency offset of the comparison; the window minimum when absent.
    pub xi: Option<f64>,
    /// Added to the diagonal of the engine's origin block before comparing (negative control).
    pub tamper: f64,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_owned(), source })?;
        let config: RunConfig = serde_json::from_str(&text).map_err(CliError::Parse)?;
        config.validate()?;
        Ok(config)
    }

    /// Checks everything that does not need a solve.
    pub fn validate(&self) -> Result<(), CliError> {
        let field = self.field_spec()?;
        if field.intensity() == 0.0 {
            return Err(estc::Error::ZeroIntensity.into());
        }
        self.wave_params()?;
        self.xi.validate()?;
        if self.g_max < 1 {
            return Err(estc::Error::GMax(self.g_max).into());
        }
        let t = &self.tolerances;
        for (name, v) in [("idempotency", t.idempotency), ("rank", t.rank), ("agreement", t.agreement)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Invalid(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if !(t.refine >= 0.0 && t.refine.is_finite()) {
            return Err(CliError::Invalid(format!("tolerance refine must be nonnegative, got {}", t.refine)));
        }
        Ok(())
    }

    pub fn field_spec(&self) -> Result<FieldSpec, CliError> {
        Ok(FieldSpec::from_components(&self.field)?)
    }

    /// Wave parameters at the window minimum.
    pub fn wave_params(&self) -> Result<WaveParams, CliError> {
        Ok(WaveParams::new(self.q, self.xi.min, self.omega)?)
    }

    pub fn ground_state_request(&self) -> GroundStateRequest {
        let mut req = GroundStateRequest::new(self.q, self.omega, self.g_max, self.xi);
        let o = &self.options;
        req.solver = o.solver;
        req.lines = o.lines.unwrap_or(req.lines);
        req.r_av = o.r_av;
        req.degeneracy_ratio = o.degeneracy_ratio.unwrap_or(req.degeneracy_ratio);
        req.refine = RefineOptions { xi_tol: self.tolerances.refine, ..RefineOptions::default() };
        req
    }
}
