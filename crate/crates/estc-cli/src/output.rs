//! Output files. Everything written here is a pure function of the configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use estc::spectral::{Doublet, GroundState, SpectralLine, SpectralPoint, Warning};
use estc::Bispinor;
use serde::Serialize;

use crate::error::CliError;

pub struct OutDir(PathBuf);

impl OutDir {
    pub fn create(path: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(path).map_err(|source| CliError::Write { path: path.to_owned(), source })?;
        Ok(OutDir(path.to_owned()))
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.0.join(name);
        std::fs::write(&path, contents).map_err(|source| CliError::Write { path, source })
    }

    pub fn write_json(&self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("output types serialize");
        text.push('\n');
        self.write(name, &text)
    }
}

/// Comma-separated rows in full precision.
pub fn csv<const N: usize>(header: &str, rows: impl IntoIterator<Item = [f64; N]>) -> String {
    let mut out = format!("{header}\n");
    for row in rows {
        // Adding +0 turns -0 into 0.
        let fields: Vec<String> = row.iter().map(|v| format!("{:.16e}", v + 0.0)).collect();
        writeln!(out, "{}", fields.join(",")).expect("writing to a String");
    }
    out
}

pub fn scan_csv(points: &[SpectralPoint]) -> String {
    csv("xi,R1,R2,R3,R4", points.iter().map(|p| {
        let [r1, r2, r3, r4] = p.residuals();
        [p.xi, r1, r2, r3, r4]
    }))
}

/// A bispinor as four `[re, im]` pairs.
fn components(a: &Bispinor) -> [[f64; 2]; 4] {
    [0, 1, 2, 3].map(|i| [a[i].re, a[i].im])
}

/// The doublet record; fields of a missing line are null.
#[derive(Debug, Default, Serialize)]
pub struct DoubletRecord {
    pub xi0a: Option<f64>,
    pub xi0b: Option<f64>,
    #[serde(rename = "R0a")]
    pub r0a: Option<f64>,
    #[serde(rename = "R0b")]
    pub r0b: Option<f64>,
    pub beta0a: Option<f64>,
    pub beta0b: Option<f64>,
    pub xi_m: Option<f64>,
    pub delta_xi: Option<f64>,
    #[serde(rename = "Ea")]
    pub ea: Option<f64>,
    #[serde(rename = "Eb")]
    pub eb: Option<f64>,
    #[serde(rename = "dE")]
    pub de: Option<f64>,
    pub u0: Option<f64>,
    pub v0: Option<f64>,
    pub sigma1a: Option<f64>,
    pub nu_pr_hz: Option<f64>,
    pub a0a: Option<[[f64; 2]; 4]>,
    pub a0b: Option<[[f64; 2]; 4]>,
    pub degenerate: bool,
    pub warnings: Vec<Warning>,
}

impl DoubletRecord {
    pub fn new(gs: &GroundState) -> Self {
        let mut r = DoubletRecord { warnings: gs.warnings.clone(), ..DoubletRecord::default() };
        let line = |l: Option<&SpectralLine>| l.map(|l| (l.fit.xi0, l.fit.r0, l.fit.beta0, components(&l.a0)));
        if let Some((xi0, r0, beta0, a0)) = line(gs.lines.first()) {
            (r.xi0a, r.r0a, r.beta0a, r.a0a) = (Some(xi0), Some(r0), Some(beta0), Some(a0));
        }
        if let Some((xi0, r0, beta0, a0)) = line(gs.lines.get(1)) {
            (r.xi0b, r.r0b, r.beta0b, r.a0b) = (Some(xi0), Some(r0), Some(beta0), Some(a0));
        }
        if let Some(d) = &gs.doublet {
            r.fill(d);
        }
        r
    }

    fn fill(&mut self, d: &Doublet) {
        self.xi_m = Some(d.xi_m);
        self.delta_xi = Some(d.delta_xi);
        self.ea = Some(d.energy_a);
        self.eb = Some(d.energy_b);
        self.de = Some(d.delta_e);
        self.u0 = Some(d.u0);
        self.v0 = Some(d.v0);
        self.sigma1a = Some(d.sigma1_a);
        self.nu_pr_hz = Some(d.nu_pr_hz);
        self.degenerate = d.degenerate;
    }
}
