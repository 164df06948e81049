use std::sync::Arc;

use estc::lattice::{FiniteModel, MultiIndex};
use estc::projector::{build_fundamental, nullspace_oracle_with, origin_blocks, ORACLE_LIMIT};
use estc::spectral::{ground_state, scan, GroundState, MixedState, Warning};
use estc::volkov::{fd_residual, volkov_j, VolkovParams};
use estc::evolution::{SolutionFamily, Solver};
use estc::{Bispinor, Mat4, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{csv, scan_csv, DoubletRecord, OutDir};

#[derive(Serialize)]
struct ModelSummary {
    g_max: u32,
    nodes: usize,
    extended: usize,
    boundary: usize,
}

impl ModelSummary {
    fn new(m: &FiniteModel) -> Self {
        ModelSummary { g_max: m.g_max(), nodes: m.len(), extended: m.extended_len(), boundary: m.boundary().len() }
    }
}

fn model(config: &RunConfig) -> Result<Arc<FiniteModel>, CliError> {
    let field = config.field_spec()?;
    Ok(Arc::new(FiniteModel::build(config.g_max, &field.active_shifts())?))
}

fn warn(warnings: &[Warning]) {
    for w in warnings {
        eprintln!("{}", json!({ "warning": w }));
    }
}

pub fn scan_command(config: &RunConfig, out: &OutDir) -> Result<(), CliError> {
    let field = config.field_spec()?;
    let model = model(config)?;
    let points = scan(&model, &field, config.wave_params()?, &config.xi.points(), config.options.solver)?;
    out.write("scan.csv", &scan_csv(&points))?;
    out.write_json("scan.json", &json!({
        "config": config,
        "model": ModelSummary::new(&model),
        "points": points.len(),
    }))
}

fn solve(config: &RunConfig) -> Result<GroundState, CliError> {
    let gs = ground_state(&config.field_spec()?, &config.ground_state_request(), &config.options.constants)?;
    warn(&gs.warnings);
    Ok(gs)
}

pub fn ground_state_command(config: &RunConfig, out: &OutDir) -> Result<(), CliError> {
    let gs = solve(config)?;
    out.write("scan.csv", &scan_csv(&gs.points))?;
    out.write_json("doublet.json", &DoubletRecord::new(&gs))
}

pub fn precession_command(config: &RunConfig, out: &OutDir) -> Result<(), CliError> {
    let mut config = config.clone();
    config.options.lines = Some(2);
    let gs = solve(&config)?;
    let doublet = gs.doublet.as_ref().ok_or(CliError::NoDoublet { found: gs.lines.len() })?;
    let p = &config.options.precession;
    let t_stop = match p.t_stop {
        Some(t) => t,
        None if doublet.nu_pr_hz > 0.0 => p.t_start + 2.0 / doublet.nu_pr_hz,
        None => return Err(CliError::Invalid("degenerate doublet does not precess; set precession.t_stop".into())),
    };
    if p.steps < 2 || !(t_stop > p.t_start) {
        return Err(CliError::Invalid(format!("empty time grid [{}, {t_stop}] with {} steps", p.t_start, p.steps)));
    }
    let mixed = MixedState::new(doublet, p.alpha, p.delta)?;
    let dt = (t_stop - p.t_start) / (p.steps - 1) as f64;
    let rows = (0..p.steps).map(|i| {
        let t = if i + 1 == p.steps { t_stop } else { p.t_start + dt * i as f64 };
        let [sx, sy, sz] = mixed.spin(t);
        [t, sx, sy, sz, mixed.energy]
    });
    out.write("spin.csv", &csv("t,Sx,Sy,Sz,E", rows))?;
    out.write_json("doublet.json", &DoubletRecord::new(&gs))
}

fn random_bispinor(rng: &mut ChaCha8Rng) -> Bispinor {
    Bispinor::from_fn(|_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn volkov_command(config: &RunConfig, out: &OutDir) -> Result<(), CliError> {
    let v = &config.options.volkov;
    let params = VolkovParams::new(v.a31, v.b32, config.q, v.q4, config.omega)?;
    let mut rng = ChaCha8Rng::seed_from_u64(v.seed);
    let (mut fd, mut projector) = (0.0f64, 0.0f64);
    for _ in 0..v.samples {
        let x = [(); 4].map(|_| rng.gen_range(-1.0..1.0));
        fd = fd.max(fd_residual(&params, x, &random_bispinor(&mut rng), v.step));
        let j = volkov_j(estc::volkov::wave_phase(x), &params);
        projector = projector.max((j * j - j).norm());
    }
    let dispersion = params.dispersion_residual().abs();
    let t = &config.tolerances;
    let pass = fd < t.agreement && dispersion < t.agreement && projector < t.idempotency;
    out.write_json("volkov.json", &json!({
        "pass": pass,
        "samples": v.samples,
        "max_fd_residual": fd,
        "dispersion_residual": dispersion,
        "max_idempotency_residual": projector,
        "tolerances": { "agreement": t.agreement, "idempotency": t.idempotency },
    }))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed {
            check: "volkov.validate",
            detail: format!("FD residual {fd:e}, dispersion {dispersion:e}, idempotency {projector:e}"),
        })
    }
}

pub fn oracle_command(config: &RunConfig, out: &OutDir) -> Result<(), CliError> {
    let field = config.field_spec()?;
    let model = model(config)?;
    let dim = 4 * model.len();
    if dim > ORACLE_LIMIT {
        return Err(estc::Error::SizeGuard { dim, limit: ORACLE_LIMIT }.into());
    }
    let o = &config.options.oracle;
    let wp = config.wave_params()?.with_xi(o.xi.unwrap_or(config.xi.min));
    let t = &config.tolerances;

    let oracle = nullspace_oracle_with(&model, &field, &wp, t.rank)?;
    let fund = build_fundamental(&model, &field, &wp)?;
    let mut engine = fund.projector.complement();
    if o.tamper != 0.0 {
        let origin = model.ordinal(MultiIndex::ORIGIN).expect("models contain the origin");
        engine.add(origin, origin, Mat4::identity() * C64::new(o.tamper, 0.0));
    }
    let engine_diff = engine.max_abs_diff(&oracle);
    let idempotency = engine.idempotency_residual();
    let (_, interior) = fund.blocks.interior_residual(&model, &field, &wp);

    let reference = origin_blocks(&oracle.complement(), &model);
    let banded = SolutionFamily::build(Arc::clone(&model), &field, wp, Solver::Banded)?;
    let banded_diff = reference
        .iter()
        .map(|(n, s)| (banded.blocks().get(n).copied().unwrap_or_else(Mat4::zeros) - s).norm())
        .fold(0.0, f64::max);

    let pass = engine_diff < t.agreement && banded_diff < t.agreement && idempotency < t.idempotency && interior < t.agreement;
    out.write_json("oracle.json", &json!({
        "pass": pass,
        "xi": wp.xi,
        "model": ModelSummary::new(&model),
        "dimension": dim,
        "tamper": o.tamper,
        "engine_vs_oracle": engine_diff,
        "banded_vs_oracle": banded_diff,
        "idempotency_residual": idempotency,
        "interior_residual": interior,
        "tolerances": { "agreement": t.agreement, "idempotency": t.idempotency, "rank": t.rank },
    }))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed {
            check: "oracle.compare",
            detail: format!("engine {engine_diff:e}, banded {banded_diff:e}, idempotency {idempotency:e}, interior {interior:e}"),
        })
    }
}
