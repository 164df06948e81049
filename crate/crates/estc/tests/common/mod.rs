#![allow(dead_code)]

use std::sync::Arc;

use estc::evolution::{SolutionFamily, Solver};
use estc::field::{FieldSpec, WaveParams};
use estc::lattice::FiniteModel;
use estc::spectral::{ground_state, GroundState, GroundStateRequest, PhysicalConstants, ScanWindow};
use estc::{Bispinor, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const REF_OMEGA: f64 = 0.1;
pub const REF_AM: f64 = 0.01;
pub const REF_XI_A: f64 = 1.98760360297e-4;
pub const REF_XI_B: f64 = 1.99160164996e-4;

/// Largest equation-node count used in oracle comparisons (`4|ℒ′| ≤ 512`).
pub const ORACLE_NODES: usize = 128;

pub fn reference_window() -> ScanWindow {
    ScanWindow::new(1.980e-4, 1.996e-4, 401).unwrap()
}

pub fn reference_ground_state() -> GroundState {
    let req = GroundStateRequest::new([0.0; 3], REF_OMEGA, 4, reference_window());
    ground_state(&FieldSpec::two_wave_circular(REF_AM), &req, &PhysicalConstants::default()).unwrap()
}

pub fn family(field: &FieldSpec, xi: f64, omega: f64, g: u32) -> SolutionFamily {
    let wp = WaveParams::new([0.0; 3], xi, omega).unwrap();
    let model = Arc::new(FiniteModel::build(g, &field.active_shifts()).unwrap());
    SolutionFamily::build(model, field, wp, Solver::Banded).unwrap()
}

pub fn a_pm(sign: f64) -> Bispinor {
    let h = 0.5f64.sqrt();
    Bispinor::new(C64::new(sign * h, 0.0), C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0))
}

pub fn random_bispinor(rng: &mut impl Rng) -> Bispinor {
    Bispinor::from_fn(|_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// A random field of one to three waves with generic wave parameters.
pub struct RandomCase {
    pub field: FieldSpec,
    pub wp: WaveParams,
    pub model: FiniteModel,
}

impl RandomCase {
    /// The largest model with at most `max_nodes` equation nodes.
    pub fn from_seed(seed: u64, max_nodes: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps = [[C64::new(0.0, 0.0); 3]; 6];
        let mut waves: Vec<usize> = (0..6).collect();
        let count = rng.gen_range(1..=3);
        for _ in 0..count {
            let j = waves.remove(rng.gen_range(0..waves.len()));
            for k in (0..3).filter(|&k| k != j % 3) {
                amps[j][k] = C64::new(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05));
            }
        }
        let field = FieldSpec::new(amps).unwrap();
        let q = [(); 3].map(|_| rng.gen_range(-0.1..0.1));
        let wp = WaveParams::new(q, rng.gen_range(-0.05..0.05), rng.gen_range(0.1..0.5)).unwrap();
        let model = (1..=6)
            .rev()
            .map(|g| FiniteModel::build(g, &field.active_shifts()).unwrap())
            .find(|m| m.len() <= max_nodes)
            .expect("g_max = 1 is always small");
        RandomCase { field, wp, model }
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
