//! Field amplitudes, wave parameters and the per-node coefficient matrices.
//!
//! The vector potential is `A(x) = Σ_j A_j e^{i K_j·x} + c.c.` with six
//! plane waves travelling along `±e_k`. Substituting the Fourier ansatz for the
//! wave function into the Dirac equation couples the amplitude at node `n` to
//! the amplitudes at `n + s` for `s` in the 13-shift stencil through the 4×4
//! blocks `V(n, s)`.

use serde::{Deserialize, Serialize};

use crate::gamma::{DSet, Gamma};
use crate::lattice::{s13, MultiIndex, Shift};
use crate::{Error, Mat4, Result, C64};

/// One real/imaginary pair `(A_j)_k = a + i b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldComponent {
    pub j: u8,
    pub k: u8,
    pub a: f64,
    pub b: f64,
}

/// Complex amplitudes `A_1 … A_6` of the six plane waves.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSpec {
    amplitudes: [[C64; 3]; 6],
}

const ZERO: C64 = C64::new(0.0, 0.0);

/// Spatial direction of wave `j` (1-based): `+e_j` for `j ≤ 3`, `−e_{j−3}` otherwise.
fn direction(j: usize) -> [i32; 3] {
    let mut d = [0; 3];
    if j <= 3 {
        d[j - 1] = 1;
    } else {
        d[j - 4] = -1;
    }
    d
}

/// The lattice step `Δ_j = (d_j, 1)` carried by wave `j`.
pub fn wave_shift(j: usize) -> Shift {
    let [a, b, c] = direction(j);
    MultiIndex::new([a, b, c, 1]).expect("wave shifts have even sum")
}

impl FieldSpec {
    /// Validates transversality: wave `j` has no component along its own axis.
    pub fn new(amplitudes: [[C64; 3]; 6]) -> Result<Self> {
        for (j, amp) in amplitudes.iter().enumerate() {
            if amp.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::FieldConstraint(format!("A_{} is not finite", j + 1)));
            }
            let axis = j % 3;
            if amp[axis] != ZERO {
                return Err(Error::FieldConstraint(format!(
                    "A_{} has a longitudinal component along e_{}",
                    j + 1,
                    axis + 1
                )));
            }
        }
        Ok(FieldSpec { amplitudes })
    }

    pub fn from_components(components: &[FieldComponent]) -> Result<Self> {
        let mut amps = [[ZERO; 3]; 6];
        let mut seen = [[false; 3]; 6];
        for c in components {
            if !(1..=6).contains(&c.j) || !(1..=3).contains(&c.k) {
                return Err(Error::FieldConstraint(format!("component (j={}, k={}) out of range", c.j, c.k)));
            }
            let (j, k) = (c.j as usize - 1, c.k as usize - 1);
            if std::mem::replace(&mut seen[j][k], true) {
                return Err(Error::FieldConstraint(format!("duplicate component (j={}, k={})", c.j, c.k)));
            }
            amps[j][k] = C64::new(c.a, c.b);
        }
        Self::new(amps)
    }

    /// Nonzero amplitudes as `{j, k, a, b}` records.
    pub fn components(&self) -> Vec<FieldComponent> {
        let mut out = Vec::new();
        for (j, amp) in self.amplitudes.iter().enumerate() {
            for (k, c) in amp.iter().enumerate() {
                if *c != ZERO {
                    out.push(FieldComponent { j: j as u8 + 1, k: k as u8 + 1, a: c.re, b: c.im });
                }
            }
        }
        out
    }

    fn pair(a1: [C64; 3], a4: [C64; 3]) -> Self {
        let mut amps = [[ZERO; 3]; 6];
        amps[0] = a1;
        amps[3] = a4;
        Self::new(amps).expect("transverse by construction")
    }

    /// Two counterpropagating waves along `e₁` with `A₁ = A₄ = A_m (e₂ + i e₃)/√2`.
    pub fn two_wave_circular(a_m: f64) -> Self {
        let c = a_m / 2f64.sqrt();
        let v = [ZERO, C64::new(c, 0.0), C64::new(0.0, c)];
        Self::pair(v, v)
    }

    /// As [`two_wave_circular`](Self::two_wave_circular) with `(e₂ − i e₃)`.
    pub fn two_wave_circular_reversed(a_m: f64) -> Self {
        let c = a_m / 2f64.sqrt();
        let v = [ZERO, C64::new(c, 0.0), C64::new(0.0, -c)];
        Self::pair(v, v)
    }

    /// `A₁ = A_m (e₂ + i e₃)/√2`, `A₄ = A_m (e₂ − i e₃)/√2`.
    pub fn two_wave_same_circular(a_m: f64) -> Self {
        let c = a_m / 2f64.sqrt();
        Self::pair([ZERO, C64::new(c, 0.0), C64::new(0.0, c)], [ZERO, C64::new(c, 0.0), C64::new(0.0, -c)])
    }

    /// `A₁ = A₄ = A_m e₂`.
    pub fn two_wave_linear(a_m: f64) -> Self {
        let v = [ZERO, C64::new(a_m, 0.0), ZERO];
        Self::pair(v, v)
    }

    /// Single wave along `e₃`: `A₃ = a₃₁ e₁ + i b₃₂ e₂`.
    pub fn single_wave(a31: f64, b32: f64) -> Self {
        let mut amps = [[ZERO; 3]; 6];
        amps[2] = [C64::new(a31, 0.0), C64::new(0.0, b32), ZERO];
        Self::new(amps).expect("transverse by construction")
    }

    /// Amplitude of wave `j ∈ 1..=6`.
    pub fn amplitude(&self, j: usize) -> [C64; 3] {
        self.amplitudes[j - 1]
    }

    /// `I_A = 2 Σ_j |A_j|²`.
    pub fn intensity(&self) -> f64 {
        2.0 * self.amplitudes.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Amplitude vector feeding shift `s`: `A_j` for `s = −Δ_j`, `A_j*` for `s = +Δ_j`.
    pub fn coupling(&self, s: Shift) -> Option<[C64; 3]> {
        (1..=6).find_map(|j| {
            let d = wave_shift(j);
            let amp = self.amplitudes[j - 1];
            if amp == [ZERO; 3] {
                None
            } else if s == -d {
                Some(amp)
            } else if s == d {
                Some(amp.map(|c| c.conj()))
            } else {
                None
            }
        })
    }

    /// Stencil shifts with a nonzero coupling, in stencil order.
    pub fn active_shifts(&self) -> Vec<Shift> {
        s13().into_iter().skip(1).filter(|&s| self.coupling(s).is_some()).collect()
    }

    /// Real vector potential at dimensionless coordinates `X` (in units of the lattice wavelength).
    pub fn potential(&self, x: [f64; 4]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (j, amp) in self.amplitudes.iter().enumerate() {
            if *amp == [ZERO; 3] {
                continue;
            }
            let d = direction(j + 1);
            let theta = 2.0 * std::f64::consts::PI * (d[0] as f64 * x[0] + d[1] as f64 * x[1] + d[2] as f64 * x[2] - x[3]);
            let e = C64::from_polar(1.0, theta);
            for k in 0..3 {
                out[k] += 2.0 * (amp[k] * e).re;
            }
        }
        out
    }
}

/// Wave vector `q`, frequency offset `ξ = q₄ − √(1+q²)` and lattice frequency `Ω`,
/// all normalized by the electron rest scale.
///
/// `ξ` is stored rather than `q₄`: spectral lines are narrower than the
/// spacing of doubles near 1, so `q₄` itself cannot resolve them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    pub q: [f64; 3],
    pub xi: f64,
    pub omega: f64,
}

impl WaveParams {
    pub fn new(q: [f64; 3], xi: f64, omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(format!("Omega must be positive, got {omega}")));
        }
        if q.iter().any(|x| !x.is_finite()) || !xi.is_finite() {
            return Err(Error::InvalidParameter("q and xi must be finite".into()));
        }
        let wp = WaveParams { q, xi, omega };
        if wp.q4() <= 0.0 {
            return Err(Error::InvalidParameter(format!("q4 = {} is not positive", wp.q4())));
        }
        Ok(wp)
    }

    pub fn from_q4(q: [f64; 3], q4: f64, omega: f64) -> Result<Self> {
        let q2: f64 = q.iter().map(|x| x * x).sum();
        Self::new(q, q4 - (1.0 + q2).sqrt(), omega)
    }

    pub fn with_xi(self, xi: f64) -> Self {
        WaveParams { xi, ..self }
    }

    pub fn q_squared(&self) -> f64 {
        self.q.iter().map(|x| x * x).sum()
    }

    /// `√(1+q²) − 1` without cancellation.
    fn rest_offset(&self) -> f64 {
        let q2 = self.q_squared();
        q2 / (1.0 + (1.0 + q2).sqrt())
    }

    pub fn q4(&self) -> f64 {
        (1.0 + self.q_squared()).sqrt() + self.xi
    }

    /// `w_k(n) = q_k + n_k Ω`.
    pub fn w(&self, n: MultiIndex) -> [f64; 3] {
        let c = n.coords();
        std::array::from_fn(|k| self.q[k] + c[k] as f64 * self.omega)
    }

    /// `w₄(n) = q₄ + n₄ Ω`.
    pub fn w4(&self, n: MultiIndex) -> f64 {
        1.0 + self.eps4(n)
    }

    /// `w₄(n) − 1`, accurate when it is tiny.
    pub fn eps4(&self, n: MultiIndex) -> f64 {
        self.rest_offset() + self.xi + n.n4() as f64 * self.omega
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `V(n, 0) = Γ₀ − w₄γ₄ + i Σ_k w_k γ_k`, assembled as `Γ₀ − γ₄ − (w₄−1)γ₄ + …`.
pub fn free_block(n: MultiIndex, wp: &WaveParams) -> Mat4 {
    let e = wp.eps4(n);
    let w = wp.w(n);
    let mut m = Mat4::from_diagonal(&nalgebra::Vector4::new(real(-e), real(-e), real(2.0 + e), real(2.0 + e)));
    for k in 0..3 {
        if w[k] != 0.0 {
            m += Gamma::GAMMA[k].matrix() * C64::new(0.0, w[k]);
        }
    }
    m
}

/// `V(s) = −i Σ_k (A)_k γ_k` for a nonzero shift; zero when the shift is inactive.
pub fn shift_block(s: Shift, field: &FieldSpec) -> Mat4 {
    match field.coupling(s) {
        Some(a) => (0..3).fold(Mat4::zeros(), |acc, k| acc + Gamma::GAMMA[k].matrix() * (a[k] * C64::new(0.0, -1.0))),
        None => Mat4::zeros(),
    }
}

/// Coefficient block `V(n, s)` coupling equation `n` to amplitude `n + s`.
pub fn build_v(n: MultiIndex, s: Shift, field: &FieldSpec, wp: &WaveParams) -> Result<Mat4> {
    if !s.is_stencil() {
        return Err(Error::NotAShift(s.coords()));
    }
    if s == MultiIndex::ORIGIN {
        Ok(free_block(n, wp))
    } else {
        Ok(shift_block(s, field))
    }
}

/// `1 + w² − w₄²` computed from `w₄ − 1`.
fn mass_shell(n: MultiIndex, wp: &WaveParams) -> f64 {
    let w2: f64 = wp.w(n).iter().map(|x| x * x).sum();
    let e = wp.eps4(n);
    w2 - e * (2.0 + e)
}

/// Closed-form D-set of the Gram matrix `L(n) = Σ_s V(n,s) V(n,s)†`.
pub fn l_dset(n: MultiIndex, field: &FieldSpec, wp: &WaveParams) -> DSet {
    let [w1, w2, w3] = wp.w(n);
    let w4 = wp.w4(n);
    let mut d = [0.0; 16];
    d[0] = 1.0 + field.intensity() + w1 * w1 + w2 * w2 + w3 * w3 + w4 * w4;
    d[4] = -2.0 * w4;
    d[9] = 2.0 * w3 * w4;
    d[10] = 2.0 * w1 * w4;
    d[11] = 2.0 * w2 * w4;
    DSet::from_real(d)
}

pub fn build_l(n: MultiIndex, field: &FieldSpec, wp: &WaveParams) -> Mat4 {
    l_dset(n, field, wp).to_matrix()
}

/// `|L(n)| = I_A² + 2 I_A (1 + w² + w₄²) + (1 + w² − w₄²)²`.
pub fn l_modulus(n: MultiIndex, field: &FieldSpec, wp: &WaveParams) -> f64 {
    let ia = field.intensity();
    let w2: f64 = wp.w(n).iter().map(|x| x * x).sum();
    let w4 = wp.w4(n);
    let shell = mass_shell(n, wp);
    ia * ia + 2.0 * ia * (1.0 + w2 + w4 * w4) + shell * shell
}

/// Closed-form D-set of `a(n) = L(n)⁻¹`.
pub fn a_dset(n: MultiIndex, field: &FieldSpec, wp: &WaveParams) -> Result<DSet> {
    let modulus = l_modulus(n, field, wp);
    let l = l_dset(n, field, wp);
    if modulus <= f64::EPSILON * l.0[0].re * l.0[0].re {
        return Err(Error::Resonance(n.coords()));
    }
    let mut d = l.0.map(|c| -c.re);
    d[0] = -d[0];
    Ok(DSet::from_real(d.map(|x| x / modulus)))
}

pub fn build_a(n: MultiIndex, field: &FieldSpec, wp: &WaveParams) -> Result<Mat4> {
    a_dset(n, field, wp).map(|d| d.to_matrix())
}

/// `N(m, n) = Σ V(m, c−m) V(n, c−n)†` over columns `c` shared by both stencils.
pub fn build_n(m: MultiIndex, n: MultiIndex, field: &FieldSpec, wp: &WaveParams) -> Mat4 {
    let mut out = Mat4::zeros();
    if (n - m).g4d() > 2 {
        return out;
    }
    for s1 in s13() {
        let s2 = m + s1 - n;
        if s2.is_stencil() {
            let vm = build_v(m, s1, field, wp).expect("stencil shift");
            let vn = build_v(n, s2, field, wp).expect("stencil shift");
            out += vm * vn.adjoint();
        }
    }
    out
}

/// Node-independent structure: `V(s)` for `s ≠ 0` and the scalars `N₂(s)` for `g4d(s) = 2`.
#[derive(Clone, Debug)]
pub struct StructuralTables {
    pub v: Vec<(Shift, Mat4)>,
    pub n2: Vec<(Shift, C64)>,
}

impl StructuralTables {
    pub fn new(field: &FieldSpec) -> Self {
        let v: Vec<(Shift, Mat4)> = field.active_shifts().into_iter().map(|s| (s, shift_block(s, field))).collect();
        let mut n2: Vec<(Shift, C64)> = Vec::new();
        for (s1, v1) in &v {
            for (s2, v2) in &v {
                let s = *s1 - *s2;
                if s.g4d() != 2 {
                    continue;
                }
                // N(m, m+s) picks V(m, s1) V(m+s, s2)† with s1 − s2 = s.
                let block = v1 * v2.adjoint();
                let scalar = DSet::from_matrix(&block).0[0];
                match n2.iter_mut().find(|(t, _)| *t == s) {
                    Some((_, acc)) => *acc += scalar,
                    None => n2.push((s, scalar)),
                }
            }
        }
        n2.sort_by_key(|(s, _)| *s);
        StructuralTables { v, n2 }
    }

    /// `N₁(m, s) = N(m, m+s)` for a first-generation shift.
    pub fn n1(&self, m: MultiIndex, s: Shift, field: &FieldSpec, wp: &WaveParams) -> Mat4 {
        build_n(m, m + s, field, wp)
    }

    pub fn n2(&self, s: Shift) -> C64 {
        self.n2.iter().find(|(t, _)| *t == s).map_or(ZERO, |(_, c)| *c)
    }
}
