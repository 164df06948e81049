//! The sixteen-element Dirac matrix basis and D-set arithmetic.
//!
//! Every 4×4 complex matrix `A` is the sum `Σ A_ν Γ_ν` with `A_ν = tr(A Γ_ν) / 4`.
//! The sixteen coefficients form the *D-set* of `A`. Because each `Γ_ν` is
//! Hermitian and squares to the identity, products of basis elements are again
//! basis elements up to a phase, and all matrix operations can be carried out
//! on D-sets directly.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::{Error, Mat4, Result, C64};

const O: (i8, i8) = (0, 0);
const P: (i8, i8) = (1, 0);
const M: (i8, i8) = (-1, 0);
const I: (i8, i8) = (0, 1);
const J: (i8, i8) = (0, -1);

#[rustfmt::skip]
const BASIS: [[[(i8, i8); 4]; 4]; 16] = [
    [[P, O, O, O], [O, P, O, O], [O, O, P, O], [O, O, O, P]],
    [[P, O, O, O], [O, M, O, O], [O, O, P, O], [O, O, O, M]],
    [[O, P, O, O], [P, O, O, O], [O, O, O, P], [O, O, P, O]],
    [[O, J, O, O], [I, O, O, O], [O, O, O, J], [O, O, I, O]],
    [[P, O, O, O], [O, P, O, O], [O, O, M, O], [O, O, O, M]],
    [[P, O, O, O], [O, M, O, O], [O, O, M, O], [O, O, O, P]],
    [[O, P, O, O], [P, O, O, O], [O, O, O, M], [O, O, M, O]],
    [[O, J, O, O], [I, O, O, O], [O, O, O, I], [O, O, J, O]],
    [[O, O, M, O], [O, O, O, M], [M, O, O, O], [O, M, O, O]],
    [[O, O, P, O], [O, O, O, M], [P, O, O, O], [O, M, O, O]],
    [[O, O, O, P], [O, O, P, O], [O, P, O, O], [P, O, O, O]],
    [[O, O, O, J], [O, O, I, O], [O, J, O, O], [I, O, O, O]],
    [[O, O, I, O], [O, O, O, I], [J, O, O, O], [O, J, O, O]],
    [[O, O, J, O], [O, O, O, I], [I, O, O, O], [O, J, O, O]],
    [[O, O, O, J], [O, O, J, O], [O, I, O, O], [I, O, O, O]],
    [[O, O, O, M], [O, O, P, O], [O, P, O, O], [M, O, O, O]],
];

fn basis() -> &'static [Mat4; 16] {
    static CELL: OnceLock<[Mat4; 16]> = OnceLock::new();
    CELL.get_or_init(|| {
        std::array::from_fn(|nu| {
            Mat4::from_fn(|r, c| {
                let (re, im) = BASIS[nu][r][c];
                C64::new(re as f64, im as f64)
            })
        })
    })
}

/// `Γ_λ Γ_μ = c · Γ_ν`, stored as `(ν, c)` for every ordered pair.
fn product_table() -> &'static [[(u8, C64); 16]; 16] {
    static CELL: OnceLock<[[(u8, C64); 16]; 16]> = OnceLock::new();
    CELL.get_or_init(|| {
        let b = basis();
        std::array::from_fn(|l| {
            std::array::from_fn(|m| {
                let prod = b[l] * b[m];
                let d = DSet::from_matrix(&prod);
                let (nu, c) = d
                    .0
                    .iter()
                    .enumerate()
                    .find(|(_, c)| c.norm() > 0.5)
                    .map(|(nu, c)| (nu, *c))
                    .expect("basis products are never zero");
                (nu as u8, C64::new(c.re.round(), c.im.round()))
            })
        })
    })
}

/// Index `ν ∈ 0..16` of a basis matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gamma(u8);

impl Gamma {
    pub const IDENTITY: Gamma = Gamma(0);
    /// `γ₁, γ₂, γ₃, γ₄`.
    pub const GAMMA: [Gamma; 4] = [Gamma(14), Gamma(15), Gamma(13), Gamma(4)];
    /// `α₁, α₂, α₃, α₄` (with `α₄ = γ₄`).
    pub const ALPHA: [Gamma; 4] = [Gamma(10), Gamma(11), Gamma(9), Gamma(4)];
    /// Spin matrices `Σ₁, Σ₂, Σ₃`.
    pub const SIGMA: [Gamma; 3] = [Gamma(2), Gamma(3), Gamma(1)];
    pub const GAMMA5: Gamma = Gamma(8);

    pub fn new(nu: usize) -> Result<Self> {
        if nu < 16 {
            Ok(Gamma(nu as u8))
        } else {
            Err(Error::GammaIndex(nu))
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn matrix(self) -> &'static Mat4 {
        &basis()[self.0 as usize]
    }

    pub fn all() -> impl Iterator<Item = Gamma> {
        (0..16).map(Gamma)
    }

    /// `Γ_self Γ_other = c Γ_ν`, returned as `(Γ_ν, c)`.
    pub fn product(self, other: Gamma) -> (Gamma, C64) {
        let (nu, c) = product_table()[self.index()][other.index()];
        (Gamma(nu), c)
    }
}

/// The explicit basis matrix `Γ_ν`.
pub fn gamma_matrix(nu: usize) -> Result<Mat4> {
    Gamma::new(nu).map(|g| *g.matrix())
}

/// Sixteen coefficients of a 4×4 matrix in the `Γ` basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DSet(pub [C64; 16]);

impl Default for DSet {
    fn default() -> Self {
        DSet([C64::new(0.0, 0.0); 16])
    }
}

impl DSet {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::unit(Gamma::IDENTITY)
    }

    pub fn unit(g: Gamma) -> Self {
        let mut d = Self::zero();
        d.0[g.index()] = C64::new(1.0, 0.0);
        d
    }

    /// D-set from real coefficients.
    pub fn from_real(coeffs: [f64; 16]) -> Self {
        DSet(coeffs.map(|x| C64::new(x, 0.0)))
    }

    pub fn from_matrix(a: &Mat4) -> Self {
        let b = basis();
        DSet(std::array::from_fn(|nu| {
            // tr(A Γ) = Σ_ij A_ij Γ_ji
            let g = &b[nu];
            let mut t = C64::new(0.0, 0.0);
            for i in 0..4 {
                for j in 0..4 {
                    let gji = g[(j, i)];
                    if gji.re != 0.0 || gji.im != 0.0 {
                        t += a[(i, j)] * gji;
                    }
                }
            }
            t * 0.25
        }))
    }

    pub fn to_matrix(&self) -> Mat4 {
        basis()
            .iter()
            .zip(self.0.iter())
            .fold(Mat4::zeros(), |acc, (g, &c)| acc + g * c)
    }

    pub fn coeff(&self, g: Gamma) -> C64 {
        self.0[g.index()]
    }

    /// Product via the structure-constant table.
    pub fn product(&self, other: &DSet) -> DSet {
        let table = product_table();
        let mut out = DSet::zero();
        for (l, &a) in self.0.iter().enumerate() {
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            for (m, &b) in other.0.iter().enumerate() {
                let (nu, c) = table[l][m];
                out.0[nu as usize] += a * b * c;
            }
        }
        out
    }

    pub fn dagger(&self) -> DSet {
        DSet(self.0.map(|c| c.conj()))
    }

    pub fn trace(&self) -> C64 {
        self.0[0] * 4.0
    }

    pub fn scale(&self, s: C64) -> DSet {
        DSet(self.0.map(|c| c * s))
    }

    /// True when every coefficient has imaginary part within `tol`, i.e. the matrix is Hermitian.
    pub fn is_real(&self, tol: f64) -> bool {
        self.0.iter().all(|c| c.im.abs() <= tol)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Determinant from power traces (Newton identities), evaluated with D-set products only.
    pub fn determinant(&self) -> C64 {
        let (t1, t2, t3, t4) = self.power_traces();
        (t1.powi(4) - t1 * t1 * t2 * 6.0 + t2 * t2 * 3.0 + t1 * t3 * 8.0 - t4 * 6.0) / 24.0
    }

    fn power_traces(&self) -> (C64, C64, C64, C64) {
        let a2 = self.product(self);
        let a3 = a2.product(self);
        let a4 = a2.product(&a2);
        (self.trace(), a2.trace(), a3.trace(), a4.trace())
    }

    /// Inverse by Cayley–Hamilton: `A⁻¹ = (c₃ I − c₂ A + c₁ A² − A³) / det A`.
    pub fn inverse(&self) -> Result<DSet> {
        let a2 = self.product(self);
        let a3 = a2.product(self);
        let (t1, t2, t3) = (self.trace(), a2.trace(), a3.trace());
        let t4 = a2.product(&a2).trace();
        let det = (t1.powi(4) - t1 * t1 * t2 * 6.0 + t2 * t2 * 3.0 + t1 * t3 * 8.0 - t4 * 6.0) / 24.0;
        let scale = self.to_matrix().iter().map(|c| c.norm()).fold(0.0, f64::max);
        if det.norm() <= 1e-13 * scale.powi(4) || det.norm() == 0.0 {
            return Err(Error::Singular { det: det.norm() });
        }
        let c1 = t1;
        let c2 = (t1 * t1 - t2) * 0.5;
        let c3 = (t1.powi(3) - t1 * t2 * 3.0 + t3 * 2.0) / 6.0;
        let num = DSet::identity().scale(c3) - self.scale(c2) + a2.scale(c1) - a3;
        Ok(num.scale(det.inv()))
    }
}

impl Add for DSet {
    type Output = DSet;
    fn add(mut self, rhs: DSet) -> DSet {
        self += rhs;
        self
    }
}

impl AddAssign for DSet {
    fn add_assign(&mut self, rhs: DSet) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Sub for DSet {
    type Output = DSet;
    fn sub(self, rhs: DSet) -> DSet {
        self + (-rhs)
    }
}

impl Neg for DSet {
    type Output = DSet;
    fn neg(self) -> DSet {
        DSet(self.0.map(|c| -c))
    }
}

impl Mul for DSet {
    type Output = DSet;
    fn mul(self, rhs: DSet) -> DSet {
        self.product(&rhs)
    }
}
