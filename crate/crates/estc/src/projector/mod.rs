//! Projectors onto the row space of the coefficient system and the fundamental solution.
//!
//! Each equation node `n` contributes the rank-4 projector `P(n) = F† a(n) F`
//! where `F` stacks the blocks `V(n, s)` and `a(n) = (F F†)⁻¹`. Merging all atoms
//! of a finite model yields the projector `P′` onto the span of every equation;
//! `S′ = U − P′` then maps any amplitude onto a solution of the truncated system.

mod banded;
mod oracle;

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;

pub use banded::origin_column;
pub use oracle::{coefficient_matrix, nullspace_oracle, nullspace_oracle_with, ORACLE_LIMIT};

use crate::field::{build_a, build_v, FieldSpec, WaveParams};
use crate::lattice::{FiniteModel, MultiIndex};
use crate::{Error, Mat4, Result, C64};

/// Relative size below which a new equation direction counts as dependent.
pub const RANK_TOLERANCE: f64 = 1e-12;
/// Relative bound on `Σ_s V(n,s) S(n+s)` at equation nodes.
pub const VERIFY_TOLERANCE: f64 = 1e-11;

pub(crate) fn max_abs(m: &Mat4) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Largest entry modulus of a dense matrix.
pub fn dense_max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// The projector of the single equation at `node`.
#[derive(Clone, Debug)]
pub struct ProjectorAtom {
    node: MultiIndex,
    /// `(n + s, V(n, s))` over the null shift and the active shifts.
    columns: Vec<(MultiIndex, Mat4)>,
    a: Mat4,
}

/// Atom at `n`; its support is `n` plus the nodes reached by the active shifts.
pub fn atom(n: MultiIndex, field: &FieldSpec, wp: &WaveParams) -> Result<ProjectorAtom> {
    let a = build_a(n, field, wp)?;
    let columns = std::iter::once(MultiIndex::ORIGIN)
        .chain(field.active_shifts())
        .map(|s| Ok((n + s, build_v(n, s, field, wp)?)))
        .collect::<Result<_>>()?;
    Ok(ProjectorAtom { node: n, columns, a })
}

impl ProjectorAtom {
    pub fn node(&self) -> MultiIndex {
        self.node
    }

    pub fn support(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        self.columns.iter().map(|(m, _)| *m)
    }

    /// Block `(i, j)` of `P(n)` indexed by support position.
    pub fn block(&self, i: usize, j: usize) -> Mat4 {
        self.columns[i].1.adjoint() * self.a * self.columns[j].1
    }

    pub fn trace(&self) -> f64 {
        (0..self.columns.len()).map(|i| self.block(i, i).trace().re).sum()
    }

    /// The atom as an operator on the extended node set of `model`.
    pub fn to_operator(&self, model: &FiniteModel) -> Result<BlockOperator> {
        let ords = self.ordinals(model)?;
        let mut op = BlockOperator::zero(model.extended_len());
        for (i, &oi) in ords.iter().enumerate() {
            for (j, &oj) in ords.iter().enumerate() {
                if oi <= oj {
                    op.add(oi, oj, self.block(i, j));
                }
            }
        }
        Ok(op)
    }

    fn ordinals(&self, model: &FiniteModel) -> Result<Vec<usize>> {
        self.support().map(|m| model.ordinal(m).ok_or(Error::OutsideModel(m.coords()))).collect()
    }
}

/// Hermitian operator on multispinor space, stored as 4×4 blocks of the upper triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator {
    rows: Vec<BTreeMap<usize, Mat4>>,
}

impl BlockOperator {
    pub fn zero(size: usize) -> Self {
        BlockOperator { rows: vec![BTreeMap::new(); size] }
    }

    pub fn identity(size: usize) -> Self {
        let mut op = Self::zero(size);
        for i in 0..size {
            op.rows[i].insert(i, Mat4::identity());
        }
        op
    }

    /// Number of nodes the operator acts on.
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn block_count(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// Block `(i, j)`, completed from the stored triangle.
    pub fn get(&self, i: usize, j: usize) -> Mat4 {
        if i <= j {
            self.rows[i].get(&j).copied().unwrap_or_else(Mat4::zeros)
        } else {
            self.rows[j].get(&i).map_or_else(Mat4::zeros, |b| b.adjoint())
        }
    }

    /// Adds `m` at `(i, j)`; the mirrored block follows by Hermiticity.
    pub fn add(&mut self, i: usize, j: usize, m: Mat4) {
        let (i, j, m) = if i <= j { (i, j, m) } else { (j, i, m.adjoint()) };
        *self.rows[i].entry(j).or_insert_with(Mat4::zeros) += m;
    }

    /// Stored blocks `(i, j, block)` with `i ≤ j`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Mat4)> {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(&j, b)| (i, j, b)))
    }

    pub fn trace(&self) -> f64 {
        self.rows.iter().enumerate().filter_map(|(i, r)| r.get(&i)).map(|b| b.trace().re).sum()
    }

    /// `U − self`.
    pub fn complement(&self) -> BlockOperator {
        let mut out = BlockOperator::identity(self.size());
        for (i, j, b) in self.iter() {
            out.add(i, j, -b);
        }
        out
    }

    pub fn max_abs_diff(&self, other: &BlockOperator) -> f64 {
        let mut diff = 0.0f64;
        for (i, j, b) in self.iter() {
            diff = diff.max(max_abs(&(b - other.get(i, j))));
        }
        for (i, j, b) in other.iter() {
            if !self.rows[i].contains_key(&j) {
                diff = diff.max(max_abs(b));
            }
        }
        diff
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.size();
        let mut m = DMatrix::zeros(4 * n, 4 * n);
        for (i, j, b) in self.iter() {
            m.view_mut((4 * i, 4 * j), (4, 4)).copy_from(b);
            if i != j {
                m.view_mut((4 * j, 4 * i), (4, 4)).copy_from(&b.adjoint());
            }
        }
        m
    }

    /// Upper-triangle blocks of a dense Hermitian matrix; all-zero blocks are dropped.
    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let n = m.nrows() / 4;
        let mut op = Self::zero(n);
        for i in 0..n {
            for j in i..n {
                let b: Mat4 = m.fixed_view::<4, 4>(4 * i, 4 * j).into_owned();
                if max_abs(&b) > 0.0 {
                    op.rows[i].insert(j, b);
                }
            }
        }
        op
    }

    /// `max ‖A² − A‖` over entries.
    pub fn idempotency_residual(&self) -> f64 {
        let d = self.to_dense();
        dense_max_abs(&(&d * &d - &d))
    }

    /// `max ‖A − A†‖` over entries; nonzero only if diagonal blocks were stored non-Hermitian.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.to_dense();
        dense_max_abs(&(&d - d.adjoint()))
    }

    /// Blocks `(i, col)` of column `col` as a dense `4·size × 4` matrix.
    fn column(&self, col: usize) -> Vec<Mat4> {
        (0..self.size()).map(|i| self.get(i, col)).collect()
    }

    /// `self · x` for a block column vector.
    fn apply(&self, x: &[Option<Mat4>]) -> Vec<Mat4> {
        let mut out = vec![Mat4::zeros(); self.size()];
        for (i, j, b) in self.iter() {
            if let Some(xj) = &x[j] {
                out[i] += b * xj;
            }
            if i != j {
                if let Some(xi) = &x[i] {
                    out[j] += b.adjoint() * xi;
                }
            }
        }
        out
    }
}

/// Adds the atom's equations to the projector `a`.
///
/// The new directions are `Y = (U − A)F†`; their Gram matrix is the 4×4 system
/// `L(m) − F A F†`, so the increment is `δ = Y (L − F A F†)⁻¹ Y†`. It is formed
/// as `Q Q†` from a thin QR of `Y`, with `Y` orthogonalized against `A` twice,
/// which avoids squaring the condition number of the 4×4 system near spectral lines.
pub fn merge(a: &BlockOperator, atom: &ProjectorAtom, model: &FiniteModel) -> Result<BlockOperator> {
    let size = a.size();
    let ords = atom.ordinals(model)?;
    let mut ft: Vec<Option<Mat4>> = vec![None; size];
    for (&o, (_, v)) in ords.iter().zip(&atom.columns) {
        ft[o] = Some(v.adjoint());
    }

    // Y₁ = F† − A F†, using the stored columns of A at the atom support.
    let mut y1: Vec<Mat4> = ft.iter().map(|b| b.unwrap_or_else(Mat4::zeros)).collect();
    for (&o, (_, v)) in ords.iter().zip(&atom.columns) {
        let vt = v.adjoint();
        for (i, col) in a.column(o).into_iter().enumerate() {
            if max_abs(&col) > 0.0 {
                y1[i] -= col * vt;
            }
        }
    }
    let y1_opt: Vec<Option<Mat4>> = y1.iter().map(|b| (max_abs(b) > 0.0).then_some(*b)).collect();
    let z = a.apply(&y1_opt);
    let support: Vec<usize> = (0..size).filter(|&i| y1_opt[i].is_some() || max_abs(&z[i]) > 0.0).collect();

    let mut y = DMatrix::<C64>::zeros(4 * support.len(), 4);
    for (k, &i) in support.iter().enumerate() {
        y.view_mut((4 * k, 0), (4, 4)).copy_from(&(y1[i] - z[i]));
    }
    let scale = atom.columns.iter().map(|(_, v)| v.norm_squared()).sum::<f64>().sqrt();
    let qr = y.qr();
    let r = qr.r();
    if (0..4).any(|k| r[(k, k)].norm() <= RANK_TOLERANCE * scale) {
        return Err(Error::RankDeficient(atom.node.coords()));
    }
    let q = qr.q();

    let mut out = a.clone();
    for (k, &i) in support.iter().enumerate() {
        let qi: Mat4 = q.fixed_view::<4, 4>(4 * k, 0).into_owned();
        for (l, &j) in support.iter().enumerate().skip(k) {
            let qj: Mat4 = q.fixed_view::<4, 4>(4 * l, 0).into_owned();
            out.add(i, j, qi * qj.adjoint());
        }
    }
    Ok(out)
}

/// Merges atoms in the given node order.
pub fn build_projector(
    model: &FiniteModel,
    field: &FieldSpec,
    wp: &WaveParams,
    order: impl IntoIterator<Item = MultiIndex>,
) -> Result<BlockOperator> {
    order.into_iter().try_fold(BlockOperator::zero(model.extended_len()), |acc, n| {
        if !model.contains(n) {
            return Err(Error::OutsideModel(n.coords()));
        }
        merge(&acc, &atom(n, field, wp)?, model)
    })
}

/// Blocks `S(n)` of the origin column of the fundamental solution.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionBlocks {
    nodes: Vec<MultiIndex>,
    blocks: Vec<Mat4>,
    index: HashMap<MultiIndex, usize>,
}

impl SolutionBlocks {
    pub fn new(entries: impl IntoIterator<Item = (MultiIndex, Mat4)>) -> Self {
        let (nodes, blocks): (Vec<_>, Vec<_>) = entries.into_iter().filter(|(_, b)| max_abs(b) > 0.0).unzip();
        let index = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        SolutionBlocks { nodes, blocks, index }
    }

    /// The solution domain: nodes with a nonzero block.
    pub fn nodes(&self) -> &[MultiIndex] {
        &self.nodes
    }

    pub fn get(&self, n: MultiIndex) -> Option<&Mat4> {
        self.index.get(&n).map(|&i| &self.blocks[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, &Mat4)> {
        self.nodes.iter().copied().zip(self.blocks.iter())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `𝒱_S(n) = Σ_s V(n,s) S(n+s)`.
    pub fn residual_block(&self, n: MultiIndex, stencil: &[(MultiIndex, Mat4)], wp: &WaveParams) -> Mat4 {
        let mut out = Mat4::zeros();
        for (s, v) in stencil {
            if let Some(b) = self.get(n + *s) {
                if *s == MultiIndex::ORIGIN {
                    out += crate::field::free_block(n, wp) * b;
                } else {
                    out += v * b;
                }
            }
        }
        out
    }

    /// Largest `|𝒱_S(n)|` over equation nodes, relative to the largest block.
    pub fn interior_residual(&self, model: &FiniteModel, field: &FieldSpec, wp: &WaveParams) -> (MultiIndex, f64) {
        let stencil = stencil_blocks(field);
        let scale = self.blocks.iter().map(max_abs).fold(1.0, f64::max);
        model
            .nodes()
            .iter()
            .map(|&n| (n, max_abs(&self.residual_block(n, &stencil, wp)) / scale))
            .fold((MultiIndex::ORIGIN, 0.0), |best, x| if x.1 > best.1 { x } else { best })
    }

    /// Fails with an internal-consistency error when an interior residual exceeds [`VERIFY_TOLERANCE`].
    pub fn verify(&self, model: &FiniteModel, field: &FieldSpec, wp: &WaveParams) -> Result<()> {
        let (node, residual) = self.interior_residual(model, field, wp);
        if residual > VERIFY_TOLERANCE || !residual.is_finite() {
            return Err(Error::Verification { node: node.coords(), residual });
        }
        Ok(())
    }
}

/// `(s, V(s))` for the null shift (placeholder block) and each active shift.
pub(crate) fn stencil_blocks(field: &FieldSpec) -> Vec<(MultiIndex, Mat4)> {
    std::iter::once((MultiIndex::ORIGIN, Mat4::zeros()))
        .chain(field.active_shifts().into_iter().map(|s| (s, crate::field::shift_block(s, field))))
        .collect()
}

/// Result of the merge engine.
#[derive(Clone, Debug)]
pub struct Fundamental {
    pub projector: BlockOperator,
    pub blocks: SolutionBlocks,
}

/// Merges every atom of the model in model order and extracts `S(n)` from `S′ = U − P′`.
pub fn build_fundamental(model: &FiniteModel, field: &FieldSpec, wp: &WaveParams) -> Result<Fundamental> {
    if model.is_empty() {
        return Err(Error::InvalidParameter("empty model".into()));
    }
    let projector = build_projector(model, field, wp, model.nodes().iter().copied())?;
    let blocks = origin_blocks(&projector, model);
    blocks.verify(model, field, wp)?;
    Ok(Fundamental { projector, blocks })
}

/// Origin column of `U − P′`.
pub fn origin_blocks(projector: &BlockOperator, model: &FiniteModel) -> SolutionBlocks {
    let origin = model.ordinal(MultiIndex::ORIGIN).expect("models contain the origin");
    SolutionBlocks::new(model.extended().enumerate().map(|(i, n)| {
        let p = projector.get(i, origin);
        let b = if i == origin { Mat4::identity() - p } else { -p };
        (n, b)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::s13;

    fn reference(xi: f64) -> (FieldSpec, WaveParams) {
        (FieldSpec::two_wave_circular(0.01), WaveParams::new([0.0; 3], xi, 0.1).unwrap())
    }

    #[test]
    fn atom_is_rank_four_projector() {
        let (field, wp) = reference(1.98760360297e-4);
        let n = MultiIndex::new([1, 0, 0, 1]).unwrap();
        let at = atom(n, &field, &wp).unwrap();
        assert_eq!(at.support().count(), 5);
        assert!((at.trace() - 4.0).abs() < 1e-12);
        let model = FiniteModel::build(3, &field.active_shifts()).unwrap();
        let op = at.to_operator(&model).unwrap();
        assert!(op.idempotency_residual() < 1e-12);
        assert!(op.hermiticity_residual() < 1e-15);
    }

    #[test]
    fn merge_trivial_cases() {
        let (field, wp) = reference(1e-4);
        let model = FiniteModel::build(4, &field.active_shifts()).unwrap();
        let a = atom(MultiIndex::ORIGIN, &field, &wp).unwrap();
        let merged = merge(&BlockOperator::zero(model.extended_len()), &a, &model).unwrap();
        // The closed-form atom carries a(n) ~ 1/I_A, so agreement is limited by its conditioning.
        assert!(merged.max_abs_diff(&a.to_operator(&model).unwrap()) < 1e-11);

        // Disjoint supports add.
        let far = atom(MultiIndex::new([4, 0, 0, 0]).unwrap(), &field, &wp).unwrap();
        let both = merge(&merged, &far, &model).unwrap();
        assert!((both.trace() - 8.0).abs() < 1e-12);
        let mut sum = a.to_operator(&model).unwrap();
        for (i, j, b) in far.to_operator(&model).unwrap().iter() {
            sum.add(i, j, *b);
        }
        assert!(both.max_abs_diff(&sum) < 1e-11);
    }

    #[test]
    fn merged_projector_absorbs_atoms() {
        let (field, wp) = reference(1.98760360297e-4);
        let model = FiniteModel::build(2, &field.active_shifts()).unwrap();
        let fund = build_fundamental(&model, &field, &wp).unwrap();
        let p = fund.projector.to_dense();
        assert!(dense_max_abs(&(&p * &p - &p)) < 1e-11);
        assert!((fund.projector.trace() - 4.0 * model.len() as f64).abs() < 1e-9);
        for &n in model.nodes() {
            let pn = atom(n, &field, &wp).unwrap().to_operator(&model).unwrap().to_dense();
            assert!(dense_max_abs(&(&pn * &p - &pn)) < 1e-11);
            assert!(dense_max_abs(&(&p * &pn - &pn)) < 1e-11);
        }
    }

    #[test]
    fn single_node_model() {
        let field = FieldSpec::two_wave_circular(0.01);
        let wp = WaveParams::new([0.0; 3], 1e-4, 0.1).unwrap();
        let model = FiniteModel::with_nodes(&field.active_shifts(), &[MultiIndex::ORIGIN]).unwrap();
        assert_eq!((model.len(), model.extended_len()), (1, 5));
        let fund = build_fundamental(&model, &field, &wp).unwrap();
        let at = atom(MultiIndex::ORIGIN, &field, &wp).unwrap();
        for (i, n) in at.support().enumerate() {
            let want = if i == 0 { Mat4::identity() - at.block(0, 0) } else { -at.block(i, 0) };
            assert!(max_abs(&(fund.blocks.get(n).unwrap() - want)) < 1e-11);
        }
        let stencil = stencil_blocks(&field);
        let a0 = crate::Bispinor::new(C64::new(0.3, 0.1), C64::new(-0.2, 0.0), C64::new(0.5, 0.5), C64::new(0.0, 1.0));
        let r = fund.blocks.residual_block(MultiIndex::ORIGIN, &stencil, &wp) * a0;
        assert!(r.norm() < 1e-12);
    }

    #[test]
    fn engine_matches_oracle_on_full_stencil() {
        let field = FieldSpec::new([
            [C64::new(0.0, 0.0), C64::new(0.02, 0.01), C64::new(-0.01, 0.0)],
            [C64::new(0.0, 0.015), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0); 3],
            [C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.01, -0.01)],
            [C64::new(0.0, 0.0); 3],
            [C64::new(0.01, 0.0), C64::new(0.02, 0.0), C64::new(0.0, 0.0)],
        ])
        .unwrap();
        let wp = WaveParams::new([0.05, -0.02, 0.01], 3e-3, 0.3).unwrap();
        let model = FiniteModel::build(1, &s13()).unwrap();
        let fund = build_fundamental(&model, &field, &wp).unwrap();
        let oracle = nullspace_oracle(&model, &field, &wp).unwrap();
        assert!(fund.projector.complement().max_abs_diff(&oracle) < 1e-10);
    }
}
