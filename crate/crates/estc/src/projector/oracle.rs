//! Dense reference: the kernel projector of the full coefficient matrix from an SVD.

use nalgebra::DMatrix;

use super::{BlockOperator, RANK_TOLERANCE};
use crate::field::{build_v, FieldSpec, WaveParams};
use crate::lattice::FiniteModel;
use crate::{Error, Result, C64};

/// Largest `4|ℒ′|` accepted by [`nullspace_oracle`].
pub const ORACLE_LIMIT: usize = 4096;

/// The stacked system `F`: four rows per equation node, four columns per extended node.
pub fn coefficient_matrix(model: &FiniteModel, field: &FieldSpec, wp: &WaveParams) -> Result<DMatrix<C64>> {
    let mut f = DMatrix::zeros(4 * model.len(), 4 * model.extended_len());
    for (i, &n) in model.nodes().iter().enumerate() {
        for s in model.stencil() {
            let j = model.ordinal(n + s).ok_or(Error::OutsideModel((n + s).coords()))?;
            f.view_mut((4 * i, 4 * j), (4, 4)).copy_from(&build_v(n, s, field, wp)?);
        }
    }
    Ok(f)
}

/// `S′ = U − P′` where `P′` projects onto the row space of `F`.
pub fn nullspace_oracle(model: &FiniteModel, field: &FieldSpec, wp: &WaveParams) -> Result<BlockOperator> {
    nullspace_oracle_with(model, field, wp, RANK_TOLERANCE)
}

/// As [`nullspace_oracle`], keeping singular values above `rank_tol · σ_max`.
pub fn nullspace_oracle_with(model: &FiniteModel, field: &FieldSpec, wp: &WaveParams, rank_tol: f64) -> Result<BlockOperator> {
    if !(rank_tol > 0.0 && rank_tol < 1.0) {
        return Err(Error::InvalidParameter(format!("rank tolerance {rank_tol} is outside (0, 1)")));
    }
    let dim = 4 * model.len();
    if dim > ORACLE_LIMIT {
        return Err(Error::SizeGuard { dim, limit: ORACLE_LIMIT });
    }
    let f = coefficient_matrix(model, field, wp)?;
    let svd = f.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > rank_tol * smax).collect();
    let rows = v_t.select_rows(keep.iter());
    let p = rows.adjoint() * &rows;
    let mut s = DMatrix::identity(p.nrows(), p.ncols());
    s -= p;
    Ok(BlockOperator::from_dense(&s))
}
