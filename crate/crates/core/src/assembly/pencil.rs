use alloc::vec;
use alloc::vec::Vec;

use super::{CoefficientMatrix, GramMatrices};
use crate::error::{Error, Result};
use crate::linalg::{gemm, gemm_into, matmul, Mat, View};
use crate::spectral::{gauss_rule, points_for_degree, GridField, QuadratureRule, TensorTables};

/// Matrices of the discrete eigenproblem `P x = λ Mass x` with
/// `P = D − (Q + Qᵀ) + Q D⁻¹ Qᵀ`.
#[derive(Clone, Debug)]
pub struct PencilMatrices {
    /// `Q_{IJ} = (Q φ_J, φ_I)`.
    pub qmat: Mat,
    /// `P`, symmetrized.
    pub lhs: Mat,
    /// `P + σ Mass`, when a shift was requested.
    pub shifted: Option<Mat>,
    /// `max|P − Pᵀ| / max|P|` before symmetrization.
    pub symmetry_defect: f64,
}

/// Gauss points needed to integrate `q φ_I φ_J` exactly.
pub fn required_quadrature(q_degree: usize, n: usize) -> usize {
    points_for_degree(q_degree + 2 * (n + 1))
}

/// `Q` from grid values of the coefficient entries (row-major `m × m`) at the
/// rule of `tables`.
pub fn assemble_q_grid(tables: &TensorTables, m: usize, qgrid: &[GridField]) -> Result<Mat> {
    if qgrid.len() != m * m {
        return Err(Error::Mismatch(alloc::format!("{} grids for {m}x{m} coefficients", qgrid.len())));
    }
    let s = tables.scalar_len();
    let g = tables.points();
    let w = &tables.rule.weights;
    // E[(i,j)][p] = w_p ψ_i(x_p) ψ_j(x_p) per axis
    let pair_table = |d: usize| -> Mat {
        let b = tables.axes[d].get(crate::spectral::Deriv::Val);
        let n = b.rows();
        let mut e = Mat::zeros(n * n, g);
        for i in 0..n {
            for j in 0..n {
                let row = e.row_mut(i * n + j);
                for p in 0..g {
                    row[p] = w[p] * b[(i, p)] * b[(j, p)];
                }
            }
        }
        e
    };
    let e0 = pair_table(0);
    let e1 = if tables.dim() == 2 { Some(pair_table(1)) } else { None };
    let mut out = Mat::zeros(m * s, m * s);
    for a in 0..m {
        for b in 0..m {
            let grid = &qgrid[a * m + b];
            if grid.values.iter().all(|v| *v == 0.0) {
                continue;
            }
            match &e1 {
                None => {
                    let mut v = vec![0.0; s * s];
                    gemm_into(1.0, View::of(&e0), View::raw(&grid.values, g, 1), 0.0, &mut v);
                    for i in 0..s {
                        out.row_mut(a * s + i)[b * s..(b + 1) * s].copy_from_slice(&v[i * s..(i + 1) * s]);
                    }
                }
                Some(e1) => {
                    let n0 = tables.axes[0].len();
                    let n1 = tables.axes[1].len();
                    let t = gemm(View::of(&e0), View::raw(&grid.values, g, g));
                    let r = gemm(View::of(&t), View::of(e1).t());
                    // r[(i0,j0),(i1,j1)] → Q[(i0,i1),(j0,j1)]
                    for i0 in 0..n0 {
                        for i1 in 0..n1 {
                            let dst = &mut out.row_mut(a * s + i0 * n1 + i1)[b * s..(b + 1) * s];
                            for j0 in 0..n0 {
                                let src = &r.row(i0 * n0 + j0)[i1 * n1..(i1 + 1) * n1];
                                dst[j0 * n1..(j0 + 1) * n1].copy_from_slice(src);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `Q` for polynomial coefficients, with a rule chosen to integrate every
/// entry exactly.
pub fn assemble_q(gram: &GramMatrices, q: &CoefficientMatrix, rule: Option<&QuadratureRule>) -> Result<Mat> {
    check_space(gram, q)?;
    let need = required_quadrature(q.degree(), gram.subspace.n());
    let owned;
    let rule = match rule {
        Some(r) => {
            r.require_degree(q.degree() + 2 * (gram.subspace.n() + 1))?;
            r
        }
        None => {
            owned = gauss_rule(need)?;
            &owned
        }
    };
    let tables = TensorTables::new(&gram.subspace, rule);
    assemble_q_grid(&tables, q.m, &q.to_grid(rule))
}

fn check_space(gram: &GramMatrices, q: &CoefficientMatrix) -> Result<()> {
    if gram.m != q.m || gram.subspace.dim() != q.dim {
        return Err(Error::Mismatch(alloc::format!(
            "coefficients are {}-dimensional with {} components, space is {}-dimensional with {}",
            q.dim,
            q.m,
            gram.subspace.dim(),
            gram.m
        )));
    }
    Ok(())
}

/// Assembles `P = D − (Q + Qᵀ) + Q D⁻¹ Qᵀ` and optionally `P + σ Mass`.
pub fn assemble_pencil(
    gram: &GramMatrices,
    q: &CoefficientMatrix,
    rule: Option<&QuadratureRule>,
    sigma: Option<f64>,
) -> Result<PencilMatrices> {
    let qmat = assemble_q(gram, q, rule)?;
    pencil_from_q(gram, qmat, sigma)
}

pub(crate) fn pencil_from_q(gram: &GramMatrices, qmat: Mat, sigma: Option<f64>) -> Result<PencilMatrices> {
    let n = gram.len();
    let s = gram.scalar_len();
    // Y = D⁻¹ Qᵀ, block rows solved independently
    let mut y = qmat.transpose();
    for c in 0..gram.m {
        let rows: Vec<usize> = (c * s..(c + 1) * s).collect();
        let cols: Vec<usize> = (0..n).collect();
        let mut blk = y.select(&rows, &cols);
        gram.stiffness_factor().solve_mat(&mut blk);
        y.set_block(c * s, 0, &blk);
    }
    let mut lhs = matmul(&qmat, &y);
    drop(y);
    for i in 0..n {
        let row = lhs.row_mut(i);
        for j in 0..n {
            row[j] -= qmat[(i, j)] + qmat[(j, i)];
        }
    }
    for c in 0..gram.m {
        for i in 0..s {
            let row = &mut lhs.row_mut(c * s + i)[c * s..(c + 1) * s];
            for (v, d) in row.iter_mut().zip(gram.stiffness.row(i)) {
                *v += d;
            }
        }
    }
    let symmetry_defect = lhs.symmetry_defect();
    lhs.symmetrize();
    let shifted = sigma.map(|sg| {
        let mut g = lhs.clone();
        for c in 0..gram.m {
            for i in 0..s {
                let row = &mut g.row_mut(c * s + i)[c * s..(c + 1) * s];
                crate::linalg::axpy(sg, gram.mass.row(i), row);
            }
        }
        g
    });
    Ok(PencilMatrices { qmat, lhs, shifted, symmetry_defect })
}
