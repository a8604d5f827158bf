use alloc::vec::Vec;

use super::GramMatrices;
use crate::error::{Error, Result};
use crate::spectral::{GridField, TensorTables};

/// Ritz projection of `A⁻¹ f`: the `z ∈ V_h` with `(∇z, ∇v) = (f, v)` for all
/// `v ∈ V_h`. `rhs` holds one grid per component at the rule of `tables`.
pub fn ritz_solve(gram: &GramMatrices, tables: &TensorTables, rhs: &[GridField]) -> Result<Vec<f64>> {
    if rhs.len() != gram.m {
        return Err(Error::Mismatch(alloc::format!("{} right-hand sides for {} components", rhs.len(), gram.m)));
    }
    if tables.scalar_len() != gram.scalar_len() {
        return Err(Error::Mismatch(alloc::string::String::from("tables and Gram matrices differ")));
    }
    let mut z: Vec<f64> = rhs.iter().flat_map(|g| tables.load(g)).collect();
    gram.solve_stiffness(&mut z)?;
    Ok(z)
}

/// Grid values of `S_σ u = −Δu − (q+qᵀ)u + q·R_h A⁻¹(qᵀu) + σu` for `u ∈ V_h`
/// given by its coefficients. `qgrid` holds the coefficient entries
/// (row-major `m × m`) at the rule of `tables`, which must integrate
/// `qᵀu · φ` exactly.
pub fn apply_modified_operator(
    gram: &GramMatrices,
    tables: &TensorTables,
    qgrid: &[GridField],
    u: &[f64],
    sigma: f64,
) -> Result<Vec<GridField>> {
    let m = gram.m;
    let s = gram.scalar_len();
    if u.len() != m * s || qgrid.len() != m * m {
        return Err(Error::Mismatch(alloc::string::String::from("operator arguments have inconsistent sizes")));
    }
    let ug: Vec<GridField> = u.chunks(s).map(|c| tables.values(c)).collect();
    let combine = |coef: &dyn Fn(usize, usize) -> usize, fields: &[GridField], a: usize| {
        let mut acc = GridField::zeros(tables.dim(), tables.points());
        for b in 0..m {
            let qg = &qgrid[coef(a, b)];
            for (o, (qv, fv)) in acc.values.iter_mut().zip(qg.values.iter().zip(&fields[b].values)) {
                *o += qv * fv;
            }
        }
        acc
    };
    let direct = |a: usize, b: usize| a * m + b;
    let transposed = |a: usize, b: usize| b * m + a;
    let qtu: Vec<GridField> = (0..m).map(|a| combine(&transposed, &ug, a)).collect();
    let w = ritz_solve(gram, tables, &qtu)?;
    let wg: Vec<GridField> = w.chunks(s).map(|c| tables.values(c)).collect();
    let mut out = Vec::with_capacity(m);
    for a in 0..m {
        let mut r = tables.laplacian(&u[a * s..(a + 1) * s]);
        r.values.iter_mut().for_each(|v| *v = -*v);
        r.axpy(-1.0, &combine(&direct, &ug, a));
        r.axpy(-1.0, &qtu[a]);
        r.axpy(1.0, &combine(&direct, &wg, a));
        r.axpy(sigma, &ug[a]);
        out.push(r);
    }
    Ok(out)
}
