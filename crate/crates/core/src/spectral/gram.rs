use crate::linalg::Mat;

/// `(ψ_i', ψ_j') = δ_ij / (2i+1)`, 1-based indices.
pub fn stiffness_entry(i: usize, j: usize) -> f64 {
    if i == j {
        1.0 / (2 * i + 1) as f64
    } else {
        0.0
    }
}

/// `(ψ_i, ψ_j)`, 1-based indices; nonzero only for `|i − j| ∈ {0, 2}`.
pub fn mass_entry(i: usize, j: usize) -> f64 {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    let a = |k: usize| 1.0 / (2.0 * (2 * k + 1) as f64);
    if i == j {
        a(i) * a(i) * (1.0 / (2 * i - 1) as f64 + 1.0 / (2 * i + 3) as f64)
    } else if j == i + 2 {
        -a(i) * a(j) / (2 * i + 3) as f64
    } else {
        0.0
    }
}

/// Stiffness matrix of `ψ_{idx[0]}, ψ_{idx[1]}, …`.
pub fn stiffness_1d(idx: &[usize]) -> Mat {
    Mat::from_fn(idx.len(), idx.len(), |a, b| stiffness_entry(idx[a], idx[b]))
}

/// Mass matrix of `ψ_{idx[0]}, ψ_{idx[1]}, …`.
pub fn mass_1d(idx: &[usize]) -> Mat {
    Mat::from_fn(idx.len(), idx.len(), |a, b| mass_entry(idx[a], idx[b]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_mass_entry_is_one_thirtieth() {
        assert!((mass_entry(1, 1) - 1.0 / 30.0).abs() < 1e-17);
        assert_eq!(mass_entry(1, 2), 0.0);
        assert!(mass_entry(1, 3) < 0.0);
    }
}
