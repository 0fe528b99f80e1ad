//! Thin wrapper around the SVD backend: extreme squared singular values of
//! complex matrices. This is the only place floating point linear algebra
//! happens.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// (σ_min², σ_max²) of a complex matrix. Requires rows ≥ cols ≥ 1 so that
/// σ_min is meaningful as the lower frame constant of the columns.
pub fn squared_singular_range(m: &DMatrix<Complex64>) -> (f64, f64) {
    assert!(m.ncols() >= 1 && m.nrows() >= m.ncols(), "matrix must be tall");
    let svd = m.clone().svd(false, false);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for s in svd.singular_values.iter() {
        let sq = s * s;
        if sq < lo {
            lo = sq;
        }
        if sq > hi {
            hi = sq;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dft2_is_tight() {
        // rows (1,1) and (1,−1): σ² = 2 twice
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(-1.0, 0.0),
            ],
        );
        let (lo, hi) = squared_singular_range(&m);
        assert!((lo - 2.0).abs() < 1e-12);
        assert!((hi - 2.0).abs() < 1e-12);
    }

    #[test]
    fn complex_entries() {
        // [[1,1],[1,i]]: Gram eigenvalues 2 ± √2
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
            ],
        );
        let (lo, hi) = squared_singular_range(&m);
        let r2 = std::f64::consts::SQRT_2;
        assert!((lo - (2.0 - r2)).abs() < 1e-12);
        assert!((hi - (2.0 + r2)).abs() < 1e-12);
    }
}
