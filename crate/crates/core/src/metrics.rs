//! Error norms, convergence orders and slice diagnostics.

use crate::grid::Grid2D;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("field lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("reference error must be positive, got {0}")]
    NonPositiveReference(f64),
    #[error("coordinate {0} outside the domain")]
    OutOfDomain(f64),
}

/// L1, L2 and Linf error norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTriple {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl ErrorTriple {
    pub fn get(&self, norm: Norm) -> f64 {
        match norm {
            Norm::L1 => self.l1,
            Norm::L2 => self.l2,
            Norm::Linf => self.linf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

/// Discrete norms of `numeric - exact` with spatial step `h`:
/// `L1 = h sum |e|`, `L2 = sqrt(h sum e^2)`, `Linf = max |e|`.
pub fn error_norms(numeric: &[f64], exact: &[f64], h: f64) -> Result<ErrorTriple, MetricsError> {
    if numeric.len() != exact.len() {
        return Err(MetricsError::LengthMismatch(numeric.len(), exact.len()));
    }
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    let mut linf: f64 = 0.0;
    for (a, b) in numeric.iter().zip(exact) {
        let e = (a - b).abs();
        l1 += e;
        l2 += e * e;
        linf = linf.max(e);
    }
    Ok(ErrorTriple { l1: h * l1, l2: (h * l2).sqrt(), linf })
}

/// `log(e_coarse / e_fine) / log(ratio)`; NaN when either error is not positive.
pub fn convergence_order(e_coarse: f64, e_fine: f64, ratio: f64) -> f64 {
    if e_coarse > 0.0 && e_fine > 0.0 {
        (e_coarse / e_fine).ln() / ratio.ln()
    } else {
        f64::NAN
    }
}

/// Error increase relative to a reference scheme, in percent.
pub fn increased_error_pct(e_scheme: f64, e_reference: f64) -> Result<f64, MetricsError> {
    if e_reference <= 0.0 {
        return Err(MetricsError::NonPositiveReference(e_reference));
    }
    Ok((e_scheme - e_reference) / e_reference * 100.0)
}

/// Index of the cell containing coordinate `v` (with a small guard against
/// boundary rounding), clamped into range.
fn containing_cell(v: f64, lo: f64, h: f64, n: usize) -> usize {
    let idx = ((v - lo) / h + 1e-9).floor();
    (idx.max(0.0) as usize).min(n - 1)
}

/// Extract a scalar profile along a grid row: the row whose centers are
/// nearest to `y`, over the cells containing `[x_lo, x_hi]` inclusive.
pub fn slice_row(
    values: &[f64],
    grid: &Grid2D,
    y: f64,
    x_range: (f64, f64),
) -> Result<Vec<f64>, MetricsError> {
    if !(grid.y_lo..=grid.y_hi).contains(&y) {
        return Err(MetricsError::OutOfDomain(y));
    }
    if !(grid.x_lo..=grid.x_hi).contains(&x_range.0) || !(grid.x_lo..=grid.x_hi).contains(&x_range.1)
    {
        return Err(MetricsError::OutOfDomain(x_range.0));
    }
    let j = containing_cell(y, grid.y_lo, grid.dy, grid.ny);
    let i_lo = containing_cell(x_range.0, grid.x_lo, grid.dx, grid.nx);
    let i_hi = containing_cell(x_range.1, grid.x_lo, grid.dx, grid.nx);
    Ok((i_lo..=i_hi).map(|i| values[j * grid.nx + i]).collect())
}

/// Total variation of a profile: `sum |v_{k+1} - v_k|`.
pub fn total_variation(profile: &[f64]) -> f64 {
    profile.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn norm_examples() {
        let e = error_norms(&[1.0, 2.0], &[1.0, 2.0], 0.1).unwrap();
        assert_eq!((e.l1, e.l2, e.linf), (0.0, 0.0, 0.0));

        let e = error_norms(&[0.1, -0.1], &[0.0, 0.0], 0.5).unwrap();
        assert_abs_diff_eq!(e.l1, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(e.l2, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(e.linf, 0.1, epsilon = 1e-16);

        let e = error_norms(&[3.0, 4.0], &[0.0, 0.0], 1.0).unwrap();
        assert_eq!((e.l1, e.l2, e.linf), (7.0, 5.0, 4.0));

        assert!(error_norms(&[1.0], &[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn convergence_order_examples() {
        assert_abs_diff_eq!(convergence_order(1e-2, 3.125e-4, 2.0), 5.0, epsilon = 1e-12);
        assert_eq!(convergence_order(0.5, 0.5, 2.0), 0.0);
        assert!(convergence_order(0.0, 1.0, 2.0).is_nan());
        // published bracket value for the fifth-order scheme
        assert_abs_diff_eq!(
            convergence_order(2.96529e-3, 9.27609e-5, 2.0),
            4.9985,
            epsilon = 1e-4
        );
    }

    #[test]
    fn order_of_exact_factor_32() {
        let e = 1.7e-3;
        assert_abs_diff_eq!(convergence_order(e, e / 32.0, 2.0), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn increased_error_examples() {
        assert_eq!(increased_error_pct(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(increased_error_pct(2.0, 1.0).unwrap(), 100.0);
        assert_abs_diff_eq!(
            increased_error_pct(2.35657e-2, 1.65557e-3).unwrap(),
            1323.42,
            epsilon = 0.01
        );
        assert!(increased_error_pct(1.0, 0.0).is_err());
    }

    #[test]
    fn slice_window_sample_count() {
        // 100 cells on [0,1]: the window [0.70, 0.76] covers 7 cells
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 100, 100).unwrap();
        let values: Vec<f64> = (0..100 * 100).map(|k| k as f64).collect();
        let s = slice_row(&values, &g, 0.65, (0.70, 0.76)).unwrap();
        assert_eq!(s.len(), (0.06f64 / g.dx).ceil() as usize + 1);

        let c = vec![2.0; 100 * 100];
        let s = slice_row(&c, &g, 0.65, (0.70, 0.76)).unwrap();
        assert!(s.iter().all(|&v| v == 2.0));
        assert_eq!(total_variation(&s), 0.0);

        assert!(slice_row(&c, &g, 1.5, (0.7, 0.76)).is_err());
    }

    proptest! {
        #[test]
        fn norms_are_absolutely_homogeneous(
            diff in proptest::collection::vec(-5.0..5.0f64, 1..40),
            c in -3.0..3.0f64,
            h in 0.01..1.0f64,
        ) {
            let zero = vec![0.0; diff.len()];
            let base = error_norms(&diff, &zero, h).unwrap();
            let scaled: Vec<f64> = diff.iter().map(|v| c * v).collect();
            let s = error_norms(&scaled, &zero, h).unwrap();
            prop_assert!((s.l1 - c.abs() * base.l1).abs() <= 1e-12 * (1.0 + base.l1));
            prop_assert!((s.l2 - c.abs() * base.l2).abs() <= 1e-12 * (1.0 + base.l2));
            prop_assert!((s.linf - c.abs() * base.linf).abs() <= 1e-12 * (1.0 + base.linf));
        }
    }
}
