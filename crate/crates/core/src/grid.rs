//! Uniform Cartesian grids, cell-average initialization and ghost cells.

use thiserror::Error;

/// Ghost-layer width required by the fifth-order stencils.
pub const N_GHOST: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid must have positive extent and at least one cell")]
    Degenerate,
    #[error("non-finite value at cell {0}")]
    NonFinite(usize),
    #[error("quadrature needs at least 5 points per cell, got {0}")]
    TooFewQuadraturePoints(usize),
    #[error("non-finite integrand value at x = {0}")]
    NonFiniteIntegrand(f64),
}

/// Uniform 1D grid of `n_cells` cells on `[x_lo, x_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n_cells: usize,
    pub dx: f64,
}

impl Grid1D {
    pub fn new(x_lo: f64, x_hi: f64, n_cells: usize) -> Result<Self, GridError> {
        if !(x_hi > x_lo) || n_cells == 0 {
            return Err(GridError::Degenerate);
        }
        Ok(Self { x_lo, x_hi, n_cells, dx: (x_hi - x_lo) / n_cells as f64 })
    }

    /// Center of cell `j` (0-based): `x_lo + (j + 1/2) dx`.
    pub fn center(&self, j: usize) -> f64 {
        self.x_lo + (j as f64 + 0.5) * self.dx
    }

    /// Left boundary of cell `j`.
    pub fn left_face(&self, j: usize) -> f64 {
        self.x_lo + j as f64 * self.dx
    }
}

/// Uniform 2D grid, axis-aligned rectangles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
}

impl Grid2D {
    pub fn new(
        x_lo: f64,
        x_hi: f64,
        y_lo: f64,
        y_hi: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self, GridError> {
        if !(x_hi > x_lo) || !(y_hi > y_lo) || nx == 0 || ny == 0 {
            return Err(GridError::Degenerate);
        }
        Ok(Self {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
            nx,
            ny,
            dx: (x_hi - x_lo) / nx as f64,
            dy: (y_hi - y_lo) / ny as f64,
        })
    }

    pub fn x_center(&self, i: usize) -> f64 {
        self.x_lo + (i as f64 + 0.5) * self.dx
    }

    pub fn y_center(&self, j: usize) -> f64 {
        self.y_lo + (j as f64 + 0.5) * self.dy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Periodic,
    Transmissive,
}

/// Interior field extended by [`N_GHOST`] ghost cells on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct GhostField {
    pub data: Vec<f64>,
    pub n_ghost: usize,
}

impl GhostField {
    /// Interior values (ghosts stripped).
    pub fn interior(&self) -> &[f64] {
        &self.data[self.n_ghost..self.data.len() - self.n_ghost]
    }
}

/// Populate ghost layers into `out` (resized to `n + 2 * N_GHOST`); the
/// interior block is a plain copy.
pub fn fill_ghosts_into(field: &[f64], kind: BoundaryKind, out: &mut Vec<f64>) {
    let n = field.len();
    let g = N_GHOST;
    out.resize(n + 2 * g, 0.0);
    out[g..g + n].copy_from_slice(field);
    match kind {
        BoundaryKind::Periodic => {
            for i in 0..g {
                out[i] = field[n - g + i];
                out[g + n + i] = field[i];
            }
        }
        BoundaryKind::Transmissive => {
            for i in 0..g {
                out[i] = field[0];
                out[g + n + i] = field[n - 1];
            }
        }
    }
}

/// Checked ghost fill; rejects non-finite input values.
pub fn fill_ghosts(field: &[f64], kind: BoundaryKind) -> Result<GhostField, GridError> {
    if let Some(j) = field.iter().position(|v| !v.is_finite()) {
        return Err(GridError::NonFinite(j));
    }
    let mut data = Vec::new();
    fill_ghosts_into(field, kind, &mut data);
    Ok(GhostField { data, n_ghost: N_GHOST })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Per-cell averages of `f` by `n_quad`-point Gauss-Legendre quadrature.
pub fn cell_averages(
    grid: &Grid1D,
    f: impl Fn(f64) -> f64,
    n_quad: usize,
) -> Result<Vec<f64>, GridError> {
    if n_quad < 5 {
        return Err(GridError::TooFewQuadraturePoints(n_quad));
    }
    let (nodes, weights) = gauss_legendre(n_quad);
    let mut out = Vec::with_capacity(grid.n_cells);
    for j in 0..grid.n_cells {
        let xc = grid.center(j);
        let half = 0.5 * grid.dx;
        let mut acc = 0.0;
        for (t, w) in nodes.iter().zip(&weights) {
            let x = xc + half * t;
            let v = f(x);
            if !v.is_finite() {
                return Err(GridError::NonFiniteIntegrand(x));
            }
            acc += w * v;
        }
        // the 1/dx of the average cancels the dx/2 jacobian up to the factor 1/2
        out.push(0.5 * acc);
    }
    Ok(out)
}

/// Per-cell averages of a vector-valued function on a 2D grid by tensor-product
/// Gauss-Legendre quadrature (row-major output).
pub fn cell_averages_2d<const M: usize>(
    grid: &Grid2D,
    f: impl Fn(f64, f64) -> [f64; M],
    n_quad: usize,
) -> Result<Vec<[f64; M]>, GridError> {
    if n_quad < 5 {
        return Err(GridError::TooFewQuadraturePoints(n_quad));
    }
    let (nodes, weights) = gauss_legendre(n_quad);
    let mut out = Vec::with_capacity(grid.nx * grid.ny);
    for j in 0..grid.ny {
        let yc = grid.y_center(j);
        for i in 0..grid.nx {
            let xc = grid.x_center(i);
            let mut acc = [0.0; M];
            for (ty, wy) in nodes.iter().zip(&weights) {
                let y = yc + 0.5 * grid.dy * ty;
                for (tx, wx) in nodes.iter().zip(&weights) {
                    let x = xc + 0.5 * grid.dx * tx;
                    let v = f(x, y);
                    for c in 0..M {
                        if !v[c].is_finite() {
                            return Err(GridError::NonFiniteIntegrand(x));
                        }
                        acc[c] += wx * wy * v[c];
                    }
                }
            }
            out.push(acc.map(|a| 0.25 * a));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_geometry() {
        let g = Grid1D::new(-1.0, 1.0, 10).unwrap();
        assert_abs_diff_eq!(g.dx, 0.2, epsilon = 1e-16);
        assert_abs_diff_eq!(g.center(0), -0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(g.left_face(5), 0.0, epsilon = 1e-15);
        assert!(Grid1D::new(1.0, 1.0, 10).is_err());
        assert!(Grid1D::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn periodic_ghosts() {
        let f = [1.0, 2.0, 3.0, 4.0]; // (a, b, c, d)
        let g = fill_ghosts(&f, BoundaryKind::Periodic).unwrap();
        assert_eq!(&g.data[..3], &[2.0, 3.0, 4.0]); // left ghosts = (b, c, d)
        assert_eq!(&g.data[7..], &[1.0, 2.0, 3.0]);
        assert_eq!(g.interior(), &f);
    }

    #[test]
    fn transmissive_ghosts() {
        let f = [1.0, 2.0, 3.0, 4.0];
        let g = fill_ghosts(&f, BoundaryKind::Transmissive).unwrap();
        assert_eq!(&g.data[..3], &[1.0, 1.0, 1.0]);
        assert_eq!(&g.data[7..], &[4.0, 4.0, 4.0]);
    }

    #[test]
    fn constant_field_ghosts_are_constant() {
        let f = [7.5; 6];
        for kind in [BoundaryKind::Periodic, BoundaryKind::Transmissive] {
            let g = fill_ghosts(&f, kind).unwrap();
            assert!(g.data.iter().all(|&v| v == 7.5));
        }
    }

    #[test]
    fn ghost_fill_is_idempotent_and_conservative() {
        let f = [0.4, -1.0, 2.0, 0.1, 9.0];
        let sum: f64 = f.iter().sum();
        let g1 = fill_ghosts(&f, BoundaryKind::Periodic).unwrap();
        let g2 = fill_ghosts(g1.interior(), BoundaryKind::Periodic).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(g1.interior().iter().sum::<f64>(), sum);
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(
            fill_ghosts(&[1.0, f64::NAN, 0.0], BoundaryKind::Periodic),
            Err(GridError::NonFinite(1))
        );
        let g = Grid1D::new(0.0, 1.0, 2).unwrap();
        assert!(matches!(
            cell_averages(&g, |x| (x - 0.25).ln(), 5),
            Err(GridError::NonFiniteIntegrand(_))
        ));
    }

    #[test]
    fn quadrature_is_exact_for_polynomials() {
        for n in [5usize, 7] {
            let (nodes, weights) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let integral: f64 = nodes
                    .iter()
                    .zip(&weights)
                    .map(|(x, w)| w * x.powi(deg as i32))
                    .sum();
                let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
                assert_abs_diff_eq!(integral, exact, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn cell_average_examples() {
        let g = Grid1D::new(-1.0, 1.0, 8).unwrap();
        let ones = cell_averages(&g, |_| 1.0, 5).unwrap();
        assert!(ones.iter().all(|&v| (v - 1.0).abs() < 1e-15));

        let unit = Grid1D::new(0.0, 1.0, 1).unwrap();
        let lin = cell_averages(&unit, |x| x, 5).unwrap();
        assert_abs_diff_eq!(lin[0], 0.5, epsilon = 1e-15);

        assert!(matches!(
            cell_averages(&unit, |x| x, 3),
            Err(GridError::TooFewQuadraturePoints(3))
        ));
    }

    #[test]
    fn cell_average_sine_matches_antiderivative() {
        let g = Grid1D::new(-1.0, 1.0, 10).unwrap();
        let avg = cell_averages(&g, |x| (std::f64::consts::PI * x).sin(), 5).unwrap();
        for j in 0..g.n_cells {
            let xl = g.left_face(j);
            let xr = xl + g.dx;
            let exact = ((std::f64::consts::PI * xl).cos() - (std::f64::consts::PI * xr).cos())
                / (std::f64::consts::PI * g.dx);
            assert_abs_diff_eq!(avg[j], exact, epsilon = 1e-12);
        }
    }

    #[test]
    fn tensor_quadrature_2d() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 2.0, 4, 4).unwrap();
        let avg = cell_averages_2d(&g, |x, y| [x * y, 1.0], 5).unwrap();
        for j in 0..4 {
            for i in 0..4 {
                let v = avg[j * 4 + i];
                assert_abs_diff_eq!(v[0], g.x_center(i) * g.y_center(j), epsilon = 1e-13);
                assert_abs_diff_eq!(v[1], 1.0, epsilon = 1e-14);
            }
        }
    }
}
