//! Fifth-order WENO reconstruction with a pluggable weight transform.
//!
//! The left-biased interface value at `x_{j+1/2}` is built from the 5-cell
//! stencil `(u_{j-2}, ..., u_{j+2})`: three third-order substencil values are
//! combined with nonlinear weights derived from the Jiang-Shu smoothness
//! indicators. The weight transform hook is applied to the normalized JS
//! weights and the result renormalized, so plain mapped schemes and the
//! order-preserving variants share one code path. The right-biased value is
//! obtained by mirror symmetry (reconstructing the reversed stencil).

use crate::mappings::{FamilyKind, MappingSpec, EPSILON, IDEAL_WEIGHTS};
use crate::op::{detect_non_op, nearest_ideal_index, normalize_or_ideal};

/// Five consecutive cell averages `(u_{j-2}, ..., u_{j+2})`.
pub type Stencil5 = [f64; 5];

/// Jiang-Shu smoothness indicators of the three substencils.
#[inline]
pub fn smoothness_indicators(u: &Stencil5) -> [f64; 3] {
    let c1 = 13.0 / 12.0;
    let c2 = 0.25;
    let b0 = c1 * (u[0] - 2.0 * u[1] + u[2]).powi(2)
        + c2 * (u[0] - 4.0 * u[1] + 3.0 * u[2]).powi(2);
    let b1 = c1 * (u[1] - 2.0 * u[2] + u[3]).powi(2) + c2 * (u[1] - u[3]).powi(2);
    let b2 = c1 * (u[2] - 2.0 * u[3] + u[4]).powi(2)
        + c2 * (3.0 * u[2] - 4.0 * u[3] + u[4]).powi(2);
    [b0, b1, b2]
}

/// Third-order substencil approximations of `u(x_{j+1/2})`.
#[inline]
pub fn substencil_values(u: &Stencil5) -> [f64; 3] {
    [
        (2.0 * u[0] - 7.0 * u[1] + 11.0 * u[2]) / 6.0,
        (-u[1] + 5.0 * u[2] + 2.0 * u[3]) / 6.0,
        (2.0 * u[2] + 5.0 * u[3] - u[4]) / 6.0,
    ]
}

/// Normalized WENO-JS weights `d_s / (eps + beta_s)^2`.
#[inline]
pub fn js_weights_with(betas: [f64; 3], d: [f64; 3], eps: f64) -> [f64; 3] {
    let a0 = d[0] / (eps + betas[0]).powi(2);
    let a1 = d[1] / (eps + betas[1]).powi(2);
    let a2 = d[2] / (eps + betas[2]).powi(2);
    let sum = a0 + a1 + a2;
    [a0 / sum, a1 / sum, a2 / sum]
}

/// [`js_weights_with`] at the standard ideal weights and epsilon.
#[inline]
pub fn js_weights(betas: [f64; 3]) -> [f64; 3] {
    js_weights_with(betas, IDEAL_WEIGHTS, EPSILON)
}

/// Weight transform applied between the JS weights and the final convex
/// combination.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightTransform {
    /// Use the JS weights as-is (WENO-JS).
    Identity,
    /// Per-substencil mapping with each substencil's own parameters (WENO-X).
    Plain(MappingSpec),
    /// Nearest-ideal parameter substitution (MOP-WENO-X).
    Mop(MappingSpec),
}

impl WeightTransform {
    /// Mapped values before renormalization.
    #[inline]
    pub fn map_alphas(&self, w: &[f64; 3]) -> [f64; 3] {
        match self {
            WeightTransform::Identity => *w,
            WeightTransform::Plain(spec) => {
                [spec.eval(0, w[0]), spec.eval(1, w[1]), spec.eval(2, w[2])]
            }
            WeightTransform::Mop(spec) => {
                let mut a = [0.0; 3];
                for s in 0..3 {
                    let k = nearest_ideal_index(w[s], &IDEAL_WEIGHTS);
                    a[s] = spec.eval(k, w[s]);
                }
                a
            }
        }
    }

    /// Transformed, renormalized weights.
    #[inline]
    pub fn apply(&self, w: &[f64; 3]) -> [f64; 3] {
        normalize_or_ideal(self.map_alphas(w))
    }

    /// Whether the transform performs a mapping process worth diagnosing.
    pub fn is_mapped(&self) -> bool {
        !matches!(self, WeightTransform::Identity)
    }

    pub fn family(&self) -> FamilyKind {
        match self {
            WeightTransform::Identity => FamilyKind::Identity,
            WeightTransform::Plain(s) | WeightTransform::Mop(s) => s.family,
        }
    }
}

/// Left-biased interface value together with a non-OP flag for the mapping
/// process at this point (always `false` for the identity transform).
#[inline]
pub fn reconstruct_with_flag(u: &Stencil5, transform: &WeightTransform) -> (f64, bool) {
    let q = substencil_values(u);
    let w_js = js_weights(smoothness_indicators(u));
    let alphas = transform.map_alphas(&w_js);
    let flagged = transform.is_mapped()
        && detect_non_op(&[
            (w_js[0], alphas[0]),
            (w_js[1], alphas[1]),
            (w_js[2], alphas[2]),
        ])
        .is_some();
    let w = normalize_or_ideal(alphas);
    (w[0] * q[0] + w[1] * q[1] + w[2] * q[2], flagged)
}

/// Left-biased interface value `u_{j+1/2}^-`.
#[inline]
pub fn reconstruct_left(u: &Stencil5, transform: &WeightTransform) -> f64 {
    reconstruct_with_flag(u, transform).0
}

/// Right-biased interface value by mirror symmetry: the reconstruction of the
/// reversed stencil.
#[inline]
pub fn reconstruct_right(u: &Stencil5, transform: &WeightTransform) -> f64 {
    let rev = [u[4], u[3], u[2], u[1], u[0]];
    reconstruct_left(&rev, transform)
}

/// Mirror-symmetric variant of [`reconstruct_with_flag`].
#[inline]
pub fn reconstruct_right_with_flag(u: &Stencil5, transform: &WeightTransform) -> (f64, bool) {
    let rev = [u[4], u[3], u[2], u[1], u[0]];
    reconstruct_with_flag(&rev, transform)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mappings::registry_lookup;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn all_transforms() -> Vec<WeightTransform> {
        let mut out = vec![WeightTransform::Identity];
        for (_, spec) in crate::mappings::mapped_families() {
            out.push(WeightTransform::Plain(spec.clone()));
            out.push(WeightTransform::Mop(spec));
        }
        out
    }

    #[test]
    fn betas_on_reference_stencils() {
        assert_eq!(smoothness_indicators(&[3.0; 5]), [0.0; 3]);
        let b = smoothness_indicators(&[-2.0, -1.0, 0.0, 1.0, 2.0]);
        for s in 0..3 {
            assert_abs_diff_eq!(b[s], 1.0, epsilon = 1e-15);
        }
        // hand evaluation of the three closed forms
        let b = smoothness_indicators(&[0.0, 0.0, 0.0, 1.0, 1.0]);
        assert_abs_diff_eq!(b[0], 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(b[1], 4.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b[2], 10.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn js_weights_reduce_to_ideal() {
        for betas in [[0.0; 3], [1.0; 3]] {
            let w = js_weights(betas);
            for s in 0..3 {
                assert_abs_diff_eq!(w[s], IDEAL_WEIGHTS[s], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn js_weights_collapse_onto_smooth_substencil() {
        // alpha_0 = 0.1/eps^2 = 1e79 dwarfs the others
        let w = js_weights([0.0, 4.0 / 3.0, 10.0 / 3.0]);
        assert!((w[0] - 1.0).abs() < 1e-30);
        assert_abs_diff_eq!(w[1], 3.375e-80, epsilon = 1e-83);
        assert!(w[2] < 1e-75);
        assert!(w.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn substencil_values_on_reference_stencils() {
        assert_eq!(substencil_values(&[2.5; 5]), [2.5; 3]);
        let q = substencil_values(&[-2.0, -1.0, 0.0, 1.0, 2.0]);
        for v in q {
            assert_abs_diff_eq!(v, 0.5, epsilon = 1e-15);
        }
        let q = substencil_values(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_abs_diff_eq!(q[0], 2.0 / 6.0, epsilon = 1e-16);
        assert_eq!(q[1], 0.0);
        assert_eq!(q[2], 0.0);
    }

    #[test]
    fn constant_data_reconstructs_exactly() {
        for t in all_transforms() {
            let (v, flagged) = reconstruct_with_flag(&[0.7; 5], &t);
            assert_abs_diff_eq!(v, 0.7, epsilon = 1e-14);
            assert!(!flagged);
        }
    }

    #[test]
    fn linear_data_reconstructs_midpoint_for_every_transform() {
        // all three substencil values equal 0.5, so any convex weights agree
        for t in all_transforms() {
            let v = reconstruct_left(&[-2.0, -1.0, 0.0, 1.0, 2.0], &t);
            assert_abs_diff_eq!(v, 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn identity_transform_matches_direct_js_combination() {
        let u = [0.3, 0.1, 0.4, 0.15, 0.9];
        let q = substencil_values(&u);
        let w = js_weights(smoothness_indicators(&u));
        let direct = w[0] * q[0] + w[1] * q[1] + w[2] * q[2];
        assert_eq!(reconstruct_left(&u, &WeightTransform::Identity), direct);
    }

    #[test]
    fn fifth_order_interface_convergence() {
        // exact cell averages of sin(pi x) feed the reconstruction; the
        // interface error must decay at fifth order
        let t = WeightTransform::Identity;
        let mut errors = Vec::new();
        let ns = [40usize, 80, 160, 320];
        for &n in &ns {
            let dx = 2.0 / n as f64;
            let avg = |j: isize| {
                let xl = -1.0 + j as f64 * dx;
                ((std::f64::consts::PI * xl).cos()
                    - (std::f64::consts::PI * (xl + dx)).cos())
                    / (std::f64::consts::PI * dx)
            };
            let mut max_err: f64 = 0.0;
            for j in 2..(n as isize - 2) {
                let s = [avg(j - 2), avg(j - 1), avg(j), avg(j + 1), avg(j + 2)];
                let v = reconstruct_left(&s, &t);
                let exact = (std::f64::consts::PI * (-1.0 + (j + 1) as f64 * dx)).sin();
                max_err = max_err.max((v - exact).abs());
            }
            errors.push(max_err);
        }
        let mut orders = Vec::new();
        for k in 1..errors.len() {
            orders.push((errors[k - 1] / errors[k]).log2());
        }
        let fit = orders.iter().sum::<f64>() / orders.len() as f64;
        assert!(fit >= 4.9, "order fit {fit}, errors {errors:?}");
    }

    #[test]
    fn mirror_symmetry() {
        let u = [0.2, -0.4, 1.3, 0.9, 0.05];
        let rev = [u[4], u[3], u[2], u[1], u[0]];
        for t in all_transforms() {
            assert_eq!(reconstruct_right(&rev, &t), reconstruct_left(&u, &t));
        }
    }

    proptest! {
        #[test]
        fn reconstruction_is_convex(u in proptest::array::uniform5(-10.0..10.0f64)) {
            for t in all_transforms() {
                let q = substencil_values(&u);
                let v = reconstruct_left(&u, &t);
                let lo = q.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(v >= lo - 1e-12 * (1.0 + hi.abs()));
                prop_assert!(v <= hi + 1e-12 * (1.0 + hi.abs()));
            }
        }

        #[test]
        fn consistency_on_constants(c in -100.0..100.0f64) {
            for t in all_transforms() {
                let v = reconstruct_left(&[c; 5], &t);
                prop_assert!((v - c).abs() <= 1e-12 * (1.0 + c.abs()));
            }
        }
    }
}
