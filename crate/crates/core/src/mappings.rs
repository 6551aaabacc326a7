//! Weight-mapping families applied to the WENO-JS nonlinear weights.
//!
//! Every family below maps a weight `w ∈ [0, 1]` onto `g(w) ∈ [0, 1]` with
//! `g(0) = 0`, `g(1) = 1` and a fixed point at the ideal weight,
//! `g(d_s) = d_s`, and is monotonically increasing on `[0, 1]`. A family is
//! described by a small list of per-substencil parameters (always starting
//! with the ideal weight `d_s`) plus a handful of family-global constants,
//! so the same mapping can be evaluated with the parameter list of *any*
//! substencil index. That substitution hook is what the order-preserving
//! transform in [`crate::op`] relies on.
//!
//! All evaluations go through a cancellation-free "deviation" form
//! `g(w) = d + (g(w) - d)` where the parenthesised part is computed directly;
//! this keeps the fixed point exact and lets tests resolve the flatness of
//! `g` near `d_s` well below `f64` rounding of the absolute value.

use thiserror::Error;

/// Ideal (optimal) weights of the fifth-order scheme, in substencil order.
pub const IDEAL_WEIGHTS: [f64; 3] = [0.1, 0.6, 0.3];

/// Regularisation constant used in the WENO-JS weights.
pub const EPSILON: f64 = 1e-40;

/// Canonical registry names, in registry order.
pub const REGISTRY_NAMES: [&str; 9] = [
    "js", "m", "im_2_0.1", "pm6", "ppm5", "rm260", "maim1", "acm", "mip_acmk",
];

#[derive(Debug, Error, PartialEq)]
pub enum MappingError {
    #[error("unknown mapping family `{0}`")]
    UnknownFamily(String),
    #[error("family {family:?} takes {expected} per-substencil parameters, got {got}")]
    ParameterCount {
        family: FamilyKind,
        expected: usize,
        got: usize,
    },
    #[error("substencil index {0} out of range (0..3)")]
    SubstencilIndex(usize),
    #[error("rational-map denominator is not positive at w = {w} (value {value})")]
    NonPositiveDenominator { w: f64, value: f64 },
}

/// Mapping family identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// `g(w) = w`; plain WENO-JS weights.
    Identity,
    /// Rational map of Henrick et al. fixing `d_s` to second order.
    M,
    /// WENO-IM(k, A) family.
    Im,
    /// Piecewise-polynomial WENO-PMk map.
    Pm,
    /// Piecewise-polynomial WENO-PPM5 map.
    Ppm5,
    /// Rational WENO-RM(260) map.
    Rm260,
    /// Adaptive WENO-MAIM1 map.
    Maim1,
    /// Quasi-step WENO-ACM map built from a smoothed sign function.
    Acm,
    /// Piecewise-linear plateau map MIP-WENO-ACMk.
    MipAcmk,
}

impl FamilyKind {
    /// Number of per-substencil parameters the family consumes.
    pub fn param_count(self) -> usize {
        match self {
            FamilyKind::Identity => 0,
            FamilyKind::M | FamilyKind::Im | FamilyKind::Pm | FamilyKind::Ppm5 | FamilyKind::Rm260 => 1,
            FamilyKind::Maim1 | FamilyKind::Acm => 2,
            FamilyKind::MipAcmk => 3,
        }
    }
}

/// Per-substencil parameter list `P_{s,1..m_P}`.
///
/// `p1` is always the ideal weight `d_s`. The meaning of `p2`/`p3` depends on
/// the family: `m_s` for MAIM1, `CFS_s` for ACM and MIP-ACMk, and the plateau
/// slope `k_s` for MIP-ACMk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubstencilParams {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl SubstencilParams {
    pub fn new(p1: f64, p2: f64, p3: f64) -> Self {
        Self { p1, p2, p3 }
    }

    /// The ideal weight this parameter list is anchored to.
    pub fn d(&self) -> f64 {
        self.p1
    }
}

/// Family-global constants (roles depend on the family; unused ones are 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalParams {
    /// Exponent `k` (IM, PM, MAIM1, ACM's sgm).
    pub k: i32,
    /// Amplitude `A` (IM, MAIM1).
    pub a: f64,
    /// Scale factor `B` of the smoothed sign function (1 for MAIM1, `A` for ACM).
    pub b: f64,
    /// Half-width `delta` of the smoothed sign transition.
    pub delta: f64,
    /// Small positive regulariser in the MAIM1 exponents.
    pub eps_a: f64,
}

impl GlobalParams {
    const fn none() -> Self {
        Self { k: 0, a: 0.0, b: 0.0, delta: 0.0, eps_a: 0.0 }
    }
}

/// A mapping family instance: kind, per-substencil parameter lists and the
/// family-global constants.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingSpec {
    pub family: FamilyKind,
    /// Declared number of per-substencil parameters; must match the family.
    pub m_p: usize,
    pub params: [SubstencilParams; 3],
    pub globals: GlobalParams,
}

fn per_substencil(f: impl Fn(f64) -> SubstencilParams) -> [SubstencilParams; 3] {
    [
        f(IDEAL_WEIGHTS[0]),
        f(IDEAL_WEIGHTS[1]),
        f(IDEAL_WEIGHTS[2]),
    ]
}

impl MappingSpec {
    pub fn identity() -> Self {
        Self {
            family: FamilyKind::Identity,
            m_p: 0,
            params: per_substencil(|d| SubstencilParams::new(d, 0.0, 0.0)),
            globals: GlobalParams::none(),
        }
    }

    pub fn m() -> Self {
        Self {
            family: FamilyKind::M,
            m_p: 1,
            params: per_substencil(|d| SubstencilParams::new(d, 0.0, 0.0)),
            globals: GlobalParams::none(),
        }
    }

    /// WENO-IM(k, A); the recommended member is `k = 2`, `A = 0.1`.
    pub fn im(k: i32, a: f64) -> Self {
        Self {
            family: FamilyKind::Im,
            m_p: 1,
            params: per_substencil(|d| SubstencilParams::new(d, 0.0, 0.0)),
            globals: GlobalParams { k, a, ..GlobalParams::none() },
        }
    }

    pub fn pm6() -> Self {
        Self {
            family: FamilyKind::Pm,
            m_p: 1,
            params: per_substencil(|d| SubstencilParams::new(d, 0.0, 0.0)),
            globals: GlobalParams { k: 6, ..GlobalParams::none() },
        }
    }

    pub fn ppm5() -> Self {
        Self {
            family: FamilyKind::Ppm5,
            m_p: 1,
            params: per_substencil(|d| SubstencilParams::new(d, 0.0, 0.0)),
            globals: GlobalParams::none(),
        }
    }

    pub fn rm260() -> Self {
        Self {
            family: FamilyKind::Rm260,
            m_p: 1,
            params: per_substencil(|d| SubstencilParams::new(d, 0.0, 0.0)),
            globals: GlobalParams::none(),
        }
    }

    /// WENO-MAIM1 with `k = 10`, `A = 1e-6`, `m_s = 0.06`.
    ///
    /// The transition half-width of the smoothed sign gate is fixed at 1e-6
    /// (any value with `delta -> 0` is admissible) and the exponent
    /// regulariser reuses the magnitude of [`EPSILON`].
    pub fn maim1() -> Self {
        Self {
            family: FamilyKind::Maim1,
            m_p: 2,
            params: per_substencil(|d| SubstencilParams::new(d, 0.06, 0.0)),
            globals: GlobalParams { k: 10, a: 1e-6, b: 1.0, delta: 1e-6, eps_a: EPSILON },
        }
    }

    /// WENO-ACM with `A = 20`, `k = 2`, `CFS_s = d_s / 10`.
    ///
    /// The sign-transition half-width defaults to 1e-6, clipped so it stays
    /// strictly below the admissible bound
    /// `min{CFS, d - CFS, (1 - d)(1 - CFS/d), CFS (1 - d)/d}`.
    pub fn acm() -> Self {
        Self {
            family: FamilyKind::Acm,
            m_p: 2,
            params: per_substencil(|d| SubstencilParams::new(d, d / 10.0, 0.0)),
            globals: GlobalParams { k: 2, a: 20.0, b: 20.0, delta: 1e-6, eps_a: 0.0 },
        }
    }

    /// MIP-WENO-ACMk with `k_s = 0`, `CFS_s = d_s / 10`.
    pub fn mip_acmk() -> Self {
        Self {
            family: FamilyKind::MipAcmk,
            m_p: 3,
            params: per_substencil(|d| SubstencilParams::new(d, d / 10.0, 0.0)),
            globals: GlobalParams::none(),
        }
    }

    /// Validate the parameter-list shape and, for the rational RM family,
    /// that the cubic denominator stays positive on a dense sample of [0, 1].
    pub fn validate(&self) -> Result<(), MappingError> {
        let expected = self.family.param_count();
        if self.m_p != expected {
            return Err(MappingError::ParameterCount { family: self.family, expected, got: self.m_p });
        }
        if self.family == FamilyKind::Rm260 {
            for p in &self.params {
                let (a0, a1, a2, a3) = rm260_coefficients(p.d());
                for i in 0..=1000 {
                    let w = i as f64 / 1000.0;
                    let den = a0 + w * (a1 + w * (a2 + w * a3));
                    if den <= 0.0 {
                        return Err(MappingError::NonPositiveDenominator { w, value: den });
                    }
                }
            }
        }
        Ok(())
    }

    /// Evaluate `g` with the parameter list of substencil `s`.
    #[inline]
    pub fn eval(&self, s: usize, w: f64) -> f64 {
        match self.family {
            FamilyKind::Identity => w,
            _ => self.params[s].d() + self.deviation(s, w),
        }
    }

    /// `g(w) - d_s`, computed without subtracting large near-equal terms.
    #[inline]
    pub fn deviation(&self, s: usize, w: f64) -> f64 {
        let p = self.params[s];
        let d = p.d();
        let g = &self.globals;
        match self.family {
            FamilyKind::Identity => w - d,
            FamilyKind::M => {
                // w (d + d^2 - 3 d w + w^2) / (d^2 + (1 - 2d) w) - d == (w - d)^3 / den
                let den = d * d + (1.0 - 2.0 * d) * w;
                (w - d).powi(3) / den
            }
            FamilyKind::Im => {
                let dw = w - d;
                g.a * dw.powi(g.k + 1) / (g.a * dw.powi(g.k) + w * (1.0 - w))
            }
            FamilyKind::Pm => {
                let k = g.k;
                let kf = f64::from(k + 1);
                let (c1, c2) = if w <= d {
                    (
                        if k % 2 == 0 { kf / d.powi(k + 1) } else { -kf / d.powi(k + 1) },
                        d / kf,
                    )
                } else {
                    (-kf / (1.0 - d).powi(k + 1), (d - f64::from(k + 2)) / kf)
                };
                c1 * (w - d).powi(k + 1) * (w + c2)
            }
            FamilyKind::Ppm5 => {
                if w <= d {
                    let a = w / d;
                    d * (a - 1.0).powi(5)
                } else {
                    let b = 1.0 / (d - 1.0);
                    b.powi(4) * (w - d).powi(5)
                }
            }
            FamilyKind::Rm260 => {
                let (a0, a1, a2, a3) = rm260_coefficients(d);
                (w - d).powi(7) / (a0 + w * (a1 + w * (a2 + w * a3)))
            }
            FamilyKind::Maim1 => {
                // Gate reduces to the constant 1 for even k; kept verbatim so
                // odd exponents evaluate the printed expression too.
                let half = |v: f64| 0.5 * (1.0 + v);
                let gate = half((-1.0f64).powi(g.k))
                    + half((-1.0f64).powi(g.k + 1)) * sgm(w - d, g.delta, g.b, g.k);
                let dw = w - d;
                let pw = pow_clamped(w, d / (p.p2 * w + g.eps_a))
                    * pow_clamped(1.0 - w, (1.0 - d) / (p.p2 * (1.0 - w) + g.eps_a));
                g.a * gate * dw.powi(g.k + 1) / (g.a * gate * dw.powi(g.k) + pw)
            }
            FamilyKind::Acm => {
                let cfs = p.p2;
                let delta = acm_delta(d, cfs, g.delta);
                if w <= d {
                    0.5 * d * (sgm(w - cfs, delta, g.b, g.k) - 1.0)
                } else {
                    let cfs_bar = 1.0 - (1.0 - d) / d * cfs;
                    0.5 * (1.0 - d) * (sgm(w - cfs_bar, delta, g.b, g.k) + 1.0)
                }
            }
            FamilyKind::MipAcmk => {
                let cfs = p.p2;
                let ks = p.p3;
                let cfs_bar = 1.0 - (1.0 - d) / d * cfs;
                if w < cfs {
                    ks * w - d
                } else if w <= cfs_bar {
                    0.0
                } else {
                    (1.0 - d) - ks * (1.0 - w)
                }
            }
        }
    }

    /// Bind the parameter list of substencil `s` into a standalone mapping.
    pub fn bind(&self, s: usize) -> Result<MappingFn, MappingError> {
        self.validate()?;
        if s >= 3 {
            return Err(MappingError::SubstencilIndex(s));
        }
        Ok(MappingFn { spec: self.clone(), s })
    }
}

/// Coefficients of the cubic denominator of the RM(260) map.
fn rm260_coefficients(d: f64) -> (f64, f64, f64, f64) {
    let a0 = d.powi(6);
    let a1 = -7.0 * d.powi(5);
    let a2 = 21.0 * d.powi(4);
    let a3 = (1.0 - d).powi(6) - (a0 + a1 + a2);
    (a0, a1, a2, a3)
}

/// Smoothed sign function: `x/|x|` outside the transition half-width,
/// `x / ((B (delta^2 - x^2))^(k+3) + |x|)` inside it (0 at x = 0).
pub fn sgm(x: f64, delta: f64, b: f64, k: i32) -> f64 {
    if x.abs() >= delta {
        x / x.abs()
    } else {
        x / ((b * (delta * delta - x * x)).powi(k + 3) + x.abs())
    }
}

/// ACM sign-transition half-width: the default clipped below its admissible bound.
fn acm_delta(d: f64, cfs: f64, preferred: f64) -> f64 {
    let bound = (cfs)
        .min(d - cfs)
        .min((1.0 - d) * (1.0 - cfs / d))
        .min(cfs * (1.0 - d) / d);
    if preferred < bound {
        preferred
    } else {
        0.5 * bound
    }
}

/// `base^p` with the base clamped away from zero so expressions of the form
/// `0^positive` evaluate to the limiting value 0 instead of raising 0/0
/// concerns downstream.
fn pow_clamped(base: f64, p: f64) -> f64 {
    base.max(1e-300).powf(p)
}

/// A mapping bound to one substencil's parameter list.
#[derive(Debug, Clone)]
pub struct MappingFn {
    spec: MappingSpec,
    s: usize,
}

impl MappingFn {
    #[inline]
    pub fn eval(&self, w: f64) -> f64 {
        self.spec.eval(self.s, w)
    }

    pub fn substencil(&self) -> usize {
        self.s
    }

    pub fn spec(&self) -> &MappingSpec {
        &self.spec
    }
}

/// Look up a family by its canonical registry name.
pub fn registry_lookup(name: &str) -> Result<MappingSpec, MappingError> {
    let spec = match name {
        "js" => MappingSpec::identity(),
        "m" => MappingSpec::m(),
        "im_2_0.1" => MappingSpec::im(2, 0.1),
        "pm6" => MappingSpec::pm6(),
        "ppm5" => MappingSpec::ppm5(),
        "rm260" => MappingSpec::rm260(),
        "maim1" => MappingSpec::maim1(),
        "acm" => MappingSpec::acm(),
        "mip_acmk" => MappingSpec::mip_acmk(),
        _ => return Err(MappingError::UnknownFamily(name.to_string())),
    };
    spec.validate()?;
    Ok(spec)
}

/// Look up a family and bind substencil `s` in one step.
pub fn make_mapping(name: &str, s: usize) -> Result<MappingFn, MappingError> {
    registry_lookup(name)?.bind(s)
}

/// All mapped (non-identity) families under their registry names.
pub fn mapped_families() -> Vec<(&'static str, MappingSpec)> {
    REGISTRY_NAMES
        .iter()
        .filter(|&&n| n != "js")
        .map(|&n| (n, registry_lookup(n).expect("registry")))
        .collect()
}
