//! Singular-minimal residuals for the surface families built from
//! single-variable profiles: generic graphs, generalized cylinders,
//! translation hypersurfaces, affine translation graphs, and generalized
//! translation graphs.
//!
//! All residuals are reported in curvature units, as
//! `n·H − α·g(ξ,u)/g(σ,u)`, so one threshold means the same thing across
//! families. The cleared-denominator polynomial forms of the family equations
//! exist only as private cross-checks.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::catenary::PlanarCurveSample;
use crate::error::{Error, Result};
use crate::geometry::{
    cross_product_n, mean_curvature, unit_normal, Direction, GraphFn, SymMatrix, VecN,
};
use crate::linalg::compensated_sum;

/// Halfspace guard: a sample point is in-domain when g(σ, u) exceeds this.
pub const DOMAIN_EPS: f64 = 1e-9;

// ---------------------------------------------------------------------------
// single-variable profiles

type Scalar1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Single-variable function with two derivatives; the building block of the
/// translation-type families.
#[derive(Clone)]
pub struct Profile {
    value: Scalar1,
    deriv1: Scalar1,
    deriv2: Scalar1,
}

impl std::fmt::Debug for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Profile")
    }
}

impl Profile {
    pub fn new<F, G, H>(value: F, deriv1: G, deriv2: H) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        H: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Profile {
            value: Arc::new(value),
            deriv1: Arc::new(deriv1),
            deriv2: Arc::new(deriv2),
        }
    }

    pub fn constant(c: f64) -> Self {
        Profile::new(move |_| c, |_| 0.0, |_| 0.0)
    }

    pub fn linear(slope: f64, intercept: f64) -> Self {
        Profile::new(move |t| slope * t + intercept, move |_| slope, |_| 0.0)
    }

    /// Polynomial with coefficients in ascending degree order.
    pub fn poly(coeffs: &[f64]) -> Self {
        fn horner(c: &[f64], t: f64) -> f64 {
            c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
        }
        fn derive(c: &[f64]) -> Vec<f64> {
            c.iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| k as f64 * a)
                .collect()
        }
        let c0 = coeffs.to_vec();
        let c1 = derive(&c0);
        let c2 = derive(&c1);
        Profile::new(
            move |t| horner(&c0, t),
            move |t| horner(&c1, t),
            move |t| horner(&c2, t),
        )
    }

    /// Interpolate tabulated (abscissa, value) data with the local quadratic
    /// through the three nearest samples; derivatives come from the same
    /// quadratic. Needs at least three samples.
    pub fn from_samples(abscissae: &[f64], values: &[f64]) -> Result<Self> {
        if abscissae.len() != values.len() {
            return Err(Error::validation("tabulated profile length mismatch"));
        }
        if abscissae.len() < 3 {
            return Err(Error::validation(
                "tabulated profile needs at least 3 samples",
            ));
        }
        if abscissae.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation(
                "tabulated abscissae must be strictly increasing",
            ));
        }
        if abscissae.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::validation("tabulated entries must be finite"));
        }
        let xs = Arc::new(abscissae.to_vec());
        let ys = Arc::new(values.to_vec());

        // quadratic through samples (k, k+1, k+2) in Newton form
        let fit = move |xs: &[f64], ys: &[f64], t: f64| -> (f64, f64, f64) {
            let k = xs.partition_point(|&x| x < t).saturating_sub(1);
            let k = k.min(xs.len() - 3);
            let (x0, x1, x2) = (xs[k], xs[k + 1], xs[k + 2]);
            let (y0, y1, y2) = (ys[k], ys[k + 1], ys[k + 2]);
            let d01 = (y1 - y0) / (x1 - x0);
            let d12 = (y2 - y1) / (x2 - x1);
            let d012 = (d12 - d01) / (x2 - x0);
            let value = y0 + d01 * (t - x0) + d012 * (t - x0) * (t - x1);
            let deriv = d01 + d012 * ((t - x0) + (t - x1));
            (value, deriv, 2.0 * d012)
        };
        let f0 = {
            let (xs, ys, fit) = (xs.clone(), ys.clone(), fit);
            move |t: f64| fit(&xs, &ys, t).0
        };
        let f1 = {
            let (xs, ys) = (xs.clone(), ys.clone());
            move |t: f64| fit(&xs, &ys, t).1
        };
        let f2 = move |t: f64| fit(&xs, &ys, t).2;
        Ok(Profile::new(f0, f1, f2))
    }

    /// Profile from an integrator output that carries derivative samples:
    /// cubic Hermite for value and slope, central differences of the slope
    /// table for the second derivative.
    pub fn from_ode_samples(sample: &crate::catenary::FunctionSample) -> Result<Self> {
        let Some(derivs) = sample.derivatives() else {
            return Err(Error::validation(
                "ODE profile needs derivative samples",
            ));
        };
        if sample.len() < 3 {
            return Err(Error::validation("ODE profile needs at least 3 samples"));
        }
        let xs = Arc::new(sample.abscissae().to_vec());
        let ys = Arc::new(sample.values().to_vec());
        let ds = Arc::new(derivs.to_vec());
        let n = xs.len();
        let mut d2 = Vec::with_capacity(n);
        // second-order one-sided differences at the ends, central inside
        let h0 = xs[1] - xs[0];
        d2.push((-3.0 * ds[0] + 4.0 * ds[1] - ds[2]) / (2.0 * h0));
        for i in 1..n - 1 {
            d2.push((ds[i + 1] - ds[i - 1]) / (xs[i + 1] - xs[i - 1]));
        }
        let hn = xs[n - 1] - xs[n - 2];
        d2.push((3.0 * ds[n - 1] - 4.0 * ds[n - 2] + ds[n - 3]) / (2.0 * hn));
        let d2 = Arc::new(d2);

        let locate = |xs: &[f64], t: f64| -> usize {
            let k = xs.partition_point(|&x| x < t).saturating_sub(1);
            k.min(xs.len() - 2)
        };
        let hermite = move |xs: &[f64], ys: &[f64], ds: &[f64], t: f64| -> (f64, f64) {
            let k = locate(xs, t);
            let h = xs[k + 1] - xs[k];
            let s = (t - xs[k]) / h;
            let (s2, s3) = (s * s, s * s * s);
            let v = (2.0 * s3 - 3.0 * s2 + 1.0) * ys[k]
                + (s3 - 2.0 * s2 + s) * h * ds[k]
                + (-2.0 * s3 + 3.0 * s2) * ys[k + 1]
                + (s3 - s2) * h * ds[k + 1];
            let d = ((6.0 * s2 - 6.0 * s) * ys[k]
                + (3.0 * s2 - 4.0 * s + 1.0) * h * ds[k]
                + (-6.0 * s2 + 6.0 * s) * ys[k + 1]
                + (3.0 * s2 - 2.0 * s) * h * ds[k + 1])
                / h;
            (v, d)
        };
        let f0 = {
            let (xs, ys, ds) = (xs.clone(), ys.clone(), ds.clone());
            move |t: f64| hermite(&xs, &ys, &ds, t).0
        };
        let f1 = {
            let (xs, ys, ds) = (xs.clone(), ys.clone(), ds.clone());
            move |t: f64| hermite(&xs, &ys, &ds, t).1
        };
        let f2 = {
            let xs2 = xs.clone();
            move |t: f64| {
                let k = locate(&xs2, t);
                let h = xs2[k + 1] - xs2[k];
                let s = (t - xs2[k]) / h;
                (1.0 - s) * d2[k] + s * d2[k + 1]
            }
        };
        Ok(Profile::new(f0, f1, f2))
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub fn d1(&self, t: f64) -> f64 {
        (self.deriv1)(t)
    }

    pub fn d2(&self, t: f64) -> f64 {
        (self.deriv2)(t)
    }

    /// Uniform sampling over a range; derivatives included.
    pub fn sample(&self, range: [f64; 2], count: usize) -> Result<crate::catenary::FunctionSample> {
        if count < 2 || range[0] >= range[1] {
            return Err(Error::validation("profile sampling needs count >= 2, lo < hi"));
        }
        let mut xs = Vec::with_capacity(count);
        let mut ys = Vec::with_capacity(count);
        let mut ds = Vec::with_capacity(count);
        for i in 0..count {
            let t = range[0] + (range[1] - range[0]) * i as f64 / (count - 1) as f64;
            xs.push(t);
            ys.push(self.value(t));
            ds.push(self.d1(t));
        }
        crate::catenary::FunctionSample::with_derivatives(xs, ys, ds)
    }
}

// ---------------------------------------------------------------------------
// generic graph residual

/// Singular-minimal residual of a graph at x:
/// `n·H(x) − α·g(ξ(x), u) / g(σ(x), u)` with σ(x) = (x, f(x)).
pub fn sm_residual_graph(f: &GraphFn, u: &Direction, alpha: f64, x: &[f64]) -> Result<f64> {
    let n = f.arity();
    if u.dim() != n + 1 {
        return Err(Error::validation(format!(
            "direction dimension {} does not match ambient dimension {}",
            u.dim(),
            n + 1
        )));
    }
    let height = f.value(x)?;
    let uv = u.vec().as_slice();
    let mut g_sigma = height * uv[n];
    for i in 0..n {
        g_sigma += x[i] * uv[i];
    }
    if g_sigma <= DOMAIN_EPS {
        let mut point = x.to_vec();
        point.push(height);
        return Err(Error::Halfspace {
            point,
            value: g_sigma,
            limit: DOMAIN_EPS,
        });
    }
    let h = mean_curvature(f, x)?;
    let xi = unit_normal(f, x)?;
    Ok(n as f64 * h - alpha * u.dot(&xi) / g_sigma)
}

// ---------------------------------------------------------------------------
// translation hypersurfaces x_{n+1} = f_1(x_1) + ... + f_n(x_n)

/// Translation hypersurface: a sum of single-variable profiles, one per
/// axis, with per-axis domain intervals. The reference direction is pinned
/// to u = e_1, the first coordinate axis.
#[derive(Clone, Debug)]
pub struct TranslationSpec {
    profiles: Vec<Profile>,
    domains: Vec<[f64; 2]>,
}

impl TranslationSpec {
    pub fn new(profiles: Vec<Profile>, domains: Vec<[f64; 2]>) -> Result<Self> {
        if profiles.len() < 2 {
            return Err(Error::validation(
                "translation hypersurface needs at least 2 profiles",
            ));
        }
        if profiles.len() != domains.len() {
            return Err(Error::validation("profile/domain count mismatch"));
        }
        if domains
            .iter()
            .any(|d| !d[0].is_finite() || !d[1].is_finite() || d[0] >= d[1])
        {
            return Err(Error::validation("domains must be finite with lo < hi"));
        }
        Ok(TranslationSpec { profiles, domains })
    }

    pub fn arity(&self) -> usize {
        self.profiles.len()
    }

    pub fn profiles(&self) -> &[Profile] {
        &self.profiles
    }

    pub fn domains(&self) -> &[[f64; 2]] {
        &self.domains
    }

    pub fn to_graph_fn(&self) -> GraphFn {
        let n = self.arity();
        let p_val = self.profiles.clone();
        let p_grad = self.profiles.clone();
        let p_hess = self.profiles.clone();
        GraphFn::with_derivatives(
            n,
            move |x: &[f64]| x.iter().zip(&p_val).map(|(&t, p)| p.value(t)).sum(),
            move |x: &[f64]| x.iter().zip(&p_grad).map(|(&t, p)| p.d1(t)).collect(),
            move |x: &[f64]| {
                let d2: Vec<f64> = x.iter().zip(&p_hess).map(|(&t, p)| p.d2(t)).collect();
                SymMatrix::from_fn(d2.len(), |i, j| if i == j { d2[i] } else { 0.0 })
            },
            crate::geometry::Provenance::Analytic,
        )
        .expect("arity validated at construction")
    }
}

/// Cleared-denominator form of the translation equation:
/// `Σ_i (1 + Σ_{j≠i} f_j′²) f_i″ + (α f_1′/x_1)(1 + Σ f_i′²)`.
fn translation_cleared(spec: &TranslationSpec, alpha: f64, x: &[f64]) -> (f64, f64) {
    let d1: Vec<f64> = x
        .iter()
        .zip(spec.profiles.iter())
        .map(|(&t, p)| p.d1(t))
        .collect();
    let d2: Vec<f64> = x
        .iter()
        .zip(spec.profiles.iter())
        .map(|(&t, p)| p.d2(t))
        .collect();
    let sum_sq: f64 = d1.iter().map(|v| v * v).sum();
    let lhs: f64 = (0..d1.len())
        .map(|i| (1.0 + sum_sq - d1[i] * d1[i]) * d2[i])
        .sum();
    let rhs = -alpha * d1[0] / x[0] * (1.0 + sum_sq);
    (lhs - rhs, 1.0 + sum_sq)
}

/// Residual of the translation equation at x, in curvature units (equal to
/// the generic graph residual with u = e_1).
pub fn sm_residual_translation(spec: &TranslationSpec, alpha: f64, x: &[f64]) -> Result<f64> {
    let n = spec.arity();
    if x.len() != n {
        return Err(Error::validation(format!(
            "point dimension {} does not match arity {n}",
            x.len()
        )));
    }
    if x[0] <= DOMAIN_EPS {
        let mut point = x.to_vec();
        point.push(
            x.iter()
                .zip(spec.profiles.iter())
                .map(|(&t, p)| p.value(t))
                .sum(),
        );
        return Err(Error::Halfspace {
            point,
            value: x[0],
            limit: DOMAIN_EPS,
        });
    }
    let (cleared, phi_sq) = translation_cleared(spec, alpha, x);
    Ok(cleared / phi_sq.powf(1.5))
}

// ---------------------------------------------------------------------------
// affine translation graphs z = f(x) + g(y + cx)

/// Affine translation surface in ℝ³, parameterized over the sheared
/// coordinates (x̃, ỹ) = (x, y + cx) as `(x̃, ỹ − cx̃, f(x̃) + g(ỹ))`.
/// The reference direction is pinned to u = (1, 0, 0); c = 0 is rejected
/// (that case is an ordinary translation surface).
#[derive(Clone, Debug)]
pub struct AffineTranslationSpec {
    f: Profile,
    g: Profile,
    c: f64,
}

impl AffineTranslationSpec {
    pub fn new(f: Profile, g: Profile, c: f64) -> Result<Self> {
        if !c.is_finite() || c == 0.0 {
            return Err(Error::validation(
                "affine shear c must be finite and nonzero (c = 0 is a plain translation surface)",
            ));
        }
        Ok(AffineTranslationSpec { f, g, c })
    }

    pub fn f(&self) -> &Profile {
        &self.f
    }

    pub fn g(&self) -> &Profile {
        &self.g
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// The same surface as a graph z(x, y) = f(x) + g(y + cx) over the
    /// unsheared coordinates.
    pub fn to_graph_fn(&self) -> GraphFn {
        let (fv, gv, c) = (self.f.clone(), self.g.clone(), self.c);
        let (fg, gg) = (self.f.clone(), self.g.clone());
        let (fh, gh) = (self.f.clone(), self.g.clone());
        GraphFn::with_derivatives(
            2,
            move |x: &[f64]| fv.value(x[0]) + gv.value(x[1] + c * x[0]),
            move |x: &[f64]| {
                let gp = gg.d1(x[1] + c * x[0]);
                vec![fg.d1(x[0]) + c * gp, gp]
            },
            move |x: &[f64]| {
                let gpp = gh.d2(x[1] + c * x[0]);
                let fpp = fh.d2(x[0]);
                SymMatrix::from_fn(2, |i, j| match (i, j) {
                    (0, 0) => fpp + c * c * gpp,
                    (1, 1) => gpp,
                    _ => c * gpp,
                })
            },
            crate::geometry::Provenance::Analytic,
        )
        .expect("arity 2 is valid")
    }
}

/// Residual of the affine translation equation at (x̃, ỹ), in curvature
/// units (equal to the generic graph residual of z = f(x) + g(y + cx) at
/// the matching point (x̃, ỹ − cx̃)).
pub fn sm_residual_affine(
    spec: &AffineTranslationSpec,
    alpha: f64,
    xt: f64,
    yt: f64,
) -> Result<f64> {
    if xt <= DOMAIN_EPS {
        let z = spec.f.value(xt) + spec.g.value(yt);
        return Err(Error::Halfspace {
            point: vec![xt, yt - spec.c * xt, z],
            value: xt,
            limit: DOMAIN_EPS,
        });
    }
    let f1 = spec.f.d1(xt);
    let f2 = spec.f.d2(xt);
    let g1 = spec.g.d1(yt);
    let g2 = spec.g.d2(yt);
    let c = spec.c;
    let lhs_num = (1.0 + g1 * g1) * f2 + (1.0 + c * c + f1 * f1) * g2;
    let slope = f1 + c * g1;
    let d = 1.0 + slope * slope + g1 * g1;
    Ok((lhs_num / d + alpha * slope / xt) / d.sqrt())
}

// ---------------------------------------------------------------------------
// generalized translation graphs z = Σ f_i(x_i) + g(x_n + Σ c_i x_i)

/// Generalized translation graph in ℝ^{n+1}:
/// `z(x_1..x_n) = f_1(x_1) + ... + f_{n−1}(x_{n−1}) + g(x_n + Σ c_i x_i)`.
#[derive(Clone, Debug)]
pub struct GeneralizedTranslationSpec {
    profiles: Vec<Profile>,
    g: Profile,
    coeffs: Vec<f64>,
}

impl GeneralizedTranslationSpec {
    pub fn new(profiles: Vec<Profile>, g: Profile, coeffs: Vec<f64>) -> Result<Self> {
        if profiles.is_empty() {
            return Err(Error::validation(
                "generalized translation graph needs n >= 2 (at least one profile)",
            ));
        }
        if profiles.len() != coeffs.len() {
            return Err(Error::validation("profile/coefficient count mismatch"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::validation("coefficients must be finite"));
        }
        Ok(GeneralizedTranslationSpec {
            profiles,
            g,
            coeffs,
        })
    }

    pub fn arity(&self) -> usize {
        self.profiles.len() + 1
    }

    pub fn to_graph_fn(&self) -> GraphFn {
        let n = self.arity();
        let (p_v, g_v, c_v) = (self.profiles.clone(), self.g.clone(), self.coeffs.clone());
        let (p_g, g_g, c_g) = (self.profiles.clone(), self.g.clone(), self.coeffs.clone());
        let (p_h, g_h, c_h) = (self.profiles.clone(), self.g.clone(), self.coeffs.clone());
        let arg = |coeffs: &[f64], x: &[f64]| -> f64 {
            x[x.len() - 1]
                + coeffs
                    .iter()
                    .zip(x.iter())
                    .map(|(&c, &xi)| c * xi)
                    .sum::<f64>()
        };
        GraphFn::with_derivatives(
            n,
            move |x: &[f64]| {
                let w = arg(&c_v, x);
                p_v.iter()
                    .zip(x.iter())
                    .map(|(p, &t)| p.value(t))
                    .sum::<f64>()
                    + g_v.value(w)
            },
            move |x: &[f64]| {
                let w = arg(&c_g, x);
                let gp = g_g.d1(w);
                let mut grad: Vec<f64> = p_g
                    .iter()
                    .zip(x.iter())
                    .zip(c_g.iter())
                    .map(|((p, &t), &c)| p.d1(t) + c * gp)
                    .collect();
                grad.push(gp);
                grad
            },
            move |x: &[f64]| {
                let w = arg(&c_h, x);
                let gpp = g_h.d2(w);
                let m = x.len();
                let d2: Vec<f64> = p_h
                    .iter()
                    .zip(x.iter())
                    .map(|(p, &t)| p.d2(t))
                    .collect();
                SymMatrix::from_fn(m, |i, j| {
                    let ci = if i < m - 1 { c_h[i] } else { 1.0 };
                    let cj = if j < m - 1 { c_h[j] } else { 1.0 };
                    let base = ci * cj * gpp;
                    if i == j && i < m - 1 {
                        base + d2[i]
                    } else {
                        base
                    }
                })
            },
            crate::geometry::Provenance::Analytic,
        )
        .expect("arity validated at construction")
    }
}

/// Residual of a generalized translation graph: delegates to the generic
/// graph residual, so any unit direction u is supported.
pub fn sm_residual_generalized(
    spec: &GeneralizedTranslationSpec,
    u: &Direction,
    alpha: f64,
    x: &[f64],
) -> Result<f64> {
    sm_residual_graph(&spec.to_graph_fn(), u, alpha, x)
}

// ---------------------------------------------------------------------------
// generalized cylinders γ(s) + Σ t_i w_i

/// Generalized cylinder: orthonormal rulings w_1..w_{n−1} in ℝ^{n+1}, a
/// 2-plane Γ orthogonal to all of them spanned by the orthonormal pair
/// `plane`, and a base curve sampled in Γ's coordinates.
#[derive(Clone, Debug)]
pub struct CylinderSpec {
    rulings: Vec<VecN>,
    plane: [VecN; 2],
    base: PlanarCurveSample,
    points: Vec<VecN>,
    tangents: Vec<VecN>,
}

const FRAME_TOL: f64 = 1e-10;
const TANGENT_TOL: f64 = 1e-8;

impl CylinderSpec {
    pub fn new(rulings: Vec<VecN>, plane: [VecN; 2], base: PlanarCurveSample) -> Result<Self> {
        if rulings.is_empty() {
            return Err(Error::validation("cylinder needs at least one ruling"));
        }
        let dim = rulings.len() + 2;
        if rulings.iter().any(|w| w.dim() != dim)
            || plane[0].dim() != dim
            || plane[1].dim() != dim
        {
            return Err(Error::validation(format!(
                "cylinder frame vectors must live in dimension {dim}"
            )));
        }
        // orthonormality is validated, not repaired; a silently corrected
        // frame would hide caller bugs
        for (i, wi) in rulings.iter().enumerate() {
            if (wi.norm() - 1.0).abs() > FRAME_TOL {
                return Err(Error::validation(format!("ruling {i} is not unit")));
            }
            for (j, wj) in rulings.iter().enumerate().skip(i + 1) {
                if wi.dot(wj).abs() > FRAME_TOL {
                    return Err(Error::validation(format!(
                        "rulings {i} and {j} are not orthogonal"
                    )));
                }
            }
            if plane[0].dot(wi).abs() > FRAME_TOL || plane[1].dot(wi).abs() > FRAME_TOL {
                return Err(Error::validation(format!(
                    "base plane is not orthogonal to ruling {i}"
                )));
            }
        }
        if (plane[0].norm() - 1.0).abs() > FRAME_TOL
            || (plane[1].norm() - 1.0).abs() > FRAME_TOL
            || plane[0].dot(&plane[1]).abs() > FRAME_TOL
        {
            return Err(Error::validation("base plane vectors are not orthonormal"));
        }
        let embed = |p: [f64; 2]| plane[0].scale(p[0]).add(&plane[1].scale(p[1]));
        let points: Vec<VecN> = base.points().iter().map(|&p| embed(p)).collect();
        let tangents: Vec<VecN> = base.tangents().iter().map(|&t| embed(t)).collect();
        for (k, t) in tangents.iter().enumerate() {
            for (i, w) in rulings.iter().enumerate() {
                if t.dot(w).abs() > TANGENT_TOL {
                    return Err(Error::validation(format!(
                        "base tangent {k} is not orthogonal to ruling {i}"
                    )));
                }
            }
        }
        Ok(CylinderSpec {
            rulings,
            plane,
            base,
            points,
            tangents,
        })
    }

    /// Hypersurface dimension n (ambient is n + 1).
    pub fn arity(&self) -> usize {
        self.rulings.len() + 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.rulings.len() + 2
    }

    pub fn rulings(&self) -> &[VecN] {
        &self.rulings
    }

    pub fn plane(&self) -> &[VecN; 2] {
        &self.plane
    }

    pub fn base(&self) -> &PlanarCurveSample {
        &self.base
    }

    fn locate(&self, s: f64) -> Result<usize> {
        let params = self.base.parameters();
        let k = params.partition_point(|&x| x < s);
        let mut best = usize::MAX;
        let mut dist = f64::INFINITY;
        for cand in [k.saturating_sub(1), k.min(params.len() - 1)] {
            let d = (params[cand] - s).abs();
            if d < dist {
                dist = d;
                best = cand;
            }
        }
        if dist > 1e-6 * (1.0 + s.abs()) {
            return Err(Error::validation(format!(
                "s = {s} is not a sampled base-curve parameter (nearest is {})",
                params[best]
            )));
        }
        Ok(best)
    }

    /// Residual at base-sample index `i` and ruling offsets `t`.
    pub(crate) fn residual_at_index(
        &self,
        u: &Direction,
        alpha: f64,
        i: usize,
        t: &[f64],
    ) -> Result<f64> {
        let dim = self.ambient_dim();
        if u.dim() != dim {
            return Err(Error::validation(format!(
                "direction dimension {} does not match ambient dimension {dim}",
                u.dim()
            )));
        }
        if t.len() != self.rulings.len() {
            return Err(Error::validation(format!(
                "expected {} ruling offsets, got {}",
                self.rulings.len(),
                t.len()
            )));
        }
        let mut frame: Vec<VecN> = self.rulings.clone();
        frame.push(self.tangents[i].clone());
        let mut xi = cross_product_n(&frame)?;
        // ξ = ±(embedded in-plane normal); orient the pair (ξ, κ) so the last
        // component of ξ is positive whenever nonzero, matching the graph
        // normal convention.
        let n2 = self.base.normal(i);
        let n_emb = self.plane[0].scale(n2[0]).add(&self.plane[1].scale(n2[1]));
        let mut along = xi.dot(&n_emb);
        if along.abs() < 0.9 {
            return Err(Error::Internal(
                "cylinder frame inconsistent: cross product is not the in-plane normal".into(),
            ));
        }
        if xi.get(dim - 1) < 0.0 {
            xi = xi.scale(-1.0);
            along = -along;
        }
        let kappa = self.base.curvatures()[i] * along.signum();

        let mut denom = u.dot(&self.points[i]);
        for (w, &ti) in self.rulings.iter().zip(t) {
            denom += u.dot(w) * ti;
        }
        if denom <= DOMAIN_EPS {
            let mut point = self.points[i].clone();
            for (w, &ti) in self.rulings.iter().zip(t) {
                point = point.add(&w.scale(ti));
            }
            return Err(Error::Halfspace {
                point: point.as_slice().to_vec(),
                value: denom,
                limit: DOMAIN_EPS,
            });
        }
        Ok(kappa - alpha * u.dot(&xi) / denom)
    }
}

/// Residual of the cylinder equation at base parameter s and ruling offsets
/// t, in curvature units: `κ(s) − α·g(w_1×…×w_{n−1}×γ′(s), u) / D` with
/// `D = Σ g(w_i,u) t_i + g(γ(s),u)` (the cleared equation divided by D).
/// `s` must be one of the sampled base-curve parameters.
pub fn sm_residual_cylinder(
    spec: &CylinderSpec,
    u: &Direction,
    alpha: f64,
    s: f64,
    t: &[f64],
) -> Result<f64> {
    let i = spec.locate(s)?;
    spec.residual_at_index(u, alpha, i, t)
}

// ---------------------------------------------------------------------------
// grids and batched reports

/// Rectangular evaluation grid with inclusive endpoints; the last axis
/// varies fastest.
#[derive(Clone, Debug)]
pub struct Grid {
    ranges: Vec<[f64; 2]>,
    counts: Vec<usize>,
}

impl Grid {
    pub fn new(ranges: Vec<[f64; 2]>, counts: Vec<usize>) -> Result<Self> {
        if ranges.is_empty() || ranges.len() != counts.len() {
            return Err(Error::validation("grid ranges/counts mismatch"));
        }
        for (r, &c) in ranges.iter().zip(&counts) {
            if !r[0].is_finite() || !r[1].is_finite() {
                return Err(Error::validation("grid ranges must be finite"));
            }
            if c == 0 {
                return Err(Error::validation("grid counts must be positive"));
            }
            if c > 1 && r[0] >= r[1] {
                return Err(Error::validation("grid range needs lo < hi"));
            }
        }
        counts
            .iter()
            .try_fold(1usize, |acc, &c| {
                acc.checked_mul(c).filter(|&t| t <= 5_000_000)
            })
            .ok_or_else(|| Error::validation("grid too large"))?;
        Ok(Grid { ranges, counts })
    }

    pub fn dims(&self) -> usize {
        self.ranges.len()
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ranges(&self) -> &[[f64; 2]] {
        &self.ranges
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn coordinate(&self, axis: usize, index: usize) -> f64 {
        let [lo, hi] = self.ranges[axis];
        let c = self.counts[axis];
        if c == 1 {
            lo
        } else {
            lo + (hi - lo) * index as f64 / (c - 1) as f64
        }
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut idx = flat;
        let mut coords = vec![0.0; self.dims()];
        for axis in (0..self.dims()).rev() {
            let c = self.counts[axis];
            coords[axis] = self.coordinate(axis, idx % c);
            idx /= c;
        }
        coords
    }
}

/// Batched residual evaluation: sample points, pointwise residuals, RMS and
/// max over the in-domain points, and the count of halfspace violations.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub points: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub rms: f64,
    pub max_abs: f64,
    pub domain_violations: usize,
}

impl ResidualReport {
    /// Assemble from per-point evaluations in a fixed order. Halfspace
    /// violations are counted and excluded from the norms; any other error
    /// propagates.
    pub fn from_evaluations(evals: Vec<(Vec<f64>, Result<f64>)>) -> Result<Self> {
        let mut points = Vec::new();
        let mut residuals = Vec::new();
        let mut violations = 0usize;
        for (p, r) in evals {
            match r {
                Ok(v) => {
                    points.push(p);
                    residuals.push(v);
                }
                Err(Error::Halfspace { .. }) => violations += 1,
                Err(e) => return Err(e),
            }
        }
        let squares: Vec<f64> = residuals.iter().map(|r| r * r).collect();
        let rms = if residuals.is_empty() {
            0.0
        } else {
            (compensated_sum(&squares) / residuals.len() as f64).sqrt()
        };
        let max_abs = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        Ok(ResidualReport {
            points,
            residuals,
            rms,
            max_abs,
            domain_violations: violations,
        })
    }

    pub fn sample_count(&self) -> usize {
        self.residuals.len()
    }
}

/// Evaluate a pointwise residual over a grid. Work is distributed across
/// threads; results are reassembled in grid order before the norms are
/// reduced sequentially, so the report does not depend on the thread count.
pub fn residual_report_on_grid<F>(grid: &Grid, eval: F) -> Result<ResidualReport>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let evals: Vec<(Vec<f64>, Result<f64>)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let p = grid.point(i);
            let r = eval(&p);
            (p, r)
        })
        .collect();
    ResidualReport::from_evaluations(evals)
}

pub fn graph_report(f: &GraphFn, u: &Direction, alpha: f64, grid: &Grid) -> Result<ResidualReport> {
    if grid.dims() != f.arity() {
        return Err(Error::validation("grid dimension does not match graph arity"));
    }
    residual_report_on_grid(grid, |x| sm_residual_graph(f, u, alpha, x))
}

pub fn translation_report(
    spec: &TranslationSpec,
    alpha: f64,
    grid: &Grid,
) -> Result<ResidualReport> {
    if grid.dims() != spec.arity() {
        return Err(Error::validation("grid dimension does not match arity"));
    }
    residual_report_on_grid(grid, |x| sm_residual_translation(spec, alpha, x))
}

pub fn affine_report(
    spec: &AffineTranslationSpec,
    alpha: f64,
    grid: &Grid,
) -> Result<ResidualReport> {
    if grid.dims() != 2 {
        return Err(Error::validation("affine grid must be 2-dimensional"));
    }
    residual_report_on_grid(grid, |x| sm_residual_affine(spec, alpha, x[0], x[1]))
}

pub fn generalized_report(
    spec: &GeneralizedTranslationSpec,
    u: &Direction,
    alpha: f64,
    grid: &Grid,
) -> Result<ResidualReport> {
    if grid.dims() != spec.arity() {
        return Err(Error::validation("grid dimension does not match arity"));
    }
    let f = spec.to_graph_fn();
    residual_report_on_grid(grid, |x| sm_residual_graph(&f, u, alpha, x))
}

/// Cylinder report: every sampled base parameter crossed with a grid of
/// ruling offsets. Points are recorded as (s, t_1..t_{n−1}).
pub fn cylinder_report(
    spec: &CylinderSpec,
    u: &Direction,
    alpha: f64,
    t_grid: &Grid,
) -> Result<ResidualReport> {
    if t_grid.dims() != spec.rulings().len() {
        return Err(Error::validation(
            "offset grid dimension must match ruling count",
        ));
    }
    let params = spec.base().parameters();
    let total = params.len() * t_grid.len();
    let evals: Vec<(Vec<f64>, Result<f64>)> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let i = flat / t_grid.len();
            let t = t_grid.point(flat % t_grid.len());
            let mut point = vec![params[i]];
            point.extend_from_slice(&t);
            let r = spec.residual_at_index(u, alpha, i, &t);
            (point, r)
        })
        .collect();
    ResidualReport::from_evaluations(evals)
}
