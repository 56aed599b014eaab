//! Curvature of graph hypersurfaces `x_{n+1} = f(x_1, ..., x_n)` in ℝ^{n+1}:
//! unit normal, first and second fundamental forms, shape operator, mean
//! curvature, and the generalized cross product of n vectors in ℝ^{n+1}.
//!
//! Orientation convention: the unit normal carries a strictly positive last
//! component, `ξ = (−f_{x1}, ..., −f_{xn}, 1)/φ` with
//! `φ = sqrt(1 + Σ f_{xj}²)`. Every signed quantity downstream (second
//! fundamental form, mean curvature, singular-minimal residuals) is read
//! against this normal. Under it the upper unit hemisphere has H = −1.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Unit-norm tolerance for [`Direction`] and normal vectors.
pub const UNIT_TOL: f64 = 1e-12;

/// Maximum supported graph arity. Ambient dimension is `MAX_ARITY + 1`.
pub const MAX_ARITY: usize = 8;

// ---------------------------------------------------------------------------
// vectors

/// Point or vector in ℝ^{n+1} (length ≥ 2; length 2 serves planar-curve use).
#[derive(Clone, Debug, PartialEq)]
pub struct VecN(Vec<f64>);

impl VecN {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::validation(format!(
                "VecN needs at least 2 components, got {}",
                components.len()
            )));
        }
        if components.len() > MAX_ARITY + 1 {
            return Err(Error::validation(format!(
                "VecN supports at most {} components, got {}",
                MAX_ARITY + 1,
                components.len()
            )));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::validation("VecN components must be finite"));
        }
        Ok(VecN(components))
    }

    /// Standard basis vector e_i (zero-based index) in ℝ^dim.
    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::validation(format!(
                "basis index {i} out of range for dimension {dim}"
            )));
        }
        let mut c = vec![0.0; dim];
        c[i] = 1.0;
        VecN::new(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn dot(&self, other: &VecN) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, c: f64) -> VecN {
        VecN(self.0.iter().map(|v| c * v).collect())
    }

    pub fn add(&self, other: &VecN) -> VecN {
        VecN(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &VecN) -> VecN {
        VecN(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

/// Fixed unit reference direction u.
///
/// The constructor normalizes its input; a zero or non-finite vector is
/// rejected. `|u| = 1` holds within [`UNIT_TOL`] afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction(VecN);

impl Direction {
    pub fn new(v: VecN) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm < 1e-14 {
            return Err(Error::validation(
                "direction must be a nonzero finite vector",
            ));
        }
        let u = v.scale(1.0 / norm);
        debug_assert!((u.norm() - 1.0).abs() <= UNIT_TOL);
        Ok(Direction(u))
    }

    pub fn from_components(components: &[f64]) -> Result<Self> {
        Direction::new(VecN::new(components.to_vec())?)
    }

    /// Coordinate axis e_i in ℝ^dim.
    pub fn axis(dim: usize, i: usize) -> Result<Self> {
        Direction::new(VecN::basis(dim, i)?)
    }

    pub fn vec(&self) -> &VecN {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn dot(&self, v: &VecN) -> f64 {
        self.0.dot(v)
    }
}

// ---------------------------------------------------------------------------
// symmetric matrices

/// Symmetric n×n matrix; only the upper triangle is stored, so symmetry is
/// exact by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    upper: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            upper: vec![0.0; n * (n + 1) / 2],
        }
    }

    /// Build from `f(i, j)` evaluated once per `i <= j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        // packed upper triangle, row-major
        r * self.n - r * (r + 1) / 2 + c
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.upper[k] = v;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Quadratic form vᵀ M v.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        debug_assert_eq!(v.len(), self.n);
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += v[i] * self.get(i, j) * v[j];
            }
        }
        s
    }

    /// Matrix-vector product M v.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|v| v.is_finite())
    }
}

// ---------------------------------------------------------------------------
// graph functions

/// Where a [`GraphFn`]'s derivatives come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    FiniteDifference,
}

type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type HessFn = Arc<dyn Fn(&[f64]) -> SymMatrix + Send + Sync>;

/// Scalar function of n variables with gradient and Hessian access.
///
/// Derivatives are either supplied analytically or produced by central finite
/// differences with the steps of [`fd_gradient`] / [`fd_hessian`].
#[derive(Clone)]
pub struct GraphFn {
    arity: usize,
    value: ValueFn,
    grad: Option<GradFn>,
    hess: Option<HessFn>,
    provenance: Provenance,
}

impl std::fmt::Debug for GraphFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GraphFn")
            .field("arity", &self.arity)
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl GraphFn {
    /// Function with analytic gradient and Hessian.
    pub fn analytic<F, G, H>(arity: usize, value: F, grad: G, hess: H) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        H: Fn(&[f64]) -> SymMatrix + Send + Sync + 'static,
    {
        Self::check_arity(arity)?;
        Ok(GraphFn {
            arity,
            value: Arc::new(value),
            grad: Some(Arc::new(grad)),
            hess: Some(Arc::new(hess)),
            provenance: Provenance::Analytic,
        })
    }

    /// Function whose derivatives fall back to central finite differences.
    pub fn numeric<F>(arity: usize, value: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::check_arity(arity)?;
        Ok(GraphFn {
            arity,
            value: Arc::new(value),
            grad: None,
            hess: None,
            provenance: Provenance::FiniteDifference,
        })
    }

    /// Function with explicit derivative closures and a caller-declared
    /// provenance (grid-stencil derivatives of a discrete field, say).
    pub fn with_derivatives<F, G, H>(
        arity: usize,
        value: F,
        grad: G,
        hess: H,
        provenance: Provenance,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        H: Fn(&[f64]) -> SymMatrix + Send + Sync + 'static,
    {
        Self::check_arity(arity)?;
        Ok(GraphFn {
            arity,
            value: Arc::new(value),
            grad: Some(Arc::new(grad)),
            hess: Some(Arc::new(hess)),
            provenance,
        })
    }

    fn check_arity(arity: usize) -> Result<()> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::validation(format!(
                "graph arity must be in 1..={MAX_ARITY}, got {arity}"
            )));
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.arity {
            return Err(Error::validation(format!(
                "point dimension {} does not match graph arity {}",
                x.len(),
                self.arity
            )));
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let v = (self.value)(x);
        if !v.is_finite() {
            return Err(Error::Evaluation {
                point: x.to_vec(),
                reason: "non-finite function value".into(),
            });
        }
        Ok(v)
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let g = match &self.grad {
            Some(g) => g(x),
            None => fd_gradient(self.value.as_ref(), x),
        };
        if g.len() != self.arity {
            return Err(Error::Internal("gradient length mismatch".into()));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Evaluation {
                point: x.to_vec(),
                reason: "non-finite gradient".into(),
            });
        }
        Ok(g)
    }

    pub fn hessian(&self, x: &[f64]) -> Result<SymMatrix> {
        self.check_point(x)?;
        let h = match &self.hess {
            Some(h) => h(x),
            None => fd_hessian(self.value.as_ref(), x),
        };
        if h.dim() != self.arity {
            return Err(Error::Internal("hessian dimension mismatch".into()));
        }
        if !h.is_finite() {
            return Err(Error::Evaluation {
                point: x.to_vec(),
                reason: "non-finite hessian".into(),
            });
        }
        Ok(h)
    }

    /// Self-check for analytic functions: the supplied gradient must agree
    /// with central differences to 1e-6 relative and the Hessian to 1e-4
    /// relative at every probe.
    pub fn self_check(&self, probes: &[Vec<f64>]) -> Result<()> {
        if self.provenance != Provenance::Analytic {
            return Ok(());
        }
        for x in probes {
            let g = self.gradient(x)?;
            let g_fd = fd_gradient(self.value.as_ref(), x);
            let scale_g = 1.0 + g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (a, b) in g.iter().zip(&g_fd) {
                if (a - b).abs() > 1e-6 * scale_g {
                    return Err(Error::Evaluation {
                        point: x.clone(),
                        reason: format!(
                            "analytic gradient {a} disagrees with finite difference {b}"
                        ),
                    });
                }
            }
            let h = self.hessian(x)?;
            let h_fd = fd_hessian(self.value.as_ref(), x);
            let mut scale_h = 1.0f64;
            for i in 0..h.dim() {
                for j in i..h.dim() {
                    scale_h = scale_h.max(h.get(i, j).abs());
                }
            }
            for i in 0..h.dim() {
                for j in i..h.dim() {
                    if (h.get(i, j) - h_fd.get(i, j)).abs() > 1e-4 * scale_h {
                        return Err(Error::Evaluation {
                            point: x.clone(),
                            reason: format!(
                                "analytic hessian entry ({i},{j}) disagrees with finite difference"
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Central-difference gradient, step `h_i = max(1, |x_i|)·eps^(1/3)`.
pub fn fd_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let eps3 = f64::EPSILON.powf(1.0 / 3.0);
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let h = x[i].abs().max(1.0) * eps3;
        probe[i] = x[i] + h;
        let fp = f(&probe);
        probe[i] = x[i] - h;
        let fm = f(&probe);
        probe[i] = x[i];
        grad.push((fp - fm) / (2.0 * h));
    }
    grad
}

/// Central-difference Hessian, step `h_i = max(1, |x_i|)·eps^(1/4)`. Each
/// off-diagonal entry is computed once, so the result is symmetric exactly.
pub fn fd_hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> SymMatrix {
    let eps4 = f64::EPSILON.powf(0.25);
    let n = x.len();
    let steps: Vec<f64> = x.iter().map(|&xi| xi.abs().max(1.0) * eps4).collect();
    let f0 = f(x);
    let mut probe = x.to_vec();
    SymMatrix::from_fn(n, |i, j| {
        if i == j {
            let h = steps[i];
            probe[i] = x[i] + h;
            let fp = f(&probe);
            probe[i] = x[i] - h;
            let fm = f(&probe);
            probe[i] = x[i];
            (fp - 2.0 * f0 + fm) / (h * h)
        } else {
            let (hi, hj) = (steps[i], steps[j]);
            probe[i] = x[i] + hi;
            probe[j] = x[j] + hj;
            let fpp = f(&probe);
            probe[j] = x[j] - hj;
            let fpm = f(&probe);
            probe[i] = x[i] - hi;
            let fmm = f(&probe);
            probe[j] = x[j] + hj;
            let fmp = f(&probe);
            probe[i] = x[i];
            probe[j] = x[j];
            (fpp - fpm - fmp + fmm) / (4.0 * hi * hj)
        }
    })
}

// ---------------------------------------------------------------------------
// curvature of graphs

fn phi_from_grad(grad: &[f64]) -> f64 {
    (1.0 + grad.iter().map(|g| g * g).sum::<f64>()).sqrt()
}

/// Unit normal `ξ = (−∇f, 1)/φ` of the graph of `f` at `x`. The last
/// component is strictly positive and `|ξ| = 1` within [`UNIT_TOL`].
pub fn unit_normal(f: &GraphFn, x: &[f64]) -> Result<VecN> {
    let grad = f.gradient(x)?;
    let phi = phi_from_grad(&grad);
    let mut comps: Vec<f64> = grad.iter().map(|g| -g / phi).collect();
    comps.push(1.0 / phi);
    VecN::new(comps)
}

/// Induced metric `g_ij = δ_ij + f_{xi} f_{xj}`.
pub fn first_fundamental(f: &GraphFn, x: &[f64]) -> Result<SymMatrix> {
    let grad = f.gradient(x)?;
    Ok(SymMatrix::from_fn(f.arity(), |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta + grad[i] * grad[j]
    }))
}

/// Second fundamental form `h_ij = f_{xi xj}/φ` (read against the normal of
/// [`unit_normal`]).
pub fn second_fundamental(f: &GraphFn, x: &[f64]) -> Result<SymMatrix> {
    let grad = f.gradient(x)?;
    let hess = f.hessian(x)?;
    let phi = phi_from_grad(&grad);
    Ok(SymMatrix::from_fn(f.arity(), |i, j| hess.get(i, j) / phi))
}

/// Shape operator `a_ij = f_{xi xj}/φ − Σ_l f_{xi xl} f_{xl} f_{xj} / φ³`
/// (equal to h·g⁻¹; not symmetric in general).
pub fn shape_operator(f: &GraphFn, x: &[f64]) -> Result<Matrix> {
    let n = f.arity();
    let grad = f.gradient(x)?;
    let hess = f.hessian(x)?;
    let phi = phi_from_grad(&grad);
    // det(g) = φ² ≥ 1; anything else means the inputs were already non-finite.
    if !phi.is_finite() || phi < 1.0 - 1e-9 {
        return Err(Error::Internal(
            "first fundamental form degenerate".into(),
        ));
    }
    let phi3 = phi * phi * phi;
    let hg: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|l| hess.get(i, l) * grad[l]).sum())
        .collect();
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, hess.get(i, j) / phi - hg[i] * grad[j] / phi3);
        }
    }
    Ok(a)
}

/// Mean curvature `H = (1/n) Σ_j ∂/∂x_j (f_{xj}/φ)`, expanded analytically:
/// `H = (tr Hess / φ − ∇fᵀ·Hess·∇f / φ³) / n`. No nested numerical
/// differentiation is involved.
pub fn mean_curvature(f: &GraphFn, x: &[f64]) -> Result<f64> {
    let n = f.arity();
    let grad = f.gradient(x)?;
    let hess = f.hessian(x)?;
    let phi = phi_from_grad(&grad);
    let phi3 = phi * phi * phi;
    Ok((hess.trace() / phi - hess.quad_form(&grad) / phi3) / n as f64)
}

/// Generalized cross product of n vectors in ℝ^{n+1} by cofactor expansion:
/// component i is `det(v_1, ..., v_n, e_i)`. Orthogonal to every input; zero
/// exactly when the inputs are linearly dependent; `e_1 × e_2 = e_3` in ℝ³
/// and `e_1 × e_2 × e_3 = e_4` in ℝ⁴.
pub fn cross_product_n(vectors: &[VecN]) -> Result<VecN> {
    if vectors.is_empty() {
        return Err(Error::validation("cross product needs at least one vector"));
    }
    let dim = vectors[0].dim();
    if vectors.len() + 1 != dim {
        return Err(Error::validation(format!(
            "cross product in dimension {dim} needs {} vectors, got {}",
            dim - 1,
            vectors.len()
        )));
    }
    if vectors.iter().any(|v| v.dim() != dim) {
        return Err(Error::validation("cross product vectors differ in dimension"));
    }
    let n = dim - 1;
    let mut out = vec![0.0; dim];
    let mut minor = Matrix::zeros(n, n);
    for i in 0..dim {
        for (r, v) in vectors.iter().enumerate() {
            let mut c = 0;
            for k in 0..dim {
                if k == i {
                    continue;
                }
                minor.set(r, c, v.get(k));
                c += 1;
            }
        }
        // Expanding det(v_1, ..., v_n, e_i) along the last row: e_i sits in
        // column i of an (n+1)-column matrix, so the cofactor sign is
        // (−1)^{(n+1)+(i+1)} = (−1)^{n+i}.
        let sign = if (n + i) % 2 == 0 { 1.0 } else { -1.0 };
        out[i] = sign * minor.det()?;
    }
    VecN::new(out)
}
