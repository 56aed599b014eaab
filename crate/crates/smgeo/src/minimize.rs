//! Discrete potential α-energy `∫ g(q,u)^α dM` over graph fields on a
//! rectangular grid with Dirichlet boundary, its exact gradient, an
//! Armijo-backtracking gradient descent, and the Euler–Lagrange check that a
//! minimizer satisfies the singular-minimal equation.
//!
//! The energy quadrature uses forward differences per cell with the weight
//! `g(q,u)^α` taken at the cell midpoint; the Euler–Lagrange verification
//! deliberately uses a different discretization (central differences at
//! nodes) so the check is not circular.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{Direction, GraphFn, Provenance, SymMatrix};
use crate::linalg::compensated_sum;
use crate::residuals::{sm_residual_graph, ResidualReport, DOMAIN_EPS};

/// Reference direction for the energy: the vertical axis e_{n+1} or the
/// horizontal axis e_1. These are the two configurations the energy
/// minimizer supports; arbitrary directions are available through the
/// residual evaluators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyDirection {
    Vertical,
    Horizontal,
}

#[derive(Clone, Copy, Debug)]
pub struct EnergyOpts {
    pub alpha: f64,
    pub direction: EnergyDirection,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    /// Armijo sufficient-decrease constant, in (0, 0.5].
    pub armijo_c: f64,
    /// Backtracking factor, in (0, 1).
    pub backtrack: f64,
}

impl Default for EnergyOpts {
    fn default() -> Self {
        EnergyOpts {
            alpha: 1.0,
            direction: EnergyDirection::Vertical,
            max_iterations: 200_000,
            gradient_tolerance: 1e-8,
            armijo_c: 1e-4,
            backtrack: 0.5,
        }
    }
}

impl EnergyOpts {
    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() {
            return Err(Error::validation("alpha must be finite"));
        }
        if !(self.gradient_tolerance > 0.0) {
            return Err(Error::validation("gradient_tolerance must be positive"));
        }
        if !(self.armijo_c > 0.0 && self.armijo_c <= 0.5) {
            return Err(Error::validation("armijo_c must lie in (0, 0.5]"));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::validation("backtrack must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Node-count ceiling for fields; inputs are untrusted and a lattice beyond
/// desk scale is a spec mistake, not a workload.
pub const MAX_FIELD_NODES: usize = 10_000_000;

/// Scalar field on a 1-D or 2-D rectangular lattice. Boundary nodes carry a
/// fixed flag; their values never change during optimization.
#[derive(Clone, Debug)]
pub struct Field {
    dims: usize,
    shape: [usize; 2], // shape[1] == 1 in one dimension
    origin: [f64; 2],
    spacing: [f64; 2],
    values: Vec<f64>,
    fixed: Vec<bool>,
}

impl Field {
    /// 1-D field on [a, b] with `nodes` lattice points, Dirichlet values at
    /// both ends, and linear interior initialization.
    pub fn line(a: f64, b: f64, nodes: usize, left: f64, right: f64) -> Result<Self> {
        if nodes < 3 {
            return Err(Error::validation("1-d field needs at least 3 nodes"));
        }
        if nodes > MAX_FIELD_NODES {
            return Err(Error::validation("1-d field too large"));
        }
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::validation("field interval needs finite a < b"));
        }
        if !left.is_finite() || !right.is_finite() {
            return Err(Error::validation("boundary values must be finite"));
        }
        let h = (b - a) / (nodes - 1) as f64;
        let values: Vec<f64> = (0..nodes)
            .map(|i| {
                let t = i as f64 / (nodes - 1) as f64;
                left + (right - left) * t
            })
            .collect();
        let mut fixed = vec![false; nodes];
        fixed[0] = true;
        fixed[nodes - 1] = true;
        Ok(Field {
            dims: 1,
            shape: [nodes, 1],
            origin: [a, 0.0],
            spacing: [h, 1.0],
            values,
            fixed,
        })
    }

    /// 2-D field on [x0,x1]×[y0,y1], boundary taken from `boundary(x, y)`,
    /// interior initialized by transfinite (Coons) interpolation of the
    /// boundary data.
    pub fn rect(
        x_range: [f64; 2],
        y_range: [f64; 2],
        nx: usize,
        ny: usize,
        boundary: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::validation("2-d field needs at least 3x3 nodes"));
        }
        if nx.checked_mul(ny).is_none_or(|t| t > MAX_FIELD_NODES) {
            return Err(Error::validation("2-d field too large"));
        }
        if !(x_range[0] < x_range[1]) || !(y_range[0] < y_range[1]) {
            return Err(Error::validation("field ranges need lo < hi"));
        }
        let hx = (x_range[1] - x_range[0]) / (nx - 1) as f64;
        let hy = (y_range[1] - y_range[0]) / (ny - 1) as f64;
        let coord = |i: usize, h: f64, lo: f64| lo + i as f64 * h;
        let mut values = vec![0.0; nx * ny];
        let mut fixed = vec![false; nx * ny];
        for ix in 0..nx {
            for iy in 0..ny {
                let x = coord(ix, hx, x_range[0]);
                let y = coord(iy, hy, y_range[0]);
                let idx = ix * ny + iy;
                if ix == 0 || iy == 0 || ix == nx - 1 || iy == ny - 1 {
                    let v = boundary(x, y);
                    if !v.is_finite() {
                        return Err(Error::validation(format!(
                            "boundary value at ({x}, {y}) is not finite"
                        )));
                    }
                    values[idx] = v;
                    fixed[idx] = true;
                } else {
                    let s = ix as f64 / (nx - 1) as f64;
                    let t = iy as f64 / (ny - 1) as f64;
                    let (x0, x1) = (x_range[0], x_range[1]);
                    let (y0, y1) = (y_range[0], y_range[1]);
                    let v = (1.0 - s) * boundary(x0, y)
                        + s * boundary(x1, y)
                        + (1.0 - t) * boundary(x, y0)
                        + t * boundary(x, y1)
                        - (1.0 - s) * (1.0 - t) * boundary(x0, y0)
                        - s * (1.0 - t) * boundary(x1, y0)
                        - (1.0 - s) * t * boundary(x0, y1)
                        - s * t * boundary(x1, y1);
                    values[idx] = v;
                }
            }
        }
        Ok(Field {
            dims: 2,
            shape: [nx, ny],
            origin: [x_range[0], y_range[0]],
            spacing: [hx, hy],
            values,
            fixed,
        })
    }

    /// Rebuild a field from raw parts (file ingestion). Boundary nodes are
    /// the lattice boundary.
    pub fn from_parts(
        dims: usize,
        shape: [usize; 2],
        origin: [f64; 2],
        spacing: [f64; 2],
        values: Vec<f64>,
    ) -> Result<Self> {
        if dims != 1 && dims != 2 {
            return Err(Error::validation("field dims must be 1 or 2"));
        }
        let (nx, ny) = (shape[0], shape[1]);
        if dims == 1 && ny != 1 {
            return Err(Error::validation("1-d field must have shape [n, 1]"));
        }
        if nx < 3 || (dims == 2 && ny < 3) {
            return Err(Error::validation("field too small"));
        }
        if nx.checked_mul(ny).is_none_or(|t| t > MAX_FIELD_NODES) {
            return Err(Error::validation("field too large"));
        }
        if values.len() != nx * ny {
            return Err(Error::validation(format!(
                "value count {} does not match shape {}x{}",
                values.len(),
                nx,
                ny
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("field values must be finite"));
        }
        if !spacing[0].is_finite() || spacing[0] <= 0.0 {
            return Err(Error::validation("spacing must be positive"));
        }
        if dims == 2 && (!spacing[1].is_finite() || spacing[1] <= 0.0) {
            return Err(Error::validation("spacing must be positive"));
        }
        if !origin[0].is_finite() || !origin[1].is_finite() {
            return Err(Error::validation("origin must be finite"));
        }
        let mut fixed = vec![false; nx * ny];
        for ix in 0..nx {
            for iy in 0..ny {
                if ix == 0 || ix == nx - 1 || (dims == 2 && (iy == 0 || iy == ny - 1)) {
                    fixed[ix * ny + iy] = true;
                }
            }
        }
        Ok(Field {
            dims,
            shape,
            origin,
            spacing,
            values,
            fixed,
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn spacing(&self) -> [f64; 2] {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn fixed(&self) -> &[bool] {
        &self.fixed
    }

    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix * self.shape[1] + iy
    }

    pub fn coord(&self, ix: usize, iy: usize) -> [f64; 2] {
        [
            self.origin[0] + ix as f64 * self.spacing[0],
            self.origin[1] + iy as f64 * self.spacing[1],
        ]
    }

    /// Interior (free) node indices in lattice order.
    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| !self.fixed[i]).collect()
    }

    pub fn set_values(&mut self, values: Vec<f64>) -> Result<()> {
        if values.len() != self.values.len() {
            return Err(Error::validation("value count mismatch"));
        }
        self.values = values;
        Ok(())
    }

    /// g(q, u) at a node for the supported coordinate directions.
    fn node_weight(&self, idx: usize, direction: EnergyDirection) -> f64 {
        match direction {
            EnergyDirection::Vertical => self.values[idx],
            EnergyDirection::Horizontal => {
                let ix = idx / self.shape[1];
                self.origin[0] + ix as f64 * self.spacing[0]
            }
        }
    }

    fn check_halfspace(&self, direction: EnergyDirection) -> Result<()> {
        for idx in 0..self.values.len() {
            let w = self.node_weight(idx, direction);
            if w <= DOMAIN_EPS {
                let ix = idx / self.shape[1];
                let iy = idx % self.shape[1];
                let c = self.coord(ix, iy);
                return Err(Error::Halfspace {
                    point: if self.dims == 1 {
                        vec![c[0], self.values[idx]]
                    } else {
                        vec![c[0], c[1], self.values[idx]]
                    },
                    value: w,
                    limit: DOMAIN_EPS,
                });
            }
        }
        Ok(())
    }

    fn values_feasible(&self, candidate: &[f64], direction: EnergyDirection) -> bool {
        match direction {
            EnergyDirection::Vertical => candidate.iter().all(|&v| v > DOMAIN_EPS),
            EnergyDirection::Horizontal => true, // weights depend on x only
        }
    }

    /// Graph function backed by this field: bilinear values, grid-stencil
    /// central differences for the derivatives (snapped to the nearest
    /// interior node). This is the carrier for the Euler–Lagrange check.
    pub fn to_graph_fn(&self) -> GraphFn {
        let grid = Arc::new(self.clone());
        let value = {
            let g = grid.clone();
            move |x: &[f64]| g.bilinear(x)
        };
        let grad = {
            let g = grid.clone();
            move |x: &[f64]| g.stencil_gradient(x)
        };
        let hess = {
            let g = grid.clone();
            move |x: &[f64]| g.stencil_hessian(x)
        };
        GraphFn::with_derivatives(self.dims, value, grad, hess, Provenance::FiniteDifference)
            .expect("dims is 1 or 2")
    }

    fn clamp_node(&self, x: f64, axis: usize) -> usize {
        let i = ((x - self.origin[axis]) / self.spacing[axis]).round();
        let max = (self.shape[axis] - 1) as f64;
        i.clamp(1.0, max - 1.0) as usize
    }

    fn bilinear(&self, x: &[f64]) -> f64 {
        let locate = |x: f64, axis: usize| -> (usize, f64) {
            let t = (x - self.origin[axis]) / self.spacing[axis];
            let max_cell = (self.shape[axis] - 2) as f64;
            let cell = t.floor().clamp(0.0, max_cell);
            (cell as usize, t - cell)
        };
        if self.dims == 1 {
            let (i, t) = locate(x[0], 0);
            let a = self.values[self.index(i, 0)];
            let b = self.values[self.index(i + 1, 0)];
            a + (b - a) * t
        } else {
            let (i, s) = locate(x[0], 0);
            let (j, t) = locate(x[1], 1);
            let v00 = self.values[self.index(i, j)];
            let v10 = self.values[self.index(i + 1, j)];
            let v01 = self.values[self.index(i, j + 1)];
            let v11 = self.values[self.index(i + 1, j + 1)];
            v00 * (1.0 - s) * (1.0 - t) + v10 * s * (1.0 - t) + v01 * (1.0 - s) * t + v11 * s * t
        }
    }

    fn stencil_gradient(&self, x: &[f64]) -> Vec<f64> {
        if self.dims == 1 {
            let i = self.clamp_node(x[0], 0);
            let h = self.spacing[0];
            vec![(self.values[i + 1] - self.values[i - 1]) / (2.0 * h)]
        } else {
            let i = self.clamp_node(x[0], 0);
            let j = self.clamp_node(x[1], 1);
            let (hx, hy) = (self.spacing[0], self.spacing[1]);
            let v = |a: usize, b: usize| self.values[self.index(a, b)];
            vec![
                (v(i + 1, j) - v(i - 1, j)) / (2.0 * hx),
                (v(i, j + 1) - v(i, j - 1)) / (2.0 * hy),
            ]
        }
    }

    fn stencil_hessian(&self, x: &[f64]) -> SymMatrix {
        if self.dims == 1 {
            let i = self.clamp_node(x[0], 0);
            let h = self.spacing[0];
            let d2 = (self.values[i + 1] - 2.0 * self.values[i] + self.values[i - 1]) / (h * h);
            SymMatrix::from_fn(1, |_, _| d2)
        } else {
            let i = self.clamp_node(x[0], 0);
            let j = self.clamp_node(x[1], 1);
            let (hx, hy) = (self.spacing[0], self.spacing[1]);
            let v = |a: usize, b: usize| self.values[self.index(a, b)];
            let dxx = (v(i + 1, j) - 2.0 * v(i, j) + v(i - 1, j)) / (hx * hx);
            let dyy = (v(i, j + 1) - 2.0 * v(i, j) + v(i, j - 1)) / (hy * hy);
            let dxy = (v(i + 1, j + 1) - v(i + 1, j - 1) - v(i - 1, j + 1) + v(i - 1, j - 1))
                / (4.0 * hx * hy);
            SymMatrix::from_fn(2, |a, b| match (a, b) {
                (0, 0) => dxx,
                (1, 1) => dyy,
                _ => dxy,
            })
        }
    }
}

fn energy_of_values(field: &Field, values: &[f64], opts: &EnergyOpts) -> f64 {
    let [nx, ny] = field.shape;
    let [hx, hy] = field.spacing;
    let mut cells: Vec<f64> = Vec::new();
    if field.dims == 1 {
        cells.reserve(nx - 1);
        for i in 0..nx - 1 {
            let (a, b) = (values[i], values[i + 1]);
            let p = (b - a) / hx;
            let g = match opts.direction {
                EnergyDirection::Vertical => 0.5 * (a + b),
                EnergyDirection::Horizontal => field.origin[0] + (i as f64 + 0.5) * hx,
            };
            cells.push(g.powf(opts.alpha) * (1.0 + p * p).sqrt() * hx);
        }
    } else {
        cells.reserve((nx - 1) * (ny - 1));
        for ix in 0..nx - 1 {
            for iy in 0..ny - 1 {
                let v00 = values[ix * ny + iy];
                let v10 = values[(ix + 1) * ny + iy];
                let v01 = values[ix * ny + iy + 1];
                let v11 = values[(ix + 1) * ny + iy + 1];
                let fx = ((v10 - v00) + (v11 - v01)) / (2.0 * hx);
                let fy = ((v01 - v00) + (v11 - v10)) / (2.0 * hy);
                let g = match opts.direction {
                    EnergyDirection::Vertical => 0.25 * (v00 + v10 + v01 + v11),
                    EnergyDirection::Horizontal => field.origin[0] + (ix as f64 + 0.5) * hx,
                };
                cells.push(g.powf(opts.alpha) * (1.0 + fx * fx + fy * fy).sqrt() * hx * hy);
            }
        }
    }
    compensated_sum(&cells)
}

/// Discrete potential α-energy of the field.
pub fn discrete_energy(field: &Field, opts: &EnergyOpts) -> Result<f64> {
    opts.validate()?;
    field.check_halfspace(opts.direction)?;
    Ok(energy_of_values(field, &field.values, opts))
}

fn gradient_of_values(field: &Field, values: &[f64], opts: &EnergyOpts) -> Vec<f64> {
    let [nx, ny] = field.shape;
    let [hx, hy] = field.spacing;
    let alpha = opts.alpha;
    let mut grad = vec![0.0; values.len()];
    if field.dims == 1 {
        for i in 0..nx - 1 {
            let (a, b) = (values[i], values[i + 1]);
            let p = (b - a) / hx;
            let w = (1.0 + p * p).sqrt();
            let g = match opts.direction {
                EnergyDirection::Vertical => 0.5 * (a + b),
                EnergyDirection::Horizontal => field.origin[0] + (i as f64 + 0.5) * hx,
            };
            let ga = g.powf(alpha);
            // d/dv [g^α]·w·h term
            if opts.direction == EnergyDirection::Vertical {
                let dg = alpha * g.powf(alpha - 1.0) * 0.5 * w * hx;
                grad[i] += dg;
                grad[i + 1] += dg;
            }
            // g^α · d/dv[w] · h term
            let dw = ga * (p / w) * hx;
            grad[i] += dw * (-1.0 / hx);
            grad[i + 1] += dw * (1.0 / hx);
        }
    } else {
        for ix in 0..nx - 1 {
            for iy in 0..ny - 1 {
                let i00 = ix * ny + iy;
                let i10 = (ix + 1) * ny + iy;
                let i01 = ix * ny + iy + 1;
                let i11 = (ix + 1) * ny + iy + 1;
                let fx = ((values[i10] - values[i00]) + (values[i11] - values[i01])) / (2.0 * hx);
                let fy = ((values[i01] - values[i00]) + (values[i11] - values[i10])) / (2.0 * hy);
                let w = (1.0 + fx * fx + fy * fy).sqrt();
                let g = match opts.direction {
                    EnergyDirection::Vertical => {
                        0.25 * (values[i00] + values[i10] + values[i01] + values[i11])
                    }
                    EnergyDirection::Horizontal => field.origin[0] + (ix as f64 + 0.5) * hx,
                };
                let ga = g.powf(alpha);
                let area = hx * hy;
                if opts.direction == EnergyDirection::Vertical {
                    let dg = alpha * g.powf(alpha - 1.0) * 0.25 * w * area;
                    grad[i00] += dg;
                    grad[i10] += dg;
                    grad[i01] += dg;
                    grad[i11] += dg;
                }
                let common = ga * area / w;
                let dfx = common * fx / (2.0 * hx);
                let dfy = common * fy / (2.0 * hy);
                grad[i00] += -dfx - dfy;
                grad[i10] += dfx - dfy;
                grad[i01] += -dfx + dfy;
                grad[i11] += dfx + dfy;
            }
        }
    }
    for (g, &fixed) in grad.iter_mut().zip(&field.fixed) {
        if fixed {
            *g = 0.0;
        }
    }
    grad
}

/// Exact gradient of [`discrete_energy`] with respect to the interior node
/// values, as a full-lattice array with zeros at fixed nodes.
pub fn energy_gradient(field: &Field, opts: &EnergyOpts) -> Result<Vec<f64>> {
    opts.validate()?;
    field.check_halfspace(opts.direction)?;
    Ok(gradient_of_values(field, &field.values, opts))
}

#[derive(Clone, Debug)]
pub struct MinimizeOutcome {
    pub field: Field,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    pub energy_trace: Vec<f64>,
    pub converged: bool,
}

/// Gradient descent with Armijo backtracking. The line search rejects any
/// step that leaves the halfspace, accepted energies are non-increasing, and
/// the loop stops when the interior gradient ∞-norm drops below tolerance.
/// Running out of iterations is a nonconverged outcome, not an error.
pub fn minimize_energy(field: &Field, opts: &EnergyOpts) -> Result<MinimizeOutcome> {
    opts.validate()?;
    field.check_halfspace(opts.direction)?;

    let mut current = field.clone();
    let mut energy = energy_of_values(&current, &current.values, opts);
    let mut trace = vec![energy];
    let mut step = 1.0f64;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None; // (values, gradient)
    let mut iterations = 0usize;
    let mut grad = gradient_of_values(&current, &current.values, opts);

    loop {
        let gnorm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gnorm < opts.gradient_tolerance {
            return Ok(MinimizeOutcome {
                field: current,
                iterations,
                final_gradient_norm: gnorm,
                energy_trace: trace,
                converged: true,
            });
        }
        if iterations >= opts.max_iterations {
            return Ok(MinimizeOutcome {
                field: current,
                iterations,
                final_gradient_norm: gnorm,
                energy_trace: trace,
                converged: false,
            });
        }

        let gg: f64 = grad.iter().map(|g| g * g).sum();
        // spectral (Barzilai-Borwein) trial step, clamped; Armijo still
        // decides acceptance so the energy stays monotone
        if let Some((pv, pg)) = &prev {
            let mut sy = 0.0;
            let mut ss = 0.0;
            for i in 0..grad.len() {
                let s = current.values[i] - pv[i];
                let y = grad[i] - pg[i];
                sy += s * y;
                ss += s * s;
            }
            if sy > 0.0 && ss > 0.0 {
                step = (ss / sy).clamp(1e-12, 1e6);
            }
        }

        prev = Some((current.values.clone(), grad.clone()));
        let mut t = step;
        let mut accepted = false;
        let mut candidate = vec![0.0; current.values.len()];
        for _ in 0..60 {
            for i in 0..candidate.len() {
                candidate[i] = current.values[i] - t * grad[i];
            }
            let moved = candidate
                .iter()
                .zip(&current.values)
                .any(|(a, b)| a != b);
            if moved && current.values_feasible(&candidate, opts.direction) {
                let e_new = energy_of_values(&current, &candidate, opts);
                if e_new <= energy - opts.armijo_c * t * gg {
                    std::mem::swap(&mut current.values, &mut candidate);
                    debug_assert!(e_new <= energy);
                    energy = e_new;
                    trace.push(energy);
                    accepted = true;
                    break;
                }
            }
            t *= opts.backtrack;
        }
        iterations += 1;
        if !accepted {
            // line search stalled at machine precision
            return Ok(MinimizeOutcome {
                field: current,
                iterations,
                final_gradient_norm: gnorm,
                energy_trace: trace,
                converged: false,
            });
        }
        step = t;
        grad = gradient_of_values(&current, &current.values, opts);
    }
}

/// Euler–Lagrange residual of a field: build the central-difference graph
/// function and evaluate the singular-minimal residual at every interior
/// node.
pub fn el_residual_of_field(field: &Field, opts: &EnergyOpts) -> Result<ResidualReport> {
    opts.validate()?;
    let n = field.dims;
    let u = match opts.direction {
        EnergyDirection::Vertical => Direction::axis(n + 1, n)?,
        EnergyDirection::Horizontal => Direction::axis(n + 1, 0)?,
    };
    let graph = field.to_graph_fn();
    let [_, ny] = field.shape;
    let evals: Vec<(Vec<f64>, Result<f64>)> = field
        .interior_indices()
        .into_iter()
        .map(|idx| {
            let ix = idx / ny;
            let iy = idx % ny;
            let c = field.coord(ix, iy);
            let x = if n == 1 { vec![c[0]] } else { vec![c[0], c[1]] };
            let r = sm_residual_graph(&graph, &u, opts.alpha, &x);
            (x, r)
        })
        .collect();
    ResidualReport::from_evaluations(evals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_constant_field_unit_square() {
        let field = Field::rect([0.0, 1.0], [0.0, 1.0], 11, 11, |_, _| 3.0).unwrap();
        let opts = EnergyOpts::default();
        let e = discrete_energy(&field, &opts).unwrap();
        assert!((e - 3.0).abs() < 1e-12, "energy {e}");

        let area = discrete_energy(
            &field,
            &EnergyOpts {
                alpha: 0.0,
                ..opts
            },
        )
        .unwrap();
        assert!((area - 1.0).abs() < 1e-12, "area {area}");
    }

    #[test]
    fn energy_cosh_line_matches_integral() {
        // ∫ cosh·sqrt(1+sinh²) over [−1,1] = 1 + sinh(2)/2
        let nodes = 2001;
        let mut field = Field::line(-1.0, 1.0, nodes, 1.0_f64.cosh(), 1.0_f64.cosh()).unwrap();
        let values: Vec<f64> = (0..nodes)
            .map(|i| (-1.0 + 2.0 * i as f64 / (nodes - 1) as f64).cosh())
            .collect();
        field.set_values(values).unwrap();
        let e = discrete_energy(&field, &EnergyOpts::default()).unwrap();
        let want = 1.0 + 2.0_f64.sinh() / 2.0;
        assert!((e - want).abs() < 1e-3, "energy {e} vs {want}");
    }

    #[test]
    fn energy_rejects_halfspace_violation() {
        let field = Field::line(0.0, 1.0, 11, -1.0, 1.0).unwrap();
        assert!(matches!(
            discrete_energy(&field, &EnergyOpts::default()),
            Err(Error::Halfspace { .. })
        ));
    }

    // independent central-difference gradient of the discrete energy
    fn fd_energy_gradient(field: &Field, opts: &EnergyOpts, h: f64) -> Vec<f64> {
        let mut out = vec![0.0; field.node_count()];
        let mut values = field.values().to_vec();
        for idx in field.interior_indices() {
            let orig = values[idx];
            values[idx] = orig + h;
            let ep = energy_of_values(field, &values, opts);
            values[idx] = orig - h;
            let em = energy_of_values(field, &values, opts);
            values[idx] = orig;
            out[idx] = (ep - em) / (2.0 * h);
        }
        out
    }

    #[test]
    fn gradient_flat_unit_square_equals_cell_area() {
        let field = Field::rect([0.0, 1.0], [0.0, 1.0], 6, 6, |_, _| 1.0).unwrap();
        let opts = EnergyOpts::default();
        let g = energy_gradient(&field, &opts).unwrap();
        let area = 0.2 * 0.2;
        for idx in field.interior_indices() {
            assert!((g[idx] - area).abs() < 1e-14, "entry {}", g[idx]);
        }
        // finite-difference oracle, h = 1e−6
        let fd = fd_energy_gradient(&field, &opts, 1e-6);
        for idx in field.interior_indices() {
            assert!((g[idx] - fd[idx]).abs() < 1e-9);
        }
    }

    #[test]
    fn gradient_zero_for_line_alpha_zero() {
        let field = Field::line(0.0, 1.0, 21, 1.0, 2.0).unwrap();
        let opts = EnergyOpts {
            alpha: 0.0,
            ..EnergyOpts::default()
        };
        let g = energy_gradient(&field, &opts).unwrap();
        for idx in field.interior_indices() {
            assert!(g[idx].abs() < 1e-14, "entry {}", g[idx]);
        }
    }

    #[test]
    fn gradient_matches_finite_differences_random_fields() {
        let mut rng = crate::rng::SplitMix64::new(2024);
        for trial in 0..20 {
            let alpha = rng.uniform(-2.0, 2.0);
            let opts = EnergyOpts {
                alpha,
                ..EnergyOpts::default()
            };
            let (field, opts) = if trial % 2 == 0 {
                let mut f = Field::line(0.5, 2.0, 14, 1.0, 1.5).unwrap();
                let vals: Vec<f64> = f
                    .values()
                    .iter()
                    .map(|v| v + rng.uniform(-0.2, 0.2))
                    .collect();
                let mut vals = vals;
                vals[0] = 1.0;
                let last = vals.len() - 1;
                vals[last] = 1.5;
                f.set_values(vals).unwrap();
                (f, opts)
            } else {
                let mut f =
                    Field::rect([0.5, 1.5], [0.5, 1.5], 7, 6, |x, y| 1.0 + 0.1 * x + 0.2 * y)
                        .unwrap();
                let vals: Vec<f64> = f
                    .values()
                    .iter()
                    .zip(f.fixed())
                    .map(|(v, &fx)| if fx { *v } else { v + rng.uniform(-0.1, 0.1) })
                    .collect();
                f.set_values(vals).unwrap();
                (f, opts)
            };
            let g = energy_gradient(&field, &opts).unwrap();
            let fd = fd_energy_gradient(&field, &opts, 1e-6);
            let scale = 1.0 + g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for idx in field.interior_indices() {
                assert!(
                    (g[idx] - fd[idx]).abs() < 1e-5 * scale,
                    "trial {trial}: {} vs {}",
                    g[idx],
                    fd[idx]
                );
            }
        }
    }

    #[test]
    fn minimize_alpha_zero_recovers_straight_line() {
        // geodesic: the area functional on an interval is minimized by the
        // line through the boundary values, which is also the default init
        let field = Field::line(0.0, 1.0, 21, 1.0, 2.0).unwrap();
        let opts = EnergyOpts {
            alpha: 0.0,
            gradient_tolerance: 1e-10,
            ..EnergyOpts::default()
        };
        let out = minimize_energy(&field, &opts).unwrap();
        assert!(out.converged);
        for (i, v) in out.field.values().iter().enumerate() {
            let want = 1.0 + i as f64 / 20.0;
            assert!((v - want).abs() < 1e-10, "node {i}: {v} vs {want}");
        }
    }

    #[test]
    fn minimize_alpha_zero_restores_line_from_perturbed_start() {
        let field = Field::line(0.0, 1.0, 21, 1.0, 2.0).unwrap();
        let opts = EnergyOpts {
            alpha: 0.0,
            gradient_tolerance: 1e-8,
            ..EnergyOpts::default()
        };
        let mut start = field.clone();
        let mut vals = start.values().to_vec();
        for (i, v) in vals.iter_mut().enumerate() {
            if !start.fixed()[i] {
                *v += 0.05 * ((i * 37 % 11) as f64 / 11.0 - 0.5);
            }
        }
        start.set_values(vals).unwrap();
        let out = minimize_energy(&start, &opts).unwrap();
        assert!(out.converged, "gradient norm {}", out.final_gradient_norm);
        for (i, v) in out.field.values().iter().enumerate() {
            let want = 1.0 + i as f64 / 20.0;
            assert!((v - want).abs() < 1e-7, "node {i}: {v} vs {want}");
        }
    }

    #[test]
    fn minimize_energy_trace_is_non_increasing() {
        let field = Field::line(-1.0, 1.0, 52, 1.0_f64.cosh(), 1.0_f64.cosh()).unwrap();
        let out = minimize_energy(
            &field,
            &EnergyOpts {
                gradient_tolerance: 1e-9,
                ..EnergyOpts::default()
            },
        )
        .unwrap();
        assert!(out.converged);
        for w in out.energy_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "trace increased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn minimize_1d_catenary_boundary_problem() {
        // 200 interior nodes on [−1, 1] with cosh(1) boundary: minimizer is
        // the catenary
        let field = Field::line(-1.0, 1.0, 202, 1.0_f64.cosh(), 1.0_f64.cosh()).unwrap();
        let out = minimize_energy(&field, &EnergyOpts::default()).unwrap();
        assert!(out.converged, "gradient norm {}", out.final_gradient_norm);
        let mut max_err = 0.0f64;
        for (i, v) in out.field.values().iter().enumerate() {
            let s = -1.0 + 2.0 * i as f64 / 201.0;
            max_err = max_err.max((v - s.cosh()).abs());
        }
        assert!(max_err < 1e-3, "max node error {max_err}");

        let report = el_residual_of_field(&out.field, &EnergyOpts::default()).unwrap();
        assert!(report.rms < 5e-3, "EL residual RMS {}", report.rms);
    }

    #[test]
    fn el_residual_exact_cosh_samples() {
        let nodes = 2001;
        let mut field = Field::line(-1.0, 1.0, nodes, 1.0_f64.cosh(), 1.0_f64.cosh()).unwrap();
        let values: Vec<f64> = (0..nodes)
            .map(|i| (-1.0 + 2.0 * i as f64 / (nodes - 1) as f64).cosh())
            .collect();
        field.set_values(values).unwrap();
        let report = el_residual_of_field(&field, &EnergyOpts::default()).unwrap();
        assert!(report.rms < 1e-6, "rms {}", report.rms);
    }

    #[test]
    fn el_residual_flat_alpha_zero_is_zero() {
        let field = Field::rect([0.0, 1.0], [0.0, 1.0], 9, 9, |_, _| 2.0).unwrap();
        let opts = EnergyOpts {
            alpha: 0.0,
            ..EnergyOpts::default()
        };
        let report = el_residual_of_field(&field, &opts).unwrap();
        assert_eq!(report.max_abs, 0.0);
    }

    #[test]
    fn nonconvergence_is_an_outcome_not_an_error() {
        let field = Field::line(-1.0, 1.0, 102, 1.0_f64.cosh(), 1.0_f64.cosh()).unwrap();
        let out = minimize_energy(
            &field,
            &EnergyOpts {
                max_iterations: 3,
                ..EnergyOpts::default()
            },
        )
        .unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 3);
    }
}
