//! JSON problem-spec schema for the command-line tool: surface family,
//! functions, domain, grid, and options. Parsing is strict (unknown fields
//! rejected, every numeric validated) and never panics on malformed bytes;
//! these entry points are fuzzed.

use serde::{Deserialize, Serialize};

use crate::classify::{classify_affine, classify_cylinder, classify_translation, Classification, ClassifyOpts};
use crate::error::{Error, Result};
use crate::geometry::{Direction, VecN};
use crate::minimize::{EnergyDirection, EnergyOpts, Field};
use crate::residuals::{
    affine_report, cylinder_report, generalized_report, translation_report,
    AffineTranslationSpec, CylinderSpec, GeneralizedTranslationSpec, Grid, Profile,
    ResidualReport, TranslationSpec,
};

/// Single-variable function description. `cosh`/`sinh`/`exp`/`log` take an
/// affine argument: `scale · kind(a·t + b)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Poly {
        coeffs: Vec<f64>,
    },
    Linear {
        slope: f64,
        intercept: f64,
    },
    Cosh {
        #[serde(default = "one")]
        scale: f64,
        #[serde(default = "one")]
        a: f64,
        #[serde(default)]
        b: f64,
    },
    Sinh {
        #[serde(default = "one")]
        scale: f64,
        #[serde(default = "one")]
        a: f64,
        #[serde(default)]
        b: f64,
    },
    Exp {
        #[serde(default = "one")]
        scale: f64,
        #[serde(default = "one")]
        a: f64,
        #[serde(default)]
        b: f64,
    },
    Log {
        #[serde(default = "one")]
        scale: f64,
        #[serde(default = "one")]
        a: f64,
        #[serde(default)]
        b: f64,
    },
    Samples {
        abscissae: Vec<f64>,
        values: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

impl FunctionSpec {
    pub fn build(&self) -> Result<Profile> {
        let check = |vals: &[f64]| -> Result<()> {
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::validation("function parameters must be finite"));
            }
            Ok(())
        };
        match self {
            FunctionSpec::Poly { coeffs } => {
                check(coeffs)?;
                if coeffs.is_empty() {
                    return Err(Error::validation("polynomial needs coefficients"));
                }
                Ok(Profile::poly(coeffs))
            }
            FunctionSpec::Linear { slope, intercept } => {
                check(&[*slope, *intercept])?;
                Ok(Profile::linear(*slope, *intercept))
            }
            FunctionSpec::Cosh { scale, a, b } => {
                check(&[*scale, *a, *b])?;
                let (s, a, b) = (*scale, *a, *b);
                Ok(Profile::new(
                    move |t| s * (a * t + b).cosh(),
                    move |t| s * a * (a * t + b).sinh(),
                    move |t| s * a * a * (a * t + b).cosh(),
                ))
            }
            FunctionSpec::Sinh { scale, a, b } => {
                check(&[*scale, *a, *b])?;
                let (s, a, b) = (*scale, *a, *b);
                Ok(Profile::new(
                    move |t| s * (a * t + b).sinh(),
                    move |t| s * a * (a * t + b).cosh(),
                    move |t| s * a * a * (a * t + b).sinh(),
                ))
            }
            FunctionSpec::Exp { scale, a, b } => {
                check(&[*scale, *a, *b])?;
                let (s, a, b) = (*scale, *a, *b);
                Ok(Profile::new(
                    move |t| s * (a * t + b).exp(),
                    move |t| s * a * (a * t + b).exp(),
                    move |t| s * a * a * (a * t + b).exp(),
                ))
            }
            FunctionSpec::Log { scale, a, b } => {
                check(&[*scale, *a, *b])?;
                let (s, a, b) = (*scale, *a, *b);
                Ok(Profile::new(
                    move |t| s * (a * t + b).ln(),
                    move |t| s * a / (a * t + b),
                    move |t| -s * a * a / ((a * t + b) * (a * t + b)),
                ))
            }
            FunctionSpec::Samples { abscissae, values } => Profile::from_samples(abscissae, values),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecOptions {
    /// classification / reporting tolerance
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// affine shear constant c
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// generalized-translation coefficients c_1..c_{n−1}
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    /// cylinder rulings w_1..w_{n−1} in ℝ^{n+1}
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rulings: Option<Vec<Vec<f64>>>,
    /// orthonormal basis of the cylinder base plane Γ
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plane: Option<Vec<Vec<f64>>>,
}

/// Top-level residual/classify spec file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpecFile {
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    pub functions: Vec<FunctionSpec>,
    pub domain: Vec<[f64; 2]>,
    pub grid: Vec<usize>,
    #[serde(default)]
    pub options: SpecOptions,
}

/// A validated, ready-to-evaluate surface job.
pub enum SurfaceJob {
    Translation {
        spec: TranslationSpec,
        alpha: f64,
        grid: Grid,
        tol: f64,
    },
    Affine {
        spec: AffineTranslationSpec,
        domain: [[f64; 2]; 2],
        alpha: f64,
        grid: Grid,
        tol: f64,
    },
    Generalized {
        spec: GeneralizedTranslationSpec,
        u: Direction,
        alpha: f64,
        grid: Grid,
        tol: f64,
    },
    Cylinder {
        spec: CylinderSpec,
        u: Direction,
        alpha: f64,
        t_grid: Grid,
        t_domain: Vec<[f64; 2]>,
        tol: f64,
    },
}

impl SurfaceJob {
    /// Column names for the CSV output, residual last.
    pub fn columns(&self) -> Vec<String> {
        let coords: Vec<String> = match self {
            SurfaceJob::Translation { spec, .. } => {
                (1..=spec.arity()).map(|i| format!("x{i}")).collect()
            }
            SurfaceJob::Affine { .. } => vec!["xt".into(), "yt".into()],
            SurfaceJob::Generalized { spec, .. } => {
                (1..=spec.arity()).map(|i| format!("x{i}")).collect()
            }
            SurfaceJob::Cylinder { spec, .. } => {
                let mut c = vec!["s".to_string()];
                c.extend((1..spec.arity()).map(|i| format!("t{i}")));
                c
            }
        };
        let mut cols = coords;
        cols.push("residual".into());
        cols
    }

    pub fn evaluate(&self) -> Result<ResidualReport> {
        match self {
            SurfaceJob::Translation {
                spec, alpha, grid, ..
            } => translation_report(spec, *alpha, grid),
            SurfaceJob::Affine {
                spec, alpha, grid, ..
            } => affine_report(spec, *alpha, grid),
            SurfaceJob::Generalized {
                spec,
                u,
                alpha,
                grid,
                ..
            } => generalized_report(spec, u, *alpha, grid),
            SurfaceJob::Cylinder {
                spec,
                u,
                alpha,
                t_grid,
                ..
            } => cylinder_report(spec, u, *alpha, t_grid),
        }
    }

    /// Classify the surface (translation, affine, and cylinder families).
    pub fn classify(&self, opts_in: Option<ClassifyOpts>) -> Result<Classification> {
        let mut opts = opts_in.unwrap_or_default();
        match self {
            SurfaceJob::Translation {
                spec, alpha, tol, ..
            } => {
                opts.tol = *tol;
                classify_translation(spec, *alpha, &opts)
            }
            SurfaceJob::Affine {
                spec,
                domain,
                alpha,
                tol,
                ..
            } => {
                opts.tol = *tol;
                classify_affine(spec, domain, *alpha, &opts)
            }
            SurfaceJob::Cylinder {
                spec,
                u,
                alpha,
                t_domain,
                tol,
                ..
            } => {
                opts.tol = *tol;
                let range = t_domain
                    .first()
                    .copied()
                    .ok_or_else(|| Error::validation("cylinder needs an offset range"))?;
                classify_cylinder(spec, u, *alpha, range, &opts)
            }
            SurfaceJob::Generalized { .. } => Err(Error::validation(
                "classification is defined for the translation, affine, and cylinder families",
            )),
        }
    }
}

fn direction_from(u: &Option<Vec<f64>>, ambient: usize, family: &str) -> Result<Option<Direction>> {
    match u {
        None => Ok(None),
        Some(components) => {
            if components.len() != ambient {
                return Err(Error::validation(format!(
                    "{family}: u must have {ambient} components, got {}",
                    components.len()
                )));
            }
            Ok(Some(Direction::from_components(components)?))
        }
    }
}

/// Check that an optional u equals the pinned axis e_1 for the families
/// whose equation fixes it.
fn require_e1(u: Option<Direction>, ambient: usize, family: &str) -> Result<()> {
    if let Some(dir) = u {
        let e1 = Direction::axis(ambient, 0)?;
        let dot = dir.dot(e1.vec());
        if (dot - 1.0).abs() > 1e-12 {
            return Err(Error::validation(format!(
                "{family} surfaces are pinned to u = e_1; omit u or pass the first axis"
            )));
        }
    }
    Ok(())
}

/// Parse and validate a surface spec from raw bytes.
pub fn parse_surface_spec(bytes: &[u8]) -> Result<SurfaceJob> {
    let file: SurfaceSpecFile = serde_json::from_slice(bytes)
        .map_err(|e| Error::validation(format!("spec file: {e}")))?;
    build_surface_job(&file)
}

pub fn build_surface_job(file: &SurfaceSpecFile) -> Result<SurfaceJob> {
    if !file.alpha.is_finite() {
        return Err(Error::validation("alpha must be finite"));
    }
    let tol = match file.options.tol {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(_) => return Err(Error::validation("tol must be positive")),
        None => 1e-6,
    };
    if file.domain.len() != file.grid.len() {
        return Err(Error::validation(format!(
            "domain has {} axes but grid has {}",
            file.domain.len(),
            file.grid.len()
        )));
    }
    match file.family.as_str() {
        "translation" => {
            let n = file.functions.len();
            if let Some(decl) = file.n {
                if decl != n {
                    return Err(Error::validation(format!(
                        "declared n = {decl} but {n} functions given"
                    )));
                }
            }
            require_e1(
                direction_from(&file.u, n + 1, "translation")?,
                n + 1,
                "translation",
            )?;
            let profiles: Vec<Profile> =
                file.functions.iter().map(|f| f.build()).collect::<Result<_>>()?;
            if file.domain.len() != n {
                return Err(Error::validation(format!(
                    "translation with {n} profiles needs {n} domain axes"
                )));
            }
            let spec = TranslationSpec::new(profiles, file.domain.clone())?;
            let grid = Grid::new(file.domain.clone(), file.grid.clone())?;
            Ok(SurfaceJob::Translation {
                spec,
                alpha: file.alpha,
                grid,
                tol,
            })
        }
        "affine" => {
            if file.functions.len() != 2 {
                return Err(Error::validation("affine family needs exactly [f, g]"));
            }
            if let Some(decl) = file.n {
                if decl != 2 {
                    return Err(Error::validation("affine family is two-dimensional"));
                }
            }
            require_e1(direction_from(&file.u, 3, "affine")?, 3, "affine")?;
            let c = file
                .options
                .c
                .ok_or_else(|| Error::validation("affine family needs options.c"))?;
            let f = file.functions[0].build()?;
            let g = file.functions[1].build()?;
            let spec = AffineTranslationSpec::new(f, g, c)?;
            if file.domain.len() != 2 {
                return Err(Error::validation("affine family needs 2 domain axes"));
            }
            let domain = [file.domain[0], file.domain[1]];
            let grid = Grid::new(file.domain.clone(), file.grid.clone())?;
            Ok(SurfaceJob::Affine {
                spec,
                domain,
                alpha: file.alpha,
                grid,
                tol,
            })
        }
        "generalized" => {
            if file.functions.len() < 2 {
                return Err(Error::validation(
                    "generalized family needs [f_1..f_{n-1}, g]",
                ));
            }
            let n = file.functions.len(); // n−1 profiles + g
            if let Some(decl) = file.n {
                if decl != n {
                    return Err(Error::validation(format!(
                        "declared n = {decl} but functions imply n = {n}"
                    )));
                }
            }
            let u = direction_from(&file.u, n + 1, "generalized")?
                .ok_or_else(|| Error::validation("generalized family needs u"))?;
            let coeffs = file
                .options
                .coefficients
                .clone()
                .ok_or_else(|| Error::validation("generalized family needs options.coefficients"))?;
            if coeffs.len() != n - 1 {
                return Err(Error::validation(format!(
                    "need {} coefficients, got {}",
                    n - 1,
                    coeffs.len()
                )));
            }
            let mut profiles = Vec::with_capacity(n - 1);
            for f in &file.functions[..n - 1] {
                profiles.push(f.build()?);
            }
            let g = file.functions[n - 1].build()?;
            let spec = GeneralizedTranslationSpec::new(profiles, g, coeffs)?;
            if file.domain.len() != n {
                return Err(Error::validation(format!(
                    "generalized family with n = {n} needs {n} domain axes"
                )));
            }
            let grid = Grid::new(file.domain.clone(), file.grid.clone())?;
            Ok(SurfaceJob::Generalized {
                spec,
                u,
                alpha: file.alpha,
                grid,
                tol,
            })
        }
        "cylinder" => {
            if file.functions.len() != 1 {
                return Err(Error::validation(
                    "cylinder family needs exactly one base-curve profile",
                ));
            }
            let rulings_raw = file
                .options
                .rulings
                .as_ref()
                .ok_or_else(|| Error::validation("cylinder family needs options.rulings"))?;
            let plane_raw = file
                .options
                .plane
                .as_ref()
                .ok_or_else(|| Error::validation("cylinder family needs options.plane"))?;
            if plane_raw.len() != 2 {
                return Err(Error::validation("options.plane needs two basis vectors"));
            }
            if rulings_raw.is_empty() {
                return Err(Error::validation("cylinder needs at least one ruling"));
            }
            let ambient = rulings_raw.len() + 2;
            if let Some(decl) = file.n {
                if decl + 1 != ambient {
                    return Err(Error::validation(format!(
                        "declared n = {decl} inconsistent with {} rulings",
                        rulings_raw.len()
                    )));
                }
            }
            let u = direction_from(&file.u, ambient, "cylinder")?
                .ok_or_else(|| Error::validation("cylinder family needs u"))?;
            let rulings: Vec<VecN> = rulings_raw
                .iter()
                .map(|v| VecN::new(v.clone()))
                .collect::<Result<_>>()?;
            let plane = [
                VecN::new(plane_raw[0].clone())?,
                VecN::new(plane_raw[1].clone())?,
            ];
            // domain[0] samples the base parameter; the rest are offsets
            if file.domain.len() != rulings.len() + 1 {
                return Err(Error::validation(format!(
                    "cylinder with {} rulings needs {} domain axes (s plus offsets)",
                    rulings.len(),
                    rulings.len() + 1
                )));
            }
            let s_count = file.grid[0].max(2);
            if s_count > 1_000_000 {
                return Err(Error::validation("base-curve sample count too large"));
            }
            let profile = file.functions[0].build()?;
            let [lo, hi] = file.domain[0];
            if !(lo < hi) {
                return Err(Error::validation("base parameter range needs lo < hi"));
            }
            let mut ss = Vec::with_capacity(s_count);
            let mut fs = Vec::with_capacity(s_count);
            let mut dfs = Vec::with_capacity(s_count);
            let mut d2s = Vec::with_capacity(s_count);
            for i in 0..s_count {
                let s = lo + (hi - lo) * i as f64 / (s_count - 1) as f64;
                ss.push(s);
                fs.push(profile.value(s));
                dfs.push(profile.d1(s));
                d2s.push(profile.d2(s));
            }
            if fs.iter().chain(dfs.iter()).chain(d2s.iter()).any(|v| !v.is_finite()) {
                return Err(Error::validation(
                    "base profile is not finite over the requested range",
                ));
            }
            let base = crate::catenary::PlanarCurveSample::from_graph(&ss, &fs, &dfs, &d2s)?;
            let spec = CylinderSpec::new(rulings, plane, base)?;
            let t_domain: Vec<[f64; 2]> = file.domain[1..].to_vec();
            let t_grid = Grid::new(t_domain.clone(), file.grid[1..].to_vec())?;
            Ok(SurfaceJob::Cylinder {
                spec,
                u,
                alpha: file.alpha,
                t_grid,
                t_domain,
                tol,
            })
        }
        other => Err(Error::validation(format!(
            "unknown family '{other}' (expected translation, affine, generalized, or cylinder)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// minimize spec

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_x: Option<FunctionSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_y: Option<FunctionSpec>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimizeOptions {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradient_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub armijo_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backtrack: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimizeSpecFile {
    pub n: usize,
    pub alpha: f64,
    /// "vertical" or "horizontal"
    pub u: String,
    pub domain: Vec<[f64; 2]>,
    pub grid: Vec<usize>,
    pub boundary: BoundarySpec,
    #[serde(default)]
    pub options: MinimizeOptions,
}

pub struct MinimizeJob {
    pub field: Field,
    pub opts: EnergyOpts,
}

/// Parse and validate a minimize spec from raw bytes.
pub fn parse_minimize_spec(bytes: &[u8]) -> Result<MinimizeJob> {
    let file: MinimizeSpecFile = serde_json::from_slice(bytes)
        .map_err(|e| Error::validation(format!("minimize spec: {e}")))?;
    build_minimize_job(&file)
}

pub fn build_minimize_job(file: &MinimizeSpecFile) -> Result<MinimizeJob> {
    if !file.alpha.is_finite() {
        return Err(Error::validation("alpha must be finite"));
    }
    let direction = match file.u.as_str() {
        "vertical" => EnergyDirection::Vertical,
        "horizontal" => EnergyDirection::Horizontal,
        other => {
            return Err(Error::validation(format!(
                "u must be 'vertical' or 'horizontal', got '{other}'"
            )))
        }
    };
    let defaults = EnergyOpts::default();
    let opts = EnergyOpts {
        alpha: file.alpha,
        direction,
        max_iterations: file.options.max_iterations.unwrap_or(defaults.max_iterations),
        gradient_tolerance: file
            .options
            .gradient_tolerance
            .unwrap_or(defaults.gradient_tolerance),
        armijo_c: file.options.armijo_c.unwrap_or(defaults.armijo_c),
        backtrack: file.options.backtrack.unwrap_or(defaults.backtrack),
    };
    opts.validate()?;
    if file.domain.len() != file.n || file.grid.len() != file.n {
        return Err(Error::validation(
            "domain and grid must match the declared dimension",
        ));
    }
    let field = match file.n {
        1 => {
            let [a, b] = file.domain[0];
            let nodes = file.grid[0];
            let (left, right) = match (&file.boundary.left, &file.boundary.right) {
                (Some(l), Some(r)) => (*l, *r),
                _ => match &file.boundary.profile_x {
                    Some(spec) => {
                        let p = spec.build()?;
                        (p.value(a), p.value(b))
                    }
                    None => {
                        return Err(Error::validation(
                            "1-d boundary needs left/right values or profile_x",
                        ))
                    }
                },
            };
            if !left.is_finite() || !right.is_finite() {
                return Err(Error::validation("boundary values must be finite"));
            }
            Field::line(a, b, nodes, left, right)?
        }
        2 => {
            let px = file
                .boundary
                .profile_x
                .as_ref()
                .map(|s| s.build())
                .transpose()?;
            let py = file
                .boundary
                .profile_y
                .as_ref()
                .map(|s| s.build())
                .transpose()?;
            if px.is_none() && py.is_none() {
                return Err(Error::validation(
                    "2-d boundary needs profile_x and/or profile_y",
                ));
            }
            let boundary = move |x: f64, y: f64| -> f64 {
                px.as_ref().map_or(0.0, |p| p.value(x)) + py.as_ref().map_or(0.0, |p| p.value(y))
            };
            Field::rect(
                file.domain[0],
                file.domain[1],
                file.grid[0],
                file.grid[1],
                boundary,
            )?
        }
        other => {
            return Err(Error::validation(format!(
                "minimizer supports n = 1 or 2, got {other}"
            )))
        }
    };
    // a Dirichlet problem that starts outside the halfspace is unsolvable
    if direction == EnergyDirection::Vertical {
        if let Some(v) = field
            .values()
            .iter()
            .zip(field.fixed())
            .find(|(v, &fx)| fx && **v <= 0.0)
        {
            return Err(Error::validation(format!(
                "infeasible boundary: value {} is not positive",
                v.0
            )));
        }
    } else if field.origin()[0] <= 0.0 {
        return Err(Error::validation(
            "infeasible domain: x range must stay positive for horizontal u",
        ));
    }
    Ok(MinimizeJob { field, opts })
}
