//! Curves through retraction, vector fields, the flat and induced covariant
//! derivatives, `μ`, Lie brackets and the Nijenhuis tensor.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kaehler::{apply_I, metric_g, omega, project_tangent, AmbientVector};
use crate::mink3::{mink_bracket, MinkVector};
use crate::polygon::{polish_constraints, project_to_constraints, Polygon, ProjectionFailure};
use crate::tangent::{solve_L, GaugeState, TangentVector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetractionConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RetractionConfig {
    fn default() -> Self {
        Self { tol: 1e-13, max_iter: 200 }
    }
}

/// Moves `P` along `x` by `t` and projects back onto closure and the mass
/// shells. Masses and label are kept. `cfg.tol` applies at unit edge scale.
pub fn retract(
    base: &Arc<Polygon>,
    x: &TangentVector,
    t: f64,
    cfg: &RetractionConfig,
) -> Result<Arc<Polygon>> {
    if !(cfg.tol > 0.0) {
        return Err(Error::Config(format!("retraction tolerance must be positive, got {}", cfg.tol)));
    }
    if x.n() != base.n() {
        return Err(Error::LengthMismatch { expected: base.n(), found: x.n() });
    }
    if t == 0.0 {
        return Ok(base.clone());
    }
    let mut edges: Vec<MinkVector> =
        base.edges().iter().zip(x.components()).map(|(p, q)| *p + *q * t).collect();
    for (i, (e, p)) in edges.iter().zip(base.edges()).enumerate() {
        // Stay on the sheet of the hyperboloid the edge started on.
        if !(e.norm_sq() > 0.0) || e.z * p.z <= 0.0 {
            return Err(Error::StepTooLarge(format!("edge {i} leaves the time-like cone at t = {t}")));
        }
    }
    // Residual targets follow the rounding floor of the edge coordinates.
    let scale = base.scale().max(1.0);
    let (tol_closure, tol_mass) = (cfg.tol * scale, cfg.tol * scale * scale);
    project_to_constraints(&mut edges, base.masses(), tol_closure, tol_mass, cfg.max_iter).map_err(
        |f| {
            Error::StepTooLarge(match f {
                ProjectionFailure::LeftCone(i) => format!("edge {i} left the time-like cone"),
                ProjectionFailure::Singular => "collinear configuration reached".into(),
                ProjectionFailure::NoConvergence => {
                    format!("no convergence within {} iterations", cfg.max_iter)
                }
            })
        },
    )?;
    polish_constraints(&mut edges, base.masses(), 3);
    let mut p = Polygon::with_masses(edges, base.masses().to_vec())?;
    if let Some(label) = base.label() {
        p = p.with_label(label);
    }
    Ok(Arc::new(p))
}

type Evaluator = dyn Fn(&Arc<Polygon>) -> Result<TangentVector> + Send + Sync;

/// A calibrated tangent vector field on the moduli space.
#[derive(Clone)]
pub struct VectorField {
    id: String,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField").field("id", &self.id).finish_non_exhaustive()
    }
}

impl VectorField {
    pub fn new(
        id: impl Into<String>,
        eval: impl Fn(&Arc<Polygon>) -> Result<TangentVector> + Send + Sync + 'static,
    ) -> Self {
        Self { id: id.into(), eval: Arc::new(eval) }
    }

    /// `P ↦ project_tangent(v, P)`.
    pub fn coordinate(id: impl Into<String>, v: AmbientVector) -> Self {
        Self::new(id, move |p| project_tangent(&v, p))
    }

    pub fn zero() -> Self {
        Self::new("0", |p| Ok(TangentVector::zero(p.clone())))
    }

    /// `P ↦ I(field(P))`.
    pub fn complex(&self) -> Self {
        let inner = self.eval.clone();
        Self { id: format!("I({})", self.id), eval: Arc::new(move |p| apply_I(&inner(p)?)) }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn eval(&self, p: &Arc<Polygon>) -> Result<TangentVector> {
        let q = (self.eval)(p)?;
        if !q.is_calibrated() {
            return Err(Error::NotCalibrated);
        }
        Ok(q)
    }
}

pub fn coordinate_field(v: AmbientVector) -> VectorField {
    VectorField::coordinate("coordinate", v)
}

fn require_positive_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("finite-difference step must be positive, got {h}")))
    }
}

/// Central difference of an ambient-valued map along the curve through `P`
/// with velocity `x`.
pub fn flat_derivative_of<F>(f: F, x: &TangentVector, base: &Arc<Polygon>, h: f64) -> Result<AmbientVector>
where
    F: Fn(&Arc<Polygon>) -> Result<AmbientVector>,
{
    require_positive_step(h)?;
    let cfg = RetractionConfig::default();
    let plus = f(&retract(base, x, h, &cfg)?)?;
    let minus = f(&retract(base, x, -h, &cfg)?)?;
    Ok((&plus - &minus).scale(0.5 / h))
}

/// Central difference of a scalar function along the curve through `P`.
pub fn directional_derivative<F>(f: F, x: &TangentVector, base: &Arc<Polygon>, h: f64) -> Result<f64>
where
    F: Fn(&Arc<Polygon>) -> Result<f64>,
{
    require_positive_step(h)?;
    let cfg = RetractionConfig::default();
    let plus = f(&retract(base, x, h, &cfg)?)?;
    let minus = f(&retract(base, x, -h, &cfg)?)?;
    Ok((plus - minus) * 0.5 / h)
}

/// `∂_x y` in the ambient representation.
pub fn flat_derivative(
    y: &VectorField,
    x: &TangentVector,
    base: &Arc<Polygon>,
    h: f64,
) -> Result<AmbientVector> {
    flat_derivative_of(|p| Ok(y.eval(p)?.to_ambient()), x, base, h)
}

/// `∇_x y = ∂_x y − π(∂_x y)`.
pub fn covariant_derivative(
    y: &VectorField,
    x: &TangentVector,
    base: &Arc<Polygon>,
    h: f64,
) -> Result<TangentVector> {
    project_tangent(&flat_derivative(y, x, base, h)?, base)
}

/// `μ(x, y)`: the solution of `L(μ) = Σ [x_α, [y_α, p_α]] / m_α²`.
pub fn mu(x: &TangentVector, y: &TangentVector, base: &Polygon) -> Result<MinkVector> {
    for q in [x, y] {
        if q.n() != base.n() {
            return Err(Error::LengthMismatch { expected: base.n(), found: q.n() });
        }
    }
    let rhs: MinkVector = x
        .components()
        .iter()
        .zip(y.components())
        .zip(base.iter())
        .map(|((a, b), (p, m))| mink_bracket(*a, mink_bracket(*b, p)) / (m * m))
        .sum();
    solve_L(base, rhs)
}

/// `∇_x y` from the expanded formula
/// `∂_x y_α − (∂_x y_α, p_α) p_α / m_α² + [p_α, [μ(x,y), p_α]] / m_α − [μ(Iy,x), p_α]`.
pub fn covariant_derivative_expanded(
    y: &VectorField,
    x: &TangentVector,
    base: &Arc<Polygon>,
    h: f64,
) -> Result<TangentVector> {
    let dy = flat_derivative(y, x, base, h)?;
    let y0 = y.eval(base)?;
    let xi = mu(x, &y0, base)?;
    let w = mu(&apply_I(&y0)?, x, base)?;
    let comps = dy
        .components()
        .iter()
        .zip(base.iter())
        .map(|(d, (p, m))| {
            *d - p * (d.dot(p) / (m * m)) + mink_bracket(p, mink_bracket(xi, p)) / m
                - mink_bracket(w, p)
        })
        .collect();
    // Tangent only up to the truncation error of `∂_x y`.
    TangentVector::unchecked(base.clone(), comps, GaugeState::Calibrated)
}

/// `[x, y] = ∇_x y − ∇_y x` at `P`.
pub fn lie_bracket(xf: &VectorField, yf: &VectorField, base: &Arc<Polygon>, h: f64) -> Result<TangentVector> {
    let x = xf.eval(base)?;
    let y = yf.eval(base)?;
    let a = covariant_derivative(yf, &x, base, h)?;
    let b = covariant_derivative(xf, &y, base, h)?;
    a.combine(1.0, &b, -1.0)
}

/// `N_I(x, y) = ½([Ix, Iy] − [x, y] − I[Ix, y] − I[x, Iy])`.
pub fn nijenhuis(xf: &VectorField, yf: &VectorField, base: &Arc<Polygon>, h: f64) -> Result<TangentVector> {
    let ix = xf.complex();
    let iy = yf.complex();
    let a = lie_bracket(&ix, &iy, base, h)?;
    let b = lie_bracket(xf, yf, base, h)?;
    let c = apply_I(&lie_bracket(&ix, yf, base, h)?)?;
    let d = apply_I(&lie_bracket(xf, &iy, base, h)?)?;
    let ab = a.combine(0.5, &b, -0.5)?;
    let cd = c.combine(-0.5, &d, -0.5)?;
    ab.combine(1.0, &cd, 1.0)
}

/// `‖q‖_g`.
pub fn g_norm(q: &TangentVector) -> Result<f64> {
    Ok(metric_g(q, q)?.max(0.0).sqrt())
}

pub fn nijenhuis_norm(xf: &VectorField, yf: &VectorField, base: &Arc<Polygon>, h: f64) -> Result<f64> {
    g_norm(&nijenhuis(xf, yf, base, h)?)
}

/// The exterior derivative of `ω` on three vector fields,
/// `Xω(Y,Z) − Yω(X,Z) + Zω(X,Y) − ω([X,Y],Z) + ω([X,Z],Y) − ω([Y,Z],X)`.
pub fn d_omega(
    xf: &VectorField,
    yf: &VectorField,
    zf: &VectorField,
    base: &Arc<Polygon>,
    h: f64,
) -> Result<f64> {
    let x = xf.eval(base)?;
    let y = yf.eval(base)?;
    let z = zf.eval(base)?;
    let pair = |a: &VectorField, b: &VectorField| {
        let (a, b) = (a.clone(), b.clone());
        move |p: &Arc<Polygon>| omega(&a.eval(p)?, &b.eval(p)?)
    };
    let x_yz = directional_derivative(pair(yf, zf), &x, base, h)?;
    let y_xz = directional_derivative(pair(xf, zf), &y, base, h)?;
    let z_xy = directional_derivative(pair(xf, yf), &z, base, h)?;
    let xy = lie_bracket(xf, yf, base, h)?;
    let xz = lie_bracket(xf, zf, base, h)?;
    let yz = lie_bracket(yf, zf, base, h)?;
    Ok(x_yz - y_xz + z_xy - omega(&xy, &z)? + omega(&xz, &y)? - omega(&yz, &x)?)
}

/// Least-squares slope of `log r` against `log h`. Pairs with a non-positive
/// residual are skipped.
pub fn loglog_slope(hs: &[f64], residuals: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .zip(residuals)
        .filter(|(h, r)| **h > 0.0 && **r > 0.0)
        .map(|(h, r)| (h.ln(), r.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
