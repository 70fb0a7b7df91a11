//! Tangent vectors at a polygon, gauge freedom, and the calibrated slice.
//!
//! A tangent vector is a system `{q_α}` with `(q_α, p_α) = 0` and `Σ q_α = 0`.
//! Two systems differing by a global motion `q_α ↦ q_α + [x, p_α]` represent
//! the same tangent vector; the calibrated representative is the one with
//! `Σ [q_α, p_α] / m_α = 0`.

use std::sync::Arc;

use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kaehler::{metric_g, AmbientVector};
use crate::mink3::{mink_bracket, MinkVector};
use crate::polygon::Polygon;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeState {
    Raw,
    Calibrated,
}

#[derive(Clone, Debug)]
pub struct TangentVector {
    base: Arc<Polygon>,
    components: Vec<MinkVector>,
    gauge: GaugeState,
}

impl TangentVector {
    /// Checks conditions i and ii.
    pub fn raw(base: Arc<Polygon>, components: Vec<MinkVector>) -> Result<Self> {
        let t = Self::unchecked(base, components, GaugeState::Raw)?;
        t.check_conditions()?;
        Ok(t)
    }

    /// Checks conditions i, ii and the calibration condition.
    pub fn calibrated(base: Arc<Polygon>, components: Vec<MinkVector>) -> Result<Self> {
        let t = Self::unchecked(base, components, GaugeState::Calibrated)?;
        t.check_conditions()?;
        let scale = t.residual_scale();
        let r = t.calibration_residual();
        if r > tol::TANGENT_REL * scale {
            return Err(Error::NotTangent { condition: "calibration", residual: r });
        }
        Ok(t)
    }

    pub fn zero(base: Arc<Polygon>) -> Self {
        let n = base.n();
        Self { base, components: vec![MinkVector::ZERO; n], gauge: GaugeState::Calibrated }
    }

    pub(crate) fn unchecked(
        base: Arc<Polygon>,
        components: Vec<MinkVector>,
        gauge: GaugeState,
    ) -> Result<Self> {
        if components.len() != base.n() {
            return Err(Error::LengthMismatch { expected: base.n(), found: components.len() });
        }
        Ok(Self { base, components, gauge })
    }

    fn check_conditions(&self) -> Result<()> {
        let scale = self.residual_scale();
        let r1 = self.orthogonality_residual();
        if r1 > tol::TANGENT_REL * scale {
            return Err(Error::NotTangent { condition: "(q_a, p_a) = 0", residual: r1 });
        }
        let r2 = self.closure_residual();
        if r2 > tol::TANGENT_REL * scale {
            return Err(Error::NotTangent { condition: "sum q_a = 0", residual: r2 });
        }
        Ok(())
    }

    fn residual_scale(&self) -> f64 {
        let q = self.components.iter().map(|q| q.euclid_norm()).fold(0.0, f64::max);
        let pm = self
            .base
            .iter()
            .map(|(p, m)| p.euclid_norm().max(p.euclid_norm() / m))
            .fold(0.0, f64::max);
        (q * pm).max(1.0)
    }

    pub fn base(&self) -> &Arc<Polygon> {
        &self.base
    }

    pub fn components(&self) -> &[MinkVector] {
        &self.components
    }

    pub fn gauge_state(&self) -> GaugeState {
        self.gauge
    }

    pub fn is_calibrated(&self) -> bool {
        self.gauge == GaugeState::Calibrated
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    /// `max_α |(q_α, p_α)|`.
    pub fn orthogonality_residual(&self) -> f64 {
        self.components
            .iter()
            .zip(self.base.edges())
            .map(|(q, p)| q.dot(*p).abs())
            .fold(0.0, f64::max)
    }

    /// `‖Σ q_α‖∞`.
    pub fn closure_residual(&self) -> f64 {
        self.components.iter().copied().sum::<MinkVector>().norm_inf()
    }

    /// `Σ [q_α, p_α] / m_α`.
    pub fn calibration_defect(&self) -> MinkVector {
        self.components
            .iter()
            .zip(self.base.iter())
            .map(|(q, (p, m))| mink_bracket(*q, p) / m)
            .sum()
    }

    pub fn calibration_residual(&self) -> f64 {
        self.calibration_defect().norm_inf()
    }

    pub fn to_ambient(&self) -> AmbientVector {
        AmbientVector::new(self.components.clone())
    }

    pub fn norm_inf(&self) -> f64 {
        self.components.iter().map(|q| q.norm_inf()).fold(0.0, f64::max)
    }

    /// Linear combination `a·self + b·other`; calibrated when both inputs are.
    pub fn combine(&self, a: f64, other: &TangentVector, b: f64) -> Result<TangentVector> {
        if !same_base(&self.base, &other.base) {
            return Err(Error::BaseMismatch);
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(x, y)| *x * a + *y * b)
            .collect();
        let gauge = if self.is_calibrated() && other.is_calibrated() {
            GaugeState::Calibrated
        } else {
            GaugeState::Raw
        };
        Ok(Self { base: self.base.clone(), components, gauge })
    }

    pub fn scale(&self, s: f64) -> TangentVector {
        Self {
            base: self.base.clone(),
            components: self.components.iter().map(|q| *q * s).collect(),
            gauge: self.gauge,
        }
    }

    /// Largest componentwise difference.
    pub fn distance_inf(&self, other: &TangentVector) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (*a - *b).norm_inf())
            .fold(0.0, f64::max)
    }

    /// The gauge-orbit energy `−Σ (q_α, q_α) / m_α`, minimized by calibration.
    pub fn gauge_energy(&self) -> f64 {
        -self
            .components
            .iter()
            .zip(self.base.masses())
            .map(|(q, m)| q.norm_sq() / m)
            .sum::<f64>()
    }
}

pub(crate) fn same_base(a: &Arc<Polygon>, b: &Arc<Polygon>) -> bool {
    Arc::ptr_eq(a, b) || a.edges() == b.edges() && a.masses() == b.masses()
}

/// The operator `L(ξ) = Σ_α [p_α, [ξ, p_α]] / m_α` as a 3×3 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LOperator {
    pub matrix: Matrix3<f64>,
}

const METRIC: Matrix3<f64> = Matrix3::new(-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0);

fn to_na(v: MinkVector) -> Vector3<f64> {
    Vector3::new(v.x, v.y, v.z)
}

fn from_na(v: &Vector3<f64>) -> MinkVector {
    MinkVector::new(v[0], v[1], v[2])
}

impl LOperator {
    pub fn apply(&self, xi: MinkVector) -> MinkVector {
        from_na(&(self.matrix * to_na(xi)))
    }

    /// `−G L`, symmetric positive definite away from collinear bases.
    fn energy_matrix(&self) -> Matrix3<f64> {
        -(METRIC * self.matrix)
    }

    /// `σ_min / σ_max`; non-positive when `L` fails to be definite.
    pub fn conditioning(&self) -> f64 {
        let e = SymmetricEigen::new(self.energy_matrix()).eigenvalues;
        let max = e.max();
        let min = e.min();
        if max <= 0.0 {
            0.0
        } else {
            min / max
        }
    }

    /// The unique `ξ` with `L(ξ) = b`.
    pub fn solve(&self, b: MinkVector) -> Result<MinkVector> {
        let ratio = self.conditioning();
        if !(ratio >= tol::SINGULAR_REL) {
            return Err(Error::SingularOperator { ratio });
        }
        let rhs = -(METRIC * to_na(b));
        let chol = self
            .energy_matrix()
            .cholesky()
            .ok_or(Error::SingularOperator { ratio })?;
        Ok(from_na(&chol.solve(&rhs)))
    }
}

/// Assembles `L` columnwise from the expanded form `Σ_α (m_α ξ − (p_α, ξ) p_α / m_α)`.
#[allow(non_snake_case)]
pub fn build_L(base: &Polygon) -> LOperator {
    l_operator(base.iter())
}

pub(crate) fn l_operator(edges: impl Iterator<Item = (MinkVector, f64)>) -> LOperator {
    let mut matrix = Matrix3::zeros();
    for (p, m) in edges {
        let pv = to_na(p);
        let lowered = to_na(p.lower());
        matrix += Matrix3::identity() * m - pv * lowered.transpose() / m;
    }
    LOperator { matrix }
}

#[allow(non_snake_case)]
pub fn solve_L(base: &Polygon, b: MinkVector) -> Result<MinkVector> {
    build_L(base).solve(b)
}

/// `{q_α + [x, p_α]}`, always returned as raw.
pub fn gauge_transform(q: &TangentVector, x: MinkVector) -> TangentVector {
    let components = q
        .components
        .iter()
        .zip(q.base.edges())
        .map(|(qa, p)| *qa + mink_bracket(x, *p))
        .collect();
    TangentVector { base: q.base.clone(), components, gauge: GaugeState::Raw }
}

/// The gauge parameter `x*` that calibrates `q`: `L(x*) = Σ [q_α, p_α] / m_α`.
pub fn calibration_shift(q: &TangentVector) -> Result<MinkVector> {
    solve_L(&q.base, q.calibration_defect())
}

/// The unique calibrated representative in the gauge class of `q`.
pub fn calibrate(q: &TangentVector) -> Result<TangentVector> {
    let x = calibration_shift(q)?;
    let mut out = gauge_transform(q, x);
    out.gauge = GaugeState::Calibrated;
    Ok(out)
}

/// Constraint rows over the `3n` ambient coordinates: orthogonality and closure,
/// plus calibration when `calibrated` is set.
fn constraint_matrix(base: &Polygon, calibrated: bool) -> DMatrix<f64> {
    let n = base.n();
    let rows = n + 3 + if calibrated { 3 } else { 0 };
    let mut c = DMatrix::zeros(rows.max(3 * n), 3 * n);
    for (a, (p, m)) in base.iter().enumerate() {
        let g = p.lower();
        c[(a, 3 * a)] = g.x;
        c[(a, 3 * a + 1)] = g.y;
        c[(a, 3 * a + 2)] = g.z;
        for k in 0..3 {
            c[(n + k, 3 * a + k)] = 1.0;
        }
        if calibrated {
            // [q, p] / m as a linear map of q, one column per basis vector.
            for k in 0..3 {
                let mut e = [0.0; 3];
                e[k] = 1.0;
                let col = mink_bracket(MinkVector::from(e), p) / m;
                c[(n + 3, 3 * a + k)] = col.x;
                c[(n + 4, 3 * a + k)] = col.y;
                c[(n + 5, 3 * a + k)] = col.z;
            }
        }
    }
    c
}

/// Orthonormal (Euclidean) null vectors of the constraint matrix.
fn null_space(c: DMatrix<f64>, expected: usize) -> Result<Vec<Vec<f64>>> {
    let svd = c.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let s = &svd.singular_values;
    let smax = s.max();
    if smax == 0.0 {
        return Err(Error::RankDeficient { expected, found: vt.nrows() });
    }
    let null: Vec<usize> = (0..s.len()).filter(|&i| s[i] < tol::NULL_REL * smax).collect();
    let kept_min = (0..s.len())
        .filter(|i| !null.contains(i))
        .map(|i| s[i])
        .fold(f64::INFINITY, f64::min);
    if null.len() != expected || kept_min < tol::RANK_GAP_REL * smax {
        let found = (0..s.len()).filter(|&i| s[i] < tol::RANK_GAP_REL * smax).count();
        return Err(Error::RankDeficient { expected, found });
    }
    Ok(null.iter().map(|&i| vt.row(i).iter().copied().collect()).collect())
}

fn unflatten(v: &[f64]) -> Vec<MinkVector> {
    v.chunks_exact(3).map(|c| MinkVector::new(c[0], c[1], c[2])).collect()
}

fn flatten(v: &[MinkVector]) -> Vec<f64> {
    v.iter().flat_map(|q| q.to_array()).collect()
}

fn require_regular(base: &Polygon) -> Result<()> {
    let ratio = build_L(base).conditioning();
    if ratio >= tol::SINGULAR_REL {
        Ok(())
    } else {
        Err(Error::SingularOperator { ratio })
    }
}

/// A `g`-orthonormal basis of the calibrated slice, of size `2n − 6`.
pub fn tangent_basis(base: &Arc<Polygon>) -> Result<Vec<TangentVector>> {
    let raw = slice_spanning_set(base)?;
    let mut basis: Vec<TangentVector> = Vec::with_capacity(raw.len());
    for v in raw {
        let mut w = v;
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for b in &basis {
                let c = metric_g(&w, b)?;
                w = w.combine(1.0, b, -c)?;
            }
        }
        let norm = metric_g(&w, &w)?.sqrt();
        basis.push(w.scale(1.0 / norm));
    }
    Ok(basis)
}

/// Null vectors of the calibrated constraint system, orthonormal in the
/// Euclidean sense on `ℝ^{3n}` rather than in `g`.
pub fn slice_spanning_set(base: &Arc<Polygon>) -> Result<Vec<TangentVector>> {
    require_regular(base)?;
    let n = base.n();
    let expected = (2 * n).saturating_sub(6);
    let vecs = null_space(constraint_matrix(base, true), expected)?;
    Ok(vecs
        .iter()
        .map(|v| TangentVector {
            base: base.clone(),
            components: unflatten(v),
            gauge: GaugeState::Calibrated,
        })
        .collect())
}

/// Dimension of the calibrated slice.
pub fn slice_dimension(base: &Arc<Polygon>) -> Result<usize> {
    slice_spanning_set(base).map(|b| b.len())
}

/// Euclidean projection of an ambient vector onto conditions i and ii only,
/// giving a raw (uncalibrated) tangent vector.
pub fn restrict_to_tangent(base: &Arc<Polygon>, x: &AmbientVector) -> Result<TangentVector> {
    let n = base.n();
    if x.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: x.len() });
    }
    let null = null_space(constraint_matrix(base, false), 2 * n - 3)?;
    let flat = flatten(x.components());
    let mut out = vec![0.0; 3 * n];
    for v in &null {
        let c: f64 = v.iter().zip(&flat).map(|(a, b)| a * b).sum();
        for (o, vi) in out.iter_mut().zip(v) {
            *o += c * vi;
        }
    }
    Ok(TangentVector { base: base.clone(), components: unflatten(&out), gauge: GaugeState::Raw })
}

/// Tangent-vector document: `base` is an inline polygon document or a path.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TangentDoc {
    pub base: crate::io::BaseRef,
    pub components: Vec<[f64; 3]>,
    pub gauge_state: GaugeState,
}

impl TangentDoc {
    pub fn from_tangent(q: &TangentVector) -> Self {
        Self {
            base: crate::io::BaseRef::Inline(q.base.to_document()),
            components: q.components.iter().map(|c| c.to_array()).collect(),
            gauge_state: q.gauge,
        }
    }
}
