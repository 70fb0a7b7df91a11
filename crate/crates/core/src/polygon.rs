//! Closed polygons with time-like edges of prescribed masses.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mink3::{mink_bracket, MinkVector};
use crate::tol;

/// A point of the space of closed polygons: an ordered list of edges `p_α`
/// with `Σ p_α = 0` and `(p_α, p_α) = m_α²`.
///
/// Constructors do not enforce the constraints so that invalid and singular
/// configurations stay representable; call [`Polygon::validate`] or use
/// [`Polygon::new`] for a checked value.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    edges: Vec<MinkVector>,
    masses: Vec<f64>,
    label: Option<String>,
}

/// One failed polygon constraint.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum Violation {
    Arity { n: usize },
    NonFinite { index: usize },
    Closure { residual: f64, defect: [f64; 3] },
    MassShell { index: usize, dot: f64, mass: f64, residual: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Arity { n } => write!(f, "arity: need at least 3 edges, got {n}"),
            Violation::NonFinite { index } => write!(f, "edge {index} has non-finite coordinates"),
            Violation::Closure { residual, defect } => write!(
                f,
                "closure: |sum of edges| = {residual:e} (defect [{}, {}, {}])",
                defect[0], defect[1], defect[2]
            ),
            Violation::MassShell { index, dot, mass, residual } => write!(
                f,
                "mass shell at edge {index}: (p,p) = {dot}, m = {mass}, residual {residual:e}"
            ),
        }
    }
}

impl Polygon {
    /// Builds a polygon from edges and checks it at the default tolerances.
    pub fn new(edges: Vec<MinkVector>) -> Result<Self> {
        let p = Self::from_edges(edges);
        p.check(tol::CLOSURE, tol::MASS)?;
        Ok(p)
    }

    /// Masses are derived as `√(p, p)`; non-time-like edges get mass 0.
    pub fn from_edges(edges: Vec<MinkVector>) -> Self {
        let masses = edges.iter().map(|p| p.norm_sq().max(0.0).sqrt()).collect();
        Self { edges, masses, label: None }
    }

    pub fn with_masses(edges: Vec<MinkVector>, masses: Vec<f64>) -> Result<Self> {
        if edges.len() != masses.len() {
            return Err(Error::LengthMismatch { expected: edges.len(), found: masses.len() });
        }
        Ok(Self { edges, masses, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// The square `{(½,0,1), (−½,0,1), (0,½,−1), (0,−½,−1)}`, all masses `√¾`.
    pub fn square() -> Self {
        Self::from_edges(vec![
            MinkVector::new(0.5, 0.0, 1.0),
            MinkVector::new(-0.5, 0.0, 1.0),
            MinkVector::new(0.0, 0.5, -1.0),
            MinkVector::new(0.0, -0.5, -1.0),
        ])
        .with_label("square")
    }

    pub fn n(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[MinkVector] {
        &self.edges
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn edge(&self, i: usize) -> MinkVector {
        self.edges[i]
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.masses[i]
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn mean_mass(&self) -> f64 {
        self.total_mass() / self.n() as f64
    }

    /// Largest Euclidean edge length.
    pub fn scale(&self) -> f64 {
        self.edges.iter().map(|p| p.euclid_norm()).fold(0.0, f64::max)
    }

    pub fn closure_defect(&self) -> MinkVector {
        self.edges.iter().copied().sum()
    }

    /// Iterates `(p_α, m_α)`.
    pub fn iter(&self) -> impl Iterator<Item = (MinkVector, f64)> + '_ {
        self.edges.iter().copied().zip(self.masses.iter().copied())
    }

    /// Lists every violated constraint. Empty means valid.
    pub fn validate(&self, tol_closure: f64, tol_mass: f64) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.n() < 3 {
            out.push(Violation::Arity { n: self.n() });
        }
        let mut finite = true;
        for (i, p) in self.edges.iter().enumerate() {
            if !p.is_finite() || !self.masses[i].is_finite() {
                out.push(Violation::NonFinite { index: i });
                finite = false;
            }
        }
        if !finite {
            return out;
        }
        let d = self.closure_defect();
        if d.norm_inf() >= tol_closure {
            out.push(Violation::Closure { residual: d.norm_inf(), defect: d.to_array() });
        }
        for (i, (p, m)) in self.iter().enumerate() {
            let dot = p.norm_sq();
            let residual = (dot - m * m).abs();
            if m <= 0.0 || dot <= 0.0 || residual >= tol_mass {
                out.push(Violation::MassShell { index: i, dot, mass: m, residual });
            }
        }
        out
    }

    pub fn is_valid(&self, tol_closure: f64, tol_mass: f64) -> bool {
        self.validate(tol_closure, tol_mass).is_empty()
    }

    fn check(&self, tol_closure: f64, tol_mass: f64) -> Result<()> {
        let v = self.validate(tol_closure, tol_mass);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Pairwise bracket norms; collinear configurations are the singular points.
    pub fn detect_degeneracy(&self, tol_collinear: f64) -> DegeneracyReport {
        let mut max = 0.0_f64;
        let mut min = f64::INFINITY;
        for a in 0..self.n() {
            for b in a + 1..self.n() {
                let s = mink_bracket(self.edges[a], self.edges[b]).euclid_norm();
                max = max.max(s);
                min = min.min(s);
            }
        }
        if !min.is_finite() {
            min = 0.0;
        }
        DegeneracyReport {
            max_pair_bracket_norm: max,
            min_bracket_norm: min,
            collinear: max < tol_collinear,
        }
    }

    /// [`Self::detect_degeneracy`] at `1e-9 · (mean mass)²`.
    pub fn degeneracy(&self) -> DegeneracyReport {
        let m = self.mean_mass();
        self.detect_degeneracy(tol::COLLINEAR_REL * m * m)
    }

    pub fn to_document(&self) -> PolygonDoc {
        PolygonDoc {
            n: self.n(),
            edges: self.edges.iter().map(|p| p.to_array()).collect(),
            masses: Some(self.masses.clone()),
            label: self.label.clone(),
        }
    }

    /// Reads a document without validating it.
    pub fn from_document(doc: PolygonDoc) -> Result<Self> {
        if doc.n != doc.edges.len() {
            return Err(Error::Parse(format!(
                "field n = {} but {} edges given",
                doc.n,
                doc.edges.len()
            )));
        }
        let edges: Vec<MinkVector> = doc.edges.into_iter().map(MinkVector::from).collect();
        let mut p = match doc.masses {
            Some(m) => Self::with_masses(edges, m)
                .map_err(|e| Error::Parse(format!("masses: {e}")))?,
            None => Self::from_edges(edges),
        };
        p.label = doc.label;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serialize(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        deserialize(text)
    }
}

/// Collinearity measures of a polygon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DegeneracyReport {
    pub max_pair_bracket_norm: f64,
    pub min_bracket_norm: f64,
    pub collinear: bool,
}

/// On-disk polygon document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonDoc {
    pub n: usize,
    pub edges: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

pub fn serialize(p: &Polygon) -> String {
    serde_json::to_string_pretty(&p.to_document()).expect("polygon documents always serialize")
}

/// Parses and validates at the default tolerances.
pub fn deserialize(text: &str) -> Result<Polygon> {
    deserialize_with(text, tol::CLOSURE, tol::MASS)
}

pub fn deserialize_with(text: &str, tol_closure: f64, tol_mass: f64) -> Result<Polygon> {
    let doc: PolygonDoc = serde_json::from_str(text)?;
    let p = Polygon::from_document(doc)?;
    p.check(tol_closure, tol_mass)?;
    Ok(p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleOptions {
    /// Cap on the hyperbolic angle of the initial draws.
    pub rapidity_max: f64,
    pub tol_closure: f64,
    pub tol_mass: f64,
    pub max_iter: usize,
    pub max_retries: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            rapidity_max: 1.0,
            tol_closure: tol::CLOSURE,
            tol_mass: tol::MASS,
            max_iter: tol::SAMPLER_MAX_ITER,
            max_retries: tol::SAMPLER_MAX_RETRIES,
        }
    }
}

/// Draws a random valid, non-collinear polygon with the given masses.
///
/// Edges start uniformly on their mass shells with random time orientation and
/// are then pushed onto the constraint set by alternating projections. Draws
/// whose orientation pattern cannot close, that fail to converge, or that land
/// on a collinear configuration are discarded and redrawn.
pub fn sample(n: usize, masses: &[f64], seed: u64, opts: &SampleOptions) -> Result<Polygon> {
    if n < 3 {
        return Err(Error::Config(format!("need n >= 3, got {n}")));
    }
    if masses.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: masses.len() });
    }
    if let Some(&m) = masses.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
        return Err(Error::InvalidMass(m));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean = masses.iter().sum::<f64>() / n as f64;
    let tol_collinear = tol::COLLINEAR_REL * mean * mean;

    for _ in 0..opts.max_retries {
        let mut future = vec![false; n];
        let mut edges = Vec::with_capacity(n);
        for (i, &m) in masses.iter().enumerate() {
            future[i] = rng.random_bool(0.5);
            let r = rng.random_range(0.0..opts.rapidity_max);
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let sign = if future[i] { 1.0 } else { -1.0 };
            edges.push(MinkVector::new(
                m * r.sinh() * theta.cos(),
                m * r.sinh() * theta.sin(),
                sign * m * r.cosh(),
            ));
        }
        if !orientation_admits_closure(masses, &future) {
            continue;
        }
        if project_to_constraints(&mut edges, masses, opts.tol_closure, opts.tol_mass, opts.max_iter)
            .is_err()
        {
            continue;
        }
        polish_constraints(&mut edges, masses, 3);
        let p = Polygon { edges, masses: masses.to_vec(), label: None };
        if p.detect_degeneracy(tol_collinear).collinear {
            continue;
        }
        if p.is_valid(opts.tol_closure, opts.tol_mass) {
            return Ok(p);
        }
    }
    Err(Error::NoClosure { attempts: opts.max_retries })
}

/// Reverse triangle inequality: a sum of `k ≥ 2` co-oriented time-like vectors
/// can have any mass above the sum of theirs, a single one only its own. The
/// future and past groups must be able to reach a common mass.
pub fn orientation_admits_closure(masses: &[f64], future: &[bool]) -> bool {
    let (mut nf, mut np, mut sf, mut sp) = (0usize, 0usize, 0.0, 0.0);
    for (&m, &f) in masses.iter().zip(future) {
        if f {
            nf += 1;
            sf += m;
        } else {
            np += 1;
            sp += m;
        }
    }
    match (nf, np) {
        (0, _) | (_, 0) => false,
        (1, 1) => false,
        (1, _) => sf > sp,
        (_, 1) => sp > sf,
        _ => true,
    }
}

/// Whether any time-orientation pattern admits a closed polygon.
pub fn masses_admit_closure(masses: &[f64]) -> bool {
    let n = masses.len();
    if n >= 4 {
        // Two or more edges on each side always works.
        return true;
    }
    (0..1u32 << n).any(|bits| {
        let future: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
        orientation_admits_closure(masses, &future)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum ProjectionFailure {
    LeftCone(usize),
    Singular,
    NoConvergence,
}

/// Alternates the mass-shell renormalization `q_α ← m_α q_α / √(q_α, q_α)`
/// with a closure correction until both residuals are below tolerance.
/// Returns the iteration count.
///
/// The closure defect `d = Σ q` is shared out along the mass-shell tangents,
/// `q_α ← q_α − [q_α, [y, q_α]] / m_α` with `L(y) = d`. The plain
/// mass-proportional share `m_α d / Σm` differs from this only by radial terms,
/// which the renormalization undoes; what is left over has the wrong sign in
/// time-like directions and the iteration runs away.
pub(crate) fn project_to_constraints(
    edges: &mut [MinkVector],
    masses: &[f64],
    tol_closure: f64,
    tol_mass: f64,
    max_iter: usize,
) -> std::result::Result<usize, ProjectionFailure> {
    for it in 0..max_iter {
        let mut mass_res = 0.0_f64;
        for (i, (q, &m)) in edges.iter_mut().zip(masses).enumerate() {
            let s = q.norm_sq();
            if !(s > 0.0) {
                return Err(ProjectionFailure::LeftCone(i));
            }
            *q = *q * (m / s.sqrt());
            mass_res = mass_res.max((q.norm_sq() - m * m).abs());
        }
        let defect: MinkVector = edges.iter().copied().sum();
        if defect.norm_inf() < tol_closure && mass_res < tol_mass {
            return Ok(it);
        }
        let y = crate::tangent::l_operator(edges.iter().copied().zip(masses.iter().copied()))
            .solve(defect)
            .map_err(|_| ProjectionFailure::Singular)?;
        let step: Vec<MinkVector> = edges
            .iter()
            .zip(masses)
            .map(|(q, &m)| mink_bracket(*q, mink_bracket(y, *q)) / m)
            .collect();
        // Full steps near the solution; halve while far away.
        let mut lambda = 1.0;
        loop {
            let trial: Vec<MinkVector> =
                edges.iter().zip(&step).map(|(q, s)| *q - *s * lambda).collect();
            if lambda < 1e-6 {
                return Err(ProjectionFailure::NoConvergence);
            }
            if let Some(d) = renormalized_defect(&trial, masses) {
                if d < defect.norm_inf() || d < tol_closure {
                    edges.copy_from_slice(&trial);
                    break;
                }
            }
            lambda *= 0.5;
        }
    }
    Err(ProjectionFailure::NoConvergence)
}

/// Extra full closure steps after convergence, kept only while they reduce the
/// closure defect. Drives the residuals down to rounding level.
pub(crate) fn polish_constraints(edges: &mut [MinkVector], masses: &[f64], steps: usize) {
    for _ in 0..steps {
        let defect: MinkVector = edges.iter().copied().sum();
        let current = defect.norm_inf();
        if current == 0.0 {
            return;
        }
        let Ok(y) = crate::tangent::l_operator(edges.iter().copied().zip(masses.iter().copied())).solve(defect)
        else {
            return;
        };
        let mut trial: Vec<MinkVector> = edges
            .iter()
            .zip(masses)
            .map(|(q, &m)| *q - mink_bracket(*q, mink_bracket(y, *q)) / m)
            .collect();
        for (q, &m) in trial.iter_mut().zip(masses) {
            let s = q.norm_sq();
            if !(s > 0.0) {
                return;
            }
            *q = *q * (m / s.sqrt());
        }
        let next = trial.iter().copied().sum::<MinkVector>().norm_inf();
        if next >= current {
            return;
        }
        edges.copy_from_slice(&trial);
    }
}

fn renormalized_defect(edges: &[MinkVector], masses: &[f64]) -> Option<f64> {
    let mut sum = MinkVector::ZERO;
    for (q, &m) in edges.iter().zip(masses) {
        let s = q.norm_sq();
        if !(s > 0.0) {
            return None;
        }
        sum += *q * (m / s.sqrt());
    }
    Some(sum.norm_inf())
}
