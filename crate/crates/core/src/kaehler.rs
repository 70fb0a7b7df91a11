//! Complex structure, symplectic form, metric and the normal projection.

use std::ops::{Add, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mink3::{mink_bracket, MinkVector};
use crate::polygon::Polygon;
use crate::tangent::{build_L, same_base, GaugeState, TangentVector};

/// An element of `(M³)ⁿ`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AmbientVector {
    components: Vec<MinkVector>,
}

impl AmbientVector {
    pub fn new(components: Vec<MinkVector>) -> Self {
        Self { components }
    }

    pub fn zeros(n: usize) -> Self {
        Self { components: vec![MinkVector::ZERO; n] }
    }

    /// Supported on a single edge.
    pub fn unit(n: usize, index: usize, value: MinkVector) -> Self {
        let mut a = Self::zeros(n);
        a.components[index] = value;
        a
    }

    pub fn components(&self) -> &[MinkVector] {
        &self.components
    }

    pub fn into_components(self) -> Vec<MinkVector> {
        self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { components: self.components.iter().map(|c| *c * s).collect() }
    }

    pub fn norm_inf(&self) -> f64 {
        self.components.iter().map(|c| c.norm_inf()).fold(0.0, f64::max)
    }
}

impl Add for &AmbientVector {
    type Output = AmbientVector;
    fn add(self, o: &AmbientVector) -> AmbientVector {
        AmbientVector::new(self.components.iter().zip(&o.components).map(|(a, b)| *a + *b).collect())
    }
}

impl Sub for &AmbientVector {
    type Output = AmbientVector;
    fn sub(self, o: &AmbientVector) -> AmbientVector {
        AmbientVector::new(self.components.iter().zip(&o.components).map(|(a, b)| *a - *b).collect())
    }
}

fn require_calibrated(q: &TangentVector) -> Result<()> {
    if q.is_calibrated() {
        Ok(())
    } else {
        Err(Error::NotCalibrated)
    }
}

fn require_same_base(a: &TangentVector, b: &TangentVector) -> Result<()> {
    if same_base(a.base(), b.base()) {
        Ok(())
    } else {
        Err(Error::BaseMismatch)
    }
}

/// `(Iq)_α = [q_α, p_α] / m_α` on calibrated vectors.
#[allow(non_snake_case)]
pub fn apply_I(q: &TangentVector) -> Result<TangentVector> {
    require_calibrated(q)?;
    let components = q
        .components()
        .iter()
        .zip(q.base().iter())
        .map(|(qa, (p, m))| mink_bracket(*qa, p) / m)
        .collect();
    TangentVector::unchecked(q.base().clone(), components, GaugeState::Calibrated)
}

/// `ω(q, q') = Σ_α ([q_α, q'_α], p_α) / m_α²`. Gauge invariant, so raw inputs
/// are accepted.
pub fn omega(q: &TangentVector, q2: &TangentVector) -> Result<f64> {
    require_same_base(q, q2)?;
    Ok(q.components()
        .iter()
        .zip(q2.components())
        .zip(q.base().iter())
        .map(|((a, b), (p, m))| mink_bracket(*a, *b).dot(p) / (m * m))
        .sum())
}

/// `g(q, q') = −Σ_α (q_α, q'_α) / m_α` on calibrated vectors.
pub fn metric_g(q: &TangentVector, q2: &TangentVector) -> Result<f64> {
    require_calibrated(q)?;
    require_calibrated(q2)?;
    require_same_base(q, q2)?;
    Ok(-q
        .components()
        .iter()
        .zip(q2.components())
        .zip(q.base().masses())
        .map(|((a, b), m)| a.dot(*b) / m)
        .sum::<f64>())
}

/// The defining route `g(q, q') = −ω(Iq, q')`.
pub fn metric_g_from_omega(q: &TangentVector, q2: &TangentVector) -> Result<f64> {
    require_calibrated(q2)?;
    Ok(-omega(&apply_I(q)?, q2)?)
}

/// `Ω(q, q') = g(q, q') + i ω(q, q')`.
pub fn kaehler_form(q: &TangentVector, q2: &TangentVector) -> Result<Complex64> {
    Ok(Complex64::new(metric_g(q, q2)?, omega(q, q2)?))
}

/// `(x, y) = Σ_α (x_α, y_α) / m_α` on `(M³)ⁿ`.
pub fn ambient_dot(x: &AmbientVector, y: &AmbientVector, base: &Polygon) -> Result<f64> {
    let n = base.n();
    for v in [x, y] {
        if v.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: v.len() });
        }
    }
    Ok(x.components
        .iter()
        .zip(&y.components)
        .zip(base.masses())
        .map(|((a, b), m)| a.dot(*b) / m)
        .sum())
}

/// The two gauge parameters that determine the normal part of an ambient vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionData {
    /// `L(ξ) = Σ [p_α, [x_α, p_α]] / m_α²`.
    pub xi: MinkVector,
    /// `L(w) = Σ [p_α, x_α] / m_α`.
    pub w: MinkVector,
}

pub fn projection_data(x: &AmbientVector, base: &Polygon) -> Result<ProjectionData> {
    if x.len() != base.n() {
        return Err(Error::LengthMismatch { expected: base.n(), found: x.len() });
    }
    let mut rhs_xi = MinkVector::ZERO;
    let mut rhs_w = MinkVector::ZERO;
    for (xa, (p, m)) in x.components.iter().zip(base.iter()) {
        rhs_xi += mink_bracket(p, mink_bracket(*xa, p)) / (m * m);
        rhs_w += mink_bracket(p, *xa) / m;
    }
    let l = build_L(base);
    Ok(ProjectionData { xi: l.solve(rhs_xi)?, w: l.solve(rhs_w)? })
}

/// Assembles `(πx)_α = (x_α, p_α) p_α / m_α² + [p_α, [ξ, p_α]] / m_α + [w, p_α]`.
pub fn normal_from_data(x: &AmbientVector, base: &Polygon, d: &ProjectionData) -> AmbientVector {
    AmbientVector::new(
        x.components
            .iter()
            .zip(base.iter())
            .map(|(xa, (p, m))| {
                p * (xa.dot(p) / (m * m))
                    + mink_bracket(p, mink_bracket(d.xi, p)) / m
                    + mink_bracket(d.w, p)
            })
            .collect(),
    )
}

/// Orthogonal projection onto the normal space `N_P` for the ambient form.
pub fn project_normal(x: &AmbientVector, base: &Polygon) -> Result<AmbientVector> {
    let d = projection_data(x, base)?;
    Ok(normal_from_data(x, base, &d))
}

/// The complementary projection `x − πx`, a calibrated tangent vector.
pub fn project_tangent(x: &AmbientVector, base: &Arc<Polygon>) -> Result<TangentVector> {
    let normal = project_normal(x, base)?;
    TangentVector::unchecked(base.clone(), (x - &normal).into_components(), GaugeState::Calibrated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tangent::{gauge_transform, restrict_to_tangent, tangent_basis};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square() -> Arc<Polygon> {
        Arc::new(Polygon::square())
    }

    fn rv(rng: &mut ChaCha8Rng) -> MinkVector {
        MinkVector::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        )
    }

    fn ra(rng: &mut ChaCha8Rng, n: usize) -> AmbientVector {
        AmbientVector::new((0..n).map(|_| rv(rng)).collect())
    }

    fn random_calibrated(p: &Arc<Polygon>, rng: &mut ChaCha8Rng) -> TangentVector {
        project_tangent(&ra(rng, p.n()), p).unwrap()
    }

    #[test]
    fn i_squares_to_minus_one() {
        let p = square();
        for q in tangent_basis(&p).unwrap() {
            let iq = apply_I(&q).unwrap();
            assert!(iq.calibration_residual() < 1e-10);
            let iiq = apply_I(&iq).unwrap();
            assert!(iiq.combine(1.0, &q, 1.0).unwrap().norm_inf() < 1e-10);
            for ((a, b), e) in iq.components().iter().zip(q.components()).zip(p.edges()) {
                assert!(a.dot(*b).abs() < 1e-12);
                assert!(a.dot(*e).abs() < 1e-12);
            }
        }
        let z = TangentVector::zero(p.clone());
        assert_eq!(apply_I(&z).unwrap().norm_inf(), 0.0);
    }

    #[test]
    fn i_rejects_raw() {
        let p = square();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let raw = restrict_to_tangent(&p, &ra(&mut rng, 4)).unwrap();
        assert!(matches!(apply_I(&raw), Err(Error::NotCalibrated)));
        assert!(matches!(metric_g(&raw, &raw), Err(Error::NotCalibrated)));
    }

    #[test]
    fn omega_properties() {
        let p = square();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let q = random_calibrated(&p, &mut rng);
            let q2 = random_calibrated(&p, &mut rng);
            assert_eq!(omega(&q, &q).unwrap(), 0.0);
            let w = omega(&q, &q2).unwrap();
            assert_eq!(w, -omega(&q2, &q).unwrap());
            let a = gauge_transform(&q, rv(&mut rng));
            let b = gauge_transform(&q2, rv(&mut rng));
            assert!((omega(&a, &b).unwrap() - w).abs() < 1e-11);
            // ω(q, Iq) = −Σ (q_α, q_α) / m_α, evaluated independently.
            let direct: f64 =
                -q.components().iter().zip(p.masses()).map(|(c, m)| c.norm_sq() / m).sum::<f64>();
            let wi = omega(&q, &apply_I(&q).unwrap()).unwrap();
            assert!((wi - direct).abs() < 1e-12);
            assert!(wi > 0.0);
        }
    }

    #[test]
    fn metric_two_routes_agree() {
        let p = square();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let q = random_calibrated(&p, &mut rng);
            let q2 = random_calibrated(&p, &mut rng);
            let g = metric_g(&q, &q2).unwrap();
            assert!((g - metric_g(&q2, &q).unwrap()).abs() < 1e-12);
            assert!((g - metric_g_from_omega(&q, &q2).unwrap()).abs() < 1e-11);
            // and the compatibility g(q, q') = ω(q, Iq')
            assert!((g - omega(&q, &apply_I(&q2).unwrap()).unwrap()).abs() < 1e-11);
            assert!(metric_g(&q, &q).unwrap() > 0.0);
        }
    }

    #[test]
    fn kaehler_form_hermitian() {
        let p = square();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let q = random_calibrated(&p, &mut rng);
            let q2 = random_calibrated(&p, &mut rng);
            let qq = kaehler_form(&q, &q).unwrap();
            assert!(qq.re > 0.0 && qq.im == 0.0);
            let a = kaehler_form(&q, &q2).unwrap();
            assert!((a - kaehler_form(&q2, &q).unwrap().conj()).norm() < 1e-11);
            let iq = apply_I(&q).unwrap();
            let iq2 = apply_I(&q2).unwrap();
            assert!((kaehler_form(&iq, &iq2).unwrap() - a).norm() < 1e-10);
        }
    }

    /// Oracle for Ω(Iq, Iq') = Ω(q, q'): ([q,p], [q',p]) = m² (q, q') for q, q' ⊥ p.
    #[test]
    fn rotated_pair_identity() {
        let p = square();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = random_calibrated(&p, &mut rng);
        let q2 = random_calibrated(&p, &mut rng);
        for ((a, b), (e, m)) in q.components().iter().zip(q2.components()).zip(p.iter()) {
            let lhs = mink_bracket(*a, e).dot(mink_bracket(*b, e));
            assert!((lhs - m * m * a.dot(*b)).abs() < 1e-13);
        }
    }

    #[test]
    fn ambient_dot_examples() {
        let p = Polygon::from_edges(vec![
            MinkVector::new(0.0, 0.0, 1.0),
            MinkVector::new(0.0, 0.0, 1.0),
            MinkVector::new(0.1, 0.0, -1.0),
            MinkVector::new(-0.1, 0.0, -1.0),
        ]);
        assert_eq!(p.mass(0), 1.0);
        let t = AmbientVector::unit(4, 0, MinkVector::new(0.0, 0.0, 1.0));
        assert_eq!(ambient_dot(&t, &t, &p).unwrap(), 1.0);
        let s = AmbientVector::unit(4, 0, MinkVector::new(1.0, 0.0, 0.0));
        assert_eq!(ambient_dot(&s, &s, &p).unwrap(), -1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (x, y) = (ra(&mut rng, 4), ra(&mut rng, 4));
        assert!((ambient_dot(&x, &y, &p).unwrap() - ambient_dot(&y, &x, &p).unwrap()).abs() < 1e-13);
        assert!(matches!(
            ambient_dot(&x, &AmbientVector::zeros(3), &p),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn projection_lemma() {
        let p = square();
        let basis = tangent_basis(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let x = ra(&mut rng, 4);
            let y = ra(&mut rng, 4);
            let px = project_normal(&x, &p).unwrap();
            let py = project_normal(&y, &p).unwrap();
            for u in &basis {
                assert!(ambient_dot(&px, &u.to_ambient(), &p).unwrap().abs() < 1e-10);
            }
            let l = ambient_dot(&px, &y, &p).unwrap();
            let r = ambient_dot(&x, &py, &p).unwrap();
            assert!((l - r).abs() < 1e-10);

            let d = projection_data(&x, &p).unwrap();
            let lop = build_L(&p);
            let rhs_xi: MinkVector = x
                .components()
                .iter()
                .zip(p.iter())
                .map(|(xa, (e, m))| mink_bracket(e, mink_bracket(*xa, e)) / (m * m))
                .sum();
            assert!((lop.apply(d.xi) - rhs_xi).norm_inf() < 1e-11);

            let t = project_tangent(&x, &p).unwrap();
            assert!(t.orthogonality_residual() < 1e-10);
            assert!(t.closure_residual() < 1e-10);
            assert!(t.calibration_residual() < 1e-10);
            let back = &t.to_ambient() + &px;
            assert!((&back - &x).norm_inf() < 1e-12);
            let tt = project_tangent(&t.to_ambient(), &p).unwrap();
            assert!(tt.distance_inf(&t) < 1e-9);
        }
    }

    #[test]
    fn projection_fixed_points() {
        let p = square();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = rv(&mut rng);
        let gauge = AmbientVector::new(p.edges().iter().map(|e| mink_bracket(w, *e)).collect());
        assert!((&project_normal(&gauge, &p).unwrap() - &gauge).norm_inf() < 1e-10);
        assert!(project_tangent(&gauge, &p).unwrap().norm_inf() < 1e-10);
        // Mass-shell normal motions x_α = c_α p_α are fixed as well.
        let radial = AmbientVector::new(
            p.edges().iter().enumerate().map(|(i, e)| *e * (0.3 + i as f64)).collect(),
        );
        assert!((&project_normal(&radial, &p).unwrap() - &radial).norm_inf() < 1e-12);
        let q = random_calibrated(&p, &mut rng);
        assert!(project_normal(&q.to_ambient(), &p).unwrap().norm_inf() < 1e-10);
        assert!(project_tangent(&q.to_ambient(), &p).unwrap().distance_inf(&q) < 1e-10);
    }
}
