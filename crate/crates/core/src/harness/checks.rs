use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Trial, FD_NOISE};
use crate::connection::{
    coordinate_field, covariant_derivative, covariant_derivative_expanded, d_omega,
    directional_derivative, flat_derivative, flat_derivative_of, g_norm, loglog_slope, mu,
    nijenhuis, VectorField,
};
use crate::error::{Error, Result};
use crate::kaehler::{
    ambient_dot, apply_I, metric_g, metric_g_from_omega, omega, project_normal, project_tangent,
    projection_data, AmbientVector,
};
use crate::mink3::{from_sl2, mink_bracket, sl2_bracket, sl2_dot, to_sl2, MinkVector, Sl2Matrix};
use crate::polygon::{sample, serialize, Polygon, SampleOptions};
use crate::tangent::{
    build_L, calibrate, gauge_transform, restrict_to_tangent, slice_dimension, solve_L, tangent_basis,
    TangentVector,
};

pub struct RecordSpec {
    pub id: &'static str,
    pub statement: &'static str,
    pub tolerance: f64,
    pub gating: bool,
}

pub struct Group {
    pub id: &'static str,
    pub uses_polygon: bool,
    pub records: &'static [RecordSpec],
    pub(crate) run: fn(&Trial) -> Result<Vec<f64>>,
}

const fn rec(id: &'static str, statement: &'static str, tolerance: f64) -> RecordSpec {
    RecordSpec { id, statement, tolerance, gating: true }
}

/// Allowed deviation of a fitted convergence order from 2.
const ORDER_TOL: f64 = 0.3;
/// `C h²` with `C = 1e3` at the default smallest step, for quantities that
/// agree only up to finite-difference truncation.
const FD_AGREEMENT: f64 = 1e-5;
/// Step for the connection tangency conditions, in units of the mean mass.
const H_CONDITIONS: f64 = 1e-5;

pub static GROUPS: &[Group] = &[
    Group {
        id: "bracket",
        uses_polygon: false,
        records: &[
            rec("bracket.minkowski", "bracket-orthogonality-antisymmetry-associativity-double-bracket", 1e-12),
            rec("bracket.sl2", "sl2-bracket-identities", 1e-12),
            rec("bracket.jacobi", "bracket-jacobi", 1e-12),
            rec("bracket.degeneracy", "bracket-vanishes-on-dependent-pairs", 1e-12),
        ],
        run: bracket,
    },
    Group {
        id: "isometry",
        uses_polygon: false,
        records: &[
            rec("isometry.form", "sl2-map-is-isometry", 1e-14),
            rec("isometry.inverse", "sl2-map-inverse", 1e-15),
        ],
        run: isometry,
    },
    Group {
        id: "sampler",
        uses_polygon: true,
        records: &[
            rec("sampler.closure", "sampled-polygon-closes", 1e-12),
            rec("sampler.mass", "sampled-polygon-on-mass-shells", 1e-13),
            rec("sampler.non-collinear", "sampled-polygon-non-collinear", 0.0),
            rec("sampler.determinism", "sampler-deterministic-per-seed", 0.0),
        ],
        run: sampler,
    },
    Group {
        id: "calibration",
        uses_polygon: true,
        records: &[
            rec("calibration.existence", "calibration-existence", 1e-11),
            rec("calibration.uniqueness", "calibration-uniqueness", 1e-10),
            rec("calibration.minimality", "calibration-minimizes-gauge-energy", 0.0),
        ],
        run: calibration,
    },
    Group {
        id: "l-operator",
        uses_polygon: true,
        records: &[
            rec("l-operator.self-adjoint", "L-self-adjoint", 1e-12),
            rec("l-operator.negative", "L-negative-definite", 0.0),
            rec("l-operator.collinear-singular", "L-singular-on-collinear", 0.0),
        ],
        run: l_operator,
    },
    Group {
        id: "dimension",
        uses_polygon: true,
        records: &[rec("dimension.slice", "calibrated-slice-dimension-2n-6", 0.0)],
        run: dimension,
    },
    Group {
        id: "complex",
        uses_polygon: true,
        records: &[
            rec("complex.square", "I-squared-minus-identity", 1e-10),
            rec("complex.calibration", "I-preserves-calibration", 1e-10),
        ],
        run: complex,
    },
    Group {
        id: "omega",
        uses_polygon: true,
        records: &[
            rec("omega.gauge-invariance", "omega-gauge-invariance", 1e-11),
            rec("omega.antisymmetry", "omega-antisymmetry", 0.0),
            rec("omega.nondegeneracy", "omega-non-degenerate-condition-number", 1e8),
            rec("omega.compatibility", "metric-equals-omega-with-I", 1e-11),
            rec("omega.i-invariance", "g-and-omega-I-invariant", 1e-10),
            rec("omega.metric-positive", "metric-positive-definite", 0.0),
        ],
        run: omega_checks,
    },
    Group {
        id: "projection",
        uses_polygon: true,
        records: &[
            rec("projection.orthogonality", "projection-normal-orthogonal-to-tangent", 1e-10),
            rec("projection.self-adjoint", "projection-self-adjoint", 1e-10),
            rec("projection.decomposition", "projection-decomposition", 1e-12),
            rec("projection.idempotence", "projection-idempotent", 1e-9),
        ],
        run: projection,
    },
    Group {
        id: "connection",
        uses_polygon: true,
        records: &[
            rec("connection.conditions", "covariant-derivative-is-calibrated-tangent", 1e-8),
            rec("connection.formulas", "covariant-derivative-expanded-formula", FD_AGREEMENT),
            rec("connection.formulas-order", "covariant-derivative-formulas-converge", ORDER_TOL),
            rec("connection.position-order", "position-derivative-second-order", ORDER_TOL),
        ],
        run: connection,
    },
    Group {
        id: "mu",
        uses_polygon: true,
        records: &[
            rec("mu.definition", "mu-defining-equation", 1e-10),
            rec("mu.symmetry", "mu-symmetric", 1e-10),
            rec("mu.skew", "mu-skew-adjoint", 1e-10),
            rec("mu.invariance", "mu-I-invariant", 1e-10),
            rec("mu.pointwise", "bracket-with-I-pointwise-identity", 1e-11),
            rec("mu.xi", "xi-of-flat-derivative-is-minus-mu", FD_AGREEMENT),
            rec("mu.w", "w-of-flat-derivative-is-mu", FD_AGREEMENT),
            rec("mu.order", "xi-and-w-converge", ORDER_TOL),
        ],
        run: mu_checks,
    },
    Group {
        id: "nijenhuis",
        uses_polygon: true,
        records: &[
            rec("nijenhuis.norm", "nijenhuis-vanishes", 1e-6),
            rec("nijenhuis.order", "nijenhuis-second-order-decay", ORDER_TOL),
            rec("nijenhuis.diagonal", "nijenhuis-antisymmetric", 1e-6),
            rec("nijenhuis.tensorial", "nijenhuis-tensorial", 1e-6),
        ],
        run: nijenhuis_checks,
    },
    Group {
        id: "closedness",
        uses_polygon: true,
        records: &[
            rec("closedness.d-omega", "omega-closed", 1e-5),
            rec("closedness.order", "d-omega-second-order-decay", ORDER_TOL),
        ],
        run: closedness,
    },
    Group {
        id: "metric-compatibility",
        uses_polygon: true,
        records: &[RecordSpec {
            id: "metric-compatibility.levi-civita",
            statement: "connection-metric-compatible",
            tolerance: 1e-6,
            gating: false,
        }],
        run: metric_compatibility,
    },
];

fn rng_for(trial: &Trial) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(trial.seed);
    rng.set_stream(1);
    rng
}

fn polygon_for(trial: &Trial) -> Result<Arc<Polygon>> {
    match &trial.cfg.polygon {
        Some(p) => Ok(p.clone()),
        None => Ok(Arc::new(sample(
            trial.n,
            &vec![trial.cfg.mass; trial.n],
            trial.seed,
            &SampleOptions::default(),
        )?)),
    }
}

fn steps(trial: &Trial, p: &Polygon) -> Vec<f64> {
    trial.cfg.h_values.iter().map(|h| h * p.mean_mass()).collect()
}

fn h_min(trial: &Trial, p: &Polygon) -> f64 {
    trial.cfg.h_min() * p.mean_mass()
}

fn unit_vector(rng: &mut ChaCha8Rng) -> MinkVector {
    MinkVector::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn ambient(n: usize, rng: &mut ChaCha8Rng) -> AmbientVector {
    AmbientVector::new((0..n).map(|_| unit_vector(rng)).collect())
}

fn field(n: usize, rng: &mut ChaCha8Rng) -> VectorField {
    coordinate_field(ambient(n, rng))
}

/// A random calibrated tangent vector of unit `g`-norm.
fn tangent(p: &Arc<Polygon>, rng: &mut ChaCha8Rng) -> Result<TangentVector> {
    let q = project_tangent(&ambient(p.n(), rng), p)?;
    let norm = g_norm(&q)?;
    Ok(if norm > 0.0 { q.scale(1.0 / norm) } else { q })
}

/// `|slope − 2|` over the sweep. Points within the rounding floor of a central
/// difference are left out; with fewer than two points left the deficit is 0.
fn order_deficit(p: &Polygon, hs: &[f64], residuals: &[f64]) -> f64 {
    let floor = FD_NOISE * p.scale().max(1.0) / build_L(p).conditioning();
    let (h, r): (Vec<f64>, Vec<f64>) =
        hs.iter().zip(residuals).filter(|(h, r)| **r > floor / **h).map(|(h, r)| (*h, *r)).unzip();
    match loglog_slope(&h, &r) {
        Some(s) => (s - 2.0).abs(),
        None => 0.0,
    }
}

fn vdiff(a: MinkVector, b: MinkVector) -> f64 {
    (a - b).norm_inf()
}

fn mdiff(a: Sl2Matrix, b: Sl2Matrix) -> f64 {
    (a.a - b.a).abs().max((a.b - b.b).abs()).max((a.c - b.c).abs())
}

fn bracket(trial: &Trial) -> Result<Vec<f64>> {
    let mut rng = rng_for(trial);
    let (u, v, w) = (unit_vector(&mut rng), unit_vector(&mut rng), unit_vector(&mut rng));
    let b = mink_bracket;
    let uv = b(u, v);
    let minkowski = [
        uv.dot(u).abs(),
        uv.dot(v).abs(),
        (uv + b(v, u)).norm_inf(),
        (uv.dot(w) - u.dot(b(v, w))).abs(),
        vdiff(b(u, b(v, w)), v * u.dot(w) - w * u.dot(v)),
    ];
    let (a, bb, c) = (to_sl2(u), to_sl2(v), to_sl2(w));
    let ab = sl2_bracket(a, bb);
    let sl2 = [
        sl2_dot(ab, a).abs(),
        sl2_dot(ab, bb).abs(),
        mdiff(ab, sl2_bracket(bb, a) * -1.0),
        (sl2_dot(ab, c) - sl2_dot(a, sl2_bracket(bb, c))).abs(),
        mdiff(sl2_bracket(a, sl2_bracket(bb, c)), bb * sl2_dot(a, c) - c * sl2_dot(a, bb)),
        mdiff(to_sl2(uv), ab),
    ];
    let jacobi = (b(u, b(v, w)) + b(v, b(w, u)) + b(w, uv)).norm_inf();
    let s: f64 = rng.random_range(-3.0..3.0);
    let mut degeneracy = b(u, u * s).norm_inf().max(mdiff(sl2_bracket(a, a * s), Sl2Matrix::new(0.0, 0.0, 0.0)));
    // Independent inputs must not give a vanishing bracket.
    if u.cross(v).euclid_norm() > 1e-6 && uv.norm_inf() == 0.0 {
        degeneracy = f64::INFINITY;
    }
    let max = |xs: &[f64]| xs.iter().copied().fold(0.0, f64::max);
    Ok(vec![max(&minkowski), max(&sl2), jacobi, degeneracy])
}

fn isometry(trial: &Trial) -> Result<Vec<f64>> {
    let mut rng = rng_for(trial);
    let (u, v) = (unit_vector(&mut rng), unit_vector(&mut rng));
    let form = (sl2_dot(to_sl2(u), to_sl2(v)) - u.dot(v)).abs();
    let m = Sl2Matrix::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let inverse = vdiff(from_sl2(to_sl2(u)), u).max(mdiff(to_sl2(from_sl2(m)), m));
    Ok(vec![form, inverse])
}

fn sampler(trial: &Trial) -> Result<Vec<f64>> {
    let n = trial.n;
    let masses = match &trial.cfg.polygon {
        Some(p) => p.masses().to_vec(),
        None => vec![trial.cfg.mass; n],
    };
    let opts = SampleOptions::default();
    let p = sample(n, &masses, trial.seed, &opts)?;
    let closure = p.closure_defect().norm_inf();
    let mass = p.iter().map(|(e, m)| (e.norm_sq() - m * m).abs()).fold(0.0, f64::max);
    let collinear = if p.degeneracy().collinear { 1.0 } else { 0.0 };
    let again = sample(n, &masses, trial.seed, &opts)?;
    let determinism = if serialize(&again) == serialize(&p) { 0.0 } else { 1.0 };
    Ok(vec![closure, mass, collinear, determinism])
}

fn calibration(trial: &Trial) -> Result<Vec<f64>> {
    let p = polygon_for(trial)?;
    let mut rng = rng_for(trial);
    let raw = restrict_to_tangent(&p, &ambient(p.n(), &mut rng))?;
    let q = calibrate(&raw)?;
    let existence = q.calibration_residual();
    let uniqueness = calibrate(&gauge_transform(&q, unit_vector(&mut rng)))?.distance_inf(&q);
    let e0 = q.gauge_energy();
    let mut violations = 0.0;
    for _ in 0..4 {
        let x = unit_vector(&mut rng);
        if x.norm_inf() > 0.0 && !(gauge_transform(&q, x).gauge_energy() > e0) {
            violations += 1.0;
        }
    }
    Ok(vec![existence, uniqueness, violations])
}

fn collinear_square() -> Polygon {
    let up = MinkVector::new(0.0, 0.0, 1.0);
    Polygon::from_edges(vec![up, up, -up, -up])
}

fn l_operator(trial: &Trial) -> Result<Vec<f64>> {
    let p = polygon_for(trial)?;
    let mut rng = rng_for(trial);
    let l = build_L(&p);
    let (xi, eta) = (unit_vector(&mut rng), unit_vector(&mut rng));
    let self_adjoint = (l.apply(xi).dot(eta) - l.apply(eta).dot(xi)).abs();
    let negative = if l.apply(xi).dot(xi) < 0.0 && l.apply(eta).dot(eta) < 0.0 { 0.0 } else { 1.0 };
    let singular = match solve_L(&collinear_square(), xi) {
        Err(Error::SingularOperator { .. }) => 0.0,
        _ => 1.0,
    };
    Ok(vec![self_adjoint, negative, singular])
}

fn dimension(trial: &Trial) -> Result<Vec<f64>> {
    let p = polygon_for(trial)?;
    let expected = 2 * p.n() - 6;
    let found = match slice_dimension(&p) {
        Ok(d) => d,
        Err(Error::RankDeficient { found, .. }) => found,
        Err(e) => return Err(e),
    };
    Ok(vec![(found as f64 - expected as f64).abs()])
}

fn complex(trial: &Trial) -> Result<Vec<f64>> {
    let p = polygon_for(trial)?;
    let mut square = 0.0_f64;
    let mut calib = 0.0_f64;
    for q in tangent_basis(&p)? {
        let iq = apply_I(&q)?;
        square = square.max(apply_I(&iq)?.combine(1.0, &q, 1.0)?.norm_inf());
        calib = calib.max(iq.calibration_residual());
    }
    Ok(vec![square, calib])
}

fn omega_checks(trial: &Trial) -> Result<Vec<f64>> {
    let p = polygon_for(trial)?;
    let mut rng = rng_for(trial);
    let (q, q2) = (tangent(&p, &mut rng)?, tangent(&p, &mut rng)?);
    let w = omega(&q, &q2)?;
    let gauge = (omega(&gauge_transform(&q, unit_vector(&mut rng)), &gauge_transform(&q2, unit_vector(&mut rng)))?
        - w)
        .abs();
    let antisymmetry = (w + omega(&q2, &q)?).abs();
    let basis = tangent_basis(&p)?;
    let k = basis.len();
    let mut om = DMatrix::zeros(k, k);
    let mut gm = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            om[(i, j)] = omega(&basis[i], &basis[j])?;
            gm[(i, j)] = metric_g(&basis[i], &basis[j])?;
        }
    }
    let sv = om.singular_values();
    let cond = if k == 0 { 1.0 } else { sv.max() / sv.min() };
    let g = metric_g(&q, &q2)?;
    let compat = (g - metric_g_from_omega(&q, &q2)?).abs().max((g - omega(&q, &apply_I(&q2)?)?).abs());
    let (iq, iq2) = (apply_I(&q)?, apply_I(&q2)?);
    let invariance = (metric_g(&iq, &iq2)? - g).abs().max((omega(&iq, &iq2)? - w).abs());
    let positive = if k == 0 || gm.cholesky().is_some() { 0.0 } else { 1.0 };
    Ok(vec![gauge, antisymmetry, if cond.is_finite() { cond } else { f64::MAX }, compat, invariance, positive])
}

fn projection(trial: &Trial) -> Result<Vec<f64>> {
    let p = polygon_for(trial)?;
    let mut rng = rng_for(trial);
    let (x, y) = (ambient(p.n(), &mut rng), ambient(p.n(), &mut rng));
    let px = project_normal(&x, &p)?;
    let py = project_normal(&y, &p)?;
    let mut orth = 0.0_f64;
    for u in tangent_basis(&p)? {
        orth = orth.max(ambient_dot(&px, &u.to_ambient(), &p)?.abs());
    }
    let adj = (ambient_dot(&px, &y, &p)? - ambient_dot(&x, &py, &p)?).abs();
    let t = project_tangent(&x, &p)?;
    let decomposition = (&(&t.to_ambient() + &px) - &x).norm_inf();
    let idem = (&project_normal(&px, &p)? - &px)
        .norm_inf()
        .max(project_tangent(&t.to_ambient(), &p)?.distance_inf(&t));
    Ok(vec![orth, adj, decomposition, idem])
}

fn connection(trial: &Trial) -> Result<Vec<f64>> {
    let p = polygon_for(trial)?;
    let mut rng = rng_for(trial);
    let yf = field(p.n(), &mut rng);
    let x = tangent(&p, &mut rng)?;
    let d = covariant_derivative(&yf, &x, &p, H_CONDITIONS * p.mean_mass())?;
    let conditions = d.orthogonality_residual().max(d.closure_residual()).max(d.calibration_residual());
    let hs = steps(trial, &p);
    let gaps = hs
        .iter()
        .map(|&h| Ok(covariant_derivative(&yf, &x, &p, h)?.distance_inf(&covariant_derivative_expanded(&yf, &x, &p, h)?)))
        .collect::<Result<Vec<f64>>>()?;
    let h = h_min(trial, &p);
    let formulas = covariant_derivative(&yf, &x, &p, h)?.distance_inf(&covariant_derivative_expanded(&yf, &x, &p, h)?);
    let position = |q: &Arc<Polygon>| Ok(AmbientVector::new(q.edges().to_vec()));
    let errs = hs
        .iter()
        .map(|&h| Ok((&flat_derivative_of(position, &x, &p, h)? - &x.to_ambient()).norm_inf()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(vec![conditions, formulas, order_deficit(&p, &hs, &gaps), order_deficit(&p, &hs, &errs)])
}

fn mu_checks(trial: &Trial) -> Result<Vec<f64>> {
    let p = polygon_for(trial)?;
    let mut rng = rng_for(trial);
    let yf = field(p.n(), &mut rng);
    let x = tangent(&p, &mut rng)?;
    let y = yf.eval(&p)?;
    let (ix, iy) = (apply_I(&x)?, apply_I(&y)?);
    let m = mu(&x, &y, &p)?;
    let rhs: MinkVector = x
        .components()
        .iter()
        .zip(y.components())
        .zip(p.iter())
        .map(|((a, b), (e, ma))| mink_bracket(*a, mink_bracket(*b, e)) / (ma * ma))
        .sum();
    let lhs: MinkVector = p.iter().map(|(e, ma)| mink_bracket(e, mink_bracket(m, e)) / ma).sum();
    let definition = vdiff(lhs, rhs);
    let symmetry = vdiff(m, mu(&y, &x, &p)?);
    let skew = vdiff(mu(&ix, &y, &p)?, -mu(&x, &iy, &p)?);
    let invariance = vdiff(mu(&ix, &iy, &p)?, m);
    let mut pointwise = 0.0_f64;
    for (a, (e, ma)) in p.iter().enumerate() {
        let target = e * (x.components()[a].dot(y.components()[a]) / (ma * ma));
        pointwise = pointwise
            .max(vdiff(mink_bracket(iy.components()[a], x.components()[a]) / ma, target))
            .max(vdiff(mink_bracket(ix.components()[a], y.components()[a]) / ma, target));
    }
    let w_exact = mu(&iy, &x, &p)?;
    let gaps = |h: f64| -> Result<(f64, f64)> {
        let data = projection_data(&flat_derivative(&yf, &x, &p, h)?, &p)?;
        Ok((vdiff(data.xi, -m), vdiff(data.w, w_exact)))
    };
    let (xi, w) = gaps(h_min(trial, &p))?;
    let hs = steps(trial, &p);
    let sweep = hs.iter().map(|&h| gaps(h)).collect::<Result<Vec<(f64, f64)>>>()?;
    let (xs, ws): (Vec<f64>, Vec<f64>) = sweep.into_iter().unzip();
    let order = order_deficit(&p, &hs, &xs).max(order_deficit(&p, &hs, &ws));
    Ok(vec![definition, symmetry, skew, invariance, pointwise, xi, w, order])
}

fn nijenhuis_checks(trial: &Trial) -> Result<Vec<f64>> {
    let p = polygon_for(trial)?;
    let mut rng = rng_for(trial);
    let (xf, yf) = (field(p.n(), &mut rng), field(p.n(), &mut rng));
    let hs = steps(trial, &p);
    let h = h_min(trial, &p);
    let norms = hs
        .iter()
        .map(|&h| g_norm(&nijenhuis(&xf, &yf, &p, h)?))
        .collect::<Result<Vec<f64>>>()?;
    let at_min = g_norm(&nijenhuis(&xf, &yf, &p, h)?)?;
    let diagonal = g_norm(&nijenhuis(&xf, &xf, &p, h)?)?;
    // Same value at P, different field elsewhere.
    let other = coordinate_field(yf.eval(&p)?.to_ambient());
    let tensorial = g_norm(&nijenhuis(&xf, &yf, &p, h)?.combine(1.0, &nijenhuis(&xf, &other, &p, h)?, -1.0)?)?;
    Ok(vec![at_min, order_deficit(&p, &hs, &norms), diagonal, tensorial])
}

fn closedness(trial: &Trial) -> Result<Vec<f64>> {
    let p = polygon_for(trial)?;
    let mut rng = rng_for(trial);
    let f: Vec<VectorField> = (0..3).map(|_| field(p.n(), &mut rng)).collect();
    let hs = steps(trial, &p);
    let values = hs
        .iter()
        .map(|&h| Ok(d_omega(&f[0], &f[1], &f[2], &p, h)?.abs()))
        .collect::<Result<Vec<f64>>>()?;
    let at_min = d_omega(&f[0], &f[1], &f[2], &p, h_min(trial, &p))?.abs();
    Ok(vec![at_min, order_deficit(&p, &hs, &values)])
}

fn metric_compatibility(trial: &Trial) -> Result<Vec<f64>> {
    let p = polygon_for(trial)?;
    let mut rng = rng_for(trial);
    let (yf, zf) = (field(p.n(), &mut rng), field(p.n(), &mut rng));
    let x = tangent(&p, &mut rng)?;
    let h = h_min(trial, &p);
    let (y, z) = (yf.eval(&p)?, zf.eval(&p)?);
    let lhs = directional_derivative(|q| metric_g(&yf.eval(q)?, &zf.eval(q)?), &x, &p, h)?;
    let rhs = metric_g(&covariant_derivative(&yf, &x, &p, h)?, &z)? + metric_g(&y, &covariant_derivative(&zf, &x, &p, h)?)?;
    Ok(vec![(lhs - rhs).abs()])
}
