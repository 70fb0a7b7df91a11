//! Numerical thresholds shared across modules.
//!
//! Identity checks scale with the magnitude of their inputs; the helpers at the
//! bottom compute those scale factors.

/// Polygon closure: `‖Σ p_α‖∞`.
pub const CLOSURE: f64 = 1e-12;

/// Mass shell: `|(p_α, p_α) − m_α²|`.
pub const MASS: f64 = 1e-13;

/// Collinearity threshold relative to the squared mean mass.
pub const COLLINEAR_REL: f64 = 1e-9;

/// Reject `L` when `σ_min < SINGULAR_REL · σ_max`.
pub const SINGULAR_REL: f64 = 1e-8;

/// Bracket-algebra identity checks at unit scale (cubic in the inputs).
pub const IDENTITY: f64 = 1e-12;

/// Tangent-space membership for user-supplied vectors, relative to `|q||p|`.
pub const TANGENT_REL: f64 = 1e-9;

/// Null singular values of the constraint matrix, relative to the largest.
pub const NULL_REL: f64 = 1e-9;

/// Minimum relative gap between the smallest kept singular value and the largest.
pub const RANK_GAP_REL: f64 = 1e-6;

pub const SAMPLER_MAX_ITER: usize = 10_000;
pub const SAMPLER_MAX_RETRIES: usize = 100;

/// `1e-12 · max(1, scale³)` for identities cubic in their inputs.
pub fn cubic(scale: f64) -> f64 {
    IDENTITY * scale.powi(3).max(1.0)
}
