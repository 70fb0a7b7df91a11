//! Document formats that reference a base polygon.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kaehler::AmbientVector;
use crate::mink3::MinkVector;
use crate::polygon::{deserialize, Polygon, PolygonDoc};
use crate::tangent::{GaugeState, TangentDoc, TangentVector};
use crate::tol;

/// A polygon given inline or as a path to a polygon document. Relative paths
/// resolve against the directory of the referencing document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseRef {
    Inline(PolygonDoc),
    Path(PathBuf),
}

impl BaseRef {
    pub fn resolve(&self, relative_to: Option<&Path>) -> Result<Polygon> {
        match self {
            BaseRef::Inline(doc) => {
                let p = Polygon::from_document(doc.clone())?;
                let v = p.validate(tol::CLOSURE, tol::MASS);
                if v.is_empty() {
                    Ok(p)
                } else {
                    Err(Error::Validation(v))
                }
            }
            BaseRef::Path(path) => {
                let full = match relative_to {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                deserialize(&std::fs::read_to_string(full)?)
            }
        }
    }
}

/// An element of `(M³)ⁿ` over a base polygon.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientDoc {
    pub base: BaseRef,
    pub components: Vec<[f64; 3]>,
}

fn components(raw: &[[f64; 3]]) -> Vec<MinkVector> {
    raw.iter().copied().map(MinkVector::from).collect()
}

pub fn read_polygon(path: &Path) -> Result<Polygon> {
    deserialize(&std::fs::read_to_string(path)?)
}

/// Reads a tangent document; the stored gauge state is re-checked.
pub fn read_tangent(text: &str, dir: Option<&Path>) -> Result<TangentVector> {
    let doc: TangentDoc = serde_json::from_str(text)?;
    let base = Arc::new(doc.base.resolve(dir)?);
    let comps = components(&doc.components);
    match doc.gauge_state {
        GaugeState::Raw => TangentVector::raw(base, comps),
        GaugeState::Calibrated => TangentVector::calibrated(base, comps),
    }
}

pub fn write_tangent(q: &TangentVector) -> String {
    serde_json::to_string_pretty(&TangentDoc::from_tangent(q)).expect("serializable")
}

pub fn read_ambient(text: &str, dir: Option<&Path>) -> Result<(Arc<Polygon>, AmbientVector)> {
    let doc: AmbientDoc = serde_json::from_str(text)?;
    let base = Arc::new(doc.base.resolve(dir)?);
    if doc.components.len() != base.n() {
        return Err(Error::LengthMismatch { expected: base.n(), found: doc.components.len() });
    }
    Ok((base, AmbientVector::new(components(&doc.components))))
}

pub fn write_ambient(base: &Polygon, x: &AmbientVector) -> String {
    let doc = AmbientDoc {
        base: BaseRef::Inline(base.to_document()),
        components: x.components().iter().map(|c| c.to_array()).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kaehler::project_tangent;

    #[test]
    fn tangent_document_round_trip() {
        let p = Arc::new(Polygon::square());
        let x = AmbientVector::new(vec![
            MinkVector::new(0.1, 0.2, 0.3),
            MinkVector::new(-0.4, 0.1, 0.0),
            MinkVector::new(0.0, 0.5, -0.2),
            MinkVector::new(0.3, -0.3, 0.1),
        ]);
        let q = project_tangent(&x, &p).unwrap();
        let back = read_tangent(&write_tangent(&q), None).unwrap();
        assert_eq!(back.components(), q.components());
        assert_eq!(back.gauge_state(), GaugeState::Calibrated);
    }

    #[test]
    fn base_by_path() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("p.json"), Polygon::square().to_json()).unwrap();
        let doc = r#"{"base": "p.json", "components": [[0,0,0],[0,0,0],[0,0,0],[0,0,0]]}"#;
        let (base, x) = read_ambient(doc, Some(dir.path())).unwrap();
        assert_eq!(*base, Polygon::square());
        assert_eq!(x.len(), 4);
        let short = r#"{"base": "p.json", "components": [[0,0,0]]}"#;
        assert!(matches!(read_ambient(short, Some(dir.path())), Err(Error::LengthMismatch { .. })));
    }
}
