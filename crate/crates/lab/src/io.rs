//! JSON file formats for matrices and maps.
//!
//! Matrices: `{"rows":k,"cols":m,"re":[[...]],"im":[[...]]}`.
//!
//! Maps, tagged by `kind`:
//!
//! ```json
//! {"kind":"kraus","ops":[matrix, ...]}
//! {"kind":"choi","inDim":k,"outDim":d,"matrix":matrix}
//! {"kind":"builtin","name":"transpose|choiMap|normalizedChoiMap|identity","dim":k}
//! {"kind":"unitaryConj","u":matrix}
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use gruss_core::posmap::{Builtin, MapRep};
use gruss_core::ComplexMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub enum LabError {
    Io { path: PathBuf, message: String },
    Parse { path: PathBuf, message: String },
    Usage(String),
    Core(gruss_core::Error),
}

impl LabError {
    pub fn kind(&self) -> &'static str {
        match self {
            LabError::Io { .. } => "io",
            LabError::Parse { .. } => "parse",
            LabError::Usage(_) => "usage",
            LabError::Core(e) => e.kind(),
        }
    }
}

impl fmt::Display for LabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            LabError::Parse { path, message } => write!(f, "{}: {message}", path.display()),
            LabError::Usage(msg) => f.write_str(msg),
            LabError::Core(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for LabError {}

impl From<gruss_core::Error> for LabError {
    fn from(e: gruss_core::Error) -> Self {
        LabError::Core(e)
    }
}

pub type LabResult<T> = Result<T, LabError>;

fn read_json<T: DeserializeOwned>(path: &Path) -> LabResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| LabError::Io { path: path.to_owned(), message: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| LabError::Parse { path: path.to_owned(), message: e.to_string() })
}

pub fn read_matrix(path: &Path) -> LabResult<ComplexMatrix> {
    read_json(path)
}

pub fn read_map(path: &Path) -> LabResult<MapRep> {
    read_json::<MapSpec>(path)?.build().map_err(LabError::from)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum BuiltinName {
    Identity,
    Transpose,
    ChoiMap,
    NormalizedChoiMap,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", rename_all_fields = "camelCase", deny_unknown_fields)]
pub enum MapSpec {
    Kraus { ops: Vec<ComplexMatrix> },
    Choi { in_dim: usize, out_dim: usize, matrix: ComplexMatrix },
    Builtin { name: BuiltinName, dim: usize },
    UnitaryConj { u: ComplexMatrix },
}

impl MapSpec {
    pub fn build(self) -> gruss_core::Result<MapRep> {
        match self {
            MapSpec::Kraus { ops } => MapRep::from_kraus(ops),
            MapSpec::Choi { in_dim, out_dim, matrix } => MapRep::from_choi(in_dim, out_dim, matrix),
            MapSpec::Builtin { name, dim } => match name {
                BuiltinName::Identity => Builtin::Identity { dim },
                BuiltinName::Transpose => Builtin::Transpose { dim },
                BuiltinName::ChoiMap => Builtin::ChoiMap { dim },
                BuiltinName::NormalizedChoiMap => Builtin::NormalizedChoiMap { dim },
            }
            .build(),
            MapSpec::UnitaryConj { u } => Builtin::UnitaryConj { u }.build(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_specs_parse() {
        let spec: MapSpec = serde_json::from_str(r#"{"kind":"builtin","name":"normalizedChoiMap","dim":4}"#).unwrap();
        let map = spec.build().unwrap();
        assert!(map.unital_residual() < 1e-12);

        let m = r#"{"rows":2,"cols":2,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]}"#;
        let spec: MapSpec =
            serde_json::from_str(&format!(r#"{{"kind":"choi","inDim":1,"outDim":2,"matrix":{m}}}"#)).unwrap();
        assert_eq!(spec.build().unwrap().out_dim(), 2);
        let spec: MapSpec = serde_json::from_str(&format!(r#"{{"kind":"unitaryConj","u":{m}}}"#)).unwrap();
        assert!(spec.build().is_ok());
        assert!(serde_json::from_str::<MapSpec>(r#"{"kind":"builtin","name":"nope","dim":2}"#).is_err());
        assert!(serde_json::from_str::<MapSpec>(r#"{"kind":"builtin","name":"transpose","dim":2,"x":1}"#).is_err());
    }

    #[test]
    fn matrix_shape_is_checked() {
        let bad = r#"{"rows":2,"cols":2,"re":[[1,0]],"im":[[0,0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
    }
}
