//! JSON class files.
//!
//! ```json
//! {"kind":"builtin","name":"c0","filters":["disjoint-endpoints","max-edges:2"]}
//! {"kind":"explicit","networks":{"1,2,3":[{"edges":[[["1"],["2","3"]],[["2"],["1","3"]]]}]}}
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use cohesion_core::{CohesionNetwork, Filter, Group, NetworkClass};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ClassFile {
    Builtin {
        name: String,
        #[serde(default)]
        filters: Vec<String>,
    },
    Explicit {
        networks: BTreeMap<String, Vec<NetworkEntry>>,
        #[serde(default)]
        filters: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkEntry {
    pub edges: Vec<(Vec<String>, Vec<String>)>,
    /// Extra vertices beyond the edge endpoints.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<Vec<String>>,
}

#[derive(Debug, Error)]
pub enum ClassFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid class JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown builtin class {0:?} (expected c0 or all-help-rest)")]
    UnknownBuiltin(String),
    #[error("unknown filter {0:?}")]
    UnknownFilter(String),
    #[error("invalid group {0:?}")]
    BadGroup(String),
}

fn group(names: &[String]) -> Result<Group, ClassFileError> {
    Group::from_names(names.iter().map(String::as_str))
        .map_err(|_| ClassFileError::BadGroup(names.join(",")))
}

pub fn parse_filter(text: &str) -> Result<Filter, ClassFileError> {
    Filter::parse(text).ok_or_else(|| ClassFileError::UnknownFilter(text.to_string()))
}

impl ClassFile {
    pub fn from_json(text: &str) -> Result<ClassFile, ClassFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_class(&self) -> Result<NetworkClass, ClassFileError> {
        let (base, filters) = match self {
            ClassFile::Builtin { name, filters } => (
                NetworkClass::builtin(name)
                    .ok_or_else(|| ClassFileError::UnknownBuiltin(name.clone()))?,
                filters,
            ),
            ClassFile::Explicit { networks, filters } => {
                let mut map = BTreeMap::new();
                for (key, entries) in networks {
                    let names: Vec<String> = key.split(',').map(|s| s.trim().to_string()).collect();
                    let carrier = group(&names)?;
                    let mut nets = Vec::with_capacity(entries.len());
                    for entry in entries {
                        let mut edges = Vec::with_capacity(entry.edges.len());
                        for (from, to) in &entry.edges {
                            edges.push((group(from)?, group(to)?));
                        }
                        let mut net = CohesionNetwork::from_edges(carrier.clone(), edges);
                        for v in &entry.vertices {
                            net.vertices.insert(group(v)?);
                        }
                        nets.push(net);
                    }
                    map.insert(carrier, nets);
                }
                (NetworkClass::Explicit(map), filters)
            }
        };
        let filters = filters
            .iter()
            .map(|f| parse_filter(f))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(base.filtered(filters))
    }

    pub fn from_class(class: &NetworkClass) -> ClassFile {
        let filters = class
            .all_filters()
            .iter()
            .map(ToString::to_string)
            .collect();
        match class.root() {
            NetworkClass::C0 => ClassFile::Builtin {
                name: "c0".into(),
                filters,
            },
            NetworkClass::AllHelpRest => ClassFile::Builtin {
                name: "all-help-rest".into(),
                filters,
            },
            NetworkClass::Explicit(map) => {
                let names = |g: &Group| g.members().map(|a| a.as_str().to_string()).collect();
                let networks = map
                    .iter()
                    .map(|(g, nets)| {
                        let entries = nets
                            .iter()
                            .map(|n| {
                                let endpoints: BTreeSet<&Group> =
                                    n.edges.iter().flat_map(|(a, b)| [a, b]).collect();
                                NetworkEntry {
                                    edges: n
                                        .edges
                                        .iter()
                                        .map(|(a, b)| (names(a), names(b)))
                                        .collect(),
                                    vertices: n
                                        .vertices
                                        .iter()
                                        .filter(|v| !endpoints.contains(v))
                                        .map(names)
                                        .collect(),
                                }
                            })
                            .collect();
                        (g.key(), entries)
                    })
                    .collect();
                ClassFile::Explicit { networks, filters }
            }
            NetworkClass::Filtered { .. } => unreachable!("root is never filtered"),
        }
    }
}

/// Resolves a `--class` argument: a builtin name or a path to a class file.
pub fn load_class(spec: &str) -> Result<NetworkClass, ClassFileError> {
    if let Some(class) = NetworkClass::builtin(spec) {
        return Ok(class);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(ClassFileError::UnknownBuiltin(spec.to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|source| ClassFileError::Io {
        path: spec.to_string(),
        source,
    })?;
    ClassFile::from_json(&text)?.to_class()
}
