//! JSON model files.
//!
//! ```json
//! {"worlds":["w0","w1"],"valuation":{"p":["w0"]},
//!  "E":{"1":{"w0":[["w0"]],"w1":[]}},"A":{"1":{"w0":[],"w1":[["w0","w1"]]}}}
//! ```
//!
//! Worlds missing from an agent's map have no neighborhoods. Writing sorts
//! every set so equal models serialize to identical bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use cohesion_core::{Agent, NeighborhoodModel, WorldSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

type NeighborhoodMap = BTreeMap<String, BTreeMap<String, Vec<Vec<String>>>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub worlds: Vec<String>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
    #[serde(default, rename = "E")]
    pub agency: NeighborhoodMap,
    #[serde(default, rename = "A")]
    pub attempt: NeighborhoodMap,
}

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid model JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model has no worlds")]
    NoWorlds,
    #[error("world {0} is listed twice")]
    DuplicateWorld(String),
    #[error("unknown world {world} in {context}")]
    UnknownWorld { world: String, context: String },
    #[error("invalid agent name {0:?}")]
    BadAgent(String),
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<ModelFile, ModelFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files always serialize")
    }

    /// Builds the in-memory model, resolving world names.
    pub fn to_model(&self) -> Result<NeighborhoodModel, ModelFileError> {
        if self.worlds.is_empty() {
            return Err(ModelFileError::NoWorlds);
        }
        let mut seen = BTreeSet::new();
        for w in &self.worlds {
            if !seen.insert(w) {
                return Err(ModelFileError::DuplicateWorld(w.clone()));
            }
        }
        let mut model = NeighborhoodModel::new(self.worlds.clone());
        let n = self.worlds.len();
        let resolve = |names: &[String], context: &str| -> Result<WorldSet, ModelFileError> {
            let mut set = WorldSet::empty(n);
            for name in names {
                let i = self.worlds.iter().position(|w| w == name).ok_or_else(|| {
                    ModelFileError::UnknownWorld {
                        world: name.clone(),
                        context: context.to_string(),
                    }
                })?;
                set.insert(i);
            }
            Ok(set)
        };
        for (atom, names) in &self.valuation {
            let set = resolve(names, &format!("valuation of {atom}"))?;
            model.valuation.insert(atom.clone(), set);
        }
        let agents: BTreeSet<&String> = self.agency.keys().chain(self.attempt.keys()).collect();
        for name in agents {
            let agent =
                Agent::new(name.as_str()).map_err(|_| ModelFileError::BadAgent(name.clone()))?;
            model.add_agent(agent);
        }
        for (modality, source) in [("E", &self.agency), ("A", &self.attempt)] {
            for (name, per_world) in source {
                let agent = Agent::new(name.as_str()).expect("checked above");
                let mut table = vec![BTreeSet::new(); n];
                for (world, family) in per_world {
                    let context = format!("{modality} neighborhoods of agent {name}");
                    let w = self.worlds.iter().position(|x| x == world).ok_or_else(|| {
                        ModelFileError::UnknownWorld {
                            world: world.clone(),
                            context: context.clone(),
                        }
                    })?;
                    for x in family {
                        table[w].insert(resolve(x, &format!("{context} at {world}"))?);
                    }
                }
                let target = if modality == "E" {
                    &mut model.agency
                } else {
                    &mut model.attempt
                };
                target.insert(agent, table);
            }
        }
        Ok(model)
    }

    /// File form of `model`, with sets listed in world order.
    pub fn from_model(model: &NeighborhoodModel) -> ModelFile {
        let names = |set: &WorldSet| model.set_names(set);
        let valuation = model
            .valuation
            .iter()
            .map(|(p, set)| (p.clone(), names(set)))
            .collect();
        let table = |map: &BTreeMap<Agent, Vec<BTreeSet<WorldSet>>>| -> NeighborhoodMap {
            map.iter()
                .map(|(agent, per_world)| {
                    let worlds = per_world
                        .iter()
                        .enumerate()
                        .map(|(w, family)| {
                            let mut sets: Vec<(Vec<usize>, Vec<String>)> = family
                                .iter()
                                .map(|s| (s.iter().collect(), names(s)))
                                .collect();
                            sets.sort();
                            let sets = sets.into_iter().map(|(_, s)| s).collect();
                            (model.worlds[w].clone(), sets)
                        })
                        .collect();
                    (agent.as_str().to_string(), worlds)
                })
                .collect()
        };
        ModelFile {
            worlds: model.worlds.clone(),
            valuation,
            agency: table(&model.agency),
            attempt: table(&model.attempt),
        }
    }
}

pub fn read_model(path: &Path) -> Result<NeighborhoodModel, ModelFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ModelFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ModelFile::from_json(&text)?.to_model()
}

pub fn write_model(path: &Path, model: &NeighborhoodModel) -> Result<(), ModelFileError> {
    let mut text = ModelFile::from_model(model).to_json();
    text.push('\n');
    std::fs::write(path, text).map_err(|source| ModelFileError::Io {
        path: path.display().to_string(),
        source,
    })
}
