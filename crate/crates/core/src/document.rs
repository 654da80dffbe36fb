//! JSON model files.
//!
//! ```json
//! {
//!   "points": ["a", "b", "c"],
//!   "opens": [[], ["a"], ["a", "b"], ["a", "b", "c"]],
//!   "valuation": { "A": ["a"], "B": ["a", "b"] }
//! }
//! ```

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Model, PointSet, SubsetSpace, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub points: Vec<String>,
    pub opens: Vec<Vec<String>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

impl ModelDocument {
    pub fn from_json(text: &str) -> Result<ModelDocument> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ModelDocument> {
        ModelDocument::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialise") + "\n"
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn to_model(&self) -> Result<Model> {
        let index: HashMap<&str, usize> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), i))
            .collect();
        if index.len() != self.points.len() {
            return Err(Error::Document("point identifiers are not unique".into()));
        }
        let set = |members: &[String], what: &str| -> Result<PointSet> {
            members
                .iter()
                .map(|m| {
                    index.get(m.as_str()).copied().ok_or_else(|| {
                        Error::Document(format!("{what} mentions undeclared point `{m}`"))
                    })
                })
                .collect()
        };
        let opens = self
            .opens
            .iter()
            .map(|o| set(o, "an open"))
            .collect::<Result<Vec<_>>>()?;
        let space = SubsetSpace::new(self.points.clone(), opens)?;
        let valuation: Valuation = self
            .valuation
            .iter()
            .map(|(a, members)| Ok((a.clone(), set(members, &format!("valuation of {a}"))?)))
            .collect::<Result<_>>()?;
        Model::new(space, valuation)
    }

    pub fn from_model(model: &Model) -> ModelDocument {
        let names = model.space.point_names();
        let list = |s: PointSet| s.iter().map(|i| names[i].clone()).collect::<Vec<_>>();
        ModelDocument {
            points: names.to_vec(),
            opens: model.space.opens().iter().map(|o| list(*o)).collect(),
            valuation: model
                .valuation()
                .iter()
                .map(|(a, s)| (a.clone(), list(*s)))
                .collect(),
        }
    }
}

/// Parse a JSON list of point-identifier lists against a space.
pub fn parse_family(space: &SubsetSpace, text: &str) -> Result<Vec<PointSet>> {
    let raw: Vec<Vec<String>> = serde_json::from_str(text)?;
    raw.iter()
        .map(|members| {
            members
                .iter()
                .map(|m| {
                    space
                        .point_index(m)
                        .ok_or_else(|| Error::Document(format!("undeclared point `{m}`")))
                })
                .collect()
        })
        .collect()
}
