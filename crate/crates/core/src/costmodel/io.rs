//! JSON query file format.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::QueryInstance;
use crate::convolution::SetFunction;
use crate::error::{Error, Result};
use crate::lattice::{RelationSet, MAX_RELATIONS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CardinalityEntry {
    pub set: Vec<usize>,
    pub value: u64,
}

/// On-disk form of a [`QueryInstance`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryFile {
    pub n: usize,
    pub relations: Vec<String>,
    pub edges: Vec<[usize; 2]>,
    pub cross_products: bool,
    pub cardinalities: Vec<CardinalityEntry>,
}

impl QueryFile {
    pub fn into_instance(self) -> Result<QueryInstance> {
        let n = self.n;
        if n == 0 || n > MAX_RELATIONS {
            return Err(Error::InvalidInstance(format!(
                "n = {n} outside 1..={MAX_RELATIONS}"
            )));
        }
        if self.relations.len() != n {
            return Err(Error::InvalidInstance(format!(
                "{} relation names for n = {n}",
                self.relations.len()
            )));
        }
        let mut seen: HashMap<u32, u64> = HashMap::with_capacity(self.cardinalities.len());
        for entry in &self.cardinalities {
            if entry.set.is_empty() {
                return Err(Error::InvalidInstance(
                    "cardinality entry for the empty set".into(),
                ));
            }
            let mut mask = 0u32;
            for &i in &entry.set {
                if i >= n {
                    return Err(Error::InvalidInstance(format!(
                        "relation index {i} out of range in {:?}",
                        entry.set
                    )));
                }
                if mask >> i & 1 == 1 {
                    return Err(Error::InvalidInstance(format!(
                        "repeated relation in {:?}",
                        entry.set
                    )));
                }
                mask |= 1 << i;
            }
            if seen.insert(mask, entry.value).is_some() {
                return Err(Error::InvalidInstance(format!(
                    "duplicate cardinality for {:?}",
                    RelationSet(mask)
                )));
            }
        }
        let card = SetFunction::from_fn(n, |s| {
            if s.is_empty() {
                Some(0)
            } else {
                seen.get(&s.bits()).copied()
            }
        });
        let edges = self.edges.iter().map(|&[a, b]| (a, b)).collect();
        QueryInstance::new(self.relations, edges, card, self.cross_products)
    }

    pub fn from_instance(q: &QueryInstance) -> Self {
        let cardinalities = (1..1u32 << q.n())
            .map(RelationSet)
            .filter(|&s| q.allows(s))
            .map(|s| CardinalityEntry {
                set: s.members().collect(),
                value: q.card(s),
            })
            .collect();
        QueryFile {
            n: q.n(),
            relations: q.names().to_vec(),
            edges: q.edges().iter().map(|&(a, b)| [a, b]).collect(),
            cross_products: q.cross_products_enabled(),
            cardinalities,
        }
    }
}

impl QueryInstance {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: QueryFile = serde_json::from_str(s)?;
        file.into_instance()
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(&QueryFile::from_instance(self))?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }
}
