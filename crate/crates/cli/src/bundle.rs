use std::collections::BTreeMap;

use irl_core::instances::{Fact, InstanceBundle};
use irl_core::mdp::{InstanceJson, MdpR, PolicyTable, Restriction, RewardJson};
use irl_core::{IrlError, Result};
use serde::{Deserialize, Serialize};

/// Library instance on disk. The primary problem is stored at the top level,
/// so the file also loads as a plain instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleFile {
    pub name: String,
    #[serde(flatten)]
    pub instance: InstanceJson,
    pub restriction: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternative: Option<InstanceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<RewardJson>,
    #[serde(default)]
    pub facts: Vec<FactJson>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactJson {
    pub name: String,
    pub value: f64,
    pub basis: String,
}

impl From<&Fact> for FactJson {
    fn from(f: &Fact) -> Self {
        FactJson {
            name: f.name.clone(),
            value: f.value,
            basis: f.basis.clone(),
        }
    }
}

impl BundleFile {
    pub fn from_bundle(b: &InstanceBundle) -> Self {
        BundleFile {
            name: b.name.clone(),
            instance: InstanceJson::from_tables(&b.mdp, &b.policy),
            restriction: b.restriction.tag().into(),
            beta: b.restriction.beta().map(|x| x.to_vec()),
            alternative: b.alternative.as_ref().map(|(m, p)| InstanceJson::from_tables(m, p)),
            witness: b.witness.as_ref().map(RewardJson::from_table),
            facts: b.facts.iter().map(FactJson::from).collect(),
            params: b.params.clone(),
        }
    }

    pub fn restriction(&self) -> Result<Restriction> {
        Restriction::from_tag(&self.restriction, self.beta.clone())
    }

    pub fn primary(&self) -> Result<(MdpR, PolicyTable)> {
        self.instance.to_tables()
    }

    pub fn alternative(&self) -> Result<(MdpR, PolicyTable)> {
        self.alternative
            .as_ref()
            .ok_or_else(|| IrlError::Invalid(format!("instance `{}` has no alternative problem", self.name)))?
            .to_tables()
    }
}
