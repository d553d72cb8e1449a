//! JSON formats for datasets and diagrams.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::criteria::{
    ball_criterion, formation_criterion, label_criterion, table_criterion, BallMovement,
    FormationTriple, TableMatch,
};
use crate::criterion::{Criterion, CriterionFlags, Instance};
use crate::diagram::FlowDiagram;
use crate::error::{Error, Result};
use crate::model::{Certificate, StateSequence};

/// How a criterion is evaluated, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum CriterionKind {
    /// Holds on states carrying `label`.
    Label { label: String },
    /// Holds on states whose defence line has this triple.
    Formation { triple: FormationTriple },
    /// Ball-movement class of a possession event.
    Ball { movement: BallMovement },
    /// Explicit fulfilled intervals `[start, end)` per sequence id.
    Table {
        intervals: BTreeMap<String, Vec<(usize, usize)>>,
        matching: TableMatch,
    },
}

impl CriterionKind {
    pub fn flags(&self) -> CriterionFlags {
        match self {
            CriterionKind::Table {
                matching: TableMatch::Exact,
                ..
            } => CriterionFlags::INDEPENDENT,
            CriterionKind::Table {
                matching: TableMatch::Within,
                ..
            } => CriterionFlags::MONOTONE_INDEPENDENT,
            _ => CriterionFlags::FIXED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionSpec {
    pub id: String,
    pub name: String,
    #[serde(flatten)]
    pub kind: CriterionKind,
    /// Optional; when present it must match what the kind guarantees.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flags: Option<CriterionFlags>,
}

impl CriterionSpec {
    pub fn label(tag: &str) -> Self {
        CriterionSpec {
            id: tag.to_string(),
            name: tag.to_string(),
            kind: CriterionKind::Label {
                label: tag.to_string(),
            },
            flags: None,
        }
    }

    pub fn build(&self) -> Result<Criterion> {
        let implied = self.kind.flags();
        if let Some(declared) = self.flags {
            if declared != implied {
                return Err(Error::InvalidParameter(format!(
                    "criterion `{}` declares flags {declared:?} but its kind implies {implied:?}",
                    self.id
                )));
            }
        }
        let mut c = match &self.kind {
            CriterionKind::Label { label } => label_criterion(label),
            CriterionKind::Formation { triple } => formation_criterion(*triple),
            CriterionKind::Ball { movement } => ball_criterion(*movement),
            CriterionKind::Table {
                intervals,
                matching,
            } => table_criterion(&self.id, &self.name, intervals.clone(), *matching)?,
        };
        c.descriptor.id = self.id.clone();
        c.descriptor.name = self.name.clone();
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub sequences: Vec<StateSequence>,
    pub criteria: Vec<CriterionSpec>,
}

impl Dataset {
    pub fn instance(&self) -> Result<Instance> {
        let criteria = self
            .criteria
            .iter()
            .map(CriterionSpec::build)
            .collect::<Result<_>>()?;
        Instance::new(self.sequences.clone(), criteria)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// A diagram together with the certificates that justify it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramFile {
    #[serde(flatten)]
    pub diagram: FlowDiagram,
    pub certificates: Vec<Certificate>,
}

impl DiagramFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
