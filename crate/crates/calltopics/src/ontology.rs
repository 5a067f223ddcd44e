//! Topic-ontology tree store: node CRUD, alias management, normalized-label
//! lookup, seeding, persistence, and structural statistics.
//!
//! The topology is a forest with a configurable depth cap (levels are
//! 0-indexed, so a cap of 4 allows levels 0..=3). Node ids are UUIDv5 values
//! derived from the normalized topic name under a fixed namespace, which
//! makes construction reproducible: the same corpus replayed in the same
//! order yields byte-identical trees.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use uuid::Uuid;

use crate::corpus::MeanStd;

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("topic {0} not found")]
    NotFound(TopicId),
    #[error("label {0:?} already names another topic")]
    DuplicateLabel(String),
    #[error("label {0:?} is empty after normalization")]
    EmptyLabel(String),
    #[error("insert would exceed the maximum depth of {max_depth} levels")]
    DepthExceeded { max_depth: usize },
    #[error("max_depth must be at least 1")]
    InvalidDepthCap,
    #[error("duplicate name {0:?} in seed spec")]
    SeedDuplicate(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed ontology file: {0}")]
    Malformed(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

/// Namespace for name-derived node ids. Fixed forever; changing it would
/// silently break cross-run id stability.
const TOPIC_ID_NAMESPACE: Uuid = Uuid::from_u128(0x1b67_1a64_40d5_491e_99b0_da01ff1f3341);

/// Stable node identifier, derived from the normalized topic name.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct TopicId(Uuid);

impl TopicId {
    pub fn from_label(label: &str) -> Self {
        TopicId(Uuid::new_v5(
            &TOPIC_ID_NAMESPACE,
            normalize_label(label).as_bytes(),
        ))
    }

    pub fn as_uuid(&self) -> Uuid {
        self.0
    }
}

impl fmt::Display for TopicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Lookup normalization: lowercase, trim, collapse internal whitespace.
pub fn normalize_label(label: &str) -> String {
    label
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicNode {
    pub topic_id: TopicId,
    pub name: String,
    pub aliases: Vec<String>,
    pub created_on: NaiveDate,
    pub updated_on: NaiveDate,
    pub parent_id: Option<TopicId>,
    pub child_ids: Vec<TopicId>,
}

impl TopicNode {
    pub fn is_leaf(&self) -> bool {
        self.child_ids.is_empty()
    }

    /// Name plus aliases, in recorded order.
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.name.as_str()).chain(self.aliases.iter().map(String::as_str))
    }
}

/// Seed entry: one root topic with optional second-level children.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedTopic {
    pub name: String,
    #[serde(default)]
    pub children: Vec<String>,
}

pub fn load_seed_spec(path: &Path) -> Result<Vec<SeedTopic>, OntologyError> {
    let raw = std::fs::read_to_string(path).map_err(|source| OntologyError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&raw).map_err(|e| OntologyError::Malformed(e.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ontology {
    max_depth: usize,
    root_ids: Vec<TopicId>,
    nodes: BTreeMap<TopicId, TopicNode>,
    /// normalized label (name or alias) -> owning node.
    name_index: BTreeMap<String, TopicId>,
    /// Shared timestamp of the seed insertion, if this tree was seeded.
    seeded_on: Option<NaiveDate>,
}

pub const DEFAULT_MAX_DEPTH: usize = 4;

impl Default for Ontology {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_DEPTH).expect("default depth cap is valid")
    }
}

impl Ontology {
    pub fn new(max_depth: usize) -> Result<Self, OntologyError> {
        if max_depth == 0 {
            return Err(OntologyError::InvalidDepthCap);
        }
        Ok(Self {
            max_depth,
            root_ids: Vec::new(),
            nodes: BTreeMap::new(),
            name_index: BTreeMap::new(),
            seeded_on: None,
        })
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn roots(&self) -> &[TopicId] {
        &self.root_ids
    }

    pub fn seeded_on(&self) -> Option<NaiveDate> {
        self.seeded_on
    }

    pub fn node(&self, id: TopicId) -> Option<&TopicNode> {
        self.nodes.get(&id)
    }

    pub fn contains(&self, id: TopicId) -> bool {
        self.nodes.contains_key(&id)
    }

    /// Nodes in id order (deterministic, not insertion order).
    pub fn iter_nodes(&self) -> impl Iterator<Item = &TopicNode> {
        self.nodes.values()
    }

    /// 0-indexed level; None for unknown ids.
    pub fn depth(&self, id: TopicId) -> Option<usize> {
        let mut node = self.nodes.get(&id)?;
        let mut d = 0;
        while let Some(pid) = node.parent_id {
            node = self.nodes.get(&pid)?;
            d += 1;
        }
        Some(d)
    }

    /// Case-insensitive, whitespace-normalized exact lookup over names and
    /// aliases. No fuzzy matching.
    pub fn find_by_name_or_alias(&self, query: &str) -> Option<&TopicNode> {
        let id = self.name_index.get(&normalize_label(query))?;
        self.nodes.get(id)
    }

    /// All ids strictly below `id`, depth-first in child order.
    pub fn descendants(&self, id: TopicId) -> Vec<TopicId> {
        let mut out = Vec::new();
        let mut stack: Vec<TopicId> = match self.nodes.get(&id) {
            Some(n) => n.child_ids.iter().rev().copied().collect(),
            None => return out,
        };
        while let Some(next) = stack.pop() {
            out.push(next);
            if let Some(n) = self.nodes.get(&next) {
                stack.extend(n.child_ids.iter().rev().copied());
            }
        }
        out
    }

    pub fn insert_node(
        &mut self,
        name: &str,
        parent_id: Option<TopicId>,
        now: NaiveDate,
    ) -> Result<TopicId, OntologyError> {
        let normalized = normalize_label(name);
        if normalized.is_empty() {
            return Err(OntologyError::EmptyLabel(name.to_string()));
        }
        if self.name_index.contains_key(&normalized) {
            return Err(OntologyError::DuplicateLabel(name.trim().to_string()));
        }
        let level = match parent_id {
            Some(pid) => {
                let parent_level = self
                    .depth(pid)
                    .ok_or(OntologyError::NotFound(pid))?;
                parent_level + 1
            }
            None => 0,
        };
        if level >= self.max_depth {
            return Err(OntologyError::DepthExceeded {
                max_depth: self.max_depth,
            });
        }

        let id = TopicId::from_label(name);
        let node = TopicNode {
            topic_id: id,
            name: name.trim().to_string(),
            aliases: Vec::new(),
            created_on: now,
            updated_on: now,
            parent_id,
            child_ids: Vec::new(),
        };
        self.nodes.insert(id, node);
        match parent_id {
            Some(pid) => self
                .nodes
                .get_mut(&pid)
                .expect("parent existence checked above")
                .child_ids
                .push(id),
            None => self.root_ids.push(id),
        }
        self.name_index.insert(normalized, id);
        Ok(id)
    }

    /// Records an alternative surface name. Adding a label the node already
    /// carries (including its own name) is a no-op that still bumps
    /// updated_on; a label owned by a different node is a conflict.
    pub fn add_alias(
        &mut self,
        id: TopicId,
        alias: &str,
        now: NaiveDate,
    ) -> Result<(), OntologyError> {
        if !self.nodes.contains_key(&id) {
            return Err(OntologyError::NotFound(id));
        }
        let normalized = normalize_label(alias);
        if normalized.is_empty() {
            return Err(OntologyError::EmptyLabel(alias.to_string()));
        }
        if let Some(owner) = self.name_index.get(&normalized) {
            if *owner != id {
                return Err(OntologyError::DuplicateLabel(alias.trim().to_string()));
            }
        } else {
            self.name_index.insert(normalized, id);
            let node = self.nodes.get_mut(&id).expect("checked above");
            node.aliases.push(alias.trim().to_string());
        }
        let node = self.nodes.get_mut(&id).expect("checked above");
        node.updated_on = node.updated_on.max(now);
        Ok(())
    }

    /// Inserts seed roots and their children with one shared timestamp.
    /// Names already present are left untouched, so reseeding an already
    /// seeded tree changes nothing.
    pub fn seed(&mut self, seeds: &[SeedTopic], now: NaiveDate) -> Result<(), OntologyError> {
        let mut claimed = BTreeSet::new();
        for seed in seeds {
            for label in std::iter::once(&seed.name).chain(&seed.children) {
                if !claimed.insert(normalize_label(label)) {
                    return Err(OntologyError::SeedDuplicate(label.clone()));
                }
            }
        }
        for seed in seeds {
            let root_id = match self.find_by_name_or_alias(&seed.name) {
                Some(n) => n.topic_id,
                None => self.insert_node(&seed.name, None, now)?,
            };
            for child in &seed.children {
                if self.find_by_name_or_alias(child).is_none() {
                    self.insert_node(child, Some(root_id), now)?;
                }
            }
        }
        if self.seeded_on.is_none() {
            self.seeded_on = Some(now);
        }
        Ok(())
    }

    pub fn stats(&self) -> OntologyStats {
        let mut nodes_per_level: Vec<usize> = Vec::new();
        let mut leaves = 0usize;
        let mut child_counts = Vec::with_capacity(self.nodes.len());
        let mut alias_counts = Vec::with_capacity(self.nodes.len());
        for node in self.nodes.values() {
            let d = self
                .depth(node.topic_id)
                .expect("stored node has a valid parent chain");
            if nodes_per_level.len() <= d {
                nodes_per_level.resize(d + 1, 0);
            }
            nodes_per_level[d] += 1;
            if node.is_leaf() {
                leaves += 1;
            }
            child_counts.push(node.child_ids.len() as f64);
            alias_counts.push(node.aliases.len() as f64);
        }
        OntologyStats {
            total_nodes: self.nodes.len(),
            num_levels: nodes_per_level.len(),
            num_leaf_nodes: leaves,
            avg_children_per_node: MeanStd::from_values(&child_counts),
            avg_aliases_per_node: MeanStd::from_values(&alias_counts),
            nodes_per_level,
        }
    }

    /// Full structural check: forest shape, link consistency, label index
    /// consistency, depth cap, timestamp ordering. Load runs this; tests may
    /// call it after arbitrary mutation sequences.
    pub fn validate(&self) -> Result<(), OntologyError> {
        let fail = |msg: String| Err(OntologyError::InvariantViolation(msg));

        for (id, node) in &self.nodes {
            if *id != node.topic_id {
                return fail(format!("node {} stored under key {}", node.topic_id, id));
            }
            if node.updated_on < node.created_on {
                return fail(format!("node {} updated before created", id));
            }
            let own = normalize_label(&node.name);
            let mut seen = BTreeSet::new();
            seen.insert(own.clone());
            for alias in &node.aliases {
                let n = normalize_label(alias);
                if n == own {
                    return fail(format!("node {} repeats its name in aliases", id));
                }
                if !seen.insert(n) {
                    return fail(format!("node {} has duplicate alias {:?}", id, alias));
                }
            }
            if let Some(pid) = node.parent_id {
                let parent = match self.nodes.get(&pid) {
                    Some(p) => p,
                    None => return fail(format!("node {} cites unknown parent {}", id, pid)),
                };
                if !parent.child_ids.contains(id) {
                    return fail(format!("parent {} does not list child {}", pid, id));
                }
            }
            for cid in &node.child_ids {
                match self.nodes.get(cid) {
                    Some(c) if c.parent_id == Some(*id) => {}
                    Some(_) => return fail(format!("child {} does not cite parent {}", cid, id)),
                    None => return fail(format!("node {} lists unknown child {}", id, cid)),
                }
            }
        }

        // Root list must be exactly the parentless nodes, each once.
        let parentless: BTreeSet<TopicId> = self
            .nodes
            .values()
            .filter(|n| n.parent_id.is_none())
            .map(|n| n.topic_id)
            .collect();
        let root_set: BTreeSet<TopicId> = self.root_ids.iter().copied().collect();
        if root_set.len() != self.root_ids.len() {
            return fail("duplicate entries in root list".to_string());
        }
        if root_set != parentless {
            return fail("root list does not match parentless nodes".to_string());
        }

        // A node may appear in at most one child list, at most once.
        let mut claimed_children = BTreeSet::new();
        for node in self.nodes.values() {
            for cid in &node.child_ids {
                if !claimed_children.insert(*cid) {
                    return fail(format!("node {} appears in two child lists", cid));
                }
            }
        }

        // Reachability from roots proves acyclicity for a single-parent graph
        // and bounds every depth by the cap.
        let mut visited = BTreeSet::new();
        let mut stack: Vec<(TopicId, usize)> = self.root_ids.iter().map(|r| (*r, 0)).collect();
        while let Some((id, d)) = stack.pop() {
            if d >= self.max_depth {
                return fail(format!("node {} at level {} exceeds depth cap", id, d));
            }
            if !visited.insert(id) {
                return fail(format!("node {} reached twice from roots", id));
            }
            if let Some(n) = self.nodes.get(&id) {
                stack.extend(n.child_ids.iter().map(|c| (*c, d + 1)));
            }
        }
        if visited.len() != self.nodes.len() {
            return fail("nodes unreachable from roots (cycle or orphan)".to_string());
        }

        // Label index must be exactly the normalized labels of all nodes.
        let mut expected: BTreeMap<String, TopicId> = BTreeMap::new();
        for node in self.nodes.values() {
            for label in node.labels() {
                if expected
                    .insert(normalize_label(label), node.topic_id)
                    .is_some()
                {
                    return fail(format!("label {:?} owned by two nodes", label));
                }
            }
        }
        if expected != self.name_index {
            return fail("name index out of sync with node labels".to_string());
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), OntologyError> {
        let file = OntologyFile {
            max_depth: self.max_depth,
            seeded_on: self.seeded_on,
            roots: self.root_ids.clone(),
            nodes: self.nodes.values().cloned().collect(),
        };
        let json = serde_json::to_string_pretty(&file).expect("ontology serializes");
        std::fs::write(path, json).map_err(|source| OntologyError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, OntologyError> {
        let raw = std::fs::read_to_string(path).map_err(|source| OntologyError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: OntologyFile =
            serde_json::from_str(&raw).map_err(|e| OntologyError::Malformed(e.to_string()))?;
        if file.max_depth == 0 {
            return Err(OntologyError::InvalidDepthCap);
        }
        let mut nodes = BTreeMap::new();
        let mut name_index = BTreeMap::new();
        for node in file.nodes {
            for label in node.labels() {
                let normalized = normalize_label(label);
                if normalized.is_empty() {
                    return Err(OntologyError::InvariantViolation(format!(
                        "node {} carries an empty label",
                        node.topic_id
                    )));
                }
                if name_index.insert(normalized, node.topic_id).is_some() {
                    return Err(OntologyError::InvariantViolation(format!(
                        "duplicate name {:?}",
                        label
                    )));
                }
            }
            let id = node.topic_id;
            if nodes.insert(id, node).is_some() {
                return Err(OntologyError::InvariantViolation(format!(
                    "duplicate node id {}",
                    id
                )));
            }
        }
        let tree = Self {
            max_depth: file.max_depth,
            root_ids: file.roots,
            nodes,
            name_index,
            seeded_on: file.seeded_on,
        };
        tree.validate()?;
        Ok(tree)
    }
}

#[derive(Serialize, Deserialize)]
struct OntologyFile {
    max_depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seeded_on: Option<NaiveDate>,
    roots: Vec<TopicId>,
    nodes: Vec<TopicNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OntologyStats {
    pub total_nodes: usize,
    pub num_levels: usize,
    pub num_leaf_nodes: usize,
    pub avg_children_per_node: MeanStd,
    pub avg_aliases_per_node: MeanStd,
    pub nodes_per_level: Vec<usize>,
}
