//! Snapshot manifests.
//!
//! A snapshot is the set of branches of an origin at visit time. Its
//! manifest lists branches sorted by name, each as
//! `<target type> SP <name> NUL <target length> ":" <target>`, where the
//! target is the raw 20-byte id for objects, the aliased branch name for
//! aliases, and empty for dangling branches. It is hashed under the
//! `snapshot` header.
//!
//! This object type is specific to the archive and the layout follows its
//! public documentation rather than git; treat it as experimental.

use std::collections::BTreeMap;

use super::{hash_object, lossy, HashError};
use crate::model::{ObjectId, ObjectType};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SnapshotTarget {
    Object {
        target_type: ObjectType,
        target: ObjectId,
    },
    /// Points at another branch of the same snapshot.
    Alias(Vec<u8>),
    /// A branch whose target is unknown.
    Dangling,
}

impl SnapshotTarget {
    fn type_token(&self) -> &'static [u8] {
        match self {
            SnapshotTarget::Object { target_type, .. } => target_type.name().as_bytes(),
            SnapshotTarget::Alias(_) => b"alias",
            SnapshotTarget::Dangling => b"dangling",
        }
    }

    fn target_bytes(&self) -> &[u8] {
        match self {
            SnapshotTarget::Object { target, .. } => target.as_bytes(),
            SnapshotTarget::Alias(name) => name,
            SnapshotTarget::Dangling => b"",
        }
    }
}

/// Branch name to target. Iteration (and serialization) is always in
/// bytewise name order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SnapshotBranches(BTreeMap<Vec<u8>, SnapshotTarget>);

impl SnapshotBranches {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a branch, returning the previous target if the name was taken.
    pub fn insert(
        &mut self,
        name: impl Into<Vec<u8>>,
        target: SnapshotTarget,
    ) -> Option<SnapshotTarget> {
        self.0.insert(name.into(), target)
    }

    pub fn get(&self, name: &[u8]) -> Option<&SnapshotTarget> {
        self.0.get(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u8>, &SnapshotTarget)> {
        self.0.iter()
    }
}

impl<N: Into<Vec<u8>>> FromIterator<(N, SnapshotTarget)> for SnapshotBranches {
    fn from_iter<T: IntoIterator<Item = (N, SnapshotTarget)>>(iter: T) -> Self {
        SnapshotBranches(iter.into_iter().map(|(n, t)| (n.into(), t)).collect())
    }
}

pub fn snapshot_manifest(branches: &SnapshotBranches) -> Result<Vec<u8>, HashError> {
    let mut out = Vec::new();
    for (name, target) in branches.iter() {
        if name.is_empty() || name.contains(&0) {
            return Err(HashError::MalformedBranch {
                branch: lossy(name),
                reason: "branch names must be non-empty and NUL-free".into(),
            });
        }
        if let SnapshotTarget::Alias(alias) = target {
            if alias == name {
                return Err(HashError::MalformedBranch {
                    branch: lossy(name),
                    reason: "branch aliases itself".into(),
                });
            }
            if branches.get(alias).is_none() {
                return Err(HashError::MalformedBranch {
                    branch: lossy(name),
                    reason: format!("alias target {:?} is not a branch", lossy(alias)),
                });
            }
        }
        let target_bytes = target.target_bytes();
        out.extend_from_slice(target.type_token());
        out.push(b' ');
        out.extend_from_slice(name);
        out.push(0);
        out.extend_from_slice(format!("{}:", target_bytes.len()).as_bytes());
        out.extend_from_slice(target_bytes);
    }
    Ok(out)
}

pub fn snapshot_id(branches: &SnapshotBranches) -> Result<ObjectId, HashError> {
    Ok(hash_object("snapshot", &snapshot_manifest(branches)?))
}
