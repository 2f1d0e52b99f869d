use std::cmp::Ordering;
use std::collections::HashSet;

use super::{hash_object, lossy, HashError};
use crate::model::ObjectId;

/// Kind of a directory entry, i.e. its git tree mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntryKind {
    File,
    ExecutableFile,
    Symlink,
    Directory,
    /// A pinned revision of another repository (git submodule).
    RevisionLink,
}

impl EntryKind {
    pub fn mode(self) -> &'static str {
        match self {
            EntryKind::File => "100644",
            EntryKind::ExecutableFile => "100755",
            EntryKind::Symlink => "120000",
            EntryKind::Directory => "40000",
            EntryKind::RevisionLink => "160000",
        }
    }

    pub fn from_mode(mode: &str) -> Option<Self> {
        [
            EntryKind::File,
            EntryKind::ExecutableFile,
            EntryKind::Symlink,
            EntryKind::Directory,
            EntryKind::RevisionLink,
        ]
        .into_iter()
        .find(|k| k.mode() == mode)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DirectoryEntry {
    pub name: Vec<u8>,
    pub kind: EntryKind,
    pub target: ObjectId,
}

impl DirectoryEntry {
    pub fn new(name: impl Into<Vec<u8>>, kind: EntryKind, target: ObjectId) -> Self {
        DirectoryEntry {
            name: name.into(),
            kind,
            target,
        }
    }

    fn check_name(&self) -> Result<(), HashError> {
        let reason = if self.name.is_empty() {
            "empty name"
        } else if self.name.contains(&b'/') {
            "contains '/'"
        } else if self.name.contains(&0) {
            "contains NUL"
        } else if self.name == b"." || self.name == b".." {
            "reserved name"
        } else {
            return Ok(());
        };
        Err(HashError::InvalidName {
            name: lossy(&self.name),
            reason,
        })
    }
}

/// git tree order: bytewise, with directory names compared as if they
/// ended in '/'.
fn tree_order(a: &DirectoryEntry, b: &DirectoryEntry) -> Ordering {
    fn key(e: &DirectoryEntry) -> impl Iterator<Item = &u8> {
        let slash: &[u8] = if e.kind == EntryKind::Directory {
            b"/"
        } else {
            b""
        };
        e.name.iter().chain(slash)
    }
    key(a).cmp(key(b))
}

/// Serialized tree body: `mode SP name NUL raw-id` per entry, in tree order.
pub fn directory_manifest(entries: &[DirectoryEntry]) -> Result<Vec<u8>, HashError> {
    let mut seen = HashSet::with_capacity(entries.len());
    for e in entries {
        e.check_name()?;
        if !seen.insert(e.name.as_slice()) {
            return Err(HashError::DuplicateName(lossy(&e.name)));
        }
    }
    let mut sorted: Vec<&DirectoryEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| tree_order(a, b));

    let mut out = Vec::with_capacity(entries.len() * 40);
    for e in sorted {
        out.extend_from_slice(e.kind.mode().as_bytes());
        out.push(b' ');
        out.extend_from_slice(&e.name);
        out.push(0);
        out.extend_from_slice(e.target.as_bytes());
    }
    Ok(out)
}

pub fn directory_id(entries: &[DirectoryEntry]) -> Result<ObjectId, HashError> {
    Ok(hash_object("tree", &directory_manifest(entries)?))
}
