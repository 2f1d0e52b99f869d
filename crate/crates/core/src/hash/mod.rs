//! Intrinsic identifiers for archived objects.
//!
//! Contents, directories, revisions and releases hash exactly like git
//! blobs, trees, commits and annotated tags: SHA1 over `"<type> <len>\0"`
//! followed by the object manifest. Snapshots have no git counterpart and
//! use their own manifest (see [`snapshot`]).

mod fs;
mod person;
mod record;
mod snapshot;
mod tree;

use std::io::{self, Read};

use sha1::{Digest, Sha1};
use thiserror::Error;

use crate::model::{CoreIdentifier, ObjectId, ObjectType};

pub use fs::{directory_id_from_path, directory_manifest_from_path, WalkOptions};
pub use person::{PersonStamp, TzOffset};
pub use record::{release_id, revision_id, ReleaseRecord, RevisionRecord};
pub use snapshot::{snapshot_id, snapshot_manifest, SnapshotBranches, SnapshotTarget};
pub use tree::{directory_id, directory_manifest, DirectoryEntry, EntryKind};

#[derive(Debug, Error)]
pub enum HashError {
    #[error("duplicate entry name {0:?} in directory")]
    DuplicateName(String),
    #[error("invalid entry name {name:?}: {reason}")]
    InvalidName { name: String, reason: &'static str },
    #[error("malformed record: {0}")]
    MalformedRecord(String),
    #[error("malformed snapshot branch {branch:?}: {reason}")]
    MalformedBranch { branch: String, reason: String },
    #[error("unsupported file type at {0}")]
    UnsupportedNode(std::path::PathBuf),
    #[error("invalid exclude pattern: {0}")]
    InvalidPattern(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: io::Error,
    },
}

pub(crate) fn lossy(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

/// `"<kind> <len>\0"`
pub fn object_header(kind: &str, len: u64) -> Vec<u8> {
    format!("{kind} {len}\0").into_bytes()
}

/// SHA1 of a typed object: header followed by the manifest bytes.
pub fn hash_object(kind: &str, manifest: &[u8]) -> ObjectId {
    let mut hasher = Sha1::new();
    hasher.update(object_header(kind, manifest.len() as u64));
    hasher.update(manifest);
    ObjectId::from_bytes(hasher.finalize().into())
}

/// Identifier of a file content (a git blob).
pub fn content_id(bytes: &[u8]) -> ObjectId {
    hash_object("blob", bytes)
}

/// Streams `len` bytes from `reader` into a blob hash.
///
/// Fails with `UnexpectedEof` if the reader yields fewer bytes, and with
/// `InvalidData` if it yields more.
pub fn content_id_from_reader<R: Read>(mut reader: R, len: u64) -> io::Result<ObjectId> {
    let mut hasher = Sha1::new();
    hasher.update(object_header("blob", len));
    let mut remaining = len;
    let mut buf = [0u8; 64 * 1024];
    while remaining > 0 {
        let want = buf.len().min(remaining.try_into().unwrap_or(usize::MAX));
        let n = reader.read(&mut buf[..want])?;
        if n == 0 {
            return Err(io::Error::new(
                io::ErrorKind::UnexpectedEof,
                "content shorter than announced length",
            ));
        }
        hasher.update(&buf[..n]);
        remaining -= n as u64;
    }
    if reader.read(&mut [0u8; 1])? != 0 {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "content longer than announced length",
        ));
    }
    Ok(ObjectId::from_bytes(hasher.finalize().into()))
}

pub fn content_swhid(bytes: &[u8]) -> CoreIdentifier {
    CoreIdentifier::new(ObjectType::Content, content_id(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_blob() {
        assert_eq!(
            content_id(b"").to_hex(),
            "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391"
        );
    }

    #[test]
    fn hello_blob() {
        // git hash-object --stdin <<< hello
        assert_eq!(
            content_id(b"hello\n").to_hex(),
            "ce013625030ba8dba906f756967f9e9ca394464a"
        );
    }

    #[test]
    fn header_format() {
        assert_eq!(object_header("tree", 1234), b"tree 1234\0");
        assert_eq!(object_header("blob", 0), b"blob 0\0");
    }

    #[test]
    fn reader_matches_slice() {
        let data: Vec<u8> = (0..200_000u32).map(|i| (i % 251) as u8).collect();
        let streamed = content_id_from_reader(&data[..], data.len() as u64).unwrap();
        assert_eq!(streamed, content_id(&data));
    }

    #[test]
    fn reader_length_mismatch() {
        let err = content_id_from_reader(&b"abc"[..], 4).unwrap_err();
        assert_eq!(err.kind(), io::ErrorKind::UnexpectedEof);
        let err = content_id_from_reader(&b"abcd"[..], 3).unwrap_err();
        assert_eq!(err.kind(), io::ErrorKind::InvalidData);
    }
}
