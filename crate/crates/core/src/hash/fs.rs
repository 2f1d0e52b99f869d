//! Hashing of on-disk trees.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use globset::{Glob, GlobSet, GlobSetBuilder};

use super::{
    content_id, content_id_from_reader, directory_id, DirectoryEntry, EntryKind, HashError,
};
use crate::model::ObjectId;

/// Options for [`directory_id_from_path`].
///
/// `.git` entries are always skipped. Exclude patterns are glob patterns
/// matched against both the entry name and its path relative to the root
/// (with `/` separators).
#[derive(Debug, Clone, Default)]
pub struct WalkOptions {
    pub exclude: Vec<String>,
}

impl WalkOptions {
    fn compile(&self) -> Result<GlobSet, HashError> {
        let mut builder = GlobSetBuilder::new();
        for pattern in &self.exclude {
            let glob = Glob::new(pattern)
                .map_err(|e| HashError::InvalidPattern(format!("{pattern}: {e}")))?;
            builder.add(glob);
        }
        builder
            .build()
            .map_err(|e| HashError::InvalidPattern(e.to_string()))
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HashError + '_ {
    move |source| HashError::Io {
        path: path.to_path_buf(),
        source,
    }
}

struct Walker {
    root: PathBuf,
    exclude: GlobSet,
}

impl Walker {
    fn excluded(&self, path: &Path, name: &std::ffi::OsStr) -> bool {
        if name == ".git" {
            return true;
        }
        if self.exclude.is_empty() {
            return false;
        }
        let rel = path.strip_prefix(&self.root).unwrap_or(path);
        let rel = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        self.exclude.is_match(name) || self.exclude.is_match(rel)
    }

    fn entries(&self, dir: &Path) -> Result<Vec<DirectoryEntry>, HashError> {
        let mut entries = Vec::new();
        for item in fs::read_dir(dir).map_err(io_err(dir))? {
            let item = item.map_err(io_err(dir))?;
            let path = item.path();
            let name = item.file_name();
            if self.excluded(&path, &name) {
                continue;
            }
            let (kind, target) = self.node(&path)?;
            entries.push(DirectoryEntry::new(name_bytes(&name), kind, target));
        }
        Ok(entries)
    }

    fn node(&self, path: &Path) -> Result<(EntryKind, ObjectId), HashError> {
        let meta = fs::symlink_metadata(path).map_err(io_err(path))?;
        let ft = meta.file_type();
        if ft.is_symlink() {
            let target = fs::read_link(path).map_err(io_err(path))?;
            Ok((
                EntryKind::Symlink,
                content_id(&name_bytes(target.as_os_str())),
            ))
        } else if ft.is_dir() {
            let id = directory_id(&self.entries(path)?)?;
            Ok((EntryKind::Directory, id))
        } else if ft.is_file() {
            let kind = if is_executable(&meta) {
                EntryKind::ExecutableFile
            } else {
                EntryKind::File
            };
            let file = File::open(path).map_err(io_err(path))?;
            let id = content_id_from_reader(file, meta.len()).map_err(io_err(path))?;
            Ok((kind, id))
        } else {
            Err(HashError::UnsupportedNode(path.to_path_buf()))
        }
    }
}

#[cfg(unix)]
fn name_bytes(name: &std::ffi::OsStr) -> Vec<u8> {
    use std::os::unix::ffi::OsStrExt;
    name.as_bytes().to_vec()
}

#[cfg(not(unix))]
fn name_bytes(name: &std::ffi::OsStr) -> Vec<u8> {
    name.to_string_lossy().replace('\\', "/").into_bytes()
}

#[cfg(unix)]
fn is_executable(meta: &fs::Metadata) -> bool {
    use std::os::unix::fs::PermissionsExt;
    meta.permissions().mode() & 0o100 != 0
}

#[cfg(not(unix))]
fn is_executable(_meta: &fs::Metadata) -> bool {
    false
}

/// Top-level entries of the directory at `path`, with subdirectories
/// already hashed.
pub fn directory_manifest_from_path(
    path: &Path,
    options: &WalkOptions,
) -> Result<Vec<DirectoryEntry>, HashError> {
    let walker = Walker {
        root: path.to_path_buf(),
        exclude: options.compile()?,
    };
    walker.entries(path)
}

/// Directory identifier of an on-disk tree.
///
/// Agrees with `git add -A && git write-tree` for trees without ignore
/// files, with one difference: empty subdirectories are hashed as empty
/// trees instead of being dropped.
pub fn directory_id_from_path(path: &Path, options: &WalkOptions) -> Result<ObjectId, HashError> {
    directory_id(&directory_manifest_from_path(path, options)?)
}
