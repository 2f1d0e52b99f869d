use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::Command;

use clap::{Args, ValueEnum};
use serde_json::json;
use swhid::hash::{self, HashError, ReleaseRecord, RevisionRecord, WalkOptions};
use swhid::{CoreIdentifier, ObjectType};

use crate::{print_json, CmdResult, Failure, Global, Outcome};

#[derive(Args)]
pub struct IdentifyArgs {
    /// Files or directories; `-` reads content from stdin
    paths: Vec<PathBuf>,
    /// Hash stdin as a content object
    #[arg(long, conflicts_with = "paths")]
    stdin: bool,
    /// Object type to compute (default: cnt for files, dir for directories,
    /// rev when --rev is given)
    #[arg(long = "type", value_enum)]
    kind: Option<Kind>,
    /// Commit (for rev) or tag (for rel) to identify in a git checkout
    #[arg(long)]
    rev: Option<String>,
    /// Glob of names or relative paths to leave out of directory hashes
    #[arg(long, value_name = "GLOB")]
    exclude: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Cnt,
    Dir,
    Rev,
    Rel,
}

pub fn run(g: &Global, args: &IdentifyArgs) -> CmdResult {
    let kind = args.kind.or(args.rev.as_ref().map(|_| Kind::Rev));
    let mut targets = args.paths.clone();
    if args.stdin {
        targets.push(PathBuf::from("-"));
    }
    if targets.is_empty() {
        if matches!(kind, Some(Kind::Rev | Kind::Rel)) {
            targets.push(PathBuf::from("."));
        } else {
            return Err(Failure::Invalid(
                "nothing to identify: give a path or --stdin".into(),
            ));
        }
    }
    if kind == Some(Kind::Rel) && args.rev.is_none() {
        return Err(Failure::Invalid("--type rel needs --rev <tag>".into()));
    }

    let walk = WalkOptions {
        exclude: args.exclude.clone(),
    };
    let mut results = Vec::with_capacity(targets.len());
    for path in &targets {
        let id = identify_one(path, kind, args.rev.as_deref(), &walk)?;
        results.push((path, id));
    }

    if g.json {
        let list: Vec<_> = results
            .iter()
            .map(|(p, id)| json!({ "path": p.display().to_string(), "swhid": id.to_string() }))
            .collect();
        print_json(&serde_json::Value::Array(list));
    } else if let [(_, id)] = results.as_slice() {
        println!("{id}");
    } else {
        for (p, id) in &results {
            println!("{id}\t{}", p.display());
        }
    }
    Ok(Outcome::Ok)
}

fn identify_one(
    path: &Path,
    kind: Option<Kind>,
    rev: Option<&str>,
    walk: &WalkOptions,
) -> Result<CoreIdentifier, Failure> {
    if path.as_os_str() == "-" {
        if matches!(kind, Some(k) if k != Kind::Cnt) {
            return Err(Failure::Invalid(
                "stdin can only be hashed as content".into(),
            ));
        }
        let mut data = Vec::new();
        io::stdin()
            .lock()
            .read_to_end(&mut data)
            .map_err(|e| Failure::Io(format!("reading stdin: {e}")))?;
        return Ok(hash::content_swhid(&data));
    }

    match kind {
        Some(Kind::Rev) => {
            let raw = git_object(path, "commit", rev.unwrap_or("HEAD"))?;
            let record = RevisionRecord::from_git_manifest(&raw).map_err(hash_failure)?;
            let id = hash::revision_id(&record).map_err(hash_failure)?;
            return Ok(CoreIdentifier::new(ObjectType::Revision, id));
        }
        Some(Kind::Rel) => {
            let raw = git_object(path, "tag", rev.expect("checked by caller"))?;
            let record = ReleaseRecord::from_git_manifest(&raw).map_err(hash_failure)?;
            let id = hash::release_id(&record).map_err(hash_failure)?;
            return Ok(CoreIdentifier::new(ObjectType::Release, id));
        }
        _ => {}
    }

    let meta = fs::metadata(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    match (meta.is_dir(), kind) {
        (true, None | Some(Kind::Dir)) => {
            let id = hash::directory_id_from_path(path, walk).map_err(hash_failure)?;
            Ok(CoreIdentifier::new(ObjectType::Directory, id))
        }
        (false, None | Some(Kind::Cnt)) => {
            let file = fs::File::open(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let id = hash::content_id_from_reader(file, meta.len())
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            Ok(CoreIdentifier::new(ObjectType::Content, id))
        }
        (true, _) => Err(Failure::Invalid(format!(
            "{} is a directory; use --type dir",
            path.display()
        ))),
        (false, _) => Err(Failure::Invalid(format!(
            "{} is not a directory",
            path.display()
        ))),
    }
}

fn hash_failure(e: HashError) -> Failure {
    match e {
        HashError::Io { .. } => Failure::Io(e.to_string()),
        other => Failure::Invalid(other.to_string()),
    }
}

/// Raw body of a git object, as stored (`git cat-file <type> <rev>`).
fn git_object(repo: &Path, kind: &str, rev: &str) -> Result<Vec<u8>, Failure> {
    let out = Command::new("git")
        .arg("-C")
        .arg(repo)
        .args(["cat-file", kind, rev])
        .output()
        .map_err(|e| Failure::Io(format!("cannot run git: {e}")))?;
    if !out.status.success() {
        return Err(Failure::Invalid(format!(
            "git cat-file {kind} {rev} in {}: {}",
            repo.display(),
            String::from_utf8_lossy(&out.stderr).trim()
        )));
    }
    Ok(out.stdout)
}
