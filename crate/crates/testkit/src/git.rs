use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use tempfile::TempDir;

pub fn git_available() -> bool {
    Command::new("git")
        .arg("--version")
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

/// A throwaway repository with an isolated git configuration.
pub struct ScratchRepo {
    dir: TempDir,
}

impl ScratchRepo {
    pub fn init() -> Self {
        let dir = tempfile::tempdir().expect("tempdir");
        let repo = ScratchRepo { dir };
        repo.git(&["init", "-q"]);
        repo.git(&["config", "core.autocrlf", "false"]);
        repo.git(&["config", "core.symlinks", "true"]);
        repo.git(&["config", "core.fileMode", "true"]);
        repo.git(&["config", "user.name", "Scratch"]);
        repo.git(&["config", "user.email", "scratch@example.org"]);
        repo
    }

    pub fn path(&self) -> &Path {
        self.dir.path()
    }

    pub fn join(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    /// Runs git in the repository and returns trimmed stdout. Panics on failure.
    pub fn git(&self, args: &[&str]) -> String {
        self.git_with(args, &[], None)
    }

    pub fn git_with(&self, args: &[&str], env: &[(&str, &str)], stdin: Option<&[u8]>) -> String {
        let out = self.git_raw(args, env, stdin);
        String::from_utf8(out).expect("utf8").trim_end().to_string()
    }

    /// Like [`ScratchRepo::git_with`] but returns raw stdout bytes.
    pub fn git_raw(&self, args: &[&str], env: &[(&str, &str)], stdin: Option<&[u8]>) -> Vec<u8> {
        let mut cmd = Command::new("git");
        cmd.args(args)
            .current_dir(self.dir.path())
            .env("GIT_CONFIG_NOSYSTEM", "1")
            .env("GIT_CONFIG_GLOBAL", "/dev/null")
            .env("HOME", self.dir.path())
            .stdin(if stdin.is_some() {
                Stdio::piped()
            } else {
                Stdio::null()
            })
            .stdout(Stdio::piped())
            .stderr(Stdio::piped());
        for (k, v) in env {
            cmd.env(k, v);
        }
        let mut child = cmd.spawn().expect("spawn git");
        if let Some(input) = stdin {
            child
                .stdin
                .take()
                .expect("stdin")
                .write_all(input)
                .expect("write stdin");
        }
        let out = child.wait_with_output().expect("git output");
        assert!(
            out.status.success(),
            "git {args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    }

    /// `git add -A && git write-tree`
    pub fn write_tree(&self) -> String {
        self.git(&["add", "-A"]);
        self.git(&["write-tree"])
    }

    /// Stores `data` as a blob and returns its id.
    pub fn hash_blob(&self, data: &[u8]) -> String {
        self.git_with(&["hash-object", "-w", "--stdin"], &[], Some(data))
    }

    /// `git mktree` over `(mode, type, id, name)` lines. git sorts the entries.
    pub fn mktree(&self, entries: &[(&str, &str, &str, &[u8])]) -> String {
        let mut input = Vec::new();
        for (mode, kind, id, name) in entries {
            input.extend_from_slice(format!("{mode} {kind} {id}\t").as_bytes());
            input.extend_from_slice(name);
            input.push(b'\n');
        }
        self.git_with(&["mktree", "--missing"], &[], Some(&input))
    }
}

/// Environment variables pinning author and committer identity and dates.
pub fn identity_env<'a>(
    author: (&'a str, &'a str, &'a str),
    committer: (&'a str, &'a str, &'a str),
) -> Vec<(&'static str, &'a str)> {
    vec![
        ("GIT_AUTHOR_NAME", author.0),
        ("GIT_AUTHOR_EMAIL", author.1),
        ("GIT_AUTHOR_DATE", author.2),
        ("GIT_COMMITTER_NAME", committer.0),
        ("GIT_COMMITTER_EMAIL", committer.1),
        ("GIT_COMMITTER_DATE", committer.2),
    ]
}
