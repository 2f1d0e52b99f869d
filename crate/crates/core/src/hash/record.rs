//! Revision (git commit) and release (git annotated tag) records.

use super::{hash_object, lossy, HashError, PersonStamp};
use crate::model::{ObjectId, ObjectType};

/// A header that is not one of the fixed ones (`gpgsig`, `encoding`,
/// `mergetag`, ...). Multi-line values are stored without the continuation
/// spaces.
pub type ExtraHeader = (Vec<u8>, Vec<u8>);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RevisionRecord {
    pub tree: ObjectId,
    pub parents: Vec<ObjectId>,
    pub author: PersonStamp,
    pub committer: PersonStamp,
    pub extra_headers: Vec<ExtraHeader>,
    pub message: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReleaseRecord {
    pub target: ObjectId,
    pub target_type: ObjectType,
    pub tag_name: Vec<u8>,
    pub tagger: Option<PersonStamp>,
    pub extra_headers: Vec<ExtraHeader>,
    pub message: Vec<u8>,
}

fn push_header(out: &mut Vec<u8>, key: &[u8], value: &[u8]) {
    out.extend_from_slice(key);
    out.push(b' ');
    for &b in value {
        out.push(b);
        if b == b'\n' {
            out.push(b' ');
        }
    }
    out.push(b'\n');
}

fn check_extra_headers(headers: &[ExtraHeader], fixed: &[&[u8]]) -> Result<(), HashError> {
    for (key, _) in headers {
        if key.is_empty()
            || key.iter().any(|b| matches!(b, b' ' | b'\n' | 0))
            || fixed.contains(&key.as_slice())
        {
            return Err(HashError::MalformedRecord(format!(
                "invalid header name {:?}",
                lossy(key)
            )));
        }
    }
    Ok(())
}

impl RevisionRecord {
    const FIXED: [&'static [u8]; 4] = [b"tree", b"parent", b"author", b"committer"];

    pub fn manifest(&self) -> Result<Vec<u8>, HashError> {
        self.author.check()?;
        self.committer.check()?;
        check_extra_headers(&self.extra_headers, &Self::FIXED)?;

        let mut out = Vec::with_capacity(256 + self.message.len());
        push_header(&mut out, b"tree", self.tree.to_hex().as_bytes());
        for p in &self.parents {
            push_header(&mut out, b"parent", p.to_hex().as_bytes());
        }
        push_header(&mut out, b"author", &self.author.to_bytes());
        push_header(&mut out, b"committer", &self.committer.to_bytes());
        for (k, v) in &self.extra_headers {
            push_header(&mut out, k, v);
        }
        out.push(b'\n');
        out.extend_from_slice(&self.message);
        Ok(out)
    }

    /// Parses a raw commit body as printed by `git cat-file commit`.
    pub fn from_git_manifest(raw: &[u8]) -> Result<Self, HashError> {
        let (headers, message) = split_headers(raw)?;
        let mut tree = None;
        let mut parents = Vec::new();
        let mut author = None;
        let mut committer = None;
        let mut extra_headers = Vec::new();
        for (key, value) in headers {
            match key.as_slice() {
                b"tree" if tree.is_none() && parents.is_empty() => tree = Some(parse_id(&value)?),
                b"parent" if tree.is_some() && author.is_none() => parents.push(parse_id(&value)?),
                b"author" if tree.is_some() && author.is_none() => {
                    author = Some(PersonStamp::parse(&value)?)
                }
                b"committer" if author.is_some() && committer.is_none() => {
                    committer = Some(PersonStamp::parse(&value)?)
                }
                k if Self::FIXED.contains(&k) => {
                    return Err(HashError::MalformedRecord(format!(
                        "unexpected {:?} header",
                        lossy(k)
                    )))
                }
                _ if committer.is_some() => extra_headers.push((key, value)),
                _ => {
                    return Err(HashError::MalformedRecord(format!(
                        "header {:?} before committer",
                        lossy(&key)
                    )))
                }
            }
        }
        let missing = |what: &str| HashError::MalformedRecord(format!("missing {what} header"));
        let record = RevisionRecord {
            tree: tree.ok_or_else(|| missing("tree"))?,
            parents,
            author: author.ok_or_else(|| missing("author"))?,
            committer: committer.ok_or_else(|| missing("committer"))?,
            extra_headers,
            message: message.to_vec(),
        };
        ensure_roundtrip(&record.manifest()?, raw)?;
        Ok(record)
    }
}

impl ReleaseRecord {
    const FIXED: [&'static [u8]; 4] = [b"object", b"type", b"tag", b"tagger"];

    pub fn manifest(&self) -> Result<Vec<u8>, HashError> {
        let git_type = self.target_type.git_type().ok_or_else(|| {
            HashError::MalformedRecord(format!(
                "a release cannot target a {}",
                self.target_type.name()
            ))
        })?;
        if self.tag_name.is_empty() || self.tag_name.contains(&b'\n') {
            return Err(HashError::MalformedRecord(format!(
                "invalid tag name {:?}",
                lossy(&self.tag_name)
            )));
        }
        if let Some(t) = &self.tagger {
            t.check()?;
        }
        check_extra_headers(&self.extra_headers, &Self::FIXED)?;

        let mut out = Vec::with_capacity(160 + self.message.len());
        push_header(&mut out, b"object", self.target.to_hex().as_bytes());
        push_header(&mut out, b"type", git_type.as_bytes());
        push_header(&mut out, b"tag", &self.tag_name);
        if let Some(t) = &self.tagger {
            push_header(&mut out, b"tagger", &t.to_bytes());
        }
        for (k, v) in &self.extra_headers {
            push_header(&mut out, k, v);
        }
        out.push(b'\n');
        out.extend_from_slice(&self.message);
        Ok(out)
    }

    /// Parses a raw tag body as printed by `git cat-file tag`.
    pub fn from_git_manifest(raw: &[u8]) -> Result<Self, HashError> {
        let (headers, message) = split_headers(raw)?;
        let mut headers = headers.into_iter().peekable();
        let mut expect = |name: &[u8]| -> Result<Vec<u8>, HashError> {
            match headers.next() {
                Some((k, v)) if k == name => Ok(v),
                _ => Err(HashError::MalformedRecord(format!(
                    "expected {:?} header",
                    lossy(name)
                ))),
            }
        };
        let target = parse_id(&expect(b"object")?)?;
        let type_value = expect(b"type")?;
        let target_type = ObjectType::from_git_type(&type_value).ok_or_else(|| {
            HashError::MalformedRecord(format!("unknown object type {:?}", lossy(&type_value)))
        })?;
        let tag_name = expect(b"tag")?;
        let tagger = match headers.peek() {
            Some((k, _)) if k == b"tagger" => {
                let (_, v) = headers.next().expect("peeked");
                Some(PersonStamp::parse(&v)?)
            }
            _ => None,
        };
        let record = ReleaseRecord {
            target,
            target_type,
            tag_name,
            tagger,
            extra_headers: headers.collect(),
            message: message.to_vec(),
        };
        ensure_roundtrip(&record.manifest()?, raw)?;
        Ok(record)
    }
}

pub fn revision_id(record: &RevisionRecord) -> Result<ObjectId, HashError> {
    Ok(hash_object("commit", &record.manifest()?))
}

pub fn release_id(record: &ReleaseRecord) -> Result<ObjectId, HashError> {
    Ok(hash_object("tag", &record.manifest()?))
}

fn parse_id(value: &[u8]) -> Result<ObjectId, HashError> {
    std::str::from_utf8(value)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| HashError::MalformedRecord(format!("bad object id {:?}", lossy(value))))
}

/// Splits a header block (terminated by an empty line) from the message,
/// folding continuation lines back into their header value.
fn split_headers(raw: &[u8]) -> Result<(Vec<ExtraHeader>, &[u8]), HashError> {
    let mut headers: Vec<ExtraHeader> = Vec::new();
    let mut rest = raw;
    loop {
        let nl = rest.iter().position(|&b| b == b'\n').ok_or_else(|| {
            HashError::MalformedRecord("header block is not terminated by an empty line".into())
        })?;
        let line = &rest[..nl];
        rest = &rest[nl + 1..];
        if line.is_empty() {
            return Ok((headers, rest));
        }
        if let Some(cont) = line.strip_prefix(b" ") {
            let (_, value) = headers.last_mut().ok_or_else(|| {
                HashError::MalformedRecord("continuation line without a header".into())
            })?;
            value.push(b'\n');
            value.extend_from_slice(cont);
        } else {
            let sp = line.iter().position(|&b| b == b' ').ok_or_else(|| {
                HashError::MalformedRecord(format!("header line {:?} has no value", lossy(line)))
            })?;
            headers.push((line[..sp].to_vec(), line[sp + 1..].to_vec()));
        }
    }
}

fn ensure_roundtrip(manifest: &[u8], raw: &[u8]) -> Result<(), HashError> {
    if manifest != raw {
        return Err(HashError::MalformedRecord(
            "record does not re-serialize to the same bytes".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hash::{directory_id, TzOffset};

    fn person(name: &str, ts: i64) -> PersonStamp {
        PersonStamp::new(
            name,
            format!("{}@example.org", name.to_lowercase()),
            ts,
            TzOffset::from_minutes(60).unwrap(),
        )
    }

    fn sample_revision() -> RevisionRecord {
        RevisionRecord {
            tree: directory_id(&[]).unwrap(),
            parents: vec![],
            author: person("Alice", 1_000_000_000),
            committer: person("Bob", 1_000_000_100),
            extra_headers: vec![],
            message: b"initial\n".to_vec(),
        }
    }

    #[test]
    fn revision_manifest_layout() {
        let m = sample_revision().manifest().unwrap();
        assert_eq!(
            m,
            b"tree 4b825dc642cb6eb9a060e54bf8d69288fbee4904\n\
              author Alice <alice@example.org> 1000000000 +0100\n\
              committer Bob <bob@example.org> 1000000100 +0100\n\
              \n\
              initial\n"
        );
    }

    #[test]
    fn revision_is_deterministic_and_sensitive() {
        let r = sample_revision();
        assert_eq!(revision_id(&r).unwrap(), revision_id(&r.clone()).unwrap());
        let mut other = r.clone();
        other.message = b"initiak\n".to_vec();
        assert_ne!(revision_id(&r).unwrap(), revision_id(&other).unwrap());
    }

    #[test]
    fn multiline_header_roundtrip() {
        let mut r = sample_revision();
        r.extra_headers.push((
            b"gpgsig".to_vec(),
            b"-----BEGIN-----\nabc\n-----END-----".to_vec(),
        ));
        let m = r.manifest().unwrap();
        assert!(m.windows(20).any(|w| w == b"gpgsig -----BEGIN---"));
        assert!(m.windows(5).any(|w| w == b"\n abc"));
        assert_eq!(RevisionRecord::from_git_manifest(&m).unwrap(), r);
    }

    #[test]
    fn rejects_bad_records() {
        let mut r = sample_revision();
        r.extra_headers.push((b"parent".to_vec(), b"x".to_vec()));
        assert!(revision_id(&r).is_err());

        let bad_parent = b"tree 4b825dc642cb6eb9a060e54bf8d69288fbee4904\n\
              parent 123\n\
              author A <a> 0 +0000\n\
              committer A <a> 0 +0000\n\n";
        assert!(matches!(
            RevisionRecord::from_git_manifest(bad_parent),
            Err(HashError::MalformedRecord(_))
        ));
        let bad_tz = b"tree 4b825dc642cb6eb9a060e54bf8d69288fbee4904\n\
              author A <a> 0 +0000\n\
              committer A <a> 0 +9x00\n\n";
        assert!(RevisionRecord::from_git_manifest(bad_tz).is_err());
        assert!(RevisionRecord::from_git_manifest(b"tree x").is_err());
    }

    #[test]
    fn release_without_tagger() {
        let rel = ReleaseRecord {
            target: directory_id(&[]).unwrap(),
            target_type: ObjectType::Directory,
            tag_name: b"v1.0".to_vec(),
            tagger: None,
            extra_headers: vec![],
            message: b"Test tag".to_vec(),
        };
        let m = rel.manifest().unwrap();
        assert_eq!(
            m,
            b"object 4b825dc642cb6eb9a060e54bf8d69288fbee4904\n\
              type tree\n\
              tag v1.0\n\
              \n\
              Test tag"
        );
        assert_eq!(ReleaseRecord::from_git_manifest(&m).unwrap(), rel);
        assert_eq!(release_id(&rel).unwrap(), release_id(&rel).unwrap());
    }

    #[test]
    fn release_cannot_target_snapshot() {
        let rel = ReleaseRecord {
            target: directory_id(&[]).unwrap(),
            target_type: ObjectType::Snapshot,
            tag_name: b"v1".to_vec(),
            tagger: None,
            extra_headers: vec![],
            message: vec![],
        };
        assert!(release_id(&rel).is_err());
    }
}
