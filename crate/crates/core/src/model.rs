//! Identifier value types and their textual grammar.
//!
//! A core identifier has the shape `swh:1:<type>:<40 lowercase hex digits>`.
//! It may be followed by `;origin=<url>` and `;lines=<n>[-<m>]` qualifiers.
//! Parsing accepts the qualifiers in either order; printing always emits
//! `origin` before `lines`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// The only scheme version this crate understands.
pub const SCHEME_VERSION: u8 = 1;

const PREFIX: &str = "swh:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjectType {
    Snapshot,
    Release,
    Revision,
    Directory,
    Content,
}

impl ObjectType {
    pub const ALL: [ObjectType; 5] = [
        ObjectType::Snapshot,
        ObjectType::Release,
        ObjectType::Revision,
        ObjectType::Directory,
        ObjectType::Content,
    ];

    /// Three-letter tag used in the identifier text.
    pub fn tag(self) -> &'static str {
        match self {
            ObjectType::Snapshot => "snp",
            ObjectType::Release => "rel",
            ObjectType::Revision => "rev",
            ObjectType::Directory => "dir",
            ObjectType::Content => "cnt",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.tag() == tag)
    }

    /// Long lowercase name ("content", "directory", ...).
    pub fn name(self) -> &'static str {
        match self {
            ObjectType::Snapshot => "snapshot",
            ObjectType::Release => "release",
            ObjectType::Revision => "revision",
            ObjectType::Directory => "directory",
            ObjectType::Content => "content",
        }
    }

    /// The git object type with the same hashing rules, if there is one.
    pub fn git_type(self) -> Option<&'static str> {
        match self {
            ObjectType::Snapshot => None,
            ObjectType::Release => Some("tag"),
            ObjectType::Revision => Some("commit"),
            ObjectType::Directory => Some("tree"),
            ObjectType::Content => Some("blob"),
        }
    }

    pub fn from_git_type(git_type: &[u8]) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.git_type().map(str::as_bytes) == Some(git_type))
    }
}

impl fmt::Display for ObjectType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ObjectType {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_tag(s).ok_or_else(|| {
            ParseError::new(
                ErrorKind::UnknownObjectType,
                0,
                format!("unknown object type {s:?}, expected one of snp, rel, rev, dir, cnt"),
            )
        })
    }
}

impl Serialize for ObjectType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Intrinsic object identifier: a SHA1 digest.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectId([u8; 20]);

impl ObjectId {
    pub const HEX_LEN: usize = 40;

    pub const fn from_bytes(bytes: [u8; 20]) -> Self {
        ObjectId(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 20] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// Strict parse: exactly 40 characters, lowercase hex only.
    ///
    /// On failure returns the byte offset of the problem within `s` and a message.
    fn parse_strict(s: &str) -> Result<Self, (usize, String)> {
        if let Some((i, c)) = s
            .char_indices()
            .find(|&(_, c)| !matches!(c, '0'..='9' | 'a'..='f'))
        {
            let msg = if c.is_ascii_hexdigit() {
                format!("uppercase hex digit {c:?}, object ids are lowercase")
            } else {
                format!("invalid character {c:?} in object id")
            };
            return Err((i, msg));
        }
        if s.len() != Self::HEX_LEN {
            return Err((0, format!("object id has length {} != 40", s.len())));
        }
        let mut out = [0u8; 20];
        hex::decode_to_slice(s, &mut out).map_err(|e| (0, e.to_string()))?;
        Ok(ObjectId(out))
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ObjectId({self})")
    }
}

impl FromStr for ObjectId {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ObjectId::parse_strict(s)
            .map_err(|(offset, msg)| ParseError::new(ErrorKind::MalformedObjectId, offset, msg))
    }
}

impl Serialize for ObjectId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

/// `swh:1:<type>:<id>` without qualifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoreIdentifier {
    pub object_type: ObjectType,
    pub object_id: ObjectId,
}

impl CoreIdentifier {
    pub fn new(object_type: ObjectType, object_id: ObjectId) -> Self {
        CoreIdentifier {
            object_type,
            object_id,
        }
    }

    pub fn scheme_version(&self) -> u8 {
        SCHEME_VERSION
    }

    /// Parses an identifier that must not carry qualifiers.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let q = parse(text)?;
        if q.origin.is_some() || q.lines.is_some() {
            let offset = text.find(';').unwrap_or(0);
            return Err(ParseError::new(
                ErrorKind::MalformedQualifier,
                offset,
                "qualifiers are not allowed here".into(),
            ));
        }
        Ok(q.core)
    }
}

impl fmt::Display for CoreIdentifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "swh:{}:{}:{}",
            SCHEME_VERSION, self.object_type, self.object_id
        )
    }
}

impl FromStr for CoreIdentifier {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CoreIdentifier::parse(s)
    }
}

/// A 1-based line range; a single line is `start == end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LineRange {
    start: u64,
    end: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineRangeError {
    #[error("line numbers start at 1")]
    Zero,
    #[error("line range end {end} is before start {start}")]
    Reversed { start: u64, end: u64 },
}

impl LineRange {
    pub fn new(start: u64, end: Option<u64>) -> Result<Self, LineRangeError> {
        if start == 0 || end == Some(0) {
            return Err(LineRangeError::Zero);
        }
        if let Some(end) = end {
            if end < start {
                return Err(LineRangeError::Reversed { start, end });
            }
        }
        Ok(LineRange { start, end })
    }

    pub fn single(line: u64) -> Result<Self, LineRangeError> {
        Self::new(line, None)
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    /// The explicit end, if the range was written as `a-b`.
    pub fn end(&self) -> Option<u64> {
        self.end
    }

    /// Last line covered, inclusive.
    pub fn last(&self) -> u64 {
        self.end.unwrap_or(self.start)
    }
}

impl fmt::Display for LineRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.end {
            Some(end) => write!(f, "{}-{}", self.start, end),
            None => write!(f, "{}", self.start),
        }
    }
}

/// An origin URL: absolute, RFC 3986 characters only, and free of `;`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Origin(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed origin URL at byte {offset}: {reason}")]
pub struct OriginError {
    pub offset: usize,
    pub reason: String,
}

impl Origin {
    pub fn new(url: impl Into<String>) -> Result<Self, OriginError> {
        let url = url.into();
        if url.is_empty() {
            return Err(OriginError {
                offset: 0,
                reason: "empty origin".into(),
            });
        }
        if let Some((i, c)) = url.char_indices().find(|&(_, c)| !is_uri_char(c)) {
            let reason = if c == ';' {
                "origin URLs may not contain ';'".to_string()
            } else {
                format!("character {c:?} is not allowed in a URL")
            };
            return Err(OriginError { offset: i, reason });
        }
        if let Err(e) = url::Url::parse(&url) {
            return Err(OriginError {
                offset: 0,
                reason: format!("not an absolute URL ({e})"),
            });
        }
        Ok(Origin(url))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Origin {
    type Err = OriginError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Origin::new(s)
    }
}

// RFC 3986 unreserved / reserved / pct-encoded characters, minus ';'.
fn is_uri_char(c: char) -> bool {
    c.is_ascii_alphanumeric()
        || matches!(
            c,
            '-' | '.'
                | '_'
                | '~'
                | ':'
                | '/'
                | '?'
                | '#'
                | '['
                | ']'
                | '@'
                | '!'
                | '$'
                | '&'
                | '\''
                | '('
                | ')'
                | '*'
                | '+'
                | ','
                | '='
                | '%'
        )
}

/// A core identifier plus optional contextual qualifiers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QualifiedIdentifier {
    pub core: CoreIdentifier,
    pub origin: Option<Origin>,
    pub lines: Option<LineRange>,
}

impl QualifiedIdentifier {
    pub fn new(core: CoreIdentifier) -> Self {
        QualifiedIdentifier {
            core,
            origin: None,
            lines: None,
        }
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = Some(origin);
        self
    }

    pub fn with_lines(mut self, lines: LineRange) -> Self {
        self.lines = Some(lines);
        self
    }

    /// Non-fatal problems with an otherwise well-formed identifier.
    pub fn warnings(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.lines.is_some() && self.core.object_type != ObjectType::Content {
            let printed = self.to_string();
            let offset = printed.find(";lines=").map_or(0, |i| i + 1);
            out.push(Violation {
                offset,
                rule: Rule::LinesOnNonContent,
                severity: Severity::Warning,
                message: format!(
                    "lines qualifier on a {} identifier; line ranges are meant for contents",
                    self.core.object_type.name()
                ),
            });
        }
        out
    }
}

impl From<CoreIdentifier> for QualifiedIdentifier {
    fn from(core: CoreIdentifier) -> Self {
        QualifiedIdentifier::new(core)
    }
}

impl fmt::Display for QualifiedIdentifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.core)?;
        if let Some(origin) = &self.origin {
            write!(f, ";origin={origin}")?;
        }
        if let Some(lines) = &self.lines {
            write!(f, ";lines={lines}")?;
        }
        Ok(())
    }
}

impl FromStr for QualifiedIdentifier {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

macro_rules! string_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(CoreIdentifier);
string_serde!(QualifiedIdentifier);

/// Grammar rule a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    BadPrefix,
    UnsupportedVersion,
    UnknownObjectType,
    MalformedObjectId,
    MalformedQualifier,
    DuplicateQualifier,
    LinesOnNonContent,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::BadPrefix => "BadPrefix",
            Rule::UnsupportedVersion => "UnsupportedVersion",
            Rule::UnknownObjectType => "UnknownObjectType",
            Rule::MalformedObjectId => "MalformedObjectId",
            Rule::MalformedQualifier => "MalformedQualifier",
            Rule::DuplicateQualifier => "DuplicateQualifier",
            Rule::LinesOnNonContent => "LinesOnNonContent",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type ErrorKind = Rule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Byte offset into the validated text.
    pub offset: usize,
    pub rule: Rule,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{sev}: {} at byte {}: {}",
            self.rule, self.offset, self.message
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {offset}: {message}")]
pub struct ParseError {
    pub kind: ErrorKind,
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(kind: ErrorKind, offset: usize, message: String) -> Self {
        ParseError {
            kind,
            offset,
            message,
        }
    }

    fn into_violation(self) -> Violation {
        Violation {
            offset: self.offset,
            rule: self.kind,
            severity: Severity::Error,
            message: self.message,
        }
    }
}

/// Result of [`validate`]: the parsed value (if any) and every violation found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub identifier: Option<QualifiedIdentifier>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.identifier.is_some()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Warning)
    }
}

/// Parses a possibly qualified identifier.
pub fn parse(text: &str) -> Result<QualifiedIdentifier, ParseError> {
    let (parsed, mut errors) = scan(text);
    match parsed {
        Some(id) => Ok(id),
        None => Err(errors.swap_remove(0)),
    }
}

/// Non-throwing form of [`parse`] that reports every violation it can find.
pub fn validate(text: &str) -> ValidationReport {
    let (identifier, errors) = scan(text);
    let mut violations: Vec<Violation> =
        errors.into_iter().map(ParseError::into_violation).collect();
    if let Some(id) = &identifier {
        violations.extend(id.warnings());
    }
    ValidationReport {
        identifier,
        violations,
    }
}

/// Recovering scanner shared by `parse` and `validate`.
///
/// Returns `Some` iff no errors were found; otherwise the error list is
/// non-empty and ordered by position.
fn scan(text: &str) -> (Option<QualifiedIdentifier>, Vec<ParseError>) {
    let mut errors = Vec::new();

    let Some(rest) = text.strip_prefix(PREFIX) else {
        let message = if text.is_empty() {
            "empty input".to_string()
        } else {
            format!("identifier must start with {PREFIX:?}")
        };
        errors.push(ParseError::new(ErrorKind::BadPrefix, 0, message));
        return (None, errors);
    };
    let mut pos = PREFIX.len();

    // scheme version
    let (version, after) = split_once_at(rest, ':');
    if version != "1" {
        errors.push(ParseError::new(
            ErrorKind::UnsupportedVersion,
            pos,
            format!("unsupported scheme version {version:?}, only \"1\" is defined"),
        ));
    }
    let Some(rest) = after else {
        if version == "1" {
            errors.push(ParseError::new(
                ErrorKind::UnknownObjectType,
                text.len(),
                "missing object type".into(),
            ));
        }
        return (None, errors);
    };
    pos += version.len() + 1;

    // object type
    let (tag, after) = split_once_at(rest, ':');
    let object_type = ObjectType::from_tag(tag);
    if object_type.is_none() {
        errors.push(ParseError::new(
            ErrorKind::UnknownObjectType,
            pos,
            format!("unknown object type {tag:?}, expected one of snp, rel, rev, dir, cnt"),
        ));
    }
    let Some(rest) = after else {
        if object_type.is_some() {
            errors.push(ParseError::new(
                ErrorKind::MalformedObjectId,
                text.len(),
                "missing object id".into(),
            ));
        }
        return (None, errors);
    };
    pos += tag.len() + 1;

    // object id
    let (hex_part, after) = split_once_at(rest, ';');
    let object_id = match ObjectId::parse_strict(hex_part) {
        Ok(id) => Some(id),
        Err((off, msg)) => {
            errors.push(ParseError::new(
                ErrorKind::MalformedObjectId,
                pos + off,
                msg,
            ));
            None
        }
    };
    pos += hex_part.len();

    let mut origin: Option<Origin> = None;
    let mut lines: Option<LineRange> = None;
    let mut seen_origin = false;
    let mut seen_lines = false;

    if let Some(mut rest) = after {
        pos += 1;
        let mut previous_was_origin = false;
        loop {
            let (segment, after) = split_once_at(rest, ';');
            scan_qualifier(
                segment,
                pos,
                previous_was_origin,
                &mut seen_origin,
                &mut seen_lines,
                &mut origin,
                &mut lines,
                &mut errors,
            );
            previous_was_origin = segment.starts_with("origin=");
            match after {
                Some(r) => {
                    pos += segment.len() + 1;
                    rest = r;
                }
                None => break,
            }
        }
    }

    if !errors.is_empty() {
        errors.sort_by_key(|e| e.offset);
        return (None, errors);
    }
    let core = CoreIdentifier::new(
        object_type.expect("no errors implies type"),
        object_id.expect("no errors implies id"),
    );
    (
        Some(QualifiedIdentifier {
            core,
            origin,
            lines,
        }),
        errors,
    )
}

#[allow(clippy::too_many_arguments)]
fn scan_qualifier(
    segment: &str,
    pos: usize,
    previous_was_origin: bool,
    seen_origin: &mut bool,
    seen_lines: &mut bool,
    origin: &mut Option<Origin>,
    lines: &mut Option<LineRange>,
    errors: &mut Vec<ParseError>,
) {
    let Some((key, value)) = segment.split_once('=') else {
        let message = if segment.is_empty() {
            "empty qualifier".to_string()
        } else if previous_was_origin {
            "origin URLs may not contain ';'".to_string()
        } else {
            format!("qualifier {segment:?} is missing '='")
        };
        errors.push(ParseError::new(ErrorKind::MalformedQualifier, pos, message));
        return;
    };
    let value_pos = pos + key.len() + 1;
    match key {
        "origin" => {
            if std::mem::replace(seen_origin, true) {
                errors.push(ParseError::new(
                    ErrorKind::DuplicateQualifier,
                    pos,
                    "origin qualifier given more than once".into(),
                ));
                return;
            }
            match Origin::new(value) {
                Ok(o) => *origin = Some(o),
                Err(e) => errors.push(ParseError::new(
                    ErrorKind::MalformedQualifier,
                    value_pos + e.offset,
                    e.reason,
                )),
            }
        }
        "lines" => {
            if std::mem::replace(seen_lines, true) {
                errors.push(ParseError::new(
                    ErrorKind::DuplicateQualifier,
                    pos,
                    "lines qualifier given more than once".into(),
                ));
                return;
            }
            match parse_lines(value) {
                Ok(r) => *lines = Some(r),
                Err((off, msg)) => errors.push(ParseError::new(
                    ErrorKind::MalformedQualifier,
                    value_pos + off,
                    msg,
                )),
            }
        }
        _ => {
            let message = if previous_was_origin {
                "origin URLs may not contain ';'".to_string()
            } else {
                format!("unknown qualifier {key:?}, expected origin or lines")
            };
            errors.push(ParseError::new(ErrorKind::MalformedQualifier, pos, message));
        }
    }
}

fn parse_lines(value: &str) -> Result<LineRange, (usize, String)> {
    let (first, second) = split_once_at(value, '-');
    let start = parse_line_number(first).map_err(|m| (0, m))?;
    let end = match second {
        Some(s) => Some(parse_line_number(s).map_err(|m| (first.len() + 1, m))?),
        None => None,
    };
    LineRange::new(start, end).map_err(|e| (0, e.to_string()))
}

fn parse_line_number(s: &str) -> Result<u64, String> {
    if s.is_empty() {
        return Err("missing line number".into());
    }
    if !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("line number {s:?} is not a decimal number"));
    }
    s.parse::<u64>()
        .map_err(|_| format!("line number {s:?} is too large"))
}

fn split_once_at(s: &str, sep: char) -> (&str, Option<&str>) {
    match s.split_once(sep) {
        Some((a, b)) => (a, Some(b)),
        None => (s, None),
    }
}
