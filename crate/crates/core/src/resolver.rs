//! Archive URLs and citation snippets.
//!
//! URLs are built by plain concatenation: identifiers and origins are
//! embedded verbatim, the way the archive's browse pages expect them.
//! [`percent_encode`] is available for toolchains that need escaping.

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use thiserror::Error;

use crate::model::{self, Origin, ParseError, QualifiedIdentifier};

pub const DEFAULT_BROWSE_PREFIX: &str = "https://archive.softwareheritage.org/";
pub const DEFAULT_ORIGIN_BROWSE_PREFIX: &str = "https://archive.softwareheritage.org/browse/origin";

#[derive(Debug, Error)]
pub enum ResolveError {
    #[error("malformed origin: {0}")]
    MalformedOrigin(String),
    #[error("invalid endpoint {url:?}: {reason}")]
    InvalidEndpoint { url: String, reason: String },
    #[error("URL {0:?} does not start with the browse prefix")]
    ForeignUrl(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Where identifiers and origins are browsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchiveEndpoints {
    browse_prefix: String,
    origin_browse_prefix: String,
}

impl Default for ArchiveEndpoints {
    fn default() -> Self {
        ArchiveEndpoints {
            browse_prefix: DEFAULT_BROWSE_PREFIX.into(),
            origin_browse_prefix: DEFAULT_ORIGIN_BROWSE_PREFIX.into(),
        }
    }
}

impl ArchiveEndpoints {
    /// Both prefixes must be absolute URLs. The browse prefix is used as is
    /// (identifiers are appended directly); the origin prefix gets a `/`
    /// separator.
    pub fn new(
        browse_prefix: impl Into<String>,
        origin_browse_prefix: impl Into<String>,
    ) -> Result<Self, ResolveError> {
        let browse_prefix = browse_prefix.into();
        let origin_browse_prefix = origin_browse_prefix.into();
        for url in [&browse_prefix, &origin_browse_prefix] {
            url::Url::parse(url).map_err(|e| ResolveError::InvalidEndpoint {
                url: url.clone(),
                reason: e.to_string(),
            })?;
        }
        Ok(ArchiveEndpoints {
            browse_prefix,
            origin_browse_prefix,
        })
    }

    /// Endpoints for a mirror rooted at `base` (e.g. `http://localhost:9999/`).
    pub fn with_base(base: &str) -> Result<Self, ResolveError> {
        let base = base.trim_end_matches('/');
        Self::new(format!("{base}/"), format!("{base}/browse/origin"))
    }

    pub fn browse_prefix(&self) -> &str {
        &self.browse_prefix
    }

    pub fn origin_browse_prefix(&self) -> &str {
        &self.origin_browse_prefix
    }
}

/// Browse URL of an identifier: the browse prefix followed by its canonical text.
pub fn resolve_url(id: &QualifiedIdentifier, endpoints: &ArchiveEndpoints) -> String {
    format!("{}{}", endpoints.browse_prefix, id)
}

/// Inverse of [`resolve_url`]. A single trailing `/` after the identifier
/// is accepted, as the browse pages do.
pub fn parse_browse_url(
    url: &str,
    endpoints: &ArchiveEndpoints,
) -> Result<QualifiedIdentifier, ResolveError> {
    let rest = url
        .strip_prefix(endpoints.browse_prefix.as_str())
        .ok_or_else(|| ResolveError::ForeignUrl(url.to_string()))?;
    let rest = rest.strip_suffix('/').unwrap_or(rest);
    Ok(model::parse(rest)?)
}

/// Browse URL of a whole archived repository.
pub fn origin_url(origin: &str, endpoints: &ArchiveEndpoints) -> Result<String, ResolveError> {
    let origin = Origin::new(origin).map_err(|e| ResolveError::MalformedOrigin(e.to_string()))?;
    Ok(format!("{}/{}", endpoints.origin_browse_prefix, origin))
}

// Everything except the characters encodeURIComponent leaves alone.
const COMPONENT: &AsciiSet = &NON_ALPHANUMERIC
    .remove(b'-')
    .remove(b'_')
    .remove(b'.')
    .remove(b'!')
    .remove(b'~')
    .remove(b'*')
    .remove(b'\'')
    .remove(b'(')
    .remove(b')');

/// Percent-encodes a path component (identifier or origin).
pub fn percent_encode(text: &str) -> String {
    utf8_percent_encode(text, COMPONENT).to_string()
}

/// [`resolve_url`] with the identifier percent-encoded.
pub fn resolve_url_encoded(id: &QualifiedIdentifier, endpoints: &ArchiveEndpoints) -> String {
    format!(
        "{}{}",
        endpoints.browse_prefix,
        percent_encode(&id.to_string())
    )
}

/// [`origin_url`] with the origin percent-encoded.
pub fn origin_url_encoded(
    origin: &str,
    endpoints: &ArchiveEndpoints,
) -> Result<String, ResolveError> {
    let origin = Origin::new(origin).map_err(|e| ResolveError::MalformedOrigin(e.to_string()))?;
    Ok(format!(
        "{}/{}",
        endpoints.origin_browse_prefix,
        percent_encode(origin.as_str())
    ))
}

/// The `\swhurl` / `\swhref` macro definitions, one per line.
pub fn latex_preamble(endpoints: &ArchiveEndpoints) -> String {
    format!(
        "\\newcommand{{\\swhurl}}[1]{{{}#1}}\n\\newcommand{{\\swhref}}[2]{{\\href{{\\swhurl{{#1}}}}{{#2}}}}\n",
        endpoints.browse_prefix
    )
}

/// Escapes LaTeX special characters in running text.
pub fn escape_latex(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '#' | '$' | '%' | '&' | '_' | '{' | '}' => {
                out.push('\\');
                out.push(c);
            }
            '~' => out.push_str("\\textasciitilde{}"),
            '^' => out.push_str("\\textasciicircum{}"),
            '\\' => out.push_str("\\textbackslash{}"),
            _ => out.push(c),
        }
    }
    out
}

// Inside a URL argument hyperref only needs '#' and '%' escaped.
fn escape_latex_url(text: &str) -> String {
    text.replace('%', "\\%").replace('#', "\\#")
}

/// `\swhref{<id>}{<label>}`, to be used with [`latex_preamble`].
pub fn latex_citation(id: &QualifiedIdentifier, label: &str) -> String {
    format!(
        "\\swhref{{{}}}{{{}}}",
        escape_latex_url(&id.to_string()),
        escape_latex(label)
    )
}

/// Markdown link `[label](url)` to the identifier's browse page.
pub fn markdown_citation(
    id: &QualifiedIdentifier,
    label: &str,
    endpoints: &ArchiveEndpoints,
) -> String {
    let mut escaped = String::with_capacity(label.len());
    for c in label.chars() {
        if matches!(c, '[' | ']' | '\\' | '*' | '_' | '`') {
            escaped.push('\\');
        }
        escaped.push(c);
    }
    let url = resolve_url(id, endpoints)
        .replace('(', "%28")
        .replace(')', "%29");
    format!("[{escaped}]({url})")
}
