//! Archival-readiness audit of a source tree.
//!
//! Looks at the top level of a tree only. A tree is ready when it has
//! non-empty README, AUTHORS and LICENSE files. License files are also
//! checked for a standard (SPDX) license name, and citation metadata
//! (`codemeta.json`, `CITATION.cff`) is reported when present.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
#[error("cannot read {path}: {source}")]
pub struct AuditError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Readme,
    Authors,
    License,
    CitationMetadata,
    SpdxLicenseName,
}

impl CheckKind {
    pub const ALL: [CheckKind; 5] = [
        CheckKind::Readme,
        CheckKind::Authors,
        CheckKind::License,
        CheckKind::CitationMetadata,
        CheckKind::SpdxLicenseName,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CheckKind::Readme => "README",
            CheckKind::Authors => "AUTHORS",
            CheckKind::License => "LICENSE",
            CheckKind::CitationMetadata => "citation metadata",
            CheckKind::SpdxLicenseName => "SPDX license name",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Present,
    Missing,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub check: CheckKind,
    pub status: CheckStatus,
    /// Matching top-level file names, sorted.
    pub files: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub ready: bool,
    /// One entry per [`CheckKind`], in [`CheckKind::ALL`] order.
    pub checks: Vec<CheckResult>,
    /// SPDX identifiers recognized in the license files.
    pub licenses: Vec<String>,
}

impl AuditReport {
    pub fn check(&self, kind: CheckKind) -> &CheckResult {
        self.checks
            .iter()
            .find(|c| c.check == kind)
            .expect("every check is always reported")
    }
}

const CONTRIBUTOR_ROLES: &str =
    "Design, Architecture, Coding, Testing, Debugging, Documentation, Maintenance, Support, Management";

#[derive(Default)]
struct Found {
    readme: Vec<(String, PathBuf)>,
    authors: Vec<(String, PathBuf)>,
    license: Vec<(String, PathBuf)>,
    citation: Vec<(String, PathBuf)>,
}

fn classify(name: &str) -> Option<CheckKind> {
    let upper = name.to_ascii_uppercase();
    let stem = upper.split('.').next().unwrap_or("");
    match stem {
        "README" => return Some(CheckKind::Readme),
        "AUTHORS" => return Some(CheckKind::Authors),
        "LICENSE" | "LICENCE" | "COPYING" => return Some(CheckKind::License),
        _ => {}
    }
    if ["LICENSE-", "LICENCE-", "LICENSE_", "LICENCE_"]
        .iter()
        .any(|p| stem.starts_with(p))
    {
        return Some(CheckKind::License);
    }
    match upper.as_str() {
        "CODEMETA.JSON" | "CITATION.CFF" => Some(CheckKind::CitationMetadata),
        _ => None,
    }
}

/// Audits the top level of `path`. Never writes to the tree.
pub fn audit(path: &Path) -> Result<AuditReport, AuditError> {
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |source| AuditError { path: p, source }
    };
    let mut found = Found::default();
    let mut names = Vec::new();
    for entry in fs::read_dir(path).map_err(io(path))? {
        let entry = entry.map_err(io(path))?;
        let entry_path = entry.path();
        // follows symlinks; dangling links and directories are ignored
        if !fs::metadata(&entry_path)
            .map(|m| m.is_file())
            .unwrap_or(false)
        {
            continue;
        }
        names.push((entry.file_name().to_string_lossy().into_owned(), entry_path));
    }
    names.sort();
    for (name, p) in names {
        let bucket = match classify(&name) {
            Some(CheckKind::Readme) => &mut found.readme,
            Some(CheckKind::Authors) => &mut found.authors,
            Some(CheckKind::License) => &mut found.license,
            Some(CheckKind::CitationMetadata) => &mut found.citation,
            _ => continue,
        };
        bucket.push((name, p));
    }

    let read = |p: &Path| fs::read(p).map_err(io(p));

    let mut checks = Vec::with_capacity(5);

    // README
    let mut readme = key_file(CheckKind::Readme, &found.readme, read)?;
    if readme.status == CheckStatus::Present {
        let text = found
            .readme
            .iter()
            .map(|(_, p)| read(p).map(|b| String::from_utf8_lossy(&b).to_lowercase()))
            .collect::<Result<Vec<_>, _>>()?
            .join("\n");
        readme.notes.extend(readme_hints(&text));
    }
    checks.push(readme);

    // AUTHORS
    let mut authors = key_file(CheckKind::Authors, &found.authors, read)?;
    if authors.status == CheckStatus::Present {
        authors.notes.push(format!(
            "contributor roles may be listed using the taxonomy: {CONTRIBUTOR_ROLES}"
        ));
    }
    checks.push(authors);

    // LICENSE
    let mut license = key_file(CheckKind::License, &found.license, read)?;
    if license.status == CheckStatus::Missing {
        license.notes.push(
            "add a LICENSE file at the top level, naming the license with its standard SPDX name (https://spdx.org/licenses/)".into(),
        );
    }
    checks.push(license);

    // citation metadata
    let citation_files: Vec<String> = found.citation.iter().map(|(n, _)| n.clone()).collect();
    checks.push(CheckResult {
        check: CheckKind::CitationMetadata,
        status: if citation_files.is_empty() {
            CheckStatus::Missing
        } else {
            CheckStatus::Present
        },
        notes: if citation_files.is_empty() {
            vec!["optional: codemeta.json or CITATION.cff tell others how to cite this work".into()]
        } else {
            vec![]
        },
        files: citation_files,
    });

    // SPDX name
    let mut licenses = Vec::new();
    for (name, p) in &found.license {
        let text = String::from_utf8_lossy(&read(p)?).into_owned();
        licenses.extend(identify_licenses(&text));
        licenses.extend(license_from_file_name(name));
    }
    licenses.sort();
    licenses.dedup();
    let license_files: Vec<String> = found.license.iter().map(|(n, _)| n.clone()).collect();
    let spdx = if license_files.is_empty() {
        CheckResult {
            check: CheckKind::SpdxLicenseName,
            status: CheckStatus::Missing,
            files: vec![],
            notes: vec!["no license file to check".into()],
        }
    } else if licenses.is_empty() {
        CheckResult {
            check: CheckKind::SpdxLicenseName,
            status: CheckStatus::Warning,
            files: license_files,
            notes: vec![
                "no standard license name recognized; use a name from https://spdx.org/licenses/"
                    .into(),
            ],
        }
    } else {
        CheckResult {
            check: CheckKind::SpdxLicenseName,
            status: CheckStatus::Present,
            files: license_files,
            notes: vec![format!("recognized: {}", licenses.join(", "))],
        }
    };
    checks.push(spdx);

    let ready = checks
        .iter()
        .filter(|c| {
            matches!(
                c.check,
                CheckKind::Readme | CheckKind::Authors | CheckKind::License
            )
        })
        .all(|c| c.status == CheckStatus::Present);
    Ok(AuditReport {
        ready,
        checks,
        licenses,
    })
}

fn key_file(
    kind: CheckKind,
    files: &[(String, PathBuf)],
    read: impl Fn(&Path) -> Result<Vec<u8>, AuditError>,
) -> Result<CheckResult, AuditError> {
    let names: Vec<String> = files.iter().map(|(n, _)| n.clone()).collect();
    if files.is_empty() {
        return Ok(CheckResult {
            check: kind,
            status: CheckStatus::Missing,
            files: names,
            notes: vec![format!("no {} file at the top level", kind.label())],
        });
    }
    let mut any_content = false;
    for (_, p) in files {
        if read(p)?.iter().any(|b| !b.is_ascii_whitespace()) {
            any_content = true;
        }
    }
    let (status, notes) = if any_content {
        (CheckStatus::Present, vec![])
    } else {
        (
            CheckStatus::Warning,
            vec![format!("{} file is empty", kind.label())],
        )
    };
    Ok(CheckResult {
        check: kind,
        status,
        files: names,
        notes,
    })
}

/// Informational hints about recommended README content.
fn readme_hints(lowercase_text: &str) -> Vec<String> {
    let has = |words: &[&str]| words.iter().any(|w| lowercase_text.contains(w));
    let mut notes = Vec::new();
    if !has(&["http://", "https://"]) {
        notes.push("README has no links; consider pointing to the project website, documentation and development platform".into());
    }
    if !has(&["install", "build", "compil"]) {
        notes.push("README does not seem to include build or installation instructions".into());
    }
    if !has(&["contact", "support", "issue", "mailing list", "@"]) {
        notes.push("README does not seem to include contact or support information".into());
    }
    notes
}

// License headings that do not spell out the SPDX full name.
const HEADINGS: &[(&[&str], &str)] = &[
    (
        &["gnu affero general public license", "version 3"],
        "AGPL-3.0-only",
    ),
    (
        &["gnu lesser general public license", "version 3"],
        "LGPL-3.0-only",
    ),
    (
        &["gnu lesser general public license", "version 2.1"],
        "LGPL-2.1-only",
    ),
    (
        &["gnu library general public license", "version 2"],
        "LGPL-2.0-only",
    ),
    (&["gnu general public license", "version 3"], "GPL-3.0-only"),
    (&["gnu general public license", "version 2"], "GPL-2.0-only"),
    (&["apache license", "version 2.0"], "Apache-2.0"),
    (&["mozilla public license version 2.0"], "MPL-2.0"),
    (&["mozilla public license, version 2.0"], "MPL-2.0"),
    (&["bsd 3-clause license"], "BSD-3-Clause"),
    (&["bsd 2-clause license"], "BSD-2-Clause"),
    (&["the unlicense"], "Unlicense"),
    (&["cc0 1.0 universal"], "CC0-1.0"),
    (&["eclipse public license - v 2.0"], "EPL-2.0"),
    (&["boost software license - version 1.0"], "BSL-1.0"),
];

// Short ids that are also ordinary words are only matched from this list.
const SHORT_IDS: &[&str] = &["MIT", "ISC", "Zlib", "Unlicense", "0BSD"];

fn normalize(text: &str) -> String {
    text.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// SPDX identifiers named in a license text.
///
/// Matches `SPDX-License-Identifier:` tags anywhere, and license names,
/// well-known headings and SPDX ids in the first lines of the text. This is
/// name matching, not full-text comparison.
pub fn identify_licenses(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();

    for line in text.lines() {
        if let Some((_, expr)) = line.split_once("SPDX-License-Identifier:") {
            let expr = expr.trim().trim_end_matches("*/").trim();
            if let Ok(parsed) = spdx::Expression::parse_mode(expr, spdx::ParseMode::LAX) {
                for req in parsed.requirements() {
                    if let Some(id) = req.req.license.id() {
                        out.push(id.name.to_string());
                    }
                }
            }
        }
    }

    let head: String = text.lines().take(40).collect::<Vec<_>>().join("\n");
    let norm = normalize(&head);

    for (needles, id) in HEADINGS {
        if needles.iter().all(|n| norm.contains(n)) {
            out.push((*id).to_string());
        }
    }

    for &(id, full_name, _) in spdx::identifiers::LICENSES {
        if full_name.len() < 10 {
            continue;
        }
        let Some(lic) = spdx::license_id(id) else {
            continue;
        };
        if lic.is_deprecated() {
            continue;
        }
        if contains_phrase(&norm, &full_name.to_lowercase()) {
            out.push(id.to_string());
        }
    }

    for token in head.split(|c: char| !(c.is_ascii_alphanumeric() || matches!(c, '-' | '.' | '+')))
    {
        let token = token.trim_end_matches('.');
        let distinctive =
            token.len() >= 3 && token.chars().any(|c| c.is_ascii_digit()) && token.contains('-');
        if !(distinctive || SHORT_IDS.contains(&token)) {
            continue;
        }
        if let Some(lic) = spdx::license_id(token) {
            if !lic.is_deprecated() {
                out.push(lic.name.to_string());
            }
        }
    }

    out.sort();
    out.dedup();
    out
}

fn contains_phrase(haystack: &str, phrase: &str) -> bool {
    haystack.match_indices(phrase).any(|(i, _)| {
        let before = haystack[..i].chars().next_back();
        let after = haystack[i + phrase.len()..].chars().next();
        !before.is_some_and(|c| c.is_alphanumeric()) && !after.is_some_and(|c| c.is_alphanumeric())
    })
}

/// `LICENSE-MIT`, `LICENSE-APACHE`, ...
fn license_from_file_name(name: &str) -> Option<String> {
    let upper = name.to_ascii_uppercase();
    let stem = upper.split('.').next().unwrap_or("");
    let suffix = stem
        .strip_prefix("LICENSE")
        .or_else(|| stem.strip_prefix("LICENCE"))?
        .trim_start_matches(['-', '_']);
    if suffix.is_empty() {
        return None;
    }
    spdx::imprecise_license_id(suffix)
        .filter(|(_, len)| *len == suffix.len())
        .map(|(lic, _)| lic.name.to_string())
        .or_else(|| {
            spdx::identifiers::LICENSES
                .iter()
                .find(|(id, _, _)| id.eq_ignore_ascii_case(suffix))
                .map(|(id, _, _)| id.to_string())
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifies_names() {
        assert_eq!(classify("README"), Some(CheckKind::Readme));
        assert_eq!(classify("readme.md"), Some(CheckKind::Readme));
        assert_eq!(classify("README.en.rst"), Some(CheckKind::Readme));
        assert_eq!(classify("Authors.txt"), Some(CheckKind::Authors));
        assert_eq!(classify("COPYING"), Some(CheckKind::License));
        assert_eq!(classify("LICENSE-MIT"), Some(CheckKind::License));
        assert_eq!(classify("licence.md"), Some(CheckKind::License));
        assert_eq!(classify("Codemeta.json"), Some(CheckKind::CitationMetadata));
        assert_eq!(classify("CITATION.cff"), Some(CheckKind::CitationMetadata));
        assert_eq!(classify("READ_ME"), None);
        assert_eq!(classify("LICENSES"), None);
    }

    #[test]
    fn identifies_common_headings() {
        assert_eq!(
            identify_licenses("MIT License\n\nCopyright (c) 2020 X\n"),
            ["MIT"]
        );
        assert_eq!(
            identify_licenses("                    GNU GENERAL PUBLIC LICENSE\n                       Version 3, 29 June 2007\n"),
            ["GPL-3.0-only"]
        );
        assert_eq!(
            identify_licenses("                                 Apache License\n                           Version 2.0, January 2004\n"),
            ["Apache-2.0"]
        );
        assert_eq!(
            identify_licenses("// SPDX-License-Identifier: MIT OR Apache-2.0\n"),
            ["Apache-2.0", "MIT"]
        );
        assert_eq!(
            identify_licenses("License: BSD-3-Clause\n"),
            ["BSD-3-Clause"]
        );
    }

    #[test]
    fn ignores_non_names() {
        assert!(identify_licenses("All rights reserved. Do not copy.\n").is_empty());
        assert!(identify_licenses("This JSON file is free for Fair use.\n").is_empty());
        assert!(identify_licenses("").is_empty());
    }

    #[test]
    fn file_name_suffix() {
        assert_eq!(
            license_from_file_name("LICENSE-MIT").as_deref(),
            Some("MIT")
        );
        assert_eq!(
            license_from_file_name("LICENSE-APACHE").as_deref(),
            Some("Apache-2.0")
        );
        assert_eq!(license_from_file_name("LICENSE"), None);
        assert_eq!(license_from_file_name("LICENSE-foo"), None);
    }

    #[test]
    fn gpl_fixture_is_recognized() {
        let text = include_str!("../tests/fixtures/GPL-3.0.txt");
        assert_eq!(identify_licenses(text), ["GPL-3.0-only"]);
    }
}
