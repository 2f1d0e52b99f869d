use std::io::{self, BufRead, Write};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use swhid::archive::{self, ArchiveClient, ArchiveError, ClientConfig, VisitType};
use swhid::resolver::{self, ArchiveEndpoints};

mod identify;
mod net;

/// Software Heritage persistent identifiers: parse, compute, resolve, cite,
/// archive.
#[derive(Parser)]
#[command(name = "swhid", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Machine-readable output on stdout
    #[arg(long, global = true)]
    json: bool,
    /// Web API root used by save, status and cite --check
    #[arg(long, global = true, env = "SWHID_API_BASE", default_value = archive::DEFAULT_API_BASE)]
    api_base: String,
    /// Prefix that identifiers are appended to when building browse URLs
    #[arg(long, global = true, env = "SWHID_BROWSE_PREFIX", default_value = resolver::DEFAULT_BROWSE_PREFIX)]
    browse_prefix: String,
    /// Prefix for origin browse URLs
    #[arg(long, global = true, env = "SWHID_ORIGIN_PREFIX", default_value = resolver::DEFAULT_ORIGIN_BROWSE_PREFIX)]
    origin_prefix: String,
    /// Network timeout in seconds
    #[arg(long, global = true, default_value_t = archive::DEFAULT_TIMEOUT.as_secs())]
    timeout: u64,
    /// Refuse every network access
    #[arg(long, global = true, env = "SWHID_OFFLINE")]
    offline: bool,
    /// Accept visit types other than git, svn and hg
    #[arg(long, global = true)]
    allow_any_visit_type: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate identifiers (from arguments, or one per line on stdin)
    Parse { ids: Vec<String> },
    /// Compute the identifier of files, directories, commits or tags
    Identify(identify::IdentifyArgs),
    /// Print the archive browse URL of an identifier or origin
    Url {
        target: String,
        /// Treat TARGET as an origin URL
        #[arg(long)]
        origin: bool,
        /// Percent-encode the identifier or origin
        #[arg(long)]
        encode: bool,
    },
    /// Print a citation snippet for an identifier
    Cite {
        id: String,
        /// Link text (defaults to the identifier)
        #[arg(long)]
        label: Option<String>,
        #[arg(long, value_enum, default_value_t = CiteFormat::Latex)]
        format: CiteFormat,
        /// Also print the LaTeX macro definitions
        #[arg(long)]
        preamble: bool,
        /// Ask the archive whether the object is known; warn if not
        #[arg(long)]
        check: bool,
    },
    /// Ask the archive to save an origin, unless a request already exists
    Save(net::SaveArgs),
    /// Show the latest save request for an origin
    Status {
        origin: String,
        #[arg(long, default_value = "git")]
        visit_type: String,
    },
    /// Check a source tree for archival readiness
    Audit {
        #[arg(default_value = ".")]
        path: std::path::PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CiteFormat {
    Latex,
    Markdown,
}

/// A command failure, mapped to the exit-code contract.
#[derive(Debug)]
enum Failure {
    /// Bad input: exit 1.
    Invalid(String),
    /// I/O or network: exit 3.
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Io(_) => 3,
        }
    }
}

impl From<ArchiveError> for Failure {
    fn from(e: ArchiveError) -> Self {
        match e {
            ArchiveError::MalformedOrigin(_)
            | ArchiveError::UnsupportedVisitType(_)
            | ArchiveError::ApiRejected { .. }
            | ArchiveError::NotFound(_) => Failure::Invalid(e.to_string()),
            ArchiveError::Network(_)
            | ArchiveError::RateLimited { .. }
            | ArchiveError::UnexpectedPayload(_) => Failure::Io(e.to_string()),
        }
    }
}

/// What a successful run asks the process to exit with.
enum Outcome {
    Ok,
    /// Output was produced, but something did not validate.
    Failed,
}

type CmdResult = Result<Outcome, Failure>;

impl Global {
    fn endpoints(&self) -> Result<ArchiveEndpoints, Failure> {
        ArchiveEndpoints::new(&self.browse_prefix, &self.origin_prefix)
            .map_err(|e| Failure::Invalid(e.to_string()))
    }

    fn client(&self) -> Result<ArchiveClient, Failure> {
        if self.offline {
            return Err(Failure::Io("network access disabled by --offline".into()));
        }
        Ok(ArchiveClient::new(ClientConfig {
            api_base: self.api_base.clone(),
            timeout: Duration::from_secs(self.timeout),
            allow_any_visit_type: self.allow_any_visit_type,
        }))
    }

    fn visit_type(&self, s: &str) -> Result<VisitType, Failure> {
        let v: VisitType = s.parse()?;
        if matches!(v, VisitType::Other(_)) && !self.allow_any_visit_type {
            return Err(ArchiveError::UnsupportedVisitType(s.into()).into());
        }
        Ok(v)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Parse { ids } => cmd_parse(&cli.global, ids),
        Command::Identify(args) => identify::run(&cli.global, args),
        Command::Url {
            target,
            origin,
            encode,
        } => cmd_url(&cli.global, target, *origin, *encode),
        Command::Cite {
            id,
            label,
            format,
            preamble,
            check,
        } => cmd_cite(
            &cli.global,
            id,
            label.as_deref(),
            *format,
            *preamble,
            *check,
        ),
        Command::Save(args) => net::save(&cli.global, args),
        Command::Status { origin, visit_type } => net::status(&cli.global, origin, visit_type),
        Command::Audit { path } => cmd_audit(&cli.global, path),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(failure) => {
            let (Failure::Invalid(msg) | Failure::Io(msg)) = &failure;
            eprintln!("swhid: {msg}");
            ExitCode::from(failure.code())
        }
    }
}

fn print_json(value: &Value) {
    let mut out = io::stdout().lock();
    let _ = serde_json::to_writer_pretty(&mut out, value);
    let _ = writeln!(out);
}

fn parse_id(text: &str) -> Result<swhid::QualifiedIdentifier, Failure> {
    swhid::parse(text.trim()).map_err(|e| Failure::Invalid(format!("{text:?}: {e}")))
}

fn cmd_parse(g: &Global, ids: &[String]) -> CmdResult {
    let inputs: Vec<String> = if ids.is_empty() || ids == ["-"] {
        io::stdin()
            .lock()
            .lines()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::Io(format!("reading stdin: {e}")))?
            .into_iter()
            .filter(|l| !l.trim().is_empty())
            .collect()
    } else {
        ids.to_vec()
    };

    let mut all_ok = true;
    let mut reports = Vec::new();
    for (i, input) in inputs.iter().enumerate() {
        let input = input.trim();
        let report = swhid::validate(input);
        all_ok &= report.is_ok();
        for v in &report.violations {
            eprintln!("{input}: {v}");
        }
        if g.json {
            reports.push(json!({
                "input": input,
                "valid": report.is_ok(),
                "identifier": report.identifier.as_ref().map(describe),
                "violations": report.violations,
            }));
        } else if let Some(id) = &report.identifier {
            if i > 0 {
                println!();
            }
            let d = describe(id);
            for key in [
                "identifier",
                "scheme_version",
                "object_type",
                "object_id",
                "origin",
                "lines",
            ] {
                let v = &d[key];
                let text = match v {
                    Value::Null => "-".to_string(),
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                println!("{key}: {text}");
            }
        }
    }
    if g.json {
        print_json(&Value::Array(reports));
    }
    Ok(if all_ok { Outcome::Ok } else { Outcome::Failed })
}

fn describe(id: &swhid::QualifiedIdentifier) -> Value {
    json!({
        "identifier": id.to_string(),
        "scheme_version": id.core.scheme_version(),
        "object_type": id.core.object_type.name(),
        "object_id": id.core.object_id.to_hex(),
        "origin": id.origin.as_ref().map(|o| o.as_str()),
        "lines": id.lines.map(|l| l.to_string()),
    })
}

fn cmd_url(g: &Global, target: &str, origin: bool, encode: bool) -> CmdResult {
    let endpoints = g.endpoints()?;
    let url = if origin {
        let f = if encode {
            resolver::origin_url_encoded
        } else {
            resolver::origin_url
        };
        f(target, &endpoints).map_err(|e| Failure::Invalid(e.to_string()))?
    } else {
        let id = parse_id(target)?;
        if encode {
            resolver::resolve_url_encoded(&id, &endpoints)
        } else {
            resolver::resolve_url(&id, &endpoints)
        }
    };
    if g.json {
        print_json(&json!({ "url": url }));
    } else {
        println!("{url}");
    }
    Ok(Outcome::Ok)
}

fn cmd_cite(
    g: &Global,
    id: &str,
    label: Option<&str>,
    format: CiteFormat,
    preamble: bool,
    check: bool,
) -> CmdResult {
    let endpoints = g.endpoints()?;
    let id = parse_id(id)?;
    for w in id.warnings() {
        eprintln!("{id}: {w}");
    }
    let resolves = if check {
        let r = g.client()?.check_resolves(&id.core)?;
        if r == archive::Resolution::Unknown {
            eprintln!("warning: {} is not known to the archive", id.core);
        }
        Some(r)
    } else {
        None
    };
    let label = label.map(str::to_string).unwrap_or_else(|| id.to_string());
    let (preamble_text, snippet) = match format {
        CiteFormat::Latex => (
            preamble.then(|| resolver::latex_preamble(&endpoints)),
            resolver::latex_citation(&id, &label),
        ),
        CiteFormat::Markdown => (None, resolver::markdown_citation(&id, &label, &endpoints)),
    };
    if g.json {
        print_json(&json!({
            "identifier": id.to_string(),
            "url": resolver::resolve_url(&id, &endpoints),
            "preamble": preamble_text,
            "citation": snippet,
            "resolves": resolves,
        }));
    } else {
        if let Some(p) = preamble_text {
            print!("{p}");
        }
        println!("{snippet}");
    }
    Ok(Outcome::Ok)
}

fn cmd_audit(g: &Global, path: &std::path::Path) -> CmdResult {
    use swhid::audit::CheckStatus;

    let report = swhid::audit::audit(path).map_err(|e| Failure::Io(e.to_string()))?;
    if g.json {
        print_json(&serde_json::to_value(&report).expect("report serializes"));
    } else {
        for c in &report.checks {
            let status = match c.status {
                CheckStatus::Present => "ok",
                CheckStatus::Missing => "missing",
                CheckStatus::Warning => "warning",
            };
            let files = if c.files.is_empty() {
                String::new()
            } else {
                format!(" ({})", c.files.join(", "))
            };
            println!("{:<8} {}{files}", status, c.check.label());
            for n in &c.notes {
                println!("         - {n}");
            }
        }
        println!(
            "{}",
            if report.ready {
                "ready for archival"
            } else {
                "not ready for archival"
            }
        );
    }
    Ok(if report.ready {
        Outcome::Ok
    } else {
        Outcome::Failed
    })
}
