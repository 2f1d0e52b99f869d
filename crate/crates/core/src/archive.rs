//! Blocking client for the archive's public web API.
//!
//! Covers the "save code now" endpoint (request archival of an origin and
//! follow its progress) and the identifier resolution endpoint. Requests
//! that change server state are never retried; idempotent GETs are retried
//! once on transport failures and 5xx answers.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::model::{CoreIdentifier, Origin};

pub const DEFAULT_API_BASE: &str = "https://archive.softwareheritage.org/api/1";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("malformed origin: {0}")]
    MalformedOrigin(String),
    #[error("visit type {0:?} is not one of git, svn, hg")]
    UnsupportedVisitType(String),
    #[error("network error: {0}")]
    Network(String),
    #[error("request rejected by the archive (HTTP {status}): {reason}")]
    ApiRejected { status: u16, reason: String },
    #[error("rate limited by the archive{}", .retry_after.map(|s| format!(", retry after {s}s")).unwrap_or_default())]
    RateLimited { retry_after: Option<u64> },
    #[error("not found: {0}")]
    NotFound(String),
    #[error("unexpected payload: {0}")]
    UnexpectedPayload(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(into = "String")]
pub enum VisitType {
    Git,
    Svn,
    Hg,
    /// Any other loader name; only accepted when the client allows it.
    Other(String),
}

impl VisitType {
    pub fn as_str(&self) -> &str {
        match self {
            VisitType::Git => "git",
            VisitType::Svn => "svn",
            VisitType::Hg => "hg",
            VisitType::Other(s) => s,
        }
    }
}

impl fmt::Display for VisitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<VisitType> for String {
    fn from(v: VisitType) -> String {
        v.as_str().to_string()
    }
}

impl FromStr for VisitType {
    type Err = ArchiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "git" => VisitType::Git,
            "svn" => VisitType::Svn,
            "hg" => VisitType::Hg,
            other
                if !other.is_empty()
                    && other
                        .bytes()
                        .all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_') =>
            {
                VisitType::Other(other.to_string())
            }
            other => return Err(ArchiveError::UnsupportedVisitType(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaveRequest {
    pub visit_type: VisitType,
    pub origin: Origin,
}

impl SaveRequest {
    pub fn new(visit_type: VisitType, origin: &str) -> Result<Self, ArchiveError> {
        let origin =
            Origin::new(origin).map_err(|e| ArchiveError::MalformedOrigin(e.to_string()))?;
        Ok(SaveRequest { visit_type, origin })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RequestState {
    Accepted,
    Rejected,
    Pending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskState {
    Unknown,
    Scheduled,
    Running,
    Succeeded,
    Failed,
}

impl TaskState {
    fn from_api(s: &str) -> Self {
        match s {
            "scheduled" => TaskState::Scheduled,
            "running" => TaskState::Running,
            "succeeded" => TaskState::Succeeded,
            "failed" => TaskState::Failed,
            // "not created", "not yet scheduled", and anything newer
            _ => TaskState::Unknown,
        }
    }

    pub fn is_final(self) -> bool {
        matches!(self, TaskState::Succeeded | TaskState::Failed)
    }
}

/// State of one save request as reported by the archive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaveStatus {
    pub id: Option<u64>,
    pub origin_url: String,
    pub visit_type: String,
    pub request_state: RequestState,
    pub task_state: TaskState,
    pub request_date: Option<String>,
    pub visit_date: Option<String>,
    /// Set for rejected requests.
    pub reason: Option<String>,
}

impl SaveStatus {
    /// Parses one save-request object. Unknown fields are ignored.
    pub fn from_json(value: &Value) -> Result<Self, ArchiveError> {
        let obj = value
            .as_object()
            .ok_or_else(|| ArchiveError::UnexpectedPayload("expected a JSON object".into()))?;
        let text = |key: &str| obj.get(key).and_then(Value::as_str).map(str::to_string);
        let required = |key: &str| {
            text(key)
                .ok_or_else(|| ArchiveError::UnexpectedPayload(format!("missing field {key:?}")))
        };

        let request_state = match required("save_request_status")?.as_str() {
            "accepted" => RequestState::Accepted,
            "rejected" => RequestState::Rejected,
            "pending" => RequestState::Pending,
            other => {
                return Err(ArchiveError::UnexpectedPayload(format!(
                    "unknown save_request_status {other:?}"
                )))
            }
        };
        let task_state = TaskState::from_api(&required("save_task_status")?);
        let visit_date = text("visit_date");
        if task_state == TaskState::Succeeded && visit_date.is_none() {
            return Err(ArchiveError::UnexpectedPayload(
                "succeeded save task without visit_date".into(),
            ));
        }
        let reason = match request_state {
            RequestState::Rejected => Some(
                text("note")
                    .or_else(|| text("reason"))
                    .unwrap_or_else(|| "no reason given".into()),
            ),
            _ => None,
        };
        Ok(SaveStatus {
            id: obj.get("id").and_then(Value::as_u64),
            origin_url: required("origin_url")?,
            visit_type: required("visit_type")?,
            request_state,
            task_state,
            request_date: text("save_request_date"),
            visit_date,
            reason,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Resolution {
    Known,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct ClientConfig {
    /// API root, e.g. `https://archive.softwareheritage.org/api/1`.
    pub api_base: String,
    pub timeout: Duration,
    /// Accept visit types other than git/svn/hg.
    pub allow_any_visit_type: bool,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            api_base: DEFAULT_API_BASE.into(),
            timeout: DEFAULT_TIMEOUT,
            allow_any_visit_type: false,
        }
    }
}

struct Reply {
    status: u16,
    retry_after: Option<u64>,
    body: String,
}

pub struct ArchiveClient {
    config: ClientConfig,
    agent: ureq::Agent,
}

impl ArchiveClient {
    pub fn new(config: ClientConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .user_agent(concat!("swhid/", env!("CARGO_PKG_VERSION")))
            .build()
            .into();
        ArchiveClient { config, agent }
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    fn endpoint(&self, path: &str) -> String {
        format!("{}/{}", self.config.api_base.trim_end_matches('/'), path)
    }

    fn save_url(&self, req: &SaveRequest) -> Result<String, ArchiveError> {
        if let VisitType::Other(v) = &req.visit_type {
            if !self.config.allow_any_visit_type {
                return Err(ArchiveError::UnsupportedVisitType(v.clone()));
            }
        }
        Ok(self.endpoint(&format!(
            "origin/save/{}/url/{}/",
            req.visit_type, req.origin
        )))
    }

    fn send(&self, method: &str, url: &str) -> Result<Reply, ArchiveError> {
        let result = match method {
            "POST" => self.agent.post(url).send_empty(),
            _ => self
                .agent
                .get(url)
                .header("Accept", "application/json")
                .call(),
        };
        let mut resp = result.map_err(|e| ArchiveError::Network(e.to_string()))?;
        let status = resp.status().as_u16();
        let retry_after = resp
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse().ok());
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| ArchiveError::Network(e.to_string()))?;
        Ok(Reply {
            status,
            retry_after,
            body,
        })
    }

    /// GET with a single retry on transport errors and 5xx.
    fn get(&self, url: &str) -> Result<Reply, ArchiveError> {
        match self.send("GET", url).and_then(server_error_as_network) {
            Err(ArchiveError::Network(_)) => self.send("GET", url),
            other => other,
        }
    }

    /// Submits a save request. Never retried.
    pub fn request_save(&self, req: &SaveRequest) -> Result<SaveStatus, ArchiveError> {
        let url = self.save_url(req)?;
        let reply = self.send("POST", &url)?;
        let value = check_reply(reply)?;
        SaveStatus::from_json(&value)
    }

    /// Latest known save request for this origin and visit type.
    pub fn poll_save(&self, req: &SaveRequest) -> Result<SaveStatus, ArchiveError> {
        let url = self.save_url(req)?;
        let value = check_reply(self.get(&url)?)?;
        let statuses = match &value {
            Value::Array(items) => items
                .iter()
                .map(SaveStatus::from_json)
                .collect::<Result<Vec<_>, _>>()?,
            Value::Object(_) => vec![SaveStatus::from_json(&value)?],
            _ => {
                return Err(ArchiveError::UnexpectedPayload(
                    "expected a list of save requests".into(),
                ))
            }
        };
        statuses
            .into_iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.request_date.cmp(&b.request_date).then(ia.cmp(ib)))
            .map(|(_, s)| s)
            .ok_or_else(|| ArchiveError::NotFound(format!("no save request for {}", req.origin)))
    }

    /// Whether the archive knows the object. Server failures are errors,
    /// not "unknown".
    pub fn check_resolves(&self, id: &CoreIdentifier) -> Result<Resolution, ArchiveError> {
        let url = self.endpoint(&format!("resolve/{id}/"));
        let reply = self.get(&url)?;
        match reply.status {
            404 => Ok(Resolution::Unknown),
            _ => check_reply(reply).map(|_| Resolution::Known),
        }
    }
}

fn server_error_as_network(reply: Reply) -> Result<Reply, ArchiveError> {
    if reply.status >= 500 {
        return Err(ArchiveError::Network(format!(
            "server returned HTTP {}",
            reply.status
        )));
    }
    Ok(reply)
}

fn error_reason(body: &str) -> Option<String> {
    let value: Value = serde_json::from_str(body).ok()?;
    ["reason", "detail", "error"]
        .iter()
        .find_map(|k| value.get(k).and_then(Value::as_str).map(str::to_string))
}

/// Maps status codes to errors and parses the JSON body of successes.
fn check_reply(reply: Reply) -> Result<Value, ArchiveError> {
    let reply = server_error_as_network(reply)?;
    match reply.status {
        200..=299 => serde_json::from_str(&reply.body)
            .map_err(|e| ArchiveError::UnexpectedPayload(format!("invalid JSON: {e}"))),
        404 => Err(ArchiveError::NotFound(
            error_reason(&reply.body).unwrap_or_else(|| "resource not found".into()),
        )),
        429 => Err(ArchiveError::RateLimited {
            retry_after: reply.retry_after,
        }),
        status => Err(ArchiveError::ApiRejected {
            status,
            reason: error_reason(&reply.body).unwrap_or_else(|| format!("HTTP {status}")),
        }),
    }
}
