//! Subcommands that talk to the archive.

use std::thread;
use std::time::Duration;

use clap::Args;
use serde_json::json;
use swhid::archive::{ArchiveError, RequestState, SaveRequest, SaveStatus, TaskState};

use crate::{print_json, CmdResult, Global, Outcome};

#[derive(Args)]
pub struct SaveArgs {
    /// Repository URL to archive
    origin: String,
    #[arg(long, default_value = "git")]
    visit_type: String,
    /// Submit a new request even if one already exists
    #[arg(long)]
    force: bool,
    /// Poll until the save task finishes
    #[arg(long)]
    wait: bool,
    /// Seconds between polls with --wait
    #[arg(long, default_value_t = 30)]
    interval: u64,
}

fn usable(s: &SaveStatus) -> bool {
    s.request_state != RequestState::Rejected && s.task_state != TaskState::Failed
}

pub fn save(g: &Global, args: &SaveArgs) -> CmdResult {
    let req = SaveRequest::new(g.visit_type(&args.visit_type)?, &args.origin)?;
    let client = g.client()?;

    let existing = if args.force {
        None
    } else {
        match client.poll_save(&req) {
            Ok(s) if usable(&s) => Some(s),
            Ok(_) | Err(ArchiveError::NotFound(_)) => None,
            Err(e) => return Err(e.into()),
        }
    };
    let created = existing.is_none();
    let mut status = match existing {
        Some(s) => s,
        None => client.request_save(&req)?,
    };
    if args.wait {
        while status.request_state == RequestState::Accepted && !status.task_state.is_final() {
            thread::sleep(Duration::from_secs(args.interval));
            status = client.poll_save(&req)?;
        }
    }
    report(g, &status, Some(created));
    Ok(outcome(&status))
}

pub fn status(g: &Global, origin: &str, visit_type: &str) -> CmdResult {
    let req = SaveRequest::new(g.visit_type(visit_type)?, origin)?;
    let status = g.client()?.poll_save(&req)?;
    report(g, &status, None);
    Ok(outcome(&status))
}

fn outcome(s: &SaveStatus) -> Outcome {
    if usable(s) {
        Outcome::Ok
    } else {
        Outcome::Failed
    }
}

fn report(g: &Global, s: &SaveStatus, created: Option<bool>) {
    if g.json {
        let mut v = serde_json::to_value(s).expect("status serializes");
        if let Some(c) = created {
            v["created"] = json!(c);
        }
        print_json(&v);
        return;
    }
    if let Some(c) = created {
        println!(
            "{}",
            if c {
                "save request submitted"
            } else {
                "save request already exists"
            }
        );
    }
    let text = |v: &serde_json::Value| v.as_str().unwrap_or("-").to_string();
    let v = serde_json::to_value(s).expect("status serializes");
    println!("origin: {} ({})", s.origin_url, s.visit_type);
    println!("request: {}", text(&v["request_state"]));
    println!("task: {}", text(&v["task_state"]));
    if let Some(d) = &s.request_date {
        println!("requested: {d}");
    }
    if let Some(d) = &s.visit_date {
        println!("visited: {d}");
    }
    if let Some(r) = &s.reason {
        println!("reason: {r}");
    }
}
