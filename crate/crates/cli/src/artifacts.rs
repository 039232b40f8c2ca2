//! Writing artifacts: everything goes to a staging directory first and is
//! moved into place only once the whole set is complete.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{Format, ScenarioConfig};
use crate::report::{checks_table, Outcome, Profile};

struct Staged {
    name: String,
    bytes: Vec<u8>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn render(outcome: &Outcome, format: Format) -> Vec<Staged> {
    let mut files = Vec::new();
    let checks = checks_table(&outcome.checks);
    for table in outcome.tables.iter().chain(std::iter::once(&checks)) {
        if format.csv() {
            files.push(Staged { name: format!("{}.csv", table.name), bytes: table.to_csv().into_bytes() });
        }
        if format.json() {
            let body = serde_json::to_vec_pretty(&table.to_json()).expect("table JSON");
            files.push(Staged { name: format!("{}.json", table.name), bytes: body });
        }
    }
    let report = json!({
        "passed": outcome.passed(),
        "summary": outcome.summary,
        "checks": outcome.checks,
    });
    files.push(Staged {
        name: "report.json".into(),
        bytes: serde_json::to_vec_pretty(&report).expect("report JSON"),
    });
    files
}

fn manifest(config: &ScenarioConfig, profile: Profile, outcome: &Outcome, files: &[Staged]) -> Value {
    json!({
        "tool": "lax-shortcuts",
        "version": env!("CARGO_PKG_VERSION"),
        "created": chrono::Utc::now().to_rfc3339(),
        "scenario": config.scenario.name(),
        "config": config,
        "tolerance_profile": profile.name(),
        "files": files.iter().map(|f| json!({
            "name": f.name,
            "bytes": f.bytes.len(),
            "sha256": hex(&Sha256::digest(&f.bytes)),
        })).collect::<Vec<_>>(),
        "checks": outcome.checks,
        "passed": outcome.passed(),
        "summary": outcome.summary,
    })
}

/// Writes all artifacts plus `manifest.json` into `out`. On any error the
/// staging directory is removed and `out` holds no new files.
pub fn write_all(
    out: &Path,
    config: &ScenarioConfig,
    profile: Profile,
    format: Format,
    outcome: &Outcome,
) -> io::Result<Vec<PathBuf>> {
    let files = render(outcome, format);
    let man = manifest(config, profile, outcome, &files);
    fs::create_dir_all(out)?;
    let staging = out.join(format!(".staging-{}", std::process::id()));
    let result = (|| {
        fs::create_dir_all(&staging)?;
        for f in &files {
            fs::write(staging.join(&f.name), &f.bytes)?;
        }
        let body = serde_json::to_vec_pretty(&man).map_err(io::Error::other)?;
        fs::write(staging.join("manifest.json"), body)?;
        let mut written = Vec::new();
        for name in files.iter().map(|f| f.name.as_str()).chain(["manifest.json"]) {
            let dest = out.join(name);
            fs::rename(staging.join(name), &dest)?;
            written.push(dest);
        }
        Ok(written)
    })();
    let _ = fs::remove_dir_all(&staging);
    result
}
