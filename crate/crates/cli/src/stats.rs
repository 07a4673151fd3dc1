use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use tileres::pipeline::Stats;
use tileres::report::{Check, Report};

#[derive(Serialize)]
struct VerifyFile<'a> {
    passed: bool,
    checks: &'a [Check],
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_stats(dir: &Path, stats: &Stats) -> Result<()> {
    write(&dir.join("stats.json"), &stats.to_json())
}

pub fn write_verify(dir: &Path, report: &Report) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&VerifyFile { passed: report.passed(), checks: &report.checks })?;
    text.push('\n');
    write(&dir.join("verify.json"), &text)
}
