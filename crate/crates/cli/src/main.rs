//! `tileres`: build towers and Stone algebras, verify them, write stats and
//! pictures.

mod config;
mod render;
mod stats;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use log::info;
use tileres::pipeline::{self, run_stone, run_tower, run_verify, stone_base};
use tileres::report::{Check, Report};
use tileres::oracle::verify_algebra;

use crate::config::{Mode, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "tileres", version, about = "Exact zero-dimensional resolutions of cubes")]
struct Args {
    /// Config file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the sweeps.
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(args: Args) -> Result<Report> {
    let cfg = RunConfig::load(&args.config, args.seed, args.out)?;
    if cfg.mode == Mode::Render && cfg.params.dim > 2 {
        bail!("render supports d ≤ 2");
    }
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let p = &cfg.params;
    let mut report = Report::default();
    match cfg.mode {
        Mode::Stone => {
            let base = stone_base(p)?;
            let s = run_stone(p, &base)?;
            info!("{} atoms from {} generators", s.algebra.atoms.len(), s.algebra.generators.len());
            report = verify_algebra(s.n, &s.algebra, &p.plan())?;
            stats::write_stats(&cfg.out, &pipeline::stats(p.seed, None, Some(&s), cfg.echo()))?;
        }
        Mode::Tower | Mode::Verify | Mode::Render => {
            let t = run_tower(p)?;
            info!("tiles per level: {:?}", t.tower.levels.iter().map(|l| l.tiles.len()).collect::<Vec<_>>());
            let s = run_stone(p, &t.base)?;
            match cfg.mode {
                Mode::Verify => {
                    report = run_verify(p, &t, &s)?;
                    stats::write_verify(&cfg.out, &report)?;
                }
                _ => {
                    report.checks.extend(t.sweep.checks.iter().cloned());
                    report.checks.extend(s.check.checks.iter().cloned());
                }
            }
            if cfg.mode == Mode::Render {
                for (name, svg) in render::render(&t.tower)? {
                    let path = cfg.out.join(name);
                    std::fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
                }
            }
            stats::write_stats(&cfg.out, &pipeline::stats(p.seed, Some(&t), Some(&s), cfg.echo()))?;
        }
    }
    Ok(report)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("TILERES_LOG")).init();
    let args = Args::parse();
    if let Some(j) = args.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(args) {
        Ok(report) => {
            let failed: Vec<&Check> = report.failures().collect();
            if failed.is_empty() {
                println!("ok: {} checks passed", report.checks.len());
                ExitCode::SUCCESS
            } else {
                for c in &failed {
                    eprintln!("FAIL {}: {}", c.name, c.witness.as_deref().unwrap_or("no witness"));
                }
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
