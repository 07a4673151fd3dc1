use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tileres::pipeline::RunParams;
use tileres::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Tower,
    Stone,
    Verify,
    Render,
}

/// The config file as written. Every rational is a `"p/q"` string.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    mode: Mode,
    dim: usize,
    depth: usize,
    seed: u64,
    /// Diameter bounds for levels `1..=depth`; dyadic by default.
    max_diams: Option<Vec<String>>,
    stone_generators: Option<usize>,
    samples_per_face: Option<usize>,
    out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: Mode,
    pub params: RunParams,
    pub out: PathBuf,
}

/// Resolved settings echoed into the stats. The output directory is left
/// out so that runs differing only in where they write compare equal.
#[derive(Serialize)]
struct Echo<'a> {
    mode: Mode,
    dim: usize,
    depth: usize,
    seed: u64,
    max_diams: &'a [Rational],
    stone_generators: usize,
    samples_per_face: usize,
}

impl RunConfig {
    pub fn load(path: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text, seed, out)
    }

    pub fn parse(text: &str, seed: Option<u64>, out: Option<PathBuf>) -> Result<Self> {
        let f: FileConfig = toml::from_str(text).context("parsing config")?;
        let mut params = RunParams::new(f.dim, f.depth, seed.unwrap_or(f.seed));
        if let Some(ds) = &f.max_diams {
            if ds.len() != f.depth {
                bail!("max_diams has {} entries, depth is {}", ds.len(), f.depth);
            }
            params.schedule.truncate(1);
            for s in ds {
                let r: Rational = s.parse().with_context(|| format!("max_diams entry {s:?}"))?;
                params.schedule.push(r);
            }
        }
        if let Some(g) = f.stone_generators {
            params.stone_generators = g;
        }
        if let Some(s) = f.samples_per_face {
            params.samples_per_face = s;
        }
        params.validate()?;
        let out = out.or(f.out).unwrap_or_else(|| PathBuf::from("out"));
        Ok(RunConfig { mode: f.mode, params, out })
    }

    pub fn echo(&self) -> serde_json::Value {
        let p = &self.params;
        serde_json::to_value(Echo {
            mode: self.mode,
            dim: p.dim,
            depth: p.depth,
            seed: p.seed,
            max_diams: &p.schedule[1..],
            stone_generators: p.stone_generators,
            samples_per_face: p.samples_per_face,
        })
        .expect("echo serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = RunConfig::parse("mode = \"tower\"\ndim = 2\ndepth = 2\nseed = 5\n", Some(9), None).unwrap();
        assert_eq!(c.params.seed, 9);
        assert_eq!(c.params.schedule, vec![Rational::one(), Rational::new(1, 2), Rational::new(1, 4)]);
        assert_eq!(c.params.stone_generators, 12);
        assert_eq!(c.out, PathBuf::from("out"));
        let e = c.echo();
        assert_eq!(e["max_diams"][1], "1/4");
        assert!(e.get("out").is_none());
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "mode = \"tower\"\ndim = 4\ndepth = 1\nseed = 0\n",
            "mode = \"tower\"\ndim = 1\ndepth = 7\nseed = 0\n",
            "mode = \"carve\"\ndim = 1\ndepth = 1\nseed = 0\n",
            "mode = \"tower\"\ndim = 1\ndepth = 2\nseed = 0\nmax_diams = [\"1/2\"]\n",
            "mode = \"tower\"\ndim = 1\ndepth = 1\nseed = 0\nmax_diams = [\"0.5\"]\n",
            "mode = \"tower\"\ndim = 1\ndepth = 1\nseed = 0\ncolour = 1\n",
        ] {
            assert!(RunConfig::parse(bad, None, None).is_err(), "{bad}");
        }
        let c = RunConfig::parse("mode = \"stone\"\ndim = 1\ndepth = 2\nseed = 0\nmax_diams = [\"2/3\", \"1/3\"]\n", None, None)
            .unwrap();
        assert_eq!(c.params.schedule[2], Rational::new(1, 3));
    }
}
