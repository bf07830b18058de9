//! `key = value` run configuration; command-line flags take precedence.

use anyhow::{bail, Context, Result};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
    Svg,
}

impl Format {
    pub fn parse(s: &str) -> Result<Format> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            "svg" => Ok(Format::Svg),
            _ => bail!("format must be json, text or svg, got {s:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub nmax: usize,
    /// `u` positions above the bottom cell.
    pub u_window: i64,
    /// `σ` runs over `[-sigma_window, sigma_window]`.
    pub sigma_window: i64,
    pub a_window: i64,
    /// Bound on the `v`-weight of chart monomials.
    pub weight_window: i64,
    pub trunc_order: usize,
    pub format: Format,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            nmax: 3,
            u_window: 16,
            sigma_window: 24,
            a_window: 8,
            weight_window: 7,
            trunc_order: 8,
            format: Format::Text,
            seed: 0,
        }
    }
}

fn positive<T: std::str::FromStr + PartialOrd + Default>(key: &str, v: &str) -> Result<T> {
    let x: T = v.parse().ok().with_context(|| format!("{key}: not a number: {v:?}"))?;
    if x <= T::default() {
        bail!("{key} must be positive, got {v}");
    }
    Ok(x)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut c = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("line {}: expected key = value", n + 1);
            };
            let (k, v) = (k.trim(), v.trim());
            match k {
                "nmax" => c.nmax = positive(k, v)?,
                "u_window" => c.u_window = positive(k, v)?,
                "sigma_window" => c.sigma_window = positive(k, v)?,
                "a_window" => c.a_window = positive(k, v)?,
                "weight_window" => c.weight_window = positive(k, v)?,
                "trunc_order" => c.trunc_order = positive(k, v)?,
                "format" => c.format = Format::parse(v)?,
                "seed" => c.seed = v.parse().ok().with_context(|| format!("seed: not a number: {v:?}"))?,
                _ => bail!("line {}: unknown key {k:?}", n + 1),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        RunConfig::parse(&text).with_context(|| format!("in {}", path.display()))
    }
}
