use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use roelab::complex::Backend;

#[derive(Parser, Debug)]
#[command(name = "roelab", version, about = "Coarse cohomology workbench on finite windows")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stabilized cohomology of a space, one CSV row per tower entry.
    Cohomology(Common),
    /// Rips-complex shadow groups, one CSV row per tower entry.
    RipsShadow(Common),
    /// Run a verification suite and print one PASS/FAIL line per check.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Pair the crossing class at a point of the line with the fundamental class.
    Pair {
        #[command(flatten)]
        common: Common,
        /// Left endpoint of the crossed edge.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        at: i64,
        /// Perturbation rounds of the audit.
        #[arg(long, default_value_t = 20)]
        rounds: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Prism,
    Mv,
    Flasque,
    Additivity,
    Pairing,
    Extension,
    Axioms,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendChoice {
    Ordered,
    Alternating,
    Both,
}

impl BackendChoice {
    pub fn backends(self) -> Vec<Backend> {
        match self {
            BackendChoice::Ordered => vec![Backend::OrderedNormalized],
            BackendChoice::Alternating => vec![Backend::Alternating],
            BackendChoice::Both => vec![Backend::Alternating, Backend::OrderedNormalized],
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON space file or catalog name (point, z, z2, zplus, z_sqcup_z, ...).
    #[arg(long)]
    pub space: Option<String>,
    /// Inclusive scale range `A..B` (or a single scale).
    #[arg(long, value_parser = parse_range, default_value = "1..2")]
    pub scales: RangeInclusive<u32>,
    /// Inclusive degree range `A..B` (or a single degree).
    #[arg(long, value_parser = parse_range, default_value = "0..2")]
    pub degrees: RangeInclusive<u32>,
    /// Comma-separated, strictly increasing core radii.
    #[arg(long, value_delimiter = ',')]
    pub cores: Option<Vec<u32>>,
    #[arg(long)]
    pub padding: Option<u32>,
    #[arg(long)]
    pub margin: Option<usize>,
    #[arg(long, value_enum, default_value_t = BackendChoice::Alternating)]
    pub backend: BackendChoice,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Simplex budget for Rips complexes.
    #[arg(long)]
    pub budget: Option<usize>,
}

impl Common {
    pub fn scale_list(&self) -> Vec<u32> {
        self.scales.clone().collect()
    }

    pub fn degree_list(&self) -> Vec<usize> {
        self.degrees.clone().map(|d| d as usize).collect()
    }
}

pub fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let a: u32 = a.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("bad range end in {s:?}"))?;
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok(a..=b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1..4").unwrap(), 1..=4);
        assert_eq!(parse_range("0..=2").unwrap(), 0..=2);
        assert_eq!(parse_range("3").unwrap(), 3..=3);
        assert!(parse_range("4..1").is_err());
        assert!(parse_range("a..1").is_err());
    }
}
