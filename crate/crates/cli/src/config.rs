use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use specball_core::cmatrix::RANK_TOL;
use specball_core::cpoly::CLUSTER_RADIUS;
use specball_core::domains::BOUNDARY_TOL;
use specball_core::green_lab::{default_radii, DEFAULT_ANGLES};

use crate::GlobalArgs;

pub const DEFAULT_SEED: u64 = 20240;
pub const DEFAULT_SAMPLES: usize = 2000;
pub const DEFAULT_FIT_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    /// Base radius for merging computed roots into one eigenvalue.
    pub root: f64,
    pub rank: f64,
    /// Half-width of the band reported as `boundary`.
    pub boundary: f64,
    /// Allowed deviation of a fitted slope from its expected value.
    pub fit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grids {
    pub radii: Vec<f64>,
    pub angles: usize,
    pub samples: usize,
}

/// Fully resolved settings of one run, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub tolerances: Tolerances,
    pub grids: Grids,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileTolerances {
    root: Option<f64>,
    rank: Option<f64>,
    boundary: Option<f64>,
    fit: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileGrids {
    radii: Option<Vec<f64>>,
    angles: Option<usize>,
    samples: Option<usize>,
}

/// Contents of a `--config` TOML file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    format: Option<Format>,
    out: Option<PathBuf>,
    #[serde(default)]
    tolerances: FileTolerances,
    #[serde(default)]
    grids: FileGrids,
}

fn read_file_config(path: &Path) -> anyhow::Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read config file {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| anyhow::anyhow!("malformed config file {}: {e}", path.display()))
}

/// Merges flags (which already carry environment overrides) over the config
/// file over built-in defaults, then validates the result.
pub fn resolve(args: &GlobalArgs) -> anyhow::Result<RunConfig> {
    let file = match &args.config {
        Some(p) => read_file_config(p)?,
        None => FileConfig::default(),
    };
    let config = RunConfig {
        seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        format: args.format.or(file.format).unwrap_or(Format::Json),
        out: args.out.clone().or(file.out),
        tolerances: Tolerances {
            root: args.root_tol.or(file.tolerances.root).unwrap_or(CLUSTER_RADIUS),
            rank: args.rank_tol.or(file.tolerances.rank).unwrap_or(RANK_TOL),
            boundary: args.boundary_tol.or(file.tolerances.boundary).unwrap_or(BOUNDARY_TOL),
            fit: args.fit_tol.or(file.tolerances.fit).unwrap_or(DEFAULT_FIT_TOL),
        },
        grids: Grids {
            radii: args.radii.clone().or(file.grids.radii).unwrap_or_else(default_radii),
            angles: args.angles.or(file.grids.angles).unwrap_or(DEFAULT_ANGLES),
            samples: args.samples.or(file.grids.samples).unwrap_or(DEFAULT_SAMPLES),
        },
    };
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    fn validate(&self) -> anyhow::Result<()> {
        let t = &self.tolerances;
        for (name, v) in [("root", t.root), ("rank", t.rank), ("boundary", t.boundary), ("fit", t.fit)] {
            anyhow::ensure!(v.is_finite() && v > 0.0, "tolerance {name} must be positive, got {v}");
        }
        let r = &self.grids.radii;
        anyhow::ensure!(r.len() >= 2, "at least two radii are needed, got {}", r.len());
        anyhow::ensure!(
            r.iter().all(|&x| x.is_finite() && x > 0.0),
            "radii must be positive and finite"
        );
        anyhow::ensure!(r.windows(2).all(|w| w[1] < w[0]), "radii must be strictly decreasing");
        anyhow::ensure!(self.grids.angles >= 1, "at least one angle per radius is needed");
        Ok(())
    }
}
