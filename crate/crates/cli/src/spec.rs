//! Config-file handling and argument parsing for the CLI: kernel, domain,
//! sigma-band and grid syntaxes, plus the flags-over-file-over-defaults
//! merge.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use rfgeom::domain::{ball_geometry, rectangle_geometry, DomainGeometry};
use rfgeom::kernel::RadialKernel;
use rfgeom::scale::ScaleRange;
use rfgeom::Error;

use crate::CommonOpts;

/// JSON config file mirroring the run configuration; every field optional.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct FileConfig {
    pub kernel: Option<String>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub domain: Option<String>,
    pub sigma: Option<String>,
    pub extent: Option<String>,
    pub u: Option<String>,
    pub u_grid: Option<String>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub r_samples: Option<usize>,
    pub alpha: Option<f64>,
    pub lkcs: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub suite: Option<String>,
    pub spacing: Option<f64>,
    pub pad_sigmas: Option<f64>,
    pub points_per_octave: Option<usize>,
}

pub fn load_config(path: Option<&Path>) -> rfgeom::Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::ConfigInvalid(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::ConfigInvalid(format!("bad config {}: {e}", p.display())))
        }
    }
}

/// The merged configuration actually used for a run; echoed into artifacts.
#[derive(Debug, Clone, Default, Serialize)]
pub struct EffectiveConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<String>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extent: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pad_sigmas: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points_per_octave: Option<usize>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl EffectiveConfig {
    pub fn merge(common: &CommonOpts, file: &FileConfig) -> Self {
        EffectiveConfig {
            kernel: common.kernel.clone().or_else(|| file.kernel.clone()),
            n: common.n.or(file.n),
            domain: common.domain.clone().or_else(|| file.domain.clone()),
            sigma: common.sigma.clone().or_else(|| file.sigma.clone()),
            extent: file.extent.clone(),
            u: file.u.clone(),
            reps: file.reps,
            seed: common.seed.or(file.seed),
            r_samples: file.r_samples,
            spacing: file.spacing,
            pad_sigmas: file.pad_sigmas,
            points_per_octave: file.points_per_octave,
            out: common.out.clone().or_else(|| file.out.clone()),
        }
    }

    pub fn require_kernel(&self) -> rfgeom::Result<&str> {
        self.kernel
            .as_deref()
            .ok_or_else(|| Error::ConfigInvalid("--kernel is required".into()))
    }

    pub fn require_n(&self) -> rfgeom::Result<usize> {
        self.n
            .ok_or_else(|| Error::ConfigInvalid("--N is required".into()))
    }

    pub fn require_domain(&self) -> rfgeom::Result<&str> {
        self.domain
            .as_deref()
            .ok_or_else(|| Error::ConfigInvalid("--domain is required".into()))
    }

    pub fn require_sigma(&self) -> rfgeom::Result<&str> {
        self.sigma
            .as_deref()
            .ok_or_else(|| Error::ConfigInvalid("--sigma is required".into()))
    }
}

pub fn parse_kernel(name: &str, n: usize) -> rfgeom::Result<RadialKernel> {
    if n == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    match name {
        "gaussian" => Ok(RadialKernel::gaussian(n)),
        "marr" => Ok(RadialKernel::marr(n)),
        other => Err(Error::ConfigInvalid(format!(
            "unknown kernel '{other}' (expected gaussian or marr)"
        ))),
    }
}

/// `rect:1,2` | `ball:2,1.0` | `custom:path.json` (DomainGeometry literal).
pub fn parse_domain(spec: &str) -> rfgeom::Result<DomainGeometry> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::ConfigInvalid(format!("bad domain spec '{spec}'")))?;
    match kind {
        "rect" => rectangle_geometry(&parse_list(rest)?),
        "ball" => {
            let parts = parse_list(rest)?;
            if parts.len() != 2 {
                return Err(Error::ConfigInvalid(
                    "ball domain needs 'ball:N,radius'".into(),
                ));
            }
            ball_geometry(parts[0] as usize, parts[1])
        }
        "custom" => {
            let text = std::fs::read_to_string(rest)
                .map_err(|e| Error::ConfigInvalid(format!("cannot read {rest}: {e}")))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::ConfigInvalid(format!("bad DomainGeometry in {rest}: {e}")))
        }
        other => Err(Error::ConfigInvalid(format!("unknown domain kind '{other}'"))),
    }
}

pub fn parse_sigma(spec: &str) -> rfgeom::Result<ScaleRange> {
    let parts = parse_list(spec)?;
    if parts.len() != 2 {
        return Err(Error::ConfigInvalid(format!(
            "sigma band needs 'low,high', got '{spec}'"
        )));
    }
    ScaleRange::new(parts[0], parts[1])
}

pub fn parse_list(spec: &str) -> rfgeom::Result<Vec<f64>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::ConfigInvalid(format!("bad number '{s}': {e}")))
        })
        .collect()
}

/// `start:end:step`, inclusive of the end up to rounding.
pub fn parse_u_grid(spec: &str) -> rfgeom::Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::ConfigInvalid(format!(
            "u-grid needs 'start:end:step', got '{spec}'"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|e| Error::ConfigInvalid(format!("bad start: {e}")))?;
    let end: f64 = parts[1]
        .parse()
        .map_err(|e| Error::ConfigInvalid(format!("bad end: {e}")))?;
    let step: f64 = parts[2]
        .parse()
        .map_err(|e| Error::ConfigInvalid(format!("bad step: {e}")))?;
    if !(step > 0.0 && end >= start) {
        return Err(Error::ConfigInvalid("need end >= start and step > 0".into()));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}
