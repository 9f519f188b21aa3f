//! Run configuration: a TOML document with `density`, `law`, `scheme`, `run`
//! and `verify` sections. Unknown keys are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use stableforce::angular::{AngularFunction, AngularShape, Cap, Direction};
use stableforce::charfn::Regime;
use stableforce::mc::{ForceLaw, Outer, SimConfig, SpatialDensity};
use stableforce::renorm::{Geometry, PhysicalCase, RenormScheme, SchemeKind};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 0x5EED_F0CE;
pub const DEFAULT_PARTICLES: u64 = 1000;
pub const DEFAULT_REPLICAS: u64 = 2000;
pub const DEFAULT_MOMENT_SAMPLES: usize = 1_000_000;
/// Outer shell radius in units of r_c when none is given.
pub const DEFAULT_SHELL_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub density: DensityConfig,
    pub law: LawConfig,
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub verify: VerifySection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    pub dim: usize,
    #[serde(default)]
    pub nu: f64,
    #[serde(default = "one")]
    pub r_c: f64,
    /// Probability of |r| < r_c; defaults to 1 without an outer shell, else 0.5.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_weight: Option<f64>,
    #[serde(default)]
    pub angular: AngularConfig,
    #[serde(default)]
    pub outer: OuterConfig,
}

/// Shape of g(r̂); the overall scale is fixed by the inner weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AngularConfig {
    Uniform,
    Dipole { amplitude: f64, axis: Vec<f64> },
    /// d = 1 only: weights on +1 and −1.
    TwoPoint { plus: f64, minus: f64 },
    Caps { background: f64, caps: Vec<CapConfig> },
    /// CSV with columns (node coordinates..., value).
    Csv { path: PathBuf },
}

impl Default for AngularConfig {
    fn default() -> Self {
        AngularConfig::Uniform
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapConfig {
    pub axis: Vec<f64>,
    pub cos_radius: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OuterConfig {
    UniformShell {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        l: Option<f64>,
    },
    PowerShell {
        nu_out: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        l: Option<f64>,
    },
    None,
}

impl Default for OuterConfig {
    fn default() -> Self {
        OuterConfig::UniformShell { l: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawConfig {
    pub delta: f64,
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    #[serde(default = "one")]
    pub k: f64,
    /// Realization of a_N for the high-α fluctuation scheme in `renorm-table`.
    #[serde(default = "fixed_size")]
    pub case: PhysicalCase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_particles")]
    pub particles: u64,
    #[serde(default = "default_replicas")]
    pub replicas: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: None,
            particles: DEFAULT_PARTICLES,
            replicas: DEFAULT_REPLICAS,
            threads: None,
            out: None,
            grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    /// Replaces max(0.03, 3·max stderr) when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default = "default_moment_samples")]
    pub moment_samples: usize,
    /// Added to α in the predicted Φ only (negative controls).
    #[serde(default)]
    pub alpha_shift: f64,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self { tolerance: None, moment_samples: DEFAULT_MOMENT_SAMPLES, alpha_shift: 0.0 }
    }
}

fn one() -> f64 {
    1.0
}
fn fixed_size() -> PhysicalCase {
    PhysicalCase::FixedSize
}
fn default_particles() -> u64 {
    DEFAULT_PARTICLES
}
fn default_replicas() -> u64 {
    DEFAULT_REPLICAS
}
fn default_moment_samples() -> usize {
    DEFAULT_MOMENT_SAMPLES
}

/// Command-line overrides, applied after parsing.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub replicas: Option<u64>,
    pub particles: Option<u64>,
    pub grid: Option<String>,
    pub threads: Option<usize>,
}

/// A parsed configuration together with the library objects it resolves to.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub sim: SimConfig,
    pub alpha: f64,
    pub regime: Regime,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable as TOML")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.run.seed = Some(s);
        }
        if let Some(p) = &o.out {
            self.run.out = Some(p.clone());
        }
        if let Some(m) = o.replicas {
            self.run.replicas = m;
        }
        if let Some(n) = o.particles {
            self.run.particles = n;
        }
        if let Some(g) = &o.grid {
            self.run.grid = Some(g.clone());
        }
        if let Some(t) = o.threads {
            self.run.threads = Some(t);
        }
    }

    /// Fills in the seed (with a warning when absent) and builds the
    /// simulation objects.
    pub fn resolve(mut self) -> Result<Resolved, CliError> {
        if self.run.seed.is_none() {
            log::warn!("no seed given; using the default seed {DEFAULT_SEED}");
            self.run.seed = Some(DEFAULT_SEED);
        }
        let sim = self.sim_config()?;
        let alpha = sim.alpha();
        let regime = Regime::classify(alpha)?;
        log::info!("alpha = {alpha}, regime {}", regime.label());
        Ok(Resolved { config: self, sim, alpha, regime })
    }

    /// Hex SHA-256 of the serialized configuration.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    fn sim_config(&self) -> Result<SimConfig, CliError> {
        let d = &self.density;
        let dim = d.dim;
        if !(1..=3).contains(&dim) {
            return Err(CliError::Config(format!("density.dim must be 1, 2 or 3 (got {dim})")));
        }
        if !(d.nu > -(dim as f64)) {
            return Err(CliError::Config(format!(
                "density.nu = {} must exceed -d = {}: the density is not integrable at the origin",
                d.nu,
                -(dim as f64)
            )));
        }
        let g = self.angular_shape()?;
        let outer = match d.outer {
            OuterConfig::UniformShell { l } => Outer::UniformShell { l: l.unwrap_or(DEFAULT_SHELL_FACTOR * d.r_c) },
            OuterConfig::PowerShell { nu_out, l } => {
                Outer::PowerShell { nu_out, l: l.unwrap_or(DEFAULT_SHELL_FACTOR * d.r_c) }
            }
            OuterConfig::None => Outer::None,
        };
        let w = d.inner_weight.unwrap_or(if outer == Outer::None { 1.0 } else { 0.5 });
        let density = SpatialDensity::with_inner_weight(d.nu, &g, d.r_c, w, outer)?;
        let law = ForceLaw { delta: self.law.delta, kappa: self.law.kappa, damping: self.law.damping };
        law.validate()?;
        let geometry = Geometry::new(dim, d.nu, self.law.delta)?;
        let alpha = geometry.alpha();
        let kind = self.scheme.kind;
        if !kind.admits(alpha) {
            let names: Vec<&str> = SchemeKind::admissible_for(alpha).into_iter().map(|k| k.name()).collect();
            return Err(CliError::Config(format!(
                "scheme {} is not defined for alpha = {alpha}; admissible schemes: {}",
                kind.name(),
                names.join(", ")
            )));
        }
        let scheme = match kind {
            SchemeKind::PhysicalFixedSize | SchemeKind::PhysicalFixedForce => {
                RenormScheme::physical(kind, self.scheme.k, geometry)?
            }
            _ => {
                let mut s = RenormScheme::new(kind, alpha, self.scheme.k)?;
                s.geometry = Some(geometry);
                s
            }
        };
        if self.run.replicas < 2 {
            return Err(CliError::Config(
                "run.replicas must be at least 2 (the ECF standard error is undefined for one replica)".into(),
            ));
        }
        Ok(SimConfig::new(density, law, scheme, self.run.particles, self.run.replicas, self.run.seed.unwrap_or(DEFAULT_SEED))?)
    }

    fn angular_shape(&self) -> Result<AngularFunction, CliError> {
        let dim = self.density.dim;
        let dir = |v: &[f64]| -> Result<Direction, CliError> { Ok(Direction::normalize(v)?) };
        let shape = match &self.density.angular {
            AngularConfig::Uniform => AngularShape::Uniform { value: 1.0 },
            AngularConfig::Dipole { amplitude, axis } => {
                AngularShape::Dipole { value: 1.0, amplitude: *amplitude, axis: dir(axis)? }
            }
            AngularConfig::TwoPoint { plus, minus } => {
                if dim != 1 {
                    return Err(CliError::Config("two_point angular law needs dim = 1".into()));
                }
                return Ok(AngularFunction::two_point(*plus, *minus)?);
            }
            AngularConfig::Caps { background, caps } => AngularShape::Caps {
                background: *background,
                caps: caps
                    .iter()
                    .map(|c| Ok(Cap { axis: dir(&c.axis)?, cos_radius: c.cos_radius, value: c.value }))
                    .collect::<Result<_, CliError>>()?,
            },
            AngularConfig::Csv { path } => read_angular_csv(path, dim)?,
        };
        Ok(AngularFunction::new(dim, shape)?)
    }
}

fn read_angular_csv(path: &std::path::Path, dim: usize) -> Result<AngularShape, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut nodes = vec![];
    let mut values = vec![];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if rec.len() != dim + 1 {
            return Err(CliError::Config(format!(
                "{} line {}: expected {} columns, found {}",
                path.display(),
                i + 2,
                dim + 1,
                rec.len()
            )));
        }
        let nums: Vec<f64> = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Config(format!("{} line {}: {e}", path.display(), i + 2)))?;
        nodes.push(Direction::normalize(&nums[..dim])?);
        values.push(nums[dim]);
    }
    Ok(AngularShape::Table { nodes, values })
}
