//! Experiment configuration: TOML with an explicit schema version. Family
//! tags and field names here are the stable external interface.

use anyhow::{bail, Context};
use serde::Deserialize;

use levy_noise::levy_measure::{
    asymmetric_half_stable_custom, half_stable_custom, Atom, LevyMeasure, LevyTriplet,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    /// simulate | pair | fubini | growth | dichotomy | charfn | bump-probe | dyadic | validate
    pub kind: String,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    /// Base seed; overridable with --seed.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Seed count for ensemble experiments.
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    #[serde(default)]
    pub triplet: Option<TripletConfig>,
    #[serde(default)]
    pub sim: Option<SimSection>,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

fn default_dimension() -> usize {
    1
}
fn default_seeds() -> usize {
    200
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletConfig {
    pub gamma: f64,
    pub sigma: f64,
    pub nu: NuConfig,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NuConfig {
    /// No jumps.
    Zero,
    /// `atoms = [[position, mass], ...]`.
    FiniteAtomic { atoms: Vec<[f64; 2]> },
    /// Symmetric power tail on |x| > 1: `beta`, `lambda`.
    Pareto { beta: f64, lambda: f64 },
    /// `λ/(x log²x)` on x > e: `lambda`.
    LogSquared { lambda: f64 },
    /// Density of N(0, scale²) as a Lévy measure: `scale`.
    GaussianDensity { scale: f64 },
    /// Built-in `0.25|x|^{-3/2}` density (Pareto(1/2) large jumps + dyadic
    /// small-jump bands).
    HalfStable,
    /// Asymmetric variant with nonzero band compensators.
    AsymmetricHalfStable,
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub horizon: f64,
    pub grid_dt: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
}

fn default_eps() -> f64 {
    2f64.powi(-10)
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    /// Test-function identifiers: gaussian | hermite-K | mollifier |
    /// mollifier:A:B | bump1d:S:K | bump-dd:S.
    #[serde(default)]
    pub phis: Vec<String>,
    /// Growth/dichotomy horizons (ascending).
    #[serde(default)]
    pub horizons: Vec<f64>,
    /// Growth-ratio exponent α (growth) or block exponent (dyadic).
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Bump-probe index range `[n_min, n_max]`.
    #[serde(default)]
    pub n_range: Option<[usize; 2]>,
    /// Jump size for the probe's atomic law.
    #[serde(default)]
    pub jump_size: Option<f64>,
    /// Monte-Carlo sample count (charfn).
    #[serde(default)]
    pub samples: Option<usize>,
    /// Largest dyadic level.
    #[serde(default)]
    pub max_level: Option<u32>,
}

impl Config {
    pub fn parse(text: &str) -> anyhow::Result<Config> {
        let cfg: Config = toml::from_str(text).context("config does not parse")?;
        if cfg.schema_version != SCHEMA_VERSION {
            bail!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                cfg.schema_version
            );
        }
        if cfg.dimension == 0 {
            bail!("dimension: must be ≥ 1");
        }
        if cfg.seeds == 0 {
            bail!("seeds: must be ≥ 1");
        }
        const KINDS: [&str; 9] = [
            "simulate",
            "pair",
            "fubini",
            "growth",
            "dichotomy",
            "charfn",
            "bump-probe",
            "dyadic",
            "validate",
        ];
        if !KINDS.contains(&cfg.kind.as_str()) {
            bail!("kind: '{}' is not one of {KINDS:?}", cfg.kind);
        }
        Ok(cfg)
    }

    pub fn triplet(&self) -> anyhow::Result<LevyTriplet> {
        let t = self
            .triplet
            .as_ref()
            .context("triplet: required for this experiment kind")?;
        let nu = match &t.nu {
            NuConfig::Zero => LevyMeasure::zero(),
            NuConfig::FiniteAtomic { atoms } => LevyMeasure::FiniteAtomic(
                atoms
                    .iter()
                    .map(|&[position, mass]| Atom { position, mass })
                    .collect(),
            ),
            NuConfig::Pareto { beta, lambda } => LevyMeasure::ParetoTail {
                beta: *beta,
                lambda: *lambda,
            },
            NuConfig::LogSquared { lambda } => LevyMeasure::LogSquaredTail { lambda: *lambda },
            NuConfig::GaussianDensity { scale } => LevyMeasure::GaussianDensity { scale: *scale },
            NuConfig::HalfStable => half_stable_custom(),
            NuConfig::AsymmetricHalfStable => asymmetric_half_stable_custom(),
        };
        LevyTriplet::new(t.gamma, t.sigma, nu)
            .map_err(|e| anyhow::anyhow!("triplet: {e}"))
    }

    pub fn sim(&self) -> anyhow::Result<levy_noise::path_sim::SimConfig> {
        let s = self
            .sim
            .as_ref()
            .context("sim: section required for this experiment kind")?;
        levy_noise::path_sim::SimConfig::new(s.horizon, s.grid_dt, s.eps)
            .map_err(|e| anyhow::anyhow!("sim: {e}"))
    }
}
