//! Experiment configuration: TOML schema, resolution into ready-to-run
//! core types, and manifest emission.
//!
//! A manifest is a config file with every default filled in, the seed
//! resolved, and all tracks embedded inline (as canonical track TOML), so
//! re-running `train` against a manifest reproduces the run byte for byte
//! with no other files present. Angles are degrees in files, radians in
//! memory.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use symnav::evolution::EvolutionConfig;
use symnav::network::{NetworkSpec, SymmetricDepth};
use symnav::sensors::{make_sensor, SensorKind, SensorSpec};
use symnav::simulation::EpisodeConfig;
use symnav::track::{generate_random_track, Track, TrackGenConfig};
use symnav::vehicle::VehicleParams;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config invalid: {reason}")]
    Invalid { reason: String },
    #[error("track error in {what}: {source}")]
    Track {
        what: String,
        #[source]
        source: symnav::track::TrackError,
    },
    #[error(transparent)]
    Sensor(#[from] symnav::sensors::SensorError),
    #[error(transparent)]
    Vehicle(#[from] symnav::vehicle::VehicleError),
    #[error(transparent)]
    Network(#[from] symnav::network::NetworkError),
    #[error(transparent)]
    Evolution(#[from] symnav::evolution::EvolveError),
}

fn invalid(reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { reason: reason.into() }
}

/// On-disk experiment schema. Every block is optional with full defaults;
/// unknown keys are rejected.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentFile {
    pub master_seed: u64,
    /// Default output directory; the --out flag overrides it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    pub tracks: TracksBlock,
    pub vehicle: VehicleBlock,
    pub sensor: SensorBlock,
    pub network: NetworkBlock,
    pub evolution: EvolutionConfig,
    pub episode: EpisodeBlock,
    /// Present only in manifests written by `train`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct TracksBlock {
    /// Track files, relative to the config file's directory.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub paths: Vec<String>,
    /// Seeds for generated tracks (default generator settings).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
    /// Canonical track TOML embedded verbatim; used by manifests so a run
    /// is reproducible without external track files.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub embedded: Vec<String>,
}

/// Vehicle geometry and motion limits; angles in degrees (file convention).
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleBlock {
    pub wheelbase: f64,
    pub body_length: f64,
    pub body_width: f64,
    pub speed: f64,
    pub max_steer_deg: f64,
    pub max_steer_rate_deg: f64,
}

impl Default for VehicleBlock {
    fn default() -> Self {
        let p = VehicleParams::default();
        VehicleBlock {
            wheelbase: p.wheelbase,
            body_length: p.body_length,
            body_width: p.body_width,
            speed: p.speed,
            max_steer_deg: p.max_steer.to_degrees(),
            max_steer_rate_deg: p.max_steer_rate.to_degrees(),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SensorBlock {
    pub kind: SensorKind,
    pub beams: usize,
}

impl Default for SensorBlock {
    fn default() -> Self {
        SensorBlock { kind: SensorKind::Basic, beams: 25 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkBlock {
    /// Defaults to [beams, beams, 2] when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layer_sizes: Option<Vec<usize>>,
    pub symmetric: bool,
    pub symmetric_depth: SymmetricDepth,
}

impl Default for NetworkBlock {
    fn default() -> Self {
        NetworkBlock { layer_sizes: None, symmetric: true, symmetric_depth: SymmetricDepth::AllLayers }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct EpisodeBlock {
    pub max_ticks: u32,
    pub record_trajectory: bool,
}

impl Default for EpisodeBlock {
    fn default() -> Self {
        let e = EpisodeConfig::default();
        EpisodeBlock { max_ticks: e.max_ticks, record_trajectory: e.record_trajectory }
    }
}

/// Tool identity stamped into manifests. Deliberately contains nothing
/// time- or host-dependent so manifests stay byte-stable.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
}

impl Default for Provenance {
    fn default() -> Self {
        Provenance { tool: "symnav".into(), version: env!("CARGO_PKG_VERSION").into() }
    }
}

/// A config resolved into ready-to-run core types.
#[derive(Clone, Debug)]
pub struct ResolvedExperiment {
    pub tracks: Vec<Track>,
    pub vehicle: VehicleParams,
    pub sensor: SensorSpec,
    pub network: NetworkSpec,
    pub evolution: EvolutionConfig,
    pub episode: EpisodeConfig,
    pub output_dir: Option<PathBuf>,
    /// The fully resolved file form (what a manifest serializes).
    pub file: ExperimentFile,
}

impl ExperimentFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Resolves the file against `base_dir` (directory of the config file,
    /// for relative track paths). `seed_override` comes from the --seed
    /// flag and replaces `master_seed` everywhere.
    pub fn resolve(
        &self,
        base_dir: &Path,
        seed_override: Option<u64>,
    ) -> Result<ResolvedExperiment, ConfigError> {
        let mut file = self.clone();
        if let Some(seed) = seed_override {
            file.master_seed = seed;
        }
        file.evolution.master_seed = file.master_seed;

        let mut tracks = Vec::new();
        for rel in &file.tracks.paths {
            let path = base_dir.join(rel);
            let track = Track::load(&path)
                .map_err(|source| ConfigError::Track { what: path.display().to_string(), source })?;
            tracks.push(track);
        }
        for &seed in &file.tracks.seeds {
            let track = generate_random_track(seed, &TrackGenConfig::default())
                .map_err(|source| ConfigError::Track { what: format!("generated seed {seed}"), source })?;
            tracks.push(track);
        }
        for (i, text) in file.tracks.embedded.iter().enumerate() {
            let track = Track::from_toml_str(text)
                .map_err(|source| ConfigError::Track { what: format!("embedded track {i}"), source })?;
            tracks.push(track);
        }
        if tracks.is_empty() {
            return Err(invalid("no tracks: provide tracks.paths, tracks.seeds, or tracks.embedded"));
        }

        let vehicle = VehicleParams::new(
            file.vehicle.wheelbase,
            file.vehicle.body_length,
            file.vehicle.body_width,
            file.vehicle.speed,
            file.vehicle.max_steer_deg.to_radians(),
            file.vehicle.max_steer_rate_deg.to_radians(),
        )?;

        // Sensor range scales with track width; experiments use one sensor
        // across all tracks, so the first track's width sets the scale.
        let sensor = make_sensor(file.sensor.kind, file.sensor.beams, tracks[0].track_width())?;

        let sizes = file
            .network
            .layer_sizes
            .clone()
            .unwrap_or_else(|| vec![file.sensor.beams, file.sensor.beams, 2]);
        let network = NetworkSpec::new(sizes.clone(), file.network.symmetric, file.network.symmetric_depth)?;
        if network.input_size() != file.sensor.beams {
            return Err(invalid(format!(
                "network input size {} must equal sensor beams {}",
                network.input_size(),
                file.sensor.beams
            )));
        }
        file.network.layer_sizes = Some(sizes);

        file.evolution.validate()?;
        if file.episode.max_ticks == 0 {
            return Err(invalid("episode.max_ticks must be >= 1"));
        }
        let episode = EpisodeConfig {
            max_ticks: file.episode.max_ticks,
            record_trajectory: file.episode.record_trajectory,
        };

        let output_dir = file.output_dir.as_ref().map(|d| base_dir.join(d));
        Ok(ResolvedExperiment {
            tracks,
            vehicle,
            sensor,
            network,
            evolution: file.evolution,
            episode,
            output_dir,
            file,
        })
    }
}

impl ResolvedExperiment {
    /// Manifest form: resolved config with tracks embedded inline and a
    /// provenance stamp; no external file references remain.
    pub fn manifest(&self) -> ExperimentFile {
        let mut m = self.file.clone();
        m.tracks = TracksBlock {
            paths: Vec::new(),
            seeds: Vec::new(),
            embedded: self.tracks.iter().map(Track::to_toml_string).collect(),
        };
        m.output_dir = None;
        m.provenance = Some(Provenance::default());
        m
    }

    pub fn manifest_toml(&self) -> String {
        toml::to_string(&self.manifest()).expect("manifest serializes")
    }
}
