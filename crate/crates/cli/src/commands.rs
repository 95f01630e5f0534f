//! Implementations of the five commands. Each returns a typed outcome so
//! tests can call them in-process; main.rs maps outcomes onto the exit-code
//! contract (0 = solved/success, 2 = ran cleanly but did not solve,
//! 1 = error).

use crate::config::{ExperimentFile, ResolvedExperiment};
use crate::svg::{self, ScanOverlay};
use crate::trajectory;
use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use symnav::evolution::{evolve, stats_csv, GenerationStats, SelectionStrategy};
use symnav::network::Chromosome;
use symnav::sensors::{make_sensor, SensorKind};
use symnav::simulation::{make_evaluator, run_episode, EpisodeConfig};
use symnav::track::{generate_random_track, Terminal, Track, TrackGenConfig};

pub const SWEEP_HEADER: &str = "axis_value,seed,generations_to_solve,max_fitness,solved";

/// Replaces path-hostile characters so track/value names can become file
/// names.
fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '-' })
        .collect()
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub solved: bool,
    pub generations_run: usize,
    /// Index of the first generation containing a winning chromosome.
    pub generations_to_solve: Option<usize>,
    /// Best fitness seen across the whole run.
    pub best_fitness: f64,
    pub out_dir: PathBuf,
    pub history: Vec<GenerationStats>,
}

/// `train`: load + resolve a config, run the GA, write artifacts.
pub fn cmd_train(
    config_path: &Path,
    seed: Option<u64>,
    out: Option<&Path>,
    progress: bool,
) -> Result<TrainOutcome> {
    let file = ExperimentFile::load(config_path)
        .with_context(|| format!("loading config {}", config_path.display()))?;
    let base = config_path.parent().unwrap_or_else(|| Path::new("."));
    let resolved = file.resolve(base, seed).context("resolving config")?;
    let out_dir = match (out, &resolved.output_dir) {
        (Some(o), _) => o.to_path_buf(),
        (None, Some(o)) => o.clone(),
        (None, None) => {
            let stem = config_path.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
            PathBuf::from("runs").join(format!("{}-seed{}", slug(stem), resolved.file.master_seed))
        }
    };
    train_resolved(&resolved, &out_dir, progress)
}

/// Training core shared by `train` and `sweep`. Writes into `out_dir`:
/// manifest.toml, fitness.csv, checkpoints/gen-NNNN.chromosome, and
/// best.chromosome (the first winning chromosome if the run solved,
/// otherwise the best-scoring individual).
pub fn train_resolved(
    resolved: &ResolvedExperiment,
    out_dir: &Path,
    progress: bool,
) -> Result<TrainOutcome> {
    let checkpoints = out_dir.join("checkpoints");
    fs::create_dir_all(&checkpoints)
        .with_context(|| format!("creating {}", checkpoints.display()))?;
    fs::write(out_dir.join("manifest.toml"), resolved.manifest_toml())
        .context("writing manifest")?;

    // Trajectories are never recorded during training; they are an eval
    // concern and would dominate memory at population scale.
    let episode = EpisodeConfig { record_trajectory: false, ..resolved.episode };
    let evaluator =
        make_evaluator(resolved.tracks.clone(), resolved.vehicle, resolved.sensor, episode);
    let history = evolve(&resolved.evolution, &resolved.network, &evaluator)?;

    fs::write(out_dir.join("fitness.csv"), stats_csv(&history)).context("writing fitness.csv")?;
    for s in &history {
        if progress {
            println!(
                "gen {:>4}  best {:>12.4}  mean {:>12.4}  solved {}",
                s.generation, s.best_fitness, s.mean_fitness, s.solved
            );
        }
        s.best_individual
            .save(&checkpoints.join(format!("gen-{:04}.chromosome", s.generation)))
            .context("writing checkpoint")?;
    }

    let winner = history.iter().find_map(|s| s.solver.as_ref());
    let best_overall = history
        .iter()
        .max_by(|a, b| a.best_fitness.total_cmp(&b.best_fitness))
        .map(|s| &s.best_individual);
    let best = winner.or(best_overall).expect("at least one generation ran");
    best.save(&out_dir.join("best.chromosome")).context("writing best.chromosome")?;

    let outcome = TrainOutcome {
        solved: history.iter().any(|s| s.solved),
        generations_run: history.len(),
        generations_to_solve: history.iter().find(|s| s.solved).map(|s| s.generation),
        best_fitness: history
            .iter()
            .map(|s| s.best_fitness)
            .fold(f64::NEG_INFINITY, f64::max),
        out_dir: out_dir.to_path_buf(),
        history,
    };
    if progress {
        match outcome.generations_to_solve {
            Some(g) => println!("solved at generation {g}; artifacts in {}", out_dir.display()),
            None => println!(
                "not solved within {} generations; artifacts in {}",
                outcome.generations_run,
                out_dir.display()
            ),
        }
    }
    Ok(outcome)
}

#[derive(Clone, Debug)]
pub struct EvalArgs {
    pub chromosome: PathBuf,
    pub tracks: Vec<PathBuf>,
    pub kind: SensorKind,
    /// Defaults to the network's input size.
    pub beams: Option<usize>,
    pub max_ticks: u32,
    pub out: Option<PathBuf>,
    pub write_scans: bool,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct EvalRow {
    pub track: String,
    pub terminal: Terminal,
    pub ticks: u32,
    pub fitness: f64,
    pub trajectory_path: PathBuf,
}

#[derive(Clone, Debug)]
pub struct EvalOutcome {
    pub rows: Vec<EvalRow>,
    pub all_reached: bool,
}

/// `eval`: run one recorded episode per track and write trajectory CSVs.
pub fn cmd_eval(args: &EvalArgs) -> Result<EvalOutcome> {
    let chromosome = Chromosome::load(&args.chromosome)
        .with_context(|| format!("loading chromosome {}", args.chromosome.display()))?;
    let weights = chromosome.decode();
    let beams = args.beams.unwrap_or_else(|| chromosome.spec().input_size());
    let out_dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let episode = EpisodeConfig { max_ticks: args.max_ticks, record_trajectory: true };
    let vehicle = symnav::vehicle::VehicleParams::default();

    let mut rows = Vec::new();
    for track_path in &args.tracks {
        let track = Track::load(track_path)
            .with_context(|| format!("loading track {}", track_path.display()))?;
        let sensor = make_sensor(args.kind, beams, track.track_width())?;
        let result = run_episode(&track, &vehicle, &sensor, &weights, &episode, args.seed)
            .with_context(|| format!("running episode on {}", track.name()))?;

        let stem = slug(track.name());
        let traj_path = out_dir.join(format!("{stem}.trajectory.csv"));
        fs::write(&traj_path, trajectory::to_csv(&result.trajectory))
            .with_context(|| format!("writing {}", traj_path.display()))?;
        if args.write_scans {
            let scan_path = out_dir.join(format!("{stem}.scans.csv"));
            fs::write(&scan_path, trajectory::scans_to_csv(&result.trajectory))
                .with_context(|| format!("writing {}", scan_path.display()))?;
        }
        rows.push(EvalRow {
            track: track.name().to_string(),
            terminal: result.outcome.terminal,
            ticks: result.outcome.ticks,
            fitness: result.fitness,
            trajectory_path: traj_path,
        });
    }
    let all_reached = rows.iter().all(|r| r.terminal == Terminal::ReachedDestination);
    Ok(EvalOutcome { rows, all_reached })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    BeamCount,
    SensorKind,
    Selection,
    Symmetry,
}

impl std::str::FromStr for SweepAxis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "beam-count" | "beams" => Ok(SweepAxis::BeamCount),
            "sensor-kind" | "sensor" => Ok(SweepAxis::SensorKind),
            "selection" => Ok(SweepAxis::Selection),
            "symmetry" => Ok(SweepAxis::Symmetry),
            other => Err(format!(
                "unknown sweep axis {other:?} (expected beam-count, sensor-kind, selection, or symmetry)"
            )),
        }
    }
}

pub fn parse_sensor_kind(s: &str) -> Result<SensorKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "basic" => Ok(SensorKind::Basic),
        "camera" => Ok(SensorKind::Camera),
        "lidar" => Ok(SensorKind::Lidar),
        "long_radar" | "long-radar" => Ok(SensorKind::LongRadar),
        "medium_radar" | "medium-radar" => Ok(SensorKind::MediumRadar),
        other => Err(format!(
            "unknown sensor kind {other:?} (expected basic, camera, lidar, long_radar, medium_radar)"
        )),
    }
}

fn parse_selection(s: &str) -> Result<SelectionStrategy, String> {
    match s.to_ascii_lowercase().as_str() {
        "tournament" => Ok(SelectionStrategy::Tournament),
        "elitism" => Ok(SelectionStrategy::Elitism),
        "roulette" => Ok(SelectionStrategy::Roulette),
        other => Err(format!(
            "unknown selection strategy {other:?} (expected tournament, elitism, roulette)"
        )),
    }
}

#[derive(Clone, Debug)]
pub struct SweepArgs {
    pub config: PathBuf,
    pub axis: SweepAxis,
    pub values: Vec<String>,
    pub repetitions: usize,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub parallel: bool,
    pub progress: bool,
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub axis_value: String,
    pub seed: u64,
    pub generations_to_solve: Option<usize>,
    pub max_fitness: f64,
    pub solved: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub csv_path: PathBuf,
}

/// Applies one axis value to a copy of the experiment file.
fn apply_axis(file: &ExperimentFile, axis: SweepAxis, value: &str) -> Result<ExperimentFile> {
    let mut f = file.clone();
    match axis {
        SweepAxis::BeamCount => {
            let beams: usize =
                value.parse().map_err(|_| anyhow::anyhow!("bad beam count {value:?}"))?;
            f.sensor.beams = beams;
            // Beam count drives the default topology; an explicit
            // layer_sizes would pin the input width and break the sweep.
            f.network.layer_sizes = None;
        }
        SweepAxis::SensorKind => {
            f.sensor.kind = parse_sensor_kind(value).map_err(anyhow::Error::msg)?;
        }
        SweepAxis::Selection => {
            f.evolution.selection = parse_selection(value).map_err(anyhow::Error::msg)?;
        }
        SweepAxis::Symmetry => {
            f.network.symmetric = value
                .parse()
                .map_err(|_| anyhow::anyhow!("bad symmetry flag {value:?} (true/false)"))?;
        }
    }
    Ok(f)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let gens = r.generations_to_solve.map_or(String::new(), |g| g.to_string());
        writeln!(out, "{},{},{},{},{}", r.axis_value, r.seed, gens, r.max_fitness, r.solved)
            .unwrap();
    }
    out
}

/// `sweep`: one training run per (axis value, repetition seed); emits
/// sweep.csv plus per-run artifact directories. Row failures are recorded
/// and do not stop the sweep.
pub fn cmd_sweep(args: &SweepArgs) -> Result<SweepOutcome> {
    if args.values.is_empty() {
        bail!("sweep needs at least one --values entry");
    }
    if args.repetitions == 0 {
        bail!("sweep needs --reps >= 1");
    }
    let file = ExperimentFile::load(&args.config)
        .with_context(|| format!("loading config {}", args.config.display()))?;
    let base = args.config.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
    let out_dir = args.out.clone().unwrap_or_else(|| PathBuf::from("sweep"));
    fs::create_dir_all(&out_dir)?;
    let base_seed = args.seed.unwrap_or(file.master_seed);

    // Validate every axis value up front so a typo fails fast instead of
    // after a long partial sweep.
    let mut jobs = Vec::new();
    for value in &args.values {
        let varied = apply_axis(&file, args.axis, value)?;
        for rep in 0..args.repetitions {
            let run_seed = base_seed.wrapping_add(rep as u64);
            jobs.push((value.clone(), varied.clone(), run_seed));
        }
    }

    let run_job = |(value, varied, run_seed): &(String, ExperimentFile, u64)| -> SweepRow {
        let run_dir = out_dir.join(format!("{}-seed{}", slug(value), run_seed));
        let result = varied
            .resolve(&base, Some(*run_seed))
            .map_err(anyhow::Error::from)
            .and_then(|resolved| train_resolved(&resolved, &run_dir, false));
        match result {
            Ok(t) => SweepRow {
                axis_value: value.clone(),
                seed: *run_seed,
                generations_to_solve: t.generations_to_solve,
                max_fitness: t.best_fitness,
                solved: t.solved,
                error: None,
            },
            Err(e) => SweepRow {
                axis_value: value.clone(),
                seed: *run_seed,
                generations_to_solve: None,
                max_fitness: 0.0,
                solved: false,
                error: Some(format!("{e:#}")),
            },
        }
    };

    let rows: Vec<SweepRow> = if args.parallel {
        jobs.par_iter().map(run_job).collect()
    } else {
        jobs.iter()
            .map(|job| {
                let row = run_job(job);
                if args.progress {
                    println!(
                        "{} seed {} -> {}",
                        row.axis_value,
                        row.seed,
                        match (&row.error, row.generations_to_solve) {
                            (Some(e), _) => format!("error: {e}"),
                            (None, Some(g)) => format!("solved at gen {g}"),
                            (None, None) => "unsolved".to_string(),
                        }
                    );
                }
                row
            })
            .collect()
    };

    for row in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "sweep row failed: {} seed {}: {}",
            row.axis_value,
            row.seed,
            row.error.as_deref().unwrap_or("")
        );
    }

    let csv_path = out_dir.join("sweep.csv");
    fs::write(&csv_path, sweep_csv(&rows)).context("writing sweep.csv")?;
    Ok(SweepOutcome { rows, csv_path })
}

#[derive(Clone, Debug)]
pub struct RenderArgs {
    pub trajectory: PathBuf,
    pub track: PathBuf,
    pub out: Option<PathBuf>,
    /// Optional scans sidecar; when present, thinned beam rays are drawn.
    pub scans: Option<PathBuf>,
    /// Field of view for ray drawing, degrees (matches the sensor used to
    /// record the scans; purely cosmetic).
    pub fov_deg: f64,
}

#[derive(Clone, Debug)]
pub struct RenderOutcome {
    pub svg_path: PathBuf,
    pub steering_path: PathBuf,
}

/// Parses a scans sidecar (`tick,r0,...`) into overlay rows.
fn parse_scans(text: &str) -> Result<Vec<(u32, Vec<f64>)>> {
    let mut lines = text.lines();
    let header = lines.next().context("scan file is empty")?;
    if header != "tick" && !header.starts_with("tick,r0") {
        bail!("scan file header must start with `tick,r0`, got {header:?}");
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let tick: u32 = fields
            .next()
            .unwrap_or_default()
            .parse()
            .with_context(|| format!("scan line {}: bad tick", i + 2))?;
        let ranges: Vec<f64> = fields
            .map(|f| f.parse::<f64>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("scan line {}: bad range", i + 2))?;
        rows.push((tick, ranges));
    }
    Ok(rows)
}

/// `render`: trajectory + track -> track SVG and steering chart SVG.
pub fn cmd_render(args: &RenderArgs) -> Result<RenderOutcome> {
    let track = Track::load(&args.track)
        .with_context(|| format!("loading track {}", args.track.display()))?;
    let text = fs::read_to_string(&args.trajectory)
        .with_context(|| format!("reading {}", args.trajectory.display()))?;
    let rows = trajectory::parse_csv(&text)
        .with_context(|| format!("parsing {}", args.trajectory.display()))?;

    let overlay = match &args.scans {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Some(ScanOverlay { fov: args.fov_deg.to_radians(), rows: parse_scans(&text)? })
        }
        None => None,
    };

    let out_dir = match &args.out {
        Some(o) => o.clone(),
        None => args
            .trajectory
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    fs::create_dir_all(&out_dir)?;
    let stem = args
        .trajectory
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("trajectory")
        .trim_end_matches(".trajectory")
        .to_string();

    let svg_path = out_dir.join(format!("{stem}.svg"));
    fs::write(&svg_path, svg::track_svg(&track, &rows, overlay.as_ref()))
        .with_context(|| format!("writing {}", svg_path.display()))?;
    let steering_path = out_dir.join(format!("{stem}.steering.svg"));
    fs::write(&steering_path, svg::steering_svg(&rows))
        .with_context(|| format!("writing {}", steering_path.display()))?;
    Ok(RenderOutcome { svg_path, steering_path })
}

#[derive(Clone, Debug)]
pub struct GenTrackArgs {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub config: TrackGenConfig,
}

/// `gen-track`: deterministic random track to a TOML file.
pub fn cmd_gen_track(args: &GenTrackArgs) -> Result<PathBuf> {
    let track = generate_random_track(args.seed, &args.config)?;
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.toml", slug(track.name()))));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    track.save(&path).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slug_keeps_safe_chars() {
        assert_eq!(slug("random-7"), "random-7");
        assert_eq!(slug("a b/c:d"), "a-b-c-d");
        assert_eq!(slug("map1.toml"), "map1.toml");
    }

    #[test]
    fn axis_parsing() {
        assert_eq!("beam-count".parse::<SweepAxis>().unwrap(), SweepAxis::BeamCount);
        assert_eq!("SENSOR".parse::<SweepAxis>().unwrap(), SweepAxis::SensorKind);
        assert!("nope".parse::<SweepAxis>().is_err());
        assert_eq!(parse_sensor_kind("medium-radar").unwrap(), SensorKind::MediumRadar);
        assert!(parse_sensor_kind("sonar").is_err());
    }

    #[test]
    fn sweep_csv_formats_unsolved_as_empty() {
        let rows = vec![
            SweepRow {
                axis_value: "15".into(),
                seed: 3,
                generations_to_solve: Some(4),
                max_fitness: 123.5,
                solved: true,
                error: None,
            },
            SweepRow {
                axis_value: "5".into(),
                seed: 4,
                generations_to_solve: None,
                max_fitness: 10.25,
                solved: false,
                error: None,
            },
        ];
        assert_eq!(
            sweep_csv(&rows),
            "axis_value,seed,generations_to_solve,max_fitness,solved\n15,3,4,123.5,true\n5,4,,10.25,false\n"
        );
    }

    #[test]
    fn apply_axis_variants() {
        let f = ExperimentFile::default();
        let b = apply_axis(&f, SweepAxis::BeamCount, "7").unwrap();
        assert_eq!(b.sensor.beams, 7);
        let k = apply_axis(&f, SweepAxis::SensorKind, "lidar").unwrap();
        assert_eq!(k.sensor.kind, SensorKind::Lidar);
        let s = apply_axis(&f, SweepAxis::Selection, "roulette").unwrap();
        assert_eq!(s.evolution.selection, SelectionStrategy::Roulette);
        let y = apply_axis(&f, SweepAxis::Symmetry, "false").unwrap();
        assert!(!y.network.symmetric);
        assert!(apply_axis(&f, SweepAxis::BeamCount, "x").is_err());
    }
}
