//! Thin clap wrapper over [`symnav_cli::commands`].
//!
//! Exit codes: 0 when the requested goal was met (training solved, every
//! eval episode reached the destination, sweep/render/gen-track finished),
//! 2 when a run completed cleanly but did not solve, 1 on error.

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use symnav::sensors::SensorKind;
use symnav::track::TrackGenConfig;
use symnav_cli::commands::{
    self, parse_sensor_kind, EvalArgs, GenTrackArgs, RenderArgs, SweepArgs, SweepAxis,
};

#[derive(Parser)]
#[command(name = "symnav", version, about = "Neuroevolution of symmetric steering networks")]
struct Cli {
    /// Worker threads for parallel evaluation (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a training experiment from a TOML config.
    Train {
        /// Experiment config file.
        config: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: config output_dir, then runs/<name>-seed<seed>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Suppress per-generation progress lines.
        #[arg(long)]
        quiet: bool,
    },
    /// Replay a saved chromosome on tracks and record trajectories.
    Eval {
        /// Chromosome file produced by train.
        chromosome: PathBuf,
        /// Track files to evaluate on.
        #[arg(long, required = true, num_args = 1..)]
        tracks: Vec<PathBuf>,
        /// Sensor kind.
        #[arg(long, default_value = "basic", value_parser = parse_sensor_kind)]
        sensor: SensorKind,
        /// Beam count (default: the network's input size).
        #[arg(long)]
        beams: Option<usize>,
        /// Episode tick budget.
        #[arg(long, default_value_t = 2000)]
        max_ticks: u32,
        /// Directory for trajectory CSVs (default: current directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write per-tick scan CSVs next to the trajectories.
        #[arg(long)]
        scans: bool,
        /// Seed for sensor noise (noiseless sensors ignore it).
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Train repeatedly while varying one experiment axis.
    Sweep {
        /// Base experiment config.
        config: PathBuf,
        /// Axis to vary: beam-count, sensor-kind, selection, or symmetry.
        #[arg(long)]
        axis: SweepAxis,
        /// Axis values, one run batch each.
        #[arg(long, required = true, num_args = 1..)]
        values: Vec<String>,
        /// Repetitions per value; repetition r uses master seed base+r.
        #[arg(long, default_value_t = 1)]
        reps: usize,
        /// Base master seed (default: the config's).
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: sweep/).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run the sweep rows in parallel instead of the per-run evaluations.
        #[arg(long)]
        parallel: bool,
    },
    /// Render a recorded trajectory to SVG (track view + steering chart).
    Render {
        /// Trajectory CSV written by eval.
        trajectory: PathBuf,
        /// Track the trajectory was recorded on.
        #[arg(long)]
        track: PathBuf,
        /// Output directory (default: the trajectory's directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scan CSV sidecar to overlay beam rays.
        #[arg(long)]
        scans: Option<PathBuf>,
        /// Sensor field of view in degrees for ray drawing.
        #[arg(long, default_value_t = 180.0)]
        fov_deg: f64,
    },
    /// Generate a random track file.
    GenTrack {
        /// Generator seed; also names the track.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (default: random-<seed>.toml).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        gen: GenFlags,
    },
}

/// Optional overrides for the track generator defaults.
#[derive(Args)]
struct GenFlags {
    #[arg(long)]
    legs_min: Option<usize>,
    #[arg(long)]
    legs_max: Option<usize>,
    #[arg(long)]
    width_min: Option<f64>,
    #[arg(long)]
    width_max: Option<f64>,
    #[arg(long)]
    leg_min: Option<f64>,
    #[arg(long)]
    leg_max: Option<f64>,
    #[arg(long)]
    obstacle_density: Option<f64>,
}

impl GenFlags {
    fn apply(&self, mut c: TrackGenConfig) -> TrackGenConfig {
        if let Some(v) = self.legs_min {
            c.legs_min = v;
        }
        if let Some(v) = self.legs_max {
            c.legs_max = v;
        }
        if let Some(v) = self.width_min {
            c.width_min = v;
        }
        if let Some(v) = self.width_max {
            c.width_max = v;
        }
        if let Some(v) = self.leg_min {
            c.leg_min = v;
        }
        if let Some(v) = self.leg_max {
            c.leg_max = v;
        }
        if let Some(v) = self.obstacle_density {
            c.obstacle_density = v;
        }
        c
    }
}

fn run(cli: Cli) -> Result<u8> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()?;
    }
    match cli.command {
        Command::Train { config, seed, out, quiet } => {
            let outcome = commands::cmd_train(&config, seed, out.as_deref(), !quiet)?;
            Ok(if outcome.solved { 0 } else { 2 })
        }
        Command::Eval { chromosome, tracks, sensor, beams, max_ticks, out, scans, seed } => {
            let outcome = commands::cmd_eval(&EvalArgs {
                chromosome,
                tracks,
                kind: sensor,
                beams,
                max_ticks,
                out,
                write_scans: scans,
                seed,
            })?;
            for r in &outcome.rows {
                println!(
                    "track={} outcome={} ticks={} fitness={}",
                    r.track, r.terminal, r.ticks, r.fitness
                );
            }
            Ok(if outcome.all_reached { 0 } else { 2 })
        }
        Command::Sweep { config, axis, values, reps, seed, out, parallel } => {
            let outcome = commands::cmd_sweep(&SweepArgs {
                config,
                axis,
                values,
                repetitions: reps,
                seed,
                out,
                parallel,
                progress: true,
            })?;
            println!("wrote {}", outcome.csv_path.display());
            Ok(0)
        }
        Command::Render { trajectory, track, out, scans, fov_deg } => {
            let outcome = commands::cmd_render(&RenderArgs { trajectory, track, out, scans, fov_deg })?;
            println!("wrote {}", outcome.svg_path.display());
            println!("wrote {}", outcome.steering_path.display());
            Ok(0)
        }
        Command::GenTrack { seed, out, gen } => {
            let config = gen.apply(TrackGenConfig::default());
            let path = commands::cmd_gen_track(&GenTrackArgs { seed, out, config })?;
            println!("wrote {}", path.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
