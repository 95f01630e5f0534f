//! Episode runner: drives one vehicle through one track under a decoded
//! network controller, computes squared-distance-over-time fitness, and
//! optionally records the per-tick trajectory.

use crate::evolution::{EvalError, Evaluation, FitnessFn};
use crate::geometry::Point;
use crate::network::{steering_command, Chromosome, NetworkError, WeightMatrices};
use crate::seed;
use crate::sensors::{normalize, sense, Scan, SensorSpec};
use crate::track::{Terminal, Track, TrackOutcome};
use crate::vehicle::{footprint, step, VehicleParams, VehicleState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("sensor has {beams} beams but network expects {inputs} inputs")]
    DimensionMismatch { beams: usize, inputs: usize },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeConfig {
    pub max_ticks: u32,
    pub record_trajectory: bool,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig { max_ticks: 2000, record_trajectory: false }
    }
}

/// One recorded tick: the state the controller saw (before stepping), the
/// command it produced, and the raw scan it was given.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySample {
    pub tick: u32,
    pub state: VehicleState,
    pub steer_command: f64,
    pub scan: Scan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeResult {
    pub outcome: TrackOutcome,
    pub fitness: f64,
    /// Empty unless `record_trajectory` was set; otherwise one sample per
    /// elapsed tick.
    pub trajectory: Vec<TrajectorySample>,
}

/// Fitness of a finished episode: squared Euclidean displacement from the
/// start, divided by elapsed ticks. Fast direct progress scores highest;
/// crashing on the spot scores zero.
pub fn fitness_of(outcome_position: Point, start: Point, ticks: u32) -> f64 {
    debug_assert!(ticks >= 1);
    let d = start.distance_to(outcome_position);
    d * d / f64::from(ticks)
}

/// Runs one episode. Per tick: sense, normalize, forward through the
/// network, derive the steering command, then terminal-check the current
/// state (collision against walls/obstacles, or within half a track width
/// of the destination) before stepping. A vehicle spawned in collision
/// therefore dies at tick 1 with zero displacement. Hitting the tick budget
/// times out with the final stepped state.
///
/// Deterministic per (inputs, eval_seed): sensor noise draws come from a
/// stream derived from `eval_seed` and the sensor's `rng_stream` tag.
pub fn run_episode(
    track: &Track,
    vehicle: &VehicleParams,
    sensor: &SensorSpec,
    weights: &WeightMatrices,
    config: &EpisodeConfig,
    eval_seed: u64,
) -> Result<EpisodeResult, SimError> {
    if sensor.beam_count != weights.input_size() {
        return Err(SimError::DimensionMismatch {
            beams: sensor.beam_count,
            inputs: weights.input_size(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(eval_seed, sensor.rng_stream));
    let start = track.start();
    let mut state = VehicleState::new(start.x, start.y, track.start_heading());
    let reach_radius = track.track_width() / 2.0;
    let mut trajectory = Vec::new();

    let mut outcome: Option<TrackOutcome> = None;
    for tick in 1..=config.max_ticks {
        let scan = sense(sensor, &state, track, &mut rng);
        let inputs = normalize(&scan, sensor);
        let (out_left, out_right) = weights.forward(&inputs)?;
        let cmd = steering_command(out_left, out_right, vehicle.max_steer);
        if config.record_trajectory {
            trajectory.push(TrajectorySample { tick, state, steer_command: cmd, scan });
        }
        if track.first_collision(&footprint(&state, vehicle)) {
            outcome = Some(TrackOutcome {
                terminal: Terminal::Collision,
                final_position: state.position(),
                ticks: tick,
            });
            break;
        }
        if state.position().distance_to(track.destination()) <= reach_radius {
            outcome = Some(TrackOutcome {
                terminal: Terminal::ReachedDestination,
                final_position: state.position(),
                ticks: tick,
            });
            break;
        }
        state = step(state, cmd, vehicle);
    }
    let outcome = outcome.unwrap_or(TrackOutcome {
        terminal: Terminal::TimedOut,
        final_position: state.position(),
        ticks: config.max_ticks,
    });
    let fitness = fitness_of(outcome.final_position, start, outcome.ticks);
    Ok(EpisodeResult { outcome, fitness, trajectory })
}

/// Multi-track evaluator for the GA: decodes the chromosome once, runs one
/// episode per track with a per-track sub-seed, sums the fitnesses, and
/// reports solved only when every track ends in ReachedDestination.
#[derive(Clone, Debug)]
pub struct EpisodeEvaluator {
    tracks: Vec<Track>,
    vehicle: VehicleParams,
    sensor: SensorSpec,
    episode: EpisodeConfig,
}

pub fn make_evaluator(
    tracks: Vec<Track>,
    vehicle: VehicleParams,
    sensor: SensorSpec,
    episode: EpisodeConfig,
) -> EpisodeEvaluator {
    EpisodeEvaluator { tracks, vehicle, sensor, episode }
}

impl EpisodeEvaluator {
    /// Seed for track `index` under a given evaluation seed; exposed so
    /// replays of a single track can reproduce evaluator runs.
    pub fn track_seed(eval_seed: u64, index: usize) -> u64 {
        seed::mix(eval_seed, index as u64)
    }
}

impl FitnessFn for EpisodeEvaluator {
    fn evaluate(&self, chromosome: &Chromosome, eval_seed: u64) -> Result<Evaluation, EvalError> {
        let weights = chromosome.decode();
        let mut total = 0.0;
        let mut all_reached = !self.tracks.is_empty();
        for (index, track) in self.tracks.iter().enumerate() {
            let result = run_episode(
                track,
                &self.vehicle,
                &self.sensor,
                &weights,
                &self.episode,
                Self::track_seed(eval_seed, index),
            )?;
            total += result.fitness;
            all_reached &= result.outcome.terminal == Terminal::ReachedDestination;
        }
        Ok(Evaluation { fitness: total, solved: all_reached })
    }
}
