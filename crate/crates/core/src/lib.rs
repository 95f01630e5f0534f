//! Deterministic 2D driving simulation plus a genetic algorithm that evolves
//! feed-forward steering networks, optionally constrained to odd weight
//! symmetry so that a mirrored obstacle scene produces an exactly mirrored
//! steering response.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`] — points, segments, rays, oriented rectangles, raycasting.
//! * [`track`] — track model, TOML persistence, random track generation.
//! * [`vehicle`] — kinematic bicycle model.
//! * [`sensors`] — front-facing rangefinder models (noise, FOV presets).
//! * [`network`] — chromosome codec and symmetric forward pass.
//! * [`evolution`] — GA operators, selection strategies, the evolve loop.
//! * [`simulation`] — episode runner and fitness wiring.
//!
//! Everything is reproducible from a single `u64` master seed; parallel
//! fitness evaluation (rayon) does not change any result byte.

pub mod evolution;
pub mod geometry;
pub mod network;
pub mod seed;
pub mod sensors;
pub mod simulation;
pub mod track;
pub mod vehicle;

pub use evolution::{EvolutionConfig, GenerationStats, SelectionStrategy};
pub use geometry::Point;
pub use network::{Chromosome, NetworkSpec, SymmetricDepth};
pub use sensors::{SensorKind, SensorSpec};
pub use simulation::{run_episode, EpisodeConfig, EpisodeResult};
pub use track::{Track, Terminal};
pub use vehicle::{VehicleParams, VehicleState};
