//! Front-facing rangefinder models. A scan casts `beam_count` rays spread
//! evenly across the field of view and reports the distance to the nearest
//! wall or obstacle edge, clipped to `max_range`; noisy kinds multiply each
//! ideal range by a per-beam Normal draw.
//!
//! Ordering convention: beam 0 points at `theta - fov/2`. With the y-down
//! screen convention of the SVG renders, that is the *leftmost* beam, and
//! input index 0 of the steering network is the leftmost reading. The
//! mirror-symmetry tests pin this convention.
//!
//! Beam offsets are built antisymmetrically (`offset[i] == -offset[n-1-i]`
//! bitwise, exact 0.0 center for odd counts) so a mirrored scene yields an
//! exactly reversed noiseless scan.

use crate::geometry::{ray_segment_distance, Ray};
use crate::track::Track;
use crate::vehicle::VehicleState;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SensorError {
    #[error("beam_count must be >= 2, got {got}")]
    InvalidBeamCount { got: usize },
    #[error("sensor field `{field}` invalid: {reason}")]
    InvalidParam { field: &'static str, reason: String },
}

/// The five sensor models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorKind {
    /// Ideal beam sensor, 180 degree field of view, noiseless.
    Basic,
    /// Pseudo-camera: 100 degree FOV, range limited to 1.5 x track width.
    Camera,
    /// 145 degree FOV, multiplicative noise Normal(1, 0.05).
    Lidar,
    /// 110 degree FOV, multiplicative noise Normal(1, 0.1).
    LongRadar,
    /// 160 degree FOV, zero-mean multiplicative noise Normal(0, 0.15) —
    /// destroys most of the signal, as the model states.
    MediumRadar,
}

impl SensorKind {
    pub const ALL: [SensorKind; 5] = [
        SensorKind::Basic,
        SensorKind::Camera,
        SensorKind::Lidar,
        SensorKind::LongRadar,
        SensorKind::MediumRadar,
    ];
}

/// A fully resolved sensor: kind presets plus any overrides.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    pub kind: SensorKind,
    pub beam_count: usize,
    /// Field of view, radians, in (0, pi].
    pub fov: f64,
    pub max_range: f64,
    /// Multiplicative noise parameters; (1, 0) means noiseless.
    pub noise_mean: f64,
    pub noise_std: f64,
    /// Sub-stream tag mixed into the episode seed, so several sensors (or
    /// retries) can share one master seed without correlation.
    pub rng_stream: u64,
}

/// Builds the preset for `kind`. Non-camera kinds default to a max range of
/// 3 x track width (a no-hit beam reports max_range).
pub fn make_sensor(
    kind: SensorKind,
    beam_count: usize,
    track_width: f64,
) -> Result<SensorSpec, SensorError> {
    if beam_count < 2 {
        return Err(SensorError::InvalidBeamCount { got: beam_count });
    }
    if !track_width.is_finite() || track_width <= 0.0 {
        return Err(SensorError::InvalidParam {
            field: "track_width",
            reason: format!("must be > 0, got {track_width}"),
        });
    }
    let (fov_deg, range_mult, noise_mean, noise_std): (f64, f64, f64, f64) = match kind {
        SensorKind::Basic => (180.0, 3.0, 1.0, 0.0),
        SensorKind::Camera => (100.0, 1.5, 1.0, 0.0),
        SensorKind::Lidar => (145.0, 3.0, 1.0, 0.05),
        SensorKind::LongRadar => (110.0, 3.0, 1.0, 0.1),
        SensorKind::MediumRadar => (160.0, 3.0, 0.0, 0.15),
    };
    Ok(SensorSpec {
        kind,
        beam_count,
        fov: fov_deg.to_radians(),
        max_range: range_mult * track_width,
        noise_mean,
        noise_std,
        rng_stream: 0,
    })
}

impl SensorSpec {
    pub fn validate(&self) -> Result<(), SensorError> {
        if self.beam_count < 2 {
            return Err(SensorError::InvalidBeamCount { got: self.beam_count });
        }
        if !(self.fov > 0.0 && self.fov <= std::f64::consts::PI) {
            return Err(SensorError::InvalidParam {
                field: "fov",
                reason: format!("must lie in (0, pi], got {}", self.fov),
            });
        }
        if !self.max_range.is_finite() || self.max_range <= 0.0 {
            return Err(SensorError::InvalidParam {
                field: "max_range",
                reason: format!("must be > 0, got {}", self.max_range),
            });
        }
        if !self.noise_mean.is_finite() || !self.noise_std.is_finite() || self.noise_std < 0.0 {
            return Err(SensorError::InvalidParam {
                field: "noise",
                reason: format!("mean {} / std {} invalid", self.noise_mean, self.noise_std),
            });
        }
        Ok(())
    }

    /// True when the noise model does anything, i.e. (mean, std) != (1, 0).
    pub fn is_noisy(&self) -> bool {
        self.noise_mean != 1.0 || self.noise_std != 0.0
    }

    /// Beam angles relative to the heading. Antisymmetric by construction:
    /// `offsets[i] == -offsets[n-1-i]` bitwise; odd counts get an exact 0.0
    /// center beam.
    pub fn beam_offsets(&self) -> Vec<f64> {
        let n = self.beam_count;
        let half = self.fov / 2.0;
        let step = self.fov / (n - 1) as f64;
        let mut offsets = vec![0.0f64; n];
        for i in 0..n / 2 {
            let a = -half + i as f64 * step;
            offsets[i] = a;
            offsets[n - 1 - i] = -a;
        }
        offsets
    }
}

/// One scan: per-beam ranges, leftmost beam first, each in `[0, max_range]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Scan {
    pub ranges: Vec<f64>,
}

/// Casts all beams from the vehicle pose. Noise draws (when the kind is
/// noisy) are taken from `rng` one per beam in beam order, multiplied onto
/// the ideal range, and clamped to `[0, max_range]`.
pub fn sense(spec: &SensorSpec, state: &VehicleState, track: &Track, rng: &mut impl Rng) -> Scan {
    let normal = if spec.is_noisy() {
        Some(Normal::new(spec.noise_mean, spec.noise_std).expect("validated noise params"))
    } else {
        None
    };
    let origin = state.position();
    let mut ranges = Vec::with_capacity(spec.beam_count);
    for off in spec.beam_offsets() {
        let ray = Ray::new(origin, state.theta + off);
        let mut best = spec.max_range;
        for seg in track.edges() {
            if let Some(t) = ray_segment_distance(&ray, seg) {
                if t < best {
                    best = t;
                }
            }
        }
        let range = match &normal {
            Some(n) => (best * n.sample(rng)).clamp(0.0, spec.max_range),
            None => best,
        };
        ranges.push(range);
    }
    Scan { ranges }
}

/// Network input vector: each range divided by max_range, in [0, 1], order
/// preserved.
pub fn normalize(scan: &Scan, spec: &SensorSpec) -> Vec<f64> {
    scan.ranges.iter().map(|r| r / spec.max_range).collect()
}
