//! Track model: rectilinear corridors with axis-aligned rectangular
//! obstacles, a start pose, and a destination point. Includes TOML
//! persistence in a canonical form and a seeded staircase-corridor
//! generator for generalization experiments.
//!
//! File format (canonical key order, angles in degrees):
//!
//! ```toml
//! name = "map1"
//! track_width = 110.0
//!
//! [start]
//! x = 0.0
//! y = 0.0
//! heading_deg = 0.0
//!
//! [destination]
//! x = 900.0
//! y = 0.0
//!
//! [[walls]]
//! x1 = -55.0
//! y1 = -55.0
//! x2 = 500.0
//! y2 = -55.0
//!
//! [[obstacles]]
//! cx = 300.0
//! cy = 20.0
//! w = 30.0
//! h = 25.0
//! ```

use crate::geometry::{rect_segment_intersects, OrientedRect, Point, Segment};
use crate::seed;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrackError {
    #[error("track file parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("track field `{field}` invalid: {reason}")]
    Invalid { field: String, reason: String },
    #[error("track generation failed for seed {seed}: {reason}")]
    Generation { seed: u64, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> TrackError {
    TrackError::Invalid { field: field.into(), reason: reason.into() }
}

/// How an episode on a track ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Terminal {
    Collision,
    ReachedDestination,
    TimedOut,
}

impl std::fmt::Display for Terminal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Terminal::Collision => "Collision",
            Terminal::ReachedDestination => "ReachedDestination",
            Terminal::TimedOut => "TimedOut",
        })
    }
}

/// Terminal state of an episode: how it ended, where, and after how many
/// ticks (always ≥ 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackOutcome {
    pub terminal: Terminal,
    pub final_position: Point,
    pub ticks: u32,
}

/// An immutable, validated track. Obstacles are axis-aligned (heading 0).
#[derive(Clone, Debug)]
pub struct Track {
    name: String,
    track_width: f64,
    start: Point,
    start_heading_deg: f64,
    start_heading: f64,
    destination: Point,
    walls: Vec<Segment>,
    obstacles: Vec<OrientedRect>,
    /// Walls plus obstacle edges, the geometry both the rangefinder and the
    /// collision test iterate; cached once at construction.
    edges: Vec<Segment>,
}

impl Track {
    /// Validating constructor; `start_heading` in radians.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        track_width: f64,
        start: Point,
        start_heading: f64,
        destination: Point,
        walls: Vec<Segment>,
        obstacles: Vec<OrientedRect>,
    ) -> Result<Self, TrackError> {
        Self::build(
            name.into(),
            track_width,
            start,
            start_heading.to_degrees(),
            destination,
            walls,
            obstacles,
        )
    }

    fn build(
        name: String,
        track_width: f64,
        start: Point,
        start_heading_deg: f64,
        destination: Point,
        walls: Vec<Segment>,
        obstacles: Vec<OrientedRect>,
    ) -> Result<Self, TrackError> {
        if !track_width.is_finite() || track_width <= 0.0 {
            return Err(invalid("track_width", format!("must be > 0, got {track_width}")));
        }
        if !(start.x.is_finite() && start.y.is_finite() && start_heading_deg.is_finite()) {
            return Err(invalid("start", "coordinates and heading must be finite"));
        }
        if !(destination.x.is_finite() && destination.y.is_finite()) {
            return Err(invalid("destination", "coordinates must be finite"));
        }
        if walls.is_empty() {
            return Err(invalid("walls", "at least one wall segment required"));
        }
        for (i, ob) in obstacles.iter().enumerate() {
            if ob.heading != 0.0 {
                return Err(invalid(format!("obstacles[{i}]"), "obstacles must be axis-aligned"));
            }
        }
        let inside = |p: Point, ob: &OrientedRect| {
            (p.x - ob.center.x).abs() <= ob.half_length && (p.y - ob.center.y).abs() <= ob.half_width
        };
        if let Some(i) = obstacles.iter().position(|ob| inside(start, ob)) {
            return Err(invalid("start", format!("lies inside obstacles[{i}]")));
        }
        if let Some(i) = obstacles.iter().position(|ob| inside(destination, ob)) {
            return Err(invalid("destination", format!("lies inside obstacles[{i}]")));
        }

        let mut edges = walls.clone();
        for ob in &obstacles {
            edges.extend_from_slice(&ob.edges());
        }
        Ok(Track {
            name,
            track_width,
            start,
            start_heading_deg,
            start_heading: start_heading_deg.to_radians(),
            destination,
            walls,
            obstacles,
            edges,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn track_width(&self) -> f64 {
        self.track_width
    }

    pub fn start(&self) -> Point {
        self.start
    }

    /// Start heading in radians.
    pub fn start_heading(&self) -> f64 {
        self.start_heading
    }

    pub fn destination(&self) -> Point {
        self.destination
    }

    pub fn walls(&self) -> &[Segment] {
        &self.walls
    }

    pub fn obstacles(&self) -> &[OrientedRect] {
        &self.obstacles
    }

    /// Every segment the vehicle can hit or sense: walls plus obstacle edges.
    pub fn edges(&self) -> &[Segment] {
        &self.edges
    }

    /// True iff the footprint touches any wall or obstacle edge.
    pub fn first_collision(&self, footprint: &OrientedRect) -> bool {
        self.edges.iter().any(|s| rect_segment_intersects(footprint, s))
    }

    /// Bounding box over all geometry, start, and destination.
    pub fn extent(&self) -> (Point, Point) {
        let mut min = self.start;
        let mut max = self.start;
        let mut take = |p: Point| {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        };
        take(self.destination);
        for w in &self.walls {
            take(w.a());
            take(w.b());
        }
        for ob in &self.obstacles {
            for c in ob.corners() {
                take(c);
            }
        }
        (min, max)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, TrackError> {
        let file: TrackFile = toml::from_str(text)?;
        let mut walls = Vec::with_capacity(file.walls.len());
        for (i, w) in file.walls.iter().enumerate() {
            let seg = Segment::new(Point::new(w.x1, w.y1), Point::new(w.x2, w.y2))
                .map_err(|e| invalid(format!("walls[{i}]"), e.to_string()))?;
            walls.push(seg);
        }
        let mut obstacles = Vec::with_capacity(file.obstacles.len());
        for (i, ob) in file.obstacles.iter().enumerate() {
            let rect = OrientedRect::new(Point::new(ob.cx, ob.cy), ob.w / 2.0, ob.h / 2.0, 0.0)
                .map_err(|e| invalid(format!("obstacles[{i}]"), e.to_string()))?;
            obstacles.push(rect);
        }
        Self::build(
            file.name,
            file.track_width,
            Point::new(file.start.x, file.start.y),
            file.start.heading_deg,
            Point::new(file.destination.x, file.destination.y),
            walls,
            obstacles,
        )
    }

    /// Canonical serialization: keys in schema order, shortest round-trip
    /// float formatting. `from_toml_str` followed by `to_toml_string` is a
    /// fixed point.
    pub fn to_toml_string(&self) -> String {
        let file = TrackFile {
            name: self.name.clone(),
            track_width: self.track_width,
            start: StartBlock {
                x: self.start.x,
                y: self.start.y,
                heading_deg: self.start_heading_deg,
            },
            destination: PointBlock { x: self.destination.x, y: self.destination.y },
            walls: self
                .walls
                .iter()
                .map(|s| WallRecord { x1: s.a().x, y1: s.a().y, x2: s.b().x, y2: s.b().y })
                .collect(),
            obstacles: self
                .obstacles
                .iter()
                .map(|r| ObstacleRecord {
                    cx: r.center.x,
                    cy: r.center.y,
                    w: r.half_length * 2.0,
                    h: r.half_width * 2.0,
                })
                .collect(),
        };
        toml::to_string(&file).expect("track serialization cannot fail")
    }

    pub fn load(path: &Path) -> Result<Self, TrackError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), TrackError> {
        std::fs::write(path, self.to_toml_string())?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrackFile {
    name: String,
    track_width: f64,
    start: StartBlock,
    destination: PointBlock,
    walls: Vec<WallRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    obstacles: Vec<ObstacleRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StartBlock {
    x: f64,
    y: f64,
    heading_deg: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointBlock {
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WallRecord {
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObstacleRecord {
    cx: f64,
    cy: f64,
    w: f64,
    h: f64,
}

/// Difficulty knobs for [`generate_random_track`]. Ranges are inclusive.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackGenConfig {
    /// Number of corridor legs (alternating horizontal/vertical).
    pub legs_min: usize,
    pub legs_max: usize,
    /// Corridor width range, world units.
    pub width_min: f64,
    pub width_max: f64,
    /// Leg length range; lengths are clamped up to 1.6 x width so the
    /// staircase can never self-intersect.
    pub leg_min: f64,
    pub leg_max: f64,
    /// Probability of placing one obstacle on each interior leg.
    pub obstacle_density: f64,
    /// Obstacle side length as a fraction of corridor width.
    pub obstacle_min_frac: f64,
    pub obstacle_max_frac: f64,
}

impl Default for TrackGenConfig {
    fn default() -> Self {
        TrackGenConfig {
            legs_min: 4,
            legs_max: 7,
            width_min: 90.0,
            width_max: 140.0,
            leg_min: 260.0,
            leg_max: 480.0,
            obstacle_density: 0.5,
            obstacle_min_frac: 0.18,
            obstacle_max_frac: 0.3,
        }
    }
}

impl TrackGenConfig {
    pub fn validate(&self) -> Result<(), TrackError> {
        if self.legs_min < 2 || self.legs_min > self.legs_max {
            return Err(invalid("legs", "need 2 <= legs_min <= legs_max"));
        }
        if !(self.width_min > 0.0 && self.width_min <= self.width_max && self.width_max.is_finite())
        {
            return Err(invalid("width", "need 0 < width_min <= width_max"));
        }
        if !(self.leg_min > 0.0 && self.leg_min <= self.leg_max && self.leg_max.is_finite()) {
            return Err(invalid("leg", "need 0 < leg_min <= leg_max"));
        }
        if !(0.0..=1.0).contains(&self.obstacle_density) {
            return Err(invalid("obstacle_density", "must lie in [0, 1]"));
        }
        if !(self.obstacle_min_frac > 0.0
            && self.obstacle_min_frac <= self.obstacle_max_frac
            && self.obstacle_max_frac <= 0.45)
        {
            return Err(invalid("obstacle_frac", "need 0 < min <= max <= 0.45"));
        }
        Ok(())
    }
}

const TRACK_GEN_STREAM: u64 = 0x7261_636b; // "rack"

/// Generates a staircase corridor: horizontal legs always advance +x,
/// vertical legs go up or down at random. Walls are the left/right offset
/// polylines of the centerline (rectilinear miter corners) plus two end
/// caps, so every wall is axis-aligned. Deterministic in `(seed, cfg)`.
pub fn generate_random_track(seed: u64, cfg: &TrackGenConfig) -> Result<Track, TrackError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(seed, TRACK_GEN_STREAM));
    // The construction below cannot self-intersect, but keep a bounded
    // retry loop as a safety net against validation surprises.
    for _ in 0..8 {
        if let Ok(track) = try_generate(seed, cfg, &mut rng) {
            return Ok(track);
        }
    }
    Err(TrackError::Generation { seed, reason: "no valid layout after 8 attempts".into() })
}

fn try_generate(seed: u64, cfg: &TrackGenConfig, rng: &mut ChaCha8Rng) -> Result<Track, TrackError> {
    let width = rng.random_range(cfg.width_min..=cfg.width_max);
    let legs = rng.random_range(cfg.legs_min..=cfg.legs_max);
    let d = width / 2.0;

    // Centerline vertices. Leg i is horizontal when i is even.
    let mut verts = vec![Point::new(0.0, 0.0)];
    let mut dirs: Vec<(f64, f64)> = Vec::with_capacity(legs);
    for i in 0..legs {
        let len = rng.random_range(cfg.leg_min..=cfg.leg_max).max(1.6 * width);
        let dir = if i % 2 == 0 {
            (1.0, 0.0)
        } else if rng.random_bool(0.5) {
            (0.0, 1.0)
        } else {
            (0.0, -1.0)
        };
        let p = *verts.last().unwrap();
        verts.push(Point::new(p.x + dir.0 * len, p.y + dir.1 * len));
        dirs.push(dir);
    }

    // Offset polylines at +-d with rectilinear miters.
    let normal = |u: (f64, f64)| (-u.1, u.0);
    let offset_line = |side: f64| -> Vec<Point> {
        let mut out = Vec::with_capacity(verts.len());
        for (i, p) in verts.iter().enumerate() {
            let (nx, ny) = if i == 0 {
                normal(dirs[0])
            } else if i == verts.len() - 1 {
                normal(dirs[legs - 1])
            } else {
                let a = normal(dirs[i - 1]);
                let b = normal(dirs[i]);
                (a.0 + b.0, a.1 + b.1)
            };
            out.push(Point::new(p.x + side * d * nx, p.y + side * d * ny));
        }
        out
    };
    let left = offset_line(1.0);
    let right = offset_line(-1.0);

    let mut walls = Vec::with_capacity(2 * legs + 2);
    let mut push_wall = |a: Point, b: Point| -> Result<(), TrackError> {
        walls.push(
            Segment::new(a, b)
                .map_err(|e| TrackError::Generation { seed, reason: e.to_string() })?,
        );
        Ok(())
    };
    for i in 0..legs {
        push_wall(left[i], left[i + 1])?;
        push_wall(right[i], right[i + 1])?;
    }
    push_wall(left[0], right[0])?;
    push_wall(*left.last().unwrap(), *right.last().unwrap())?;

    // Obstacles on interior legs, hugging one wall so the other side keeps
    // a gap of at least ~0.5 x width.
    let mut obstacles = Vec::new();
    if legs > 2 {
        for i in 1..legs - 1 {
            if cfg.obstacle_density > 0.0 && rng.random_bool(cfg.obstacle_density) {
                let fw = rng.random_range(cfg.obstacle_min_frac..=cfg.obstacle_max_frac);
                let fh = rng.random_range(cfg.obstacle_min_frac..=cfg.obstacle_max_frac);
                let (hw, hh) = (fw * width / 2.0, fh * width / 2.0);
                let t = rng.random_range(0.3..=0.7);
                let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let r = rng.random_range(0.55..=1.0);
                // Axis-aligned leg: length is the sum of the two (one zero).
                let leg_len = (verts[i + 1].x - verts[i].x).abs()
                    + (verts[i + 1].y - verts[i].y).abs();
                let along = Point::new(
                    verts[i].x + dirs[i].0 * t * leg_len,
                    verts[i].y + dirs[i].1 * t * leg_len,
                );
                let (nx, ny) = normal(dirs[i]);
                // Lateral half-extent of the obstacle along the leg normal.
                let lat_half = if dirs[i].0 == 0.0 { hw } else { hh };
                let clearance = 0.02 * width;
                let off = side * r * (d - lat_half - clearance);
                let center = Point::new(along.x + nx * off, along.y + ny * off);
                obstacles.push(
                    OrientedRect::new(center, hw, hh, 0.0)
                        .map_err(|e| TrackError::Generation { seed, reason: e.to_string() })?,
                );
            }
        }
    }

    let start = Point::new(
        verts[0].x + dirs[0].0 * 0.6 * width,
        verts[0].y + dirs[0].1 * 0.6 * width,
    );
    let heading = (dirs[0].1).atan2(dirs[0].0);
    let end = *verts.last().unwrap();
    let last_dir = dirs[legs - 1];
    let destination =
        Point::new(end.x - last_dir.0 * 0.6 * width, end.y - last_dir.1 * 0.6 * width);

    Track::new(format!("random-{seed}"), width, start, heading, destination, walls, obstacles)
}
