//! Kinematic bicycle model with rate-limited steering, advanced at a fixed
//! tick. Distances are arbitrary world units; angles are radians.
//!
//! The update is deliberately simple (no slip, constant speed): the point of
//! the crate is the steering controller, not tire physics. `step` is written
//! to be exactly odd under mirroring: negating `y`, `theta`, `delta` and the
//! steering command of a state produces the bitwise-mirrored successor.

use crate::geometry::{normalize_angle, OrientedRect, Point};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum VehicleError {
    #[error("vehicle parameter `{field}` invalid: {reason}")]
    InvalidParam { field: &'static str, reason: String },
}

/// Physical and actuation parameters of the vehicle.
///
/// `max_steer` and `max_steer_rate` are radians and radians-per-tick; the
/// steering wheel angle is clamped to `[-max_steer, max_steer]` and slews
/// toward the commanded value at most `max_steer_rate` per tick.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    pub wheelbase: f64,
    pub body_length: f64,
    pub body_width: f64,
    pub speed: f64,
    pub max_steer: f64,
    pub max_steer_rate: f64,
}

impl VehicleParams {
    pub fn new(
        wheelbase: f64,
        body_length: f64,
        body_width: f64,
        speed: f64,
        max_steer: f64,
        max_steer_rate: f64,
    ) -> Result<Self, VehicleError> {
        let p = VehicleParams { wheelbase, body_length, body_width, speed, max_steer, max_steer_rate };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), VehicleError> {
        let positive: [(&'static str, f64); 6] = [
            ("wheelbase", self.wheelbase),
            ("body_length", self.body_length),
            ("body_width", self.body_width),
            ("speed", self.speed),
            ("max_steer", self.max_steer),
            ("max_steer_rate", self.max_steer_rate),
        ];
        for (field, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(VehicleError::InvalidParam {
                    field,
                    reason: format!("must be a positive finite number, got {v}"),
                });
            }
        }
        if self.max_steer >= std::f64::consts::FRAC_PI_2 {
            return Err(VehicleError::InvalidParam {
                field: "max_steer",
                reason: format!("must be < pi/2 rad, got {}", self.max_steer),
            });
        }
        Ok(())
    }
}

impl Default for VehicleParams {
    /// Wheelbase 20, body 30 x 16, speed 5 per tick, steering limit 35
    /// degrees with a 5 degrees-per-tick slew rate.
    fn default() -> Self {
        VehicleParams {
            wheelbase: 20.0,
            body_length: 30.0,
            body_width: 16.0,
            speed: 5.0,
            max_steer: 35.0f64.to_radians(),
            max_steer_rate: 5.0f64.to_radians(),
        }
    }
}

/// Vehicle pose plus current steering wheel angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    /// Heading, radians in `(-pi, pi]`.
    pub theta: f64,
    /// Current steering angle, radians, `|delta| <= max_steer`.
    pub delta: f64,
}

impl VehicleState {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        VehicleState { x, y, theta: normalize_angle(theta), delta: 0.0 }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// Advances the state by one tick under `steer_command` (radians).
///
/// Order of operations: clamp the command to the steering limit, slew the
/// wheel toward it by at most `max_steer_rate`, then move at constant speed
/// along `theta + delta` and rotate the heading by `speed / wheelbase *
/// sin(delta)`.
pub fn step(state: VehicleState, steer_command: f64, params: &VehicleParams) -> VehicleState {
    let target = steer_command.clamp(-params.max_steer, params.max_steer);
    let slew = (target - state.delta).clamp(-params.max_steer_rate, params.max_steer_rate);
    let delta = state.delta + slew;
    let course = state.theta + delta;
    VehicleState {
        x: state.x + params.speed * course.cos(),
        y: state.y + params.speed * course.sin(),
        theta: normalize_angle(state.theta + params.speed / params.wheelbase * delta.sin()),
        delta,
    }
}

/// Body rectangle centered on the pose, long axis along the heading.
pub fn footprint(state: &VehicleState, params: &VehicleParams) -> OrientedRect {
    OrientedRect {
        center: state.position(),
        half_length: params.body_length / 2.0,
        half_width: params.body_width / 2.0,
        heading: state.theta,
    }
}
