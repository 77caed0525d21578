use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Generalized coordinates of the vertical-plane model, in the order used by
/// every matrix, state vector and CSV column in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    /// Carriage heave.
    Zk,
    /// Carriage pitch (galloping).
    PhiK,
    /// Front trolley heave.
    Z1,
    /// Front trolley pitch.
    Phi1,
    /// Rear trolley heave.
    Z2,
    /// Rear trolley pitch.
    Phi2,
}

impl Coord {
    pub const ALL: [Coord; 6] = [Coord::Zk, Coord::PhiK, Coord::Z1, Coord::Phi1, Coord::Z2, Coord::Phi2];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn name(self) -> &'static str {
        match self {
            Coord::Zk => "z_k",
            Coord::PhiK => "phi_k",
            Coord::Z1 => "z_1",
            Coord::Phi1 => "phi_1",
            Coord::Z2 => "z_2",
            Coord::Phi2 => "phi_2",
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The 12 phase variables: six displacements and their rates.
///
/// Only finite values can be stored.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawState", into = "RawState")]
pub struct VehicleState {
    q: [f64; 6],
    qdot: [f64; 6],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    displacement: [f64; 6],
    velocity: [f64; 6],
}

impl TryFrom<RawState> for VehicleState {
    type Error = Error;

    fn try_from(raw: RawState) -> Result<Self> {
        VehicleState::new(raw.displacement, raw.velocity)
    }
}

impl From<VehicleState> for RawState {
    fn from(s: VehicleState) -> Self {
        RawState {
            displacement: s.q,
            velocity: s.qdot,
        }
    }
}

impl VehicleState {
    pub fn new(displacement: [f64; 6], velocity: [f64; 6]) -> Result<Self> {
        if displacement.iter().chain(&velocity).all(|v| v.is_finite()) {
            Ok(Self {
                q: displacement,
                qdot: velocity,
            })
        } else {
            Err(Error::NonFinite("vehicle state"))
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn displacements(&self) -> &[f64; 6] {
        &self.q
    }

    pub fn velocities(&self) -> &[f64; 6] {
        &self.qdot
    }

    pub fn displacement(&self, c: Coord) -> f64 {
        self.q[c.index()]
    }

    pub fn velocity(&self, c: Coord) -> f64 {
        self.qdot[c.index()]
    }

    /// Returns a copy with one displacement replaced.
    pub fn with_displacement(mut self, c: Coord, value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite("vehicle state"));
        }
        self.q[c.index()] = value;
        Ok(self)
    }

    /// Returns a copy with one velocity replaced.
    pub fn with_velocity(mut self, c: Coord, value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite("vehicle state"));
        }
        self.qdot[c.index()] = value;
        Ok(self)
    }

    /// Explicit Euler update of the given coordinates. The caller checks
    /// finiteness of the result through [`VehicleState::is_finite`].
    pub(crate) fn euler_update(&mut self, coords: &[Coord], step: f64, deriv: &StateDerivative) {
        for &c in coords {
            let i = c.index();
            self.q[i] += step * deriv.dq[i];
            self.qdot[i] += step * deriv.ddq[i];
        }
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.q.iter().chain(&self.qdot).all(|v| v.is_finite())
    }
}

/// Time derivative of a [`VehicleState`]: velocities and accelerations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateDerivative {
    pub dq: [f64; 6],
    pub ddq: [f64; 6],
}

impl StateDerivative {
    pub fn acceleration(&self, c: Coord) -> f64 {
        self.ddq[c.index()]
    }
}
