//! Fixed-step explicit Euler integration with per-group rate divisors.
//!
//! The six coordinate pairs are split into three rate groups (carriage and
//! the two trolleys). At base step `n` a group with divisor `d` is updated
//! iff `n % d == 0`, using an effective step `d·h`. Every group due at step
//! `n` reads the same start-of-step snapshot; values of groups that are not
//! due are held (zero-order hold).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{rhs_unchecked, Coord, TrackExcitation, VehicleParams, VehicleState};
use crate::error::{Error, Result};

/// Integration groups, in their fixed update order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Carriage,
    Trolley1,
    Trolley2,
}

impl Group {
    pub const ALL: [Group; 3] = [Group::Carriage, Group::Trolley1, Group::Trolley2];

    pub const fn coords(self) -> &'static [Coord] {
        match self {
            Group::Carriage => &[Coord::Zk, Coord::PhiK],
            Group::Trolley1 => &[Coord::Z1, Coord::Phi1],
            Group::Trolley2 => &[Coord::Z2, Coord::Phi2],
        }
    }

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn name(self) -> &'static str {
        match self {
            Group::Carriage => "carriage",
            Group::Trolley1 => "trolley1",
            Group::Trolley2 => "trolley2",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Update divisor per group, indexed by [`Group::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[u32; 3]", into = "[u32; 3]")]
pub struct RateGroups {
    divisors: [u32; 3],
}

impl RateGroups {
    pub fn new(divisors: [u32; 3]) -> Result<Self> {
        if let Some(pos) = divisors.iter().position(|&d| d == 0) {
            return Err(Error::parameter(
                "divisors",
                format!("divisor of group {} must be >= 1", Group::ALL[pos]),
            ));
        }
        Ok(Self { divisors })
    }

    pub fn uniform() -> Self {
        Self { divisors: [1; 3] }
    }

    pub fn divisors(&self) -> [u32; 3] {
        self.divisors
    }

    pub fn divisor(&self, g: Group) -> u32 {
        self.divisors[g.index()]
    }
}

impl Default for RateGroups {
    /// Carriage updated five times less often than the trolleys.
    fn default() -> Self {
        Self { divisors: [5, 1, 1] }
    }
}

impl TryFrom<[u32; 3]> for RateGroups {
    type Error = Error;

    fn try_from(d: [u32; 3]) -> Result<Self> {
        RateGroups::new(d)
    }
}

impl From<RateGroups> for [u32; 3] {
    fn from(g: RateGroups) -> Self {
        g.divisors
    }
}

/// Step, horizon and output settings of one integration run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegrationSettings {
    /// Base step h [s].
    pub h: f64,
    /// Simulated horizon [s].
    pub duration: f64,
    pub divisors: RateGroups,
    /// Keep every `output_stride`-th base step in the trajectory.
    pub output_stride: u32,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        Self {
            h: 1e-4,
            duration: 10.0,
            divisors: RateGroups::default(),
            output_stride: 10,
        }
    }
}

impl IntegrationSettings {
    pub fn validate(&self) -> Result<()> {
        if !self.h.is_finite() || self.h <= 0.0 {
            return Err(Error::parameter(
                "h",
                format!("step must be finite and > 0, got {}", self.h),
            ));
        }
        if !self.duration.is_finite() || self.duration < self.h {
            return Err(Error::parameter(
                "duration",
                format!("must be finite and >= h = {}, got {}", self.h, self.duration),
            ));
        }
        if self.output_stride == 0 {
            return Err(Error::parameter("output_stride", "must be >= 1"));
        }
        Ok(())
    }

    /// Number of base steps covering the horizon.
    pub fn steps(&self) -> u64 {
        (self.duration / self.h).round() as u64
    }
}

/// Sampled solution of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub step: f64,
    pub output_stride: u32,
    pub divisors: [u32; 3],
    pub track: TrackExcitation,
    pub seed: u64,
    pub times: Vec<f64>,
    pub states: Vec<VehicleState>,
}

impl Trajectory {
    pub(crate) fn new(settings: &IntegrationSettings, track: TrackExcitation, seed: u64) -> Self {
        Self {
            step: settings.h,
            output_stride: settings.output_stride,
            divisors: settings.divisors.divisors(),
            track,
            seed,
            times: Vec::new(),
            states: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, t: f64, s: VehicleState) {
        self.times.push(t);
        self.states.push(s);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Sample spacing h·output_stride.
    pub fn spacing(&self) -> f64 {
        self.step * self.output_stride as f64
    }

    pub fn last(&self) -> Option<&VehicleState> {
        self.states.last()
    }

    /// Displacement history of one coordinate.
    pub fn series(&self, c: Coord) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(move |s| s.displacement(c))
    }

    /// Numerical content only: times and states, ignoring metadata.
    pub fn same_samples(&self, other: &Trajectory) -> bool {
        self.times == other.times && self.states == other.states
    }
}

/// Multi-rate explicit Euler run of the vehicle model.
pub fn simulate(
    p: &VehicleParams,
    track: &TrackExcitation,
    settings: &IntegrationSettings,
    initial: &VehicleState,
) -> Result<Trajectory> {
    simulate_seeded(p, track, settings, initial, 0)
}

/// As [`simulate`], tagging the trajectory with a run seed for provenance.
pub fn simulate_seeded(
    p: &VehicleParams,
    track: &TrackExcitation,
    settings: &IntegrationSettings,
    initial: &VehicleState,
    seed: u64,
) -> Result<Trajectory> {
    p.validate()?;
    track.validate()?;
    settings.validate()?;

    let h = settings.h;
    let stride = u64::from(settings.output_stride);
    let geom = p.geometry();
    let divisors = settings.divisors;
    let steps = settings.steps();

    let mut traj = Trajectory::new(settings, *track, seed);
    let mut state = *initial;
    for n in 0..=steps {
        let t = n as f64 * h;
        if n % stride == 0 {
            traj.push(t, state);
        }
        if n == steps {
            break;
        }
        let is_due = |g: Group| n % u64::from(divisors.divisor(g)) == 0;
        if !Group::ALL.into_iter().any(is_due) {
            continue;
        }
        let snapshot = state;
        let exc = track.sample_unchecked(t, geom);
        let deriv = rhs_unchecked(&snapshot, &exc, p);
        for g in Group::ALL.into_iter().filter(|&g| is_due(g)) {
            state.euler_update(g.coords(), f64::from(divisors.divisor(g)) * h, &deriv);
        }
        if !state.is_finite() {
            return Err(Error::Divergence {
                time: (n + 1) as f64 * h,
            });
        }
    }
    Ok(traj)
}

/// Per-coordinate deviation of trajectory `b` from reference `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub coordinates: Vec<String>,
    pub max_abs: [f64; 6],
    /// `max_abs` divided by the peak |value| of the reference.
    pub relative_to_peak: [f64; 6],
    pub reference_peak: [f64; 6],
}

impl DeviationReport {
    pub fn worst_relative(&self) -> f64 {
        self.relative_to_peak.iter().copied().fold(0.0, f64::max)
    }

    pub fn within(&self, tolerance: f64) -> bool {
        self.relative_to_peak.iter().all(|&r| r <= tolerance)
    }
}

pub fn compare_trajectories(a: &Trajectory, b: &Trajectory) -> Result<DeviationReport> {
    if a.spacing() != b.spacing() {
        return Err(Error::Comparison(format!(
            "sample spacing differs: {} vs {}",
            a.spacing(),
            b.spacing()
        )));
    }
    if a.len() != b.len() || a.times != b.times {
        return Err(Error::Comparison(format!(
            "sample grids differ ({} vs {} samples)",
            a.len(),
            b.len()
        )));
    }
    let mut max_abs = [0.0f64; 6];
    let mut peak = [0.0f64; 6];
    for (sa, sb) in a.states.iter().zip(&b.states) {
        for c in Coord::ALL {
            let i = c.index();
            peak[i] = peak[i].max(sa.displacement(c).abs());
            max_abs[i] = max_abs[i].max((sa.displacement(c) - sb.displacement(c)).abs());
        }
    }
    let relative_to_peak = std::array::from_fn(|i| {
        if max_abs[i] == 0.0 {
            0.0
        } else if peak[i] == 0.0 {
            f64::INFINITY
        } else {
            max_abs[i] / peak[i]
        }
    });
    Ok(DeviationReport {
        coordinates: Coord::ALL.iter().map(|c| c.name().to_string()).collect(),
        max_abs,
        relative_to_peak,
        reference_peak: peak,
    })
}
