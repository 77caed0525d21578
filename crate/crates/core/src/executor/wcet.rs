use std::hint::black_box;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dynamics::{rhs_unchecked, TrackExcitation, VehicleParams, VehicleState};
use crate::error::{Error, Result};
use crate::integrator::Group;

/// Execution-time statistics of one task body, in nanoseconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WcetEstimate {
    pub samples: u64,
    pub max_ns: f64,
    pub mean_ns: f64,
    pub stddev_ns: f64,
    /// Median cost of an empty measurement, already subtracted.
    pub timer_overhead_ns: f64,
    /// Smallest observed clock increment.
    pub clock_resolution_ns: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn bracket(mut f: impl FnMut()) -> f64 {
    let t0 = Instant::now();
    f();
    t0.elapsed().as_nanos() as f64
}

fn timer_overhead() -> f64 {
    let mut v: Vec<f64> = (0..1000).map(|_| bracket(|| {})).collect();
    v.sort_by(f64::total_cmp);
    (v[499] + v[500]) / 2.0
}

fn clock_resolution() -> f64 {
    (0..100)
        .filter_map(|_| {
            let t0 = Instant::now();
            // Bounded so a frozen clock cannot hang the measurement.
            (0..1_000_000).find_map(|_| {
                let d = t0.elapsed().as_nanos();
                (d > 0).then_some(d as f64)
            })
        })
        .fold(f64::INFINITY, f64::min)
}

/// Times `body` over `iterations` runs after `warmup` discarded runs.
pub fn measure_wcet(mut body: impl FnMut(), iterations: u64, warmup: u64) -> Result<WcetEstimate> {
    if iterations == 0 {
        return Err(Error::parameter("iterations", "must be >= 1"));
    }
    let overhead = timer_overhead();
    let resolution = clock_resolution();
    let mut warnings = Vec::new();
    if resolution > 1_000.0 {
        warnings.push(format!("clock resolution {resolution} ns is coarser than 1 us"));
    }
    for _ in 0..warmup {
        body();
    }
    let samples: Vec<f64> = (0..iterations)
        .map(|_| (bracket(&mut body) - overhead).max(0.0))
        .collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Ok(WcetEstimate {
        samples: iterations,
        max_ns: samples.iter().copied().fold(0.0, f64::max),
        mean_ns: mean,
        stddev_ns: var.sqrt(),
        timer_overhead_ns: overhead,
        clock_resolution_ns: resolution,
        warnings,
    })
}

/// The work of one job of a group's task: a right-hand-side evaluation and
/// the group's Euler update, on a private state.
pub fn group_step_body(group: Group, vehicle: VehicleParams, track: TrackExcitation, h: f64) -> impl FnMut() {
    let geom = vehicle.geometry();
    let mut state = VehicleState::zero();
    let mut t = 0.0;
    move || {
        let exc = track.sample_unchecked(t, geom);
        let deriv = rhs_unchecked(black_box(&state), &exc, &vehicle);
        state.euler_update(group.coords(), h, &deriv);
        t += h;
        black_box(&state);
    }
}
