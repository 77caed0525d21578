use serde::{Deserialize, Serialize};

use crate::dynamics::{TrackExcitation, VehicleParams};
use crate::error::{Error, Result};
use crate::integrator::{Group, IntegrationSettings};
use crate::optimizer::AbcParams;
use crate::schedule::{SchedulingProblem, TaskSpec, TimeUnit};

/// Full run configuration. Omitted sections take their defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub vehicle: VehicleParams,
    pub track: TrackExcitation,
    pub integration: IntegrationSettings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheduling: Option<SchedulingProblem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abc: Option<AbcParams>,
    pub seed: u64,
}

fn within(section: &str, err: Error) -> Error {
    match err {
        Error::Parameter { field, reason } => Error::Parameter {
            field: format!("{section}.{field}"),
            reason,
        },
        other => other,
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.vehicle.validate().map_err(|e| within("vehicle", e))?;
        self.track.validate().map_err(|e| within("track", e))?;
        self.integration.validate().map_err(|e| within("integration", e))?;
        if let Some(p) = &self.scheduling {
            p.validate().map_err(|e| within("scheduling", e))?;
        }
        if let Some(a) = &self.abc {
            a.validate().map_err(|e| within("abc", e))?;
        }
        Ok(())
    }

    pub fn scheduling_problem(&self) -> SchedulingProblem {
        self.scheduling.clone().unwrap_or_else(default_scheduling_problem)
    }

    /// ABC settings, seeded from the run seed unless the section sets one.
    pub fn abc_params(&self) -> AbcParams {
        self.abc.unwrap_or(AbcParams {
            seed: self.seed,
            ..AbcParams::default()
        })
    }
}

/// One task per integration group on three cores, in microseconds: the
/// carriage task runs five times less often than the trolley tasks.
pub fn default_scheduling_problem() -> SchedulingProblem {
    let task = |g: Group, period, wcet| TaskSpec::new(g.name(), period, vec![wcet; 3]).with_group(g);
    SchedulingProblem {
        time_unit: TimeUnit::Microseconds,
        cores: 3,
        switch_cost: 1.0,
        tasks: vec![
            task(Group::Carriage, 500, 17.0),
            task(Group::Trolley1, 100, 18.0),
            task(Group::Trolley2, 100, 18.0),
        ],
    }
}

/// Parses and validates a JSON configuration document.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let config: SimConfig = serde_json::from_str(text)?;
    config.validate()?;
    Ok(config)
}
