//! Builds a world from a scenario config and runs it to completion.

use std::path::Path;

use crate::config::{ControllerKind, EmergencyArrival, ScenarioConfig};
use crate::controllers::{
    ActuatedController, ActuatedParams, Controller, FixedTimeController, FuzzyController,
    FuzzyParams, ParamError, Policy,
};
use crate::fis::{build_traffic_fis, Fis};
use crate::fis_format::{parse_fis, FormatError};
use crate::metrics::{compute_metrics, RunMetrics};
use crate::sim::{
    write_event_log, write_time_series, EventRecord, Movement, SampleRecord, Vehicle, World,
};

pub fn build_controller(cfg: &ScenarioConfig, fis: Fis) -> Result<Controller, ParamError> {
    let c = &cfg.controller;
    let policy = match c.kind {
        ControllerKind::Fuzzy => Policy::Fuzzy(FuzzyController::new(
            fis,
            FuzzyParams {
                min_green: cfg.min_green,
                max_green: cfg.max_green,
                extension_threshold: c.extension_threshold,
                starvation_factor: c.starvation_factor,
            },
        )?),
        ControllerKind::FixedTime => Policy::FixedTime(FixedTimeController::new(c.fixed_green)?),
        ControllerKind::Actuated => Policy::Actuated(ActuatedController::new(ActuatedParams {
            min_green: cfg.min_green,
            max_green: cfg.max_green,
            unit_extension: c.unit_extension,
            gap_time: c.gap_time,
        })?),
    };
    Ok(Controller::new(policy, c.preemption))
}

/// Everything one seeded run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub events: Vec<EventRecord>,
    pub samples: Vec<SampleRecord>,
    pub vehicles: Vec<Vehicle>,
    pub metrics: RunMetrics,
}

impl RunOutput {
    pub fn event_log_csv(&self) -> String {
        write_event_log(&self.events)
    }

    pub fn time_series_csv(&self) -> String {
        write_time_series(&self.samples)
    }
}

/// Runs one scenario. `fis` is only used by the fuzzy controller.
pub fn run_scenario(cfg: &ScenarioConfig, fis: Fis) -> Result<RunOutput, ParamError> {
    let controller = build_controller(cfg, fis)?;
    let mut world = World::new(cfg, controller);
    world.run_to_end();
    let conservation = world.conservation();
    assert!(
        conservation.holds(),
        "vehicle conservation violated: {conservation:?}"
    );
    let events = world.log().to_vec();
    let metrics = compute_metrics(&events).expect("simulator logs are well formed");
    Ok(RunOutput {
        events,
        samples: world.samples().to_vec(),
        vehicles: world.vehicles().to_vec(),
        metrics,
    })
}

#[derive(Debug, thiserror::Error)]
pub enum FisLoadError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Format { path: String, source: FormatError },
}

/// The rule base named by `fuzzy.fis`, or the built-in one.
pub fn load_fis(cfg: &ScenarioConfig) -> Result<Fis, FisLoadError> {
    match &cfg.controller.fis {
        None => Ok(build_traffic_fis()),
        Some(path) => load_fis_file(path),
    }
}

pub fn load_fis_file(path: &Path) -> Result<Fis, FisLoadError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| FisLoadError::Io {
        path: shown.clone(),
        source,
    })?;
    parse_fis(&text).map_err(|source| FisLoadError::Format {
        path: shown,
        source,
    })
}

/// Runs `cfg` once per seed on up to `threads` workers. Results come back
/// in seed order and do not depend on the thread count.
pub fn run_seeds(
    cfg: &ScenarioConfig,
    fis: &Fis,
    seeds: &[u64],
    threads: usize,
) -> Result<Vec<RunOutput>, ParamError> {
    build_controller(cfg, fis.clone())?;
    let workers = threads.clamp(1, seeds.len().max(1));
    let run = |seed: u64| {
        let mut c = cfg.clone();
        c.seed = seed;
        run_scenario(&c, fis.clone()).expect("parameters checked above")
    };
    let mut slots: Vec<Option<RunOutput>> = vec![None; seeds.len()];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..seeds.len())
                        .step_by(workers)
                        .map(|i| (i, run(seeds[i])))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, out) in h.join().expect("worker panicked") {
                slots[i] = Some(out);
            }
        }
    });
    Ok(slots
        .into_iter()
        .map(|s| s.expect("every seed ran"))
        .collect())
}

/// The asymmetric demo: heavy eastbound, light westbound, moderate
/// north-south, one-hour run with the fuzzy controller.
pub fn demo_config() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    for m in Movement::ALL {
        cfg.lambda[m.index()] = match m.approach {
            crate::sim::Approach::East => 0.25,
            crate::sim::Approach::West => 0.05,
            _ => 0.1,
        };
    }
    cfg
}

/// Light east-west demand, moderate north-south, one emergency vehicle
/// on the minor westbound approach.
pub fn emergency_demo_config() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    for m in Movement::ALL {
        cfg.lambda[m.index()] = match m.approach {
            crate::sim::Approach::East | crate::sim::Approach::West => 0.05,
            _ => 0.15,
        };
    }
    cfg.ev_schedule = vec![EmergencyArrival {
        time: 600.0,
        movement: "W.through".parse().expect("valid movement"),
    }];
    cfg
}
