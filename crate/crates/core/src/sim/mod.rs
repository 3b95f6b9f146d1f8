//! Discrete-event model of the isolated four-approach intersection.

pub mod arrivals;
mod log;
mod movement;
mod queue;
mod signal;
mod snapshot;
mod world;

pub use arrivals::{arrival_count_pmf, poisson_goodness_of_fit, ArrivalProcess, GoodnessOfFit};
pub use log::{
    parse_event_log, write_event_log, write_time_series, EventKind, EventRecord, LogParseError,
    SampleRecord, EVENT_LOG_HEADER, TIME_SERIES_HEADER,
};
pub use movement::{Approach, Movement, Phase, Turn};
pub use queue::{Event, EventQueue};
pub use signal::{SignalMode, SignalState, SwitchOutcome};
pub use snapshot::{ApproachSensors, EmergencyCall, SensorSnapshot};
pub use world::{Conservation, Vehicle, World};
