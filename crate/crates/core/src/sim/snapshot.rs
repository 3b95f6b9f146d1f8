use super::{Approach, Movement};

/// What the detectors on one approach report.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ApproachSensors {
    /// Longer of the approach's two lane queues, vehicles.
    pub queue_length: usize,
    /// Age of the longest-waiting queued vehicle, seconds; 0 when empty.
    pub max_wait: f64,
    pub emergency_present: bool,
    /// Most recent arrival time on the approach, if any.
    pub last_arrival: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SensorSnapshot {
    pub time: f64,
    pub approaches: [ApproachSensors; 4],
}

impl SensorSnapshot {
    pub fn get(&self, approach: Approach) -> &ApproachSensors {
        &self.approaches[approach.index()]
    }

    pub fn queue(&self, approach: Approach) -> usize {
        self.get(approach).queue_length
    }

    pub fn wait(&self, approach: Approach) -> f64 {
        self.get(approach).max_wait
    }
}

/// A queued emergency vehicle, as heard by the siren detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmergencyCall {
    pub vehicle: u64,
    pub movement: Movement,
    pub arrival_time: f64,
}
