use super::{ControllerDecision, DecisionContext, ParamError, Reason};
use crate::fis::Fis;
use crate::sim::{Phase, SensorSnapshot};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzyParams {
    pub min_green: f64,
    pub max_green: f64,
    /// Extensions shorter than this end the green.
    pub extension_threshold: f64,
    /// The green is cut when another approach's queue reaches this multiple
    /// of the current one. `f64::INFINITY` disables the check.
    pub starvation_factor: f64,
}

impl Default for FuzzyParams {
    fn default() -> Self {
        Self {
            min_green: 5.0,
            max_green: 50.0,
            extension_threshold: 0.5,
            starvation_factor: 2.0,
        }
    }
}

/// Three-stage fuzzy controller: a Mamdani system proposes a green
/// extension from the green approach's waiting time and queue length, a
/// gate accepts or rejects it against the other queues, and on rejection
/// the longest competing queue gets the next green.
#[derive(Debug, Clone)]
pub struct FuzzyController {
    fis: Fis,
    params: FuzzyParams,
}

impl FuzzyController {
    pub fn new(fis: Fis, params: FuzzyParams) -> Result<Self, ParamError> {
        if fis.inputs().len() != 2 {
            return Err(ParamError(format!(
                "fuzzy controller needs a 2-input system (waiting time, queue length), got {}",
                fis.inputs().len()
            )));
        }
        if !(params.min_green >= 0.0 && params.min_green <= params.max_green) {
            return Err(ParamError(format!(
                "need 0 <= min_green <= max_green, got {} and {}",
                params.min_green, params.max_green
            )));
        }
        if params.extension_threshold.is_nan()
            || params.extension_threshold < 0.0
            || params.starvation_factor.is_nan()
            || params.starvation_factor <= 0.0
        {
            return Err(ParamError(
                "extension_threshold must be >= 0 and starvation_factor > 0".into(),
            ));
        }
        Ok(Self { fis, params })
    }

    pub fn params(&self) -> &FuzzyParams {
        &self.params
    }

    pub fn fis(&self) -> &Fis {
        &self.fis
    }

    /// Green phase stage: proposed extension in seconds, never negative.
    /// Zero when no rule fires.
    pub fn green_phase_stage(&self, snapshot: &SensorSnapshot, phase: Phase) -> f64 {
        let approach = phase.approach();
        let wait = snapshot.wait(approach).clamp(0.0, 50.0);
        let queue = (snapshot.queue(approach) as f64).clamp(0.0, 50.0);
        match self.fis.infer(&[wait, queue]) {
            Ok(inference) if inference.fired => inference.value.max(0.0),
            _ => 0.0,
        }
    }

    /// Accepts the extension only if it is worth having, fits under
    /// max_green, and no other approach is starving.
    pub fn extension_gate(
        &self,
        extension: f64,
        snapshot: &SensorSnapshot,
        phase: Phase,
        green_elapsed: f64,
    ) -> ControllerDecision {
        let p = &self.params;
        let current = snapshot.queue(phase.approach()) as f64;
        let other = Phase::ALL
            .into_iter()
            .filter(|&q| q != phase)
            .map(|q| snapshot.queue(q.approach()))
            .max()
            .unwrap_or(0) as f64;
        let reason = if extension < p.extension_threshold || extension <= 0.0 {
            Reason::NoDemand
        } else if green_elapsed + extension > p.max_green + 1e-9 {
            Reason::MaxGreenReached
        } else if other >= p.starvation_factor * current {
            Reason::LongerQueueElsewhere
        } else {
            return ControllerDecision::hold(extension, Reason::ExtensionGranted);
        };
        ControllerDecision::switch(next_phase_stage(snapshot, phase), reason)
    }

    pub fn decide(&mut self, ctx: &DecisionContext<'_>) -> ControllerDecision {
        let phase = ctx.signal.current();
        let extension = self.green_phase_stage(ctx.snapshot, phase);
        self.extension_gate(extension, ctx.snapshot, phase, ctx.green_elapsed())
    }
}

/// Next phase stage: the non-current phase with the longest queue. Ties go
/// to whichever comes first in rotation after `current`, which is also the
/// answer when every other queue is empty.
pub fn next_phase_stage(snapshot: &SensorSnapshot, current: Phase) -> Phase {
    let mut best = current.successor();
    let mut candidate = best;
    for _ in 0..2 {
        candidate = candidate.successor();
        if snapshot.queue(candidate.approach()) > snapshot.queue(best.approach()) {
            best = candidate;
        }
    }
    best
}
