use super::{ControllerDecision, DecisionContext, ParamError, Reason};
use crate::sim::Phase;

/// Pre-timed control: P1 -> P2 -> P3 -> P4 with fixed greens, blind to
/// the sensors.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedTimeController {
    plan: [f64; 4],
}

impl FixedTimeController {
    /// `plan` holds the green time of P1..P4 in seconds.
    pub fn new(plan: [f64; 4]) -> Result<Self, ParamError> {
        if let Some((i, g)) = plan
            .iter()
            .enumerate()
            .find(|(_, g)| !(g.is_finite() && **g > 0.0))
        {
            return Err(ParamError(format!(
                "green time for P{} must be > 0, got {g}",
                i + 1
            )));
        }
        Ok(Self { plan })
    }

    pub fn green_time(&self, phase: Phase) -> f64 {
        self.plan[phase.index()]
    }

    pub fn cycle_length(&self, intergreen: f64) -> f64 {
        self.plan.iter().map(|g| g + intergreen).sum()
    }

    pub fn decide(&mut self, ctx: &DecisionContext<'_>) -> ControllerDecision {
        let phase = ctx.signal.current();
        let remaining = self.green_time(phase) - ctx.green_elapsed();
        if remaining > 1e-9 {
            return ControllerDecision::hold(remaining, Reason::PlanElapsed);
        }
        ControllerDecision::switch(phase.successor(), Reason::PlanElapsed)
    }
}
