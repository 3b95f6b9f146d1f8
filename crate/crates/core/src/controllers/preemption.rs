use super::{ControllerDecision, DecisionContext, Reason};
use crate::sim::Phase;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Active {
    vehicle: u64,
    saved: Phase,
}

/// Emergency-vehicle preemption. The earliest queued emergency vehicle
/// gets its approach's green (skipping min_green and the extension gate,
/// but not the intergreen); once it has departed the interrupted phase is
/// restored with a fresh green.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Preemption {
    active: Option<Active>,
}

impl Preemption {
    pub fn active(&self) -> bool {
        self.active.is_some()
    }

    pub fn evaluate(&mut self, ctx: &DecisionContext<'_>) -> Option<ControllerDecision> {
        match self.active {
            Some(active) => {
                if ctx.emergencies.iter().any(|e| e.vehicle == active.vehicle) {
                    return None;
                }
                self.active = None;
                Some(ControllerDecision::switch(active.saved, Reason::EvRelease))
            }
            None => {
                let call = ctx.emergencies.first()?;
                self.active = Some(Active {
                    vehicle: call.vehicle,
                    saved: ctx.signal.current(),
                });
                Some(ControllerDecision::switch(
                    Phase::serving(call.movement.approach),
                    Reason::EvPreempt,
                ))
            }
        }
    }
}
