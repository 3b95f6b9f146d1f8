use super::{ControllerDecision, DecisionContext, ParamError, Reason};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatedParams {
    pub min_green: f64,
    pub max_green: f64,
    pub unit_extension: f64,
    pub gap_time: f64,
}

impl Default for ActuatedParams {
    fn default() -> Self {
        Self {
            min_green: 5.0,
            max_green: 50.0,
            unit_extension: 3.0,
            gap_time: 3.0,
        }
    }
}

/// Gap-out control: the green is extended one unit at a time while
/// vehicles keep arriving on it, up to max_green; phases rotate in order.
#[derive(Debug, Clone)]
pub struct ActuatedController {
    params: ActuatedParams,
}

impl ActuatedController {
    pub fn new(params: ActuatedParams) -> Result<Self, ParamError> {
        let p = &params;
        if !(p.min_green >= 0.0 && p.min_green <= p.max_green) {
            return Err(ParamError(format!(
                "need 0 <= min_green <= max_green, got {} and {}",
                p.min_green, p.max_green
            )));
        }
        if !(p.unit_extension > 0.0 && p.gap_time >= 0.0) {
            return Err(ParamError(
                "unit_extension must be > 0 and gap_time >= 0".into(),
            ));
        }
        Ok(Self { params })
    }

    pub fn params(&self) -> &ActuatedParams {
        &self.params
    }

    pub fn decide(&mut self, ctx: &DecisionContext<'_>) -> ControllerDecision {
        let p = &self.params;
        let phase = ctx.signal.current();
        let elapsed = ctx.green_elapsed();
        let headroom = p.max_green - elapsed;
        if headroom <= 1e-9 {
            return ControllerDecision::switch(phase.successor(), Reason::MaxGreenReached);
        }
        let recent = ctx
            .snapshot
            .get(phase.approach())
            .last_arrival
            .is_some_and(|t| ctx.now - t <= p.gap_time);
        if recent {
            ControllerDecision::hold(p.unit_extension.min(headroom), Reason::ExtensionGranted)
        } else {
            ControllerDecision::switch(phase.successor(), Reason::NoDemand)
        }
    }
}
