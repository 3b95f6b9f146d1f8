//! Signal-control policies. Each policy is a deterministic state machine
//! consulted by the simulation at decision points; emergency preemption
//! wraps any of them.

mod actuated;
mod fixed_time;
mod fuzzy;
mod preemption;

use std::fmt;
use std::str::FromStr;

pub use actuated::{ActuatedController, ActuatedParams};
pub use fixed_time::FixedTimeController;
pub use fuzzy::{next_phase_stage, FuzzyController, FuzzyParams};
pub use preemption::Preemption;

use crate::sim::{EmergencyCall, Phase, SensorSnapshot, SignalState};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct ParamError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    ExtensionGranted,
    MaxGreenReached,
    LongerQueueElsewhere,
    NoDemand,
    EvPreempt,
    EvRelease,
    /// Fixed-time plan interval used up.
    PlanElapsed,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::ExtensionGranted => "extension-granted",
            Reason::MaxGreenReached => "max-green-reached",
            Reason::LongerQueueElsewhere => "longer-queue-elsewhere",
            Reason::NoDemand => "no-demand",
            Reason::EvPreempt => "ev-preempt",
            Reason::EvRelease => "ev-release",
            Reason::PlanElapsed => "plan-elapsed",
        }
    }
}

impl FromStr for Reason {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "extension-granted" => Reason::ExtensionGranted,
            "max-green-reached" => Reason::MaxGreenReached,
            "longer-queue-elsewhere" => Reason::LongerQueueElsewhere,
            "no-demand" => Reason::NoDemand,
            "ev-preempt" => Reason::EvPreempt,
            "ev-release" => Reason::EvRelease,
            "plan-elapsed" => Reason::PlanElapsed,
            other => return Err(format!("unknown reason '{other}'")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    /// Keep the current green; decide again after `extension` seconds (> 0).
    Hold {
        extension: f64,
    },
    SwitchTo(Phase),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerDecision {
    pub action: Action,
    pub reason: Reason,
}

impl ControllerDecision {
    pub fn hold(extension: f64, reason: Reason) -> Self {
        debug_assert!(extension > 0.0);
        Self {
            action: Action::Hold { extension },
            reason,
        }
    }

    pub fn switch(phase: Phase, reason: Reason) -> Self {
        Self {
            action: Action::SwitchTo(phase),
            reason,
        }
    }
}

/// Log form: `hold:<seconds>:<reason>` or `switch:<phase>:<reason>`.
impl fmt::Display for ControllerDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.action {
            Action::Hold { extension } => write!(f, "hold:{extension:.6}:{}", self.reason.as_str()),
            Action::SwitchTo(p) => write!(f, "switch:{p}:{}", self.reason.as_str()),
        }
    }
}

impl FromStr for ControllerDecision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(':');
        let (Some(kind), Some(arg), Some(reason), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(format!("malformed decision '{s}'"));
        };
        let reason = reason.parse()?;
        let action = match kind {
            "hold" => Action::Hold {
                extension: arg
                    .parse()
                    .map_err(|_| format!("invalid extension '{arg}'"))?,
            },
            "switch" => Action::SwitchTo(arg.parse()?),
            other => return Err(format!("unknown decision kind '{other}'")),
        };
        Ok(Self { action, reason })
    }
}

/// Everything a policy may look at when deciding.
#[derive(Debug, Clone, Copy)]
pub struct DecisionContext<'a> {
    pub now: f64,
    pub signal: &'a SignalState,
    pub snapshot: &'a SensorSnapshot,
    /// Queued emergency vehicles, earliest arrival first.
    pub emergencies: &'a [EmergencyCall],
}

impl DecisionContext<'_> {
    pub fn green_elapsed(&self) -> f64 {
        self.signal.green_elapsed(self.now)
    }
}

#[derive(Debug, Clone)]
pub enum Policy {
    Fuzzy(FuzzyController),
    FixedTime(FixedTimeController),
    Actuated(ActuatedController),
}

impl Policy {
    fn first_decision_after(&self, phase: Phase) -> f64 {
        match self {
            Policy::Fuzzy(c) => c.params().min_green,
            Policy::FixedTime(c) => c.green_time(phase),
            Policy::Actuated(c) => c.params().min_green,
        }
    }

    fn decide(&mut self, ctx: &DecisionContext<'_>) -> ControllerDecision {
        match self {
            Policy::Fuzzy(c) => c.decide(ctx),
            Policy::FixedTime(c) => c.decide(ctx),
            Policy::Actuated(c) => c.decide(ctx),
        }
    }
}

/// A policy plus optional emergency preemption.
#[derive(Debug, Clone)]
pub struct Controller {
    policy: Policy,
    preemption: Option<Preemption>,
}

impl Controller {
    pub fn new(policy: Policy, preemption: bool) -> Self {
        Self {
            policy,
            preemption: preemption.then(Preemption::default),
        }
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    /// Seconds after a green starts at which the first regular decision
    /// falls due.
    pub fn first_decision_after(&self, phase: Phase) -> f64 {
        self.policy.first_decision_after(phase)
    }

    /// True while an emergency vehicle holds the signal; regular decisions
    /// are suspended meanwhile.
    pub fn preempting(&self) -> bool {
        self.preemption.as_ref().is_some_and(Preemption::active)
    }

    /// Emergency check, run on siren events and when a green starts.
    pub fn emergency_override(&mut self, ctx: &DecisionContext<'_>) -> Option<ControllerDecision> {
        self.preemption.as_mut()?.evaluate(ctx)
    }

    /// Regular decision point: emergency check first, then the policy.
    pub fn decide(&mut self, ctx: &DecisionContext<'_>) -> ControllerDecision {
        if let Some(decision) = self.emergency_override(ctx) {
            return decision;
        }
        self.policy.decide(ctx)
    }
}
