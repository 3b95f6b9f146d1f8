use std::fmt;
use std::str::FromStr;

use super::Phase;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalMode {
    Green,
    /// All-red clearance; nothing is served.
    Intergreen,
}

impl fmt::Display for SignalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignalMode::Green => "green",
            SignalMode::Intergreen => "intergreen",
        })
    }
}

impl FromStr for SignalMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "green" => Ok(SignalMode::Green),
            "intergreen" => Ok(SignalMode::Intergreen),
            other => Err(format!("unknown signal mode '{other}'")),
        }
    }
}

/// What a switch request did to the signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SwitchOutcome {
    /// Target is already green; green continues with a fresh start time.
    Continued,
    /// Clearance started; `target` turns green at `ends_at`.
    Intergreen { target: Phase, ends_at: f64 },
    /// A clearance is already running; the request was dropped.
    Ignored,
}

/// The single signal "server": one green phase at a time, with an
/// intergreen between any two greens.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalState {
    current: Phase,
    phase_start: f64,
    mode: SignalMode,
    intergreen_end: Option<f64>,
    target: Option<Phase>,
}

impl SignalState {
    pub fn green(phase: Phase, start: f64) -> Self {
        Self {
            current: phase,
            phase_start: start,
            mode: SignalMode::Green,
            intergreen_end: None,
            target: None,
        }
    }

    /// During intergreen this is the phase that was just closed.
    pub fn current(&self) -> Phase {
        self.current
    }

    pub fn phase_start(&self) -> f64 {
        self.phase_start
    }

    pub fn mode(&self) -> SignalMode {
        self.mode
    }

    pub fn intergreen_end(&self) -> Option<f64> {
        self.intergreen_end
    }

    pub fn target(&self) -> Option<Phase> {
        self.target
    }

    /// Phase whose movements may discharge right now.
    pub fn green_phase(&self) -> Option<Phase> {
        (self.mode == SignalMode::Green).then_some(self.current)
    }

    pub fn green_elapsed(&self, now: f64) -> f64 {
        match self.mode {
            SignalMode::Green => (now - self.phase_start).max(0.0),
            SignalMode::Intergreen => 0.0,
        }
    }

    /// Switching stage: close the current green and clear for `target`.
    pub fn request_switch(&mut self, target: Phase, now: f64, intergreen: f64) -> SwitchOutcome {
        match self.mode {
            SignalMode::Intergreen => SwitchOutcome::Ignored,
            SignalMode::Green if target == self.current => {
                self.phase_start = now;
                SwitchOutcome::Continued
            }
            SignalMode::Green => {
                let ends_at = now + intergreen;
                self.mode = SignalMode::Intergreen;
                self.intergreen_end = Some(ends_at);
                self.target = Some(target);
                SwitchOutcome::Intergreen { target, ends_at }
            }
        }
    }

    /// Changes which phase a running clearance leads to.
    pub fn retarget(&mut self, target: Phase) {
        if self.mode == SignalMode::Intergreen {
            self.target = Some(target);
        }
    }

    /// Ends the clearance; the target phase turns green at `now`.
    pub fn finish_intergreen(&mut self, now: f64) -> Option<Phase> {
        if self.mode != SignalMode::Intergreen {
            return None;
        }
        let target = self.target.take()?;
        self.current = target;
        self.phase_start = now;
        self.mode = SignalMode::Green;
        self.intergreen_end = None;
        Some(target)
    }
}
