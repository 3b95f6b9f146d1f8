//! Event-log and time-series records and their CSV forms.

use std::fmt;
use std::str::FromStr;

use super::{Movement, Phase, SignalMode};

pub const EVENT_LOG_HEADER: &str = "time,kind,movement,vehicle_id,phase,extra";
pub const TIME_SERIES_HEADER: &str = "time,phase,mode,qN,qS,qE,qW,wN,wS,wE,wW";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Arrival,
    Departure,
    SirenOn,
    SirenOff,
    IntergreenStart,
    GreenStart,
    Decision,
    End,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Arrival => "arrival",
            EventKind::Departure => "departure",
            EventKind::SirenOn => "siren_on",
            EventKind::SirenOff => "siren_off",
            EventKind::IntergreenStart => "intergreen_start",
            EventKind::GreenStart => "green_start",
            EventKind::Decision => "decision",
            EventKind::End => "end",
        }
    }
}

impl FromStr for EventKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "arrival" => EventKind::Arrival,
            "departure" => EventKind::Departure,
            "siren_on" => EventKind::SirenOn,
            "siren_off" => EventKind::SirenOff,
            "intergreen_start" => EventKind::IntergreenStart,
            "green_start" => EventKind::GreenStart,
            "decision" => EventKind::Decision,
            "end" => EventKind::End,
            other => return Err(format!("unknown event kind '{other}'")),
        })
    }
}

/// One line of the event log. `phase` is the signal phase current when the
/// event happened; for `intergreen_start` that is the phase being closed
/// and `extra` names the target.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub time: f64,
    pub kind: EventKind,
    pub movement: Option<Movement>,
    pub vehicle: Option<u64>,
    pub phase: Phase,
    pub extra: String,
}

impl fmt::Display for EventRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6},{},", self.time, self.kind.as_str())?;
        if let Some(m) = self.movement {
            write!(f, "{m}")?;
        }
        f.write_str(",")?;
        if let Some(v) = self.vehicle {
            write!(f, "{v}")?;
        }
        write!(f, ",{},{}", self.phase, self.extra)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct LogParseError {
    pub line: usize,
    pub message: String,
}

impl FromStr for EventRecord {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fields: Vec<&str> = s.splitn(6, ',').collect();
        let [time, kind, movement, vehicle, phase, extra] = fields[..] else {
            return Err(format!("expected 6 fields, got {}", fields.len()));
        };
        let time: f64 = time
            .parse()
            .ok()
            .filter(|t: &f64| t.is_finite())
            .ok_or_else(|| format!("invalid time '{time}'"))?;
        Ok(EventRecord {
            time,
            kind: kind.parse()?,
            movement: match movement {
                "" => None,
                m => Some(m.parse()?),
            },
            vehicle: match vehicle {
                "" => None,
                v => Some(v.parse().map_err(|_| format!("invalid vehicle id '{v}'"))?),
            },
            phase: phase.parse()?,
            extra: extra.to_string(),
        })
    }
}

pub fn write_event_log(records: &[EventRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 40 + 64);
    out.push_str(EVENT_LOG_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}

/// Parses an event log written by [`write_event_log`]. A header row is
/// accepted but not required.
pub fn parse_event_log(text: &str) -> Result<Vec<EventRecord>, LogParseError> {
    text.lines()
        .enumerate()
        .filter(|(i, l)| !(l.is_empty() || (*i == 0 && *l == EVENT_LOG_HEADER)))
        .map(|(i, l)| {
            l.parse().map_err(|message| LogParseError {
                line: i + 1,
                message,
            })
        })
        .collect()
}

/// Sensor state sampled at each controller decision.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub time: f64,
    pub phase: Phase,
    pub mode: SignalMode,
    pub queue: [usize; 4],
    pub wait: [f64; 4],
}

impl fmt::Display for SampleRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6},{},{}", self.time, self.phase, self.mode)?;
        for q in self.queue {
            write!(f, ",{q}")?;
        }
        for w in self.wait {
            write!(f, ",{w:.6}")?;
        }
        Ok(())
    }
}

pub fn write_time_series(samples: &[SampleRecord]) -> String {
    let mut out = String::with_capacity(samples.len() * 60 + 64);
    out.push_str(TIME_SERIES_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}
