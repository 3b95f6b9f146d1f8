//! Future-event list ordered by time, then event-kind priority, then a
//! lane key, then insertion order.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::Movement;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    /// `scripted` arrivals come from a fixed schedule and do not draw the
    /// next Poisson arrival.
    Arrival {
        movement: Movement,
        emergency: bool,
        scripted: bool,
    },
    Departure {
        movement: Movement,
        token: u64,
    },
    SirenOn {
        vehicle: u64,
    },
    SirenOff {
        vehicle: u64,
    },
    IntergreenEnd,
    Decision {
        token: u64,
    },
}

impl Event {
    /// Lower runs first among events sharing a timestamp.
    fn priority(&self) -> u8 {
        match self {
            Event::Departure { .. } => 0,
            Event::Arrival { .. } => 1,
            Event::SirenOn { .. } | Event::SirenOff { .. } => 2,
            Event::IntergreenEnd => 3,
            Event::Decision { .. } => 4,
        }
    }

    /// Orders simultaneous arrivals by movement rather than by insertion,
    /// so the arrival sequence never depends on controller activity.
    fn lane(&self) -> u8 {
        match *self {
            Event::Arrival {
                movement,
                emergency,
                ..
            } => movement.index() as u8 + 8 * emergency as u8,
            Event::Departure { movement, .. } => movement.index() as u8,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Scheduled {
    pub time: f64,
    seq: u64,
    pub event: Event,
}

impl Scheduled {
    fn key(&self) -> (u8, u8, u64) {
        (self.event.priority(), self.event.lane(), self.seq)
    }
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then_with(|| self.key().cmp(&other.key()))
    }
}

#[derive(Debug, Default, Clone)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<Scheduled>>,
    next_seq: u64,
}

impl EventQueue {
    pub fn schedule(&mut self, time: f64, event: Event) {
        debug_assert!(time.is_finite());
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(Scheduled { time, seq, event }));
    }

    /// Removes the earliest event if it is due at or before `until`.
    pub fn pop_due(&mut self, until: f64) -> Option<Scheduled> {
        if self.heap.peek()?.0.time <= until {
            self.heap.pop().map(|Reverse(s)| s)
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
