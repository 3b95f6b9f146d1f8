use std::collections::VecDeque;

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use super::arrivals::{seeded_rng, ArrivalProcess};
use super::log::{EventKind, EventRecord, SampleRecord};
use super::queue::{Event, EventQueue};
use super::signal::{SignalState, SwitchOutcome};
use super::snapshot::{ApproachSensors, EmergencyCall, SensorSnapshot};
use super::{Approach, Movement, Phase, SignalMode};
use crate::config::{ScenarioConfig, ServiceMode};
use crate::controllers::{Action, Controller, ControllerDecision, DecisionContext};

#[derive(Debug, Clone, PartialEq)]
pub struct Vehicle {
    pub id: u64,
    pub movement: Movement,
    pub arrival_time: f64,
    pub is_emergency: bool,
    pub departure_time: Option<f64>,
}

/// FIFO queue of one movement. The front vehicle stays queued while it is
/// being discharged.
#[derive(Debug, Clone, Default)]
struct Lane {
    vehicles: VecDeque<usize>,
    /// Bumped to invalidate a scheduled departure.
    token: u64,
    discharging: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conservation {
    pub generated: usize,
    pub departed: usize,
    pub queued: usize,
}

impl Conservation {
    pub fn holds(&self) -> bool {
        self.generated == self.departed + self.queued
    }
}

/// The intersection: arrival streams, eight lane queues, one signal and
/// its controller, driven by a future-event list.
pub struct World {
    duration: f64,
    intergreen: f64,
    saturation_headway: f64,
    clock: f64,
    events: EventQueue,
    arrivals: Vec<ArrivalProcess>,
    service: Option<(Exp<f64>, Vec<ChaCha8Rng>)>,
    lanes: [Lane; 8],
    vehicles: Vec<Vehicle>,
    departed: usize,
    last_arrival: [Option<f64>; 4],
    signal: SignalState,
    controller: Controller,
    decision_token: u64,
    log: Vec<EventRecord>,
    samples: Vec<SampleRecord>,
}

impl World {
    /// Sets up the intersection at t = 0 with P1 green. The config is
    /// assumed validated.
    pub fn new(cfg: &ScenarioConfig, controller: Controller) -> Self {
        let arrivals = Movement::ALL
            .iter()
            .map(|&m| ArrivalProcess::new(m, cfg.lambda_of(m), cfg.seed).expect("validated rate"))
            .collect();
        let service = (cfg.service_mode == ServiceMode::Exponential).then(|| {
            let exp = Exp::new(1.0 / cfg.mean_headway).expect("validated mean headway");
            let rngs = Movement::ALL
                .iter()
                .map(|m| seeded_rng(cfg.seed, &format!("service/{m}")))
                .collect();
            (exp, rngs)
        });
        let mut world = Self {
            duration: cfg.duration,
            intergreen: cfg.intergreen,
            saturation_headway: cfg.saturation_headway,
            clock: 0.0,
            events: EventQueue::default(),
            arrivals,
            service,
            lanes: Default::default(),
            vehicles: Vec::new(),
            departed: 0,
            last_arrival: [None; 4],
            signal: SignalState::green(Phase::P1, 0.0),
            controller,
            decision_token: 0,
            log: Vec::new(),
            samples: Vec::new(),
        };
        for i in 0..world.arrivals.len() {
            let gap = world.arrivals[i].sample_interarrival();
            let movement = world.arrivals[i].movement();
            world.events.schedule(
                gap,
                Event::Arrival {
                    movement,
                    emergency: false,
                    scripted: false,
                },
            );
        }
        for ev in &cfg.ev_schedule {
            world.events.schedule(
                ev.time,
                Event::Arrival {
                    movement: ev.movement,
                    emergency: true,
                    scripted: true,
                },
            );
        }
        world.record(EventKind::GreenStart, None, None, String::new());
        world.schedule_first_decision(Phase::P1);
        world
    }

    /// Adds one arrival at a fixed time on top of the Poisson streams.
    pub fn schedule_arrival(&mut self, time: f64, movement: Movement, emergency: bool) {
        self.events.schedule(
            time,
            Event::Arrival {
                movement,
                emergency,
                scripted: true,
            },
        );
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn signal(&self) -> &SignalState {
        &self.signal
    }

    pub fn vehicles(&self) -> &[Vehicle] {
        &self.vehicles
    }

    pub fn log(&self) -> &[EventRecord] {
        &self.log
    }

    pub fn samples(&self) -> &[SampleRecord] {
        &self.samples
    }

    pub fn queue_len(&self, movement: Movement) -> usize {
        self.lanes[movement.index()].vehicles.len()
    }

    /// Vehicle ids queued on a movement, front first.
    pub fn queued_ids(&self, movement: Movement) -> impl Iterator<Item = u64> + '_ {
        self.lanes[movement.index()]
            .vehicles
            .iter()
            .map(|&i| self.vehicles[i].id)
    }

    pub fn conservation(&self) -> Conservation {
        Conservation {
            generated: self.vehicles.len(),
            departed: self.departed,
            queued: self.lanes.iter().map(|l| l.vehicles.len()).sum(),
        }
    }

    /// Processes every event due at or before `until` and advances the
    /// clock to `until`. Returns the log records produced.
    pub fn step(&mut self, until: f64) -> &[EventRecord] {
        let start = self.log.len();
        while let Some(scheduled) = self.events.pop_due(until) {
            self.clock = scheduled.time;
            self.dispatch(scheduled.event);
        }
        self.clock = self.clock.max(until);
        &self.log[start..]
    }

    /// Runs to the configured duration and appends the closing record.
    pub fn run_to_end(&mut self) {
        self.step(self.duration);
        self.record(EventKind::End, None, None, String::new());
    }

    /// Sensor readings at the current clock.
    pub fn snapshot(&self) -> SensorSnapshot {
        let now = self.clock;
        let mut approaches = [ApproachSensors::default(); 4];
        for approach in Approach::ALL {
            let sensors = &mut approaches[approach.index()];
            sensors.last_arrival = self.last_arrival[approach.index()];
            for m in approach.movements() {
                let lane = &self.lanes[m.index()];
                sensors.queue_length = sensors.queue_length.max(lane.vehicles.len());
                if let Some(&front) = lane.vehicles.front() {
                    let wait = now - self.vehicles[front].arrival_time;
                    sensors.max_wait = sensors.max_wait.max(wait);
                }
                sensors.emergency_present |=
                    lane.vehicles.iter().any(|&i| self.vehicles[i].is_emergency);
            }
        }
        SensorSnapshot {
            time: now,
            approaches,
        }
    }

    /// Queued emergency vehicles, earliest first.
    pub fn emergencies(&self) -> Vec<EmergencyCall> {
        let mut calls: Vec<EmergencyCall> = self
            .lanes
            .iter()
            .flat_map(|l| l.vehicles.iter())
            .map(|&i| &self.vehicles[i])
            .filter(|v| v.is_emergency)
            .map(|v| EmergencyCall {
                vehicle: v.id,
                movement: v.movement,
                arrival_time: v.arrival_time,
            })
            .collect();
        calls.sort_by(|a, b| {
            a.arrival_time
                .total_cmp(&b.arrival_time)
                .then(a.vehicle.cmp(&b.vehicle))
        });
        calls
    }

    fn dispatch(&mut self, event: Event) {
        match event {
            Event::Arrival {
                movement,
                emergency,
                scripted,
            } => self.on_arrival(movement, emergency, scripted),
            Event::Departure { movement, token } => self.on_departure(movement, token),
            Event::SirenOn { vehicle } => self.on_siren(EventKind::SirenOn, vehicle),
            Event::SirenOff { vehicle } => self.on_siren(EventKind::SirenOff, vehicle),
            Event::IntergreenEnd => self.on_intergreen_end(),
            Event::Decision { token } => self.on_decision(token),
        }
    }

    fn on_arrival(&mut self, movement: Movement, emergency: bool, scripted: bool) {
        let now = self.clock;
        if !scripted {
            let process = &mut self.arrivals[movement.index()];
            let gap = process.sample_interarrival();
            self.events.schedule(
                now + gap,
                Event::Arrival {
                    movement,
                    emergency: false,
                    scripted: false,
                },
            );
        }
        let index = self.vehicles.len();
        let id = index as u64 + 1;
        self.vehicles.push(Vehicle {
            id,
            movement,
            arrival_time: now,
            is_emergency: emergency,
            departure_time: None,
        });
        self.lanes[movement.index()].vehicles.push_back(index);
        self.last_arrival[movement.approach.index()] = Some(now);
        let extra = if emergency { "ev" } else { "" };
        self.record(EventKind::Arrival, Some(movement), Some(id), extra.into());
        if emergency {
            self.events.schedule(now, Event::SirenOn { vehicle: id });
        }
        self.start_discharge(movement);
    }

    fn headway(&mut self, movement: Movement) -> f64 {
        match &mut self.service {
            None => self.saturation_headway,
            Some((exp, rngs)) => exp.sample(&mut rngs[movement.index()]),
        }
    }

    /// Schedules the front vehicle's departure if the lane is green, idle
    /// and non-empty.
    fn start_discharge(&mut self, movement: Movement) {
        if self
            .signal
            .green_phase()
            .is_none_or(|p| !p.serves(movement))
        {
            return;
        }
        let lane = &self.lanes[movement.index()];
        if lane.discharging || lane.vehicles.is_empty() {
            return;
        }
        let token = lane.token;
        let at = self.clock + self.headway(movement);
        self.lanes[movement.index()].discharging = true;
        self.events
            .schedule(at, Event::Departure { movement, token });
    }

    fn stop_discharge(&mut self, approach: Approach) {
        for m in approach.movements() {
            let lane = &mut self.lanes[m.index()];
            lane.token += 1;
            lane.discharging = false;
        }
    }

    fn on_departure(&mut self, movement: Movement, token: u64) {
        let lane = &mut self.lanes[movement.index()];
        if token != lane.token || !lane.discharging {
            return;
        }
        lane.discharging = false;
        let index = lane
            .vehicles
            .pop_front()
            .expect("discharging lane is non-empty");
        let now = self.clock;
        let vehicle = &mut self.vehicles[index];
        vehicle.departure_time = Some(now);
        let (id, emergency) = (vehicle.id, vehicle.is_emergency);
        self.departed += 1;
        let extra = if emergency { "ev" } else { "" };
        self.record(EventKind::Departure, Some(movement), Some(id), extra.into());
        if emergency {
            self.events.schedule(now, Event::SirenOff { vehicle: id });
        }
        self.start_discharge(movement);
    }

    fn on_siren(&mut self, kind: EventKind, vehicle: u64) {
        let movement = self.vehicles[vehicle as usize - 1].movement;
        self.record(kind, Some(movement), Some(vehicle), String::new());
        if self.signal.mode() != SignalMode::Green {
            // picked up when the clearance ends
            return;
        }
        let snapshot = self.snapshot();
        let emergencies = self.emergencies();
        let ctx = DecisionContext {
            now: self.clock,
            signal: &self.signal,
            snapshot: &snapshot,
            emergencies: &emergencies,
        };
        if let Some(decision) = self.controller.emergency_override(&ctx) {
            self.record_decision(decision, &snapshot);
            self.apply(decision);
        }
    }

    fn on_intergreen_end(&mut self) {
        let now = self.clock;
        let Some(target) = self.signal.target() else {
            return;
        };
        // A pending emergency may redirect the clearance; the all-red time
        // has already been served in full.
        let snapshot = self.snapshot();
        let emergencies = self.emergencies();
        let provisional = SignalState::green(target, now);
        let ctx = DecisionContext {
            now,
            signal: &provisional,
            snapshot: &snapshot,
            emergencies: &emergencies,
        };
        if let Some(decision) = self.controller.emergency_override(&ctx) {
            self.record_decision(decision, &snapshot);
            if let Action::SwitchTo(p) = decision.action {
                self.signal.retarget(p);
            }
        }
        let phase = self
            .signal
            .finish_intergreen(now)
            .expect("intergreen was running");
        self.record(EventKind::GreenStart, None, None, String::new());
        for m in phase.approach().movements() {
            self.start_discharge(m);
        }
        self.schedule_first_decision(phase);
    }

    fn on_decision(&mut self, token: u64) {
        if token != self.decision_token || self.signal.mode() != SignalMode::Green {
            return;
        }
        let snapshot = self.snapshot();
        let emergencies = self.emergencies();
        let ctx = DecisionContext {
            now: self.clock,
            signal: &self.signal,
            snapshot: &snapshot,
            emergencies: &emergencies,
        };
        let decision = self.controller.decide(&ctx);
        self.record_decision(decision, &snapshot);
        self.apply(decision);
    }

    fn cancel_decisions(&mut self) {
        self.decision_token += 1;
    }

    fn schedule_decision(&mut self, at: f64) {
        self.cancel_decisions();
        self.events.schedule(
            at,
            Event::Decision {
                token: self.decision_token,
            },
        );
    }

    fn schedule_first_decision(&mut self, phase: Phase) {
        if self.controller.preempting() {
            self.cancel_decisions();
        } else {
            let at = self.clock + self.controller.first_decision_after(phase);
            self.schedule_decision(at);
        }
    }

    fn apply(&mut self, decision: ControllerDecision) {
        let now = self.clock;
        match decision.action {
            Action::Hold { extension } => {
                if self.controller.preempting() {
                    self.cancel_decisions();
                } else {
                    self.schedule_decision(now + extension);
                }
            }
            Action::SwitchTo(target) => {
                let closing = self.signal.current();
                match self.signal.request_switch(target, now, self.intergreen) {
                    SwitchOutcome::Continued => self.schedule_first_decision(target),
                    SwitchOutcome::Intergreen { target, ends_at } => {
                        self.cancel_decisions();
                        self.stop_discharge(closing.approach());
                        self.log.push(EventRecord {
                            time: now,
                            kind: EventKind::IntergreenStart,
                            movement: None,
                            vehicle: None,
                            phase: closing,
                            extra: target.to_string(),
                        });
                        self.events.schedule(ends_at, Event::IntergreenEnd);
                    }
                    SwitchOutcome::Ignored => {}
                }
            }
        }
    }

    fn record(
        &mut self,
        kind: EventKind,
        movement: Option<Movement>,
        vehicle: Option<u64>,
        extra: String,
    ) {
        self.log.push(EventRecord {
            time: self.clock,
            kind,
            movement,
            vehicle,
            phase: self.signal.current(),
            extra,
        });
    }

    fn record_decision(&mut self, decision: ControllerDecision, snapshot: &SensorSnapshot) {
        self.record(EventKind::Decision, None, None, decision.to_string());
        self.samples.push(SampleRecord {
            time: self.clock,
            phase: self.signal.current(),
            mode: self.signal.mode(),
            queue: Approach::ALL.map(|a| snapshot.queue(a)),
            wait: Approach::ALL.map(|a| snapshot.wait(a)),
        });
    }
}
