mod support;

use fuzzy_signal::config::{ControllerKind, EmergencyArrival, ScenarioConfig};
use fuzzy_signal::fis::build_traffic_fis;
use fuzzy_signal::scenario::{build_controller, run_scenario};
use fuzzy_signal::sim::{Approach, EventKind, EventRecord, Movement, Phase, World};
use proptest::prelude::*;
use support::{check_fifo, check_signal_safety, queue_ahead, quiet_config};

fn world(cfg: &ScenarioConfig) -> World {
    World::new(cfg, build_controller(cfg, build_traffic_fis()).unwrap())
}

fn m(s: &str) -> Movement {
    s.parse().unwrap()
}

fn departures(log: &[EventRecord]) -> Vec<f64> {
    log.iter()
        .filter(|r| r.kind == EventKind::Departure)
        .map(|r| r.time)
        .collect()
}

fn decisions(log: &[EventRecord]) -> Vec<(f64, String)> {
    log.iter()
        .filter(|r| r.kind == EventKind::Decision)
        .map(|r| (r.time, r.extra.clone()))
        .collect()
}

fn fixed(greens: [f64; 4]) -> ScenarioConfig {
    let mut cfg = quiet_config();
    cfg.controller.kind = ControllerKind::FixedTime;
    cfg.controller.fixed_green = greens;
    cfg
}

#[test]
fn empty_scenario_only_advances_the_clock() {
    let mut w = world(&quiet_config());
    let records = w.step(100.0);
    assert!(records.iter().all(|r| r.movement.is_none()));
    assert_eq!(w.clock(), 100.0);
    assert!(w.vehicles().is_empty());
}

#[test]
fn lone_arrival_on_green_departs_one_headway_later() {
    let mut w = world(&quiet_config());
    w.schedule_arrival(3.0, m("E.through"), false);
    w.step(20.0);
    assert_eq!(departures(w.log()), vec![5.0]);
}

#[test]
fn standing_queue_discharges_at_saturation_headway() {
    let mut w = world(&fixed([100.0, 15.0, 15.0, 15.0]));
    for _ in 0..3 {
        w.schedule_arrival(0.0, m("E.through"), false);
    }
    w.step(50.0);
    assert_eq!(departures(w.log()), vec![2.0, 4.0, 6.0]);
}

#[test]
fn green_end_cuts_off_the_next_departure() {
    let mut w = world(&fixed([5.0, 15.0, 15.0, 15.0]));
    for _ in 0..3 {
        w.schedule_arrival(0.0, m("E.through"), false);
    }
    w.step(50.0);
    assert_eq!(departures(w.log()), vec![2.0, 4.0]);
    assert_eq!(w.queue_len(m("E.through")), 1);
    let clearance = w
        .log()
        .iter()
        .find(|r| r.kind == EventKind::IntergreenStart)
        .unwrap();
    assert_eq!((clearance.time, clearance.phase), (5.0, Phase::P1));
}

#[test]
fn empty_queues_give_no_departures() {
    let mut w = world(&fixed([10.0; 4]));
    w.step(200.0);
    assert!(departures(w.log()).is_empty());
}

#[test]
fn snapshot_aggregates_lanes_by_maximum() {
    let mut w = world(&fixed([100.0, 15.0, 15.0, 15.0]));
    let s = w.snapshot();
    assert!(Approach::ALL
        .iter()
        .all(|&a| s.queue(a) == 0 && s.wait(a) == 0.0));
    w.schedule_arrival(12.0, m("N.through"), false);
    for i in 0..3 {
        w.schedule_arrival(13.0 + i as f64, m("N.through"), false);
    }
    for i in 0..7 {
        w.schedule_arrival(14.0 + i as f64, m("N.right"), false);
    }
    w.step(30.0);
    let s = w.snapshot();
    assert_eq!(s.queue(Approach::North), 7);
    assert_eq!(s.wait(Approach::North), 18.0);
    assert_eq!(w.queue_len(m("N.through")), 4);
}

#[test]
fn front_departure_never_raises_the_wait_reading() {
    let cfg = ScenarioConfig {
        duration: 600.0,
        ..ScenarioConfig::default()
    };
    let mut w = world(&cfg);
    while w.clock() < 600.0 {
        let before = w.snapshot();
        let now = w.clock();
        let next = now + 0.25;
        let records = w.step(next).to_vec();
        for r in records.iter().filter(|r| r.kind == EventKind::Departure) {
            let a = r.movement.unwrap().approach;
            // nothing else happened on this approach since `before`
            let arrivals = records.iter().any(|x| {
                x.kind == EventKind::Arrival && x.movement.map(|mv| mv.approach) == Some(a)
            });
            if !arrivals && records.len() == 1 {
                let after = w.snapshot();
                assert!(after.wait(a) <= before.wait(a) + (next - now) + 1e-9);
                assert!(after.queue(a) <= before.queue(a));
            }
        }
    }
}

#[test]
fn same_seed_gives_identical_logs() {
    let cfg = ScenarioConfig {
        seed: 42,
        ..ScenarioConfig::default()
    };
    let a = run_scenario(&cfg, build_traffic_fis()).unwrap();
    let b = run_scenario(&cfg, build_traffic_fis()).unwrap();
    assert_eq!(a.event_log_csv(), b.event_log_csv());
    assert_eq!(a.time_series_csv(), b.time_series_csv());
}

#[test]
fn arrival_streams_do_not_depend_on_the_controller() {
    let arrivals = |kind, preemption| {
        let mut cfg = ScenarioConfig {
            seed: 7,
            duration: 1800.0,
            ..ScenarioConfig::default()
        };
        cfg.controller.kind = kind;
        cfg.controller.preemption = preemption;
        cfg.ev_schedule = vec![EmergencyArrival {
            time: 300.0,
            movement: m("S.right"),
        }];
        let run = run_scenario(&cfg, build_traffic_fis()).unwrap();
        run.events
            .into_iter()
            .filter(|r| r.kind == EventKind::Arrival)
            .map(|r| (r.time, r.movement, r.vehicle, r.extra))
            .collect::<Vec<_>>()
    };
    let reference = arrivals(ControllerKind::Fuzzy, true);
    assert!(reference.len() > 1000);
    for kind in [
        ControllerKind::Fuzzy,
        ControllerKind::FixedTime,
        ControllerKind::Actuated,
    ] {
        for preemption in [true, false] {
            assert_eq!(
                arrivals(kind, preemption),
                reference,
                "{kind:?} {preemption}"
            );
        }
    }
}

#[test]
fn exponential_service_keeps_invariants() {
    let mut cfg = ScenarioConfig {
        seed: 3,
        duration: 1800.0,
        ..ScenarioConfig::default()
    };
    cfg.service_mode = fuzzy_signal::config::ServiceMode::Exponential;
    let run = run_scenario(&cfg, build_traffic_fis()).unwrap();
    check_fifo(&run.vehicles).unwrap();
    check_signal_safety(&run.events, cfg.intergreen).unwrap();
    let again = run_scenario(&cfg, build_traffic_fis()).unwrap();
    assert_eq!(run.event_log_csv(), again.event_log_csv());
}

#[test]
fn fuzzy_greens_respect_max_green() {
    for seed in 1..=10 {
        let mut cfg = ScenarioConfig {
            seed,
            ..ScenarioConfig::default()
        };
        cfg.controller.preemption = false;
        cfg.lambda = [0.3, 0.3, 0.05, 0.05, 0.3, 0.3, 0.05, 0.05];
        let run = run_scenario(&cfg, build_traffic_fis()).unwrap();
        let mut started = 0.0;
        for r in &run.events {
            match r.kind {
                EventKind::GreenStart => started = r.time,
                EventKind::IntergreenStart => {
                    assert!(
                        r.time - started <= cfg.max_green + 1e-9,
                        "seed {seed}: green of {}",
                        r.time - started
                    )
                }
                _ => {}
            }
        }
    }
}

/// Longest other queue wins; ties go to the phase that comes first in
/// rotation after the current one.
fn longest_queue_oracle(current: Phase, queues: [usize; 4]) -> Phase {
    let rotation = [Phase::P1, Phase::P2, Phase::P3, Phase::P4];
    let start = rotation.iter().position(|&p| p == current).unwrap();
    let approach_slot = |p: Phase| match p {
        Phase::P1 => 2, // E
        Phase::P2 => 3, // W
        Phase::P3 => 1, // S
        Phase::P4 => 0, // N
    };
    let mut best = rotation[(start + 1) % 4];
    for k in 1..4 {
        let p = rotation[(start + k) % 4];
        if queues[approach_slot(p)] > queues[approach_slot(best)] {
            best = p;
        }
    }
    best
}

#[test]
fn zero_extension_reduces_to_longest_queue_rotation() {
    for seed in 1..=5 {
        let mut cfg = ScenarioConfig {
            seed,
            duration: 1800.0,
            ..ScenarioConfig::default()
        };
        cfg.controller.extension_threshold = 1e6;
        cfg.controller.preemption = false;
        let run = run_scenario(&cfg, build_traffic_fis()).unwrap();
        assert!(run.samples.len() > 50);
        for s in &run.samples {
            let want = longest_queue_oracle(s.phase, s.queue);
            let decision = run
                .events
                .iter()
                .find(|r| r.kind == EventKind::Decision && r.time == s.time)
                .unwrap();
            assert_eq!(
                decision.extra,
                format!("switch:{want}:no-demand"),
                "seed {seed} at {}",
                s.time
            );
        }
    }
}

#[test]
fn emergency_on_red_approach_preempts_and_releases() {
    let mut cfg = quiet_config();
    cfg.ev_schedule = vec![EmergencyArrival {
        time: 3.0,
        movement: m("N.through"),
    }];
    let mut w = world(&cfg);
    w.step(60.0);
    let log = w.log();
    let d = decisions(log);
    assert_eq!(d[0], (3.0, "switch:P4:ev-preempt".to_string()));
    let green = log
        .iter()
        .find(|r| r.kind == EventKind::GreenStart && r.time > 0.0)
        .unwrap();
    assert_eq!((green.time, green.phase), (5.0, Phase::P4));
    let ev_departure = log.iter().find(|r| r.kind == EventKind::Departure).unwrap();
    assert_eq!(ev_departure.time, 7.0);
    assert_eq!(d[1], (7.0, "switch:P1:ev-release".to_string()));
    let back = log
        .iter()
        .filter(|r| r.kind == EventKind::GreenStart)
        .nth(2)
        .unwrap();
    assert_eq!((back.time, back.phase), (9.0, Phase::P1));
}

#[test]
fn emergency_on_green_approach_is_served_without_switching() {
    let mut cfg = quiet_config();
    cfg.ev_schedule = vec![EmergencyArrival {
        time: 1.0,
        movement: m("E.right"),
    }];
    let mut w = world(&cfg);
    for i in 0..3 {
        w.schedule_arrival(0.5 + i as f64 * 0.1, m("E.right"), false);
    }
    w.step(20.0);
    let log = w.log();
    let ev_out = log
        .iter()
        .find(|r| r.kind == EventKind::Departure && r.extra == "ev")
        .unwrap()
        .time;
    assert_eq!(ev_out, 8.5);
    assert!(!log
        .iter()
        .any(|r| r.kind == EventKind::IntergreenStart && r.time <= ev_out));
}

#[test]
fn emergency_during_clearance_waits_for_it_and_is_not_delayed_further() {
    // fixed plan switches P1 -> P2 at t = 5; EV on North arrives mid-clearance
    let mut cfg = fixed([5.0, 15.0, 15.0, 15.0]);
    cfg.ev_schedule = vec![EmergencyArrival {
        time: 6.0,
        movement: m("N.right"),
    }];
    let mut w = world(&cfg);
    w.step(60.0);
    let log = w.log();
    let green = log
        .iter()
        .find(|r| r.kind == EventKind::GreenStart && r.time > 0.0)
        .unwrap();
    assert_eq!((green.time, green.phase), (7.0, Phase::P4));
    let ev_out = log.iter().find(|r| r.kind == EventKind::Departure).unwrap();
    assert_eq!(ev_out.time, 9.0);
    let release = log
        .iter()
        .find(|r| r.extra.ends_with("ev-release"))
        .unwrap();
    assert_eq!(release.extra, "switch:P2:ev-release");
}

#[test]
fn every_preemption_is_released_once_in_order() {
    for seed in 1..=10 {
        let mut cfg = ScenarioConfig {
            seed,
            duration: 1800.0,
            ..ScenarioConfig::default()
        };
        cfg.ev_schedule = ["N.through", "W.right", "S.through", "E.right", "N.right"]
            .iter()
            .enumerate()
            .map(|(i, mv)| EmergencyArrival {
                time: 100.0 + 250.0 * i as f64,
                movement: m(mv),
            })
            .collect();
        cfg.ev_schedule.push(EmergencyArrival {
            time: 101.0,
            movement: m("W.through"),
        });
        let run = run_scenario(&cfg, build_traffic_fis()).unwrap();
        let mut open = false;
        let mut preempts = 0;
        for r in run.events.iter().filter(|r| r.kind == EventKind::Decision) {
            if r.extra.ends_with("ev-preempt") {
                assert!(!open, "seed {seed}: nested preemption at {}", r.time);
                open = true;
                preempts += 1;
            } else if r.extra.ends_with("ev-release") {
                assert!(
                    open,
                    "seed {seed}: release without preemption at {}",
                    r.time
                );
                open = false;
            }
        }
        assert!(!open && preempts > 0, "seed {seed}");
        let evs: Vec<_> = run.vehicles.iter().filter(|v| v.is_emergency).collect();
        assert_eq!(evs.len(), 6);
        assert!(evs.iter().all(|v| v.departure_time.is_some()));
    }
}

#[test]
fn emergency_wait_is_bounded_by_clearance_and_queue_ahead() {
    for seed in 1..=20 {
        let mut cfg = ScenarioConfig {
            seed,
            ..ScenarioConfig::default()
        };
        cfg.lambda = [0.15, 0.15, 0.15, 0.15, 0.05, 0.05, 0.05, 0.05];
        cfg.ev_schedule = vec![EmergencyArrival {
            time: 600.0,
            movement: m("W.through"),
        }];
        let run = run_scenario(&cfg, build_traffic_fis()).unwrap();
        let ev = run.vehicles.iter().find(|v| v.is_emergency).unwrap();
        let wait = ev.departure_time.unwrap() - ev.arrival_time;
        let bound =
            cfg.intergreen + (queue_ahead(&run.vehicles, ev) + 1) as f64 * cfg.saturation_headway;
        assert!(wait <= bound + 1e-9, "seed {seed}: {wait} > {bound}");
    }
}

#[test]
fn actuated_gaps_out_at_min_green_on_empty_approach() {
    let mut cfg = quiet_config();
    cfg.controller.kind = ControllerKind::Actuated;
    let mut w = world(&cfg);
    w.schedule_arrival(1.0, m("S.through"), false);
    w.step(20.0);
    assert_eq!(
        decisions(w.log())[0],
        (5.0, "switch:P2:no-demand".to_string())
    );
}

#[test]
fn actuated_runs_to_max_green_under_continuous_demand() {
    let mut cfg = quiet_config();
    cfg.controller.kind = ControllerKind::Actuated;
    cfg.lambda[m("E.through").index()] = 2.0;
    let mut w = world(&cfg);
    w.step(60.0);
    let clearance = w
        .log()
        .iter()
        .find(|r| r.kind == EventKind::IntergreenStart)
        .unwrap();
    assert!(
        (clearance.time - cfg.max_green).abs() < 1e-9,
        "{}",
        clearance.time
    );
    let at_switch = decisions(w.log())
        .into_iter()
        .find(|d| d.0 == clearance.time)
        .unwrap();
    assert_eq!(at_switch.1, "switch:P2:max-green-reached");
}

#[test]
fn fixed_plan_switches_on_schedule() {
    let cfg = fixed([10.0; 4]);
    let mut w = world(&cfg);
    w.step(200.0);
    let starts: Vec<(f64, Phase)> = w
        .log()
        .iter()
        .filter(|r| r.kind == EventKind::GreenStart)
        .map(|r| (r.time, r.phase))
        .take(6)
        .collect();
    assert_eq!(
        starts,
        vec![
            (0.0, Phase::P1),
            (12.0, Phase::P2),
            (24.0, Phase::P3),
            (36.0, Phase::P4),
            (48.0, Phase::P1),
            (60.0, Phase::P2)
        ]
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_scenarios_conserve_vehicles_and_keep_order(
        seed in any::<u64>(),
        lambda in prop::array::uniform8(0.02f64..0.3),
        kind in 0usize..3,
        preemption in any::<bool>(),
        ev_time in 0.0f64..900.0,
        ev_lane in 0usize..8,
    ) {
        let mut cfg = ScenarioConfig { seed, lambda, duration: 900.0, ..ScenarioConfig::default() };
        cfg.controller.kind = [ControllerKind::Fuzzy, ControllerKind::FixedTime, ControllerKind::Actuated][kind];
        cfg.controller.preemption = preemption;
        cfg.ev_schedule = vec![EmergencyArrival { time: ev_time, movement: Movement::ALL[ev_lane] }];
        let mut w = world(&cfg);
        w.run_to_end();
        prop_assert!(w.conservation().holds());
        prop_assert_eq!(check_fifo(w.vehicles()), Ok(()));
        prop_assert_eq!(check_signal_safety(w.log(), cfg.intergreen), Ok(()));
    }
}
