//! Test-only oracles kept independent from the library's code paths.
#![allow(dead_code)]

/// Table of consequent labels, rows = waiting-time term, columns =
/// queue-length term, both ordered VS, S, L, VL, EL.
pub const TABLE: [[&str; 5]; 5] = [
    ["Z", "Z", "S", "S", "L"],
    ["Z", "S", "S", "L", "L"],
    ["S", "S", "L", "L", "L"],
    ["S", "S", "L", "VL", "EL"],
    ["L", "L", "L", "VL", "EL"],
];

pub const INPUT_CENTERS: [f64; 5] = [0.0, 10.0, 20.0, 30.0, 40.0];

pub fn output_center(label: &str) -> f64 {
    match label {
        "Z" => 0.0,
        "S" => 2.5,
        "L" => 5.0,
        "VL" => 7.5,
        "EL" => 10.0,
        other => panic!("unknown output label {other}"),
    }
}

fn gauss(x: f64, c: f64) -> f64 {
    (-(x - c).powi(2) / 8.0).exp()
}

/// Brute-force Mamdani evaluation: every rule is clipped and aggregated
/// separately over `points` samples of the output universe.
pub fn brute_force_mamdani(w: f64, q: f64, points: usize, lo: f64, hi: f64) -> f64 {
    let w = w.clamp(0.0, 50.0);
    let q = q.clamp(0.0, 50.0);
    let mut rules = Vec::new();
    for (i, row) in TABLE.iter().enumerate() {
        for (j, label) in row.iter().enumerate() {
            let s = gauss(w, INPUT_CENTERS[i]).min(gauss(q, INPUT_CENTERS[j]));
            rules.push((s, output_center(label)));
        }
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..points {
        let y = lo + (hi - lo) * k as f64 / (points - 1) as f64;
        let mut mu: f64 = 0.0;
        for &(s, c) in &rules {
            mu = mu.max(s.min(gauss(y, c)));
        }
        num += y * mu;
        den += mu;
    }
    num / den
}

/// A random but valid rule-base document. Numbers carry at most three
/// decimals; layout varies (spacing, comments, section order of inputs is
/// fixed by the format).
pub fn random_fis_document(rng: &mut impl rand::Rng) -> String {
    use std::fmt::Write as _;
    let n_inputs = rng.gen_range(1..=3);
    let mut text = String::new();
    let mut term_counts = Vec::new();
    let mut vars = String::new();
    for k in 0..=n_inputs {
        let section = if k < n_inputs {
            format!("Input{}", k + 1)
        } else {
            "Output1".to_string()
        };
        let lo = rng.gen_range(-50_000..0) as f64 / 1000.0;
        let hi = lo + rng.gen_range(1_000..100_000) as f64 / 1000.0;
        let n_terms = rng.gen_range(1..=5);
        term_counts.push(n_terms);
        let mut centers: Vec<f64> = (0..n_terms)
            .map(|_| (rng.gen_range(lo..=hi) * 1000.0).round() / 1000.0)
            .collect();
        centers.sort_by(f64::total_cmp);
        let _ = writeln!(vars, "[{section}]");
        let _ = writeln!(vars, "Name = 'v{k}'");
        let _ = writeln!(vars, "Range=[{lo}  {hi}]");
        let _ = writeln!(vars, "NumMFs={n_terms}");
        for (t, c) in centers.iter().enumerate() {
            let sigma = rng.gen_range(100..10_000) as f64 / 1000.0;
            let _ = writeln!(vars, "MF{}='T{t}':'gaussmf',[{sigma} {c}]", t + 1);
        }
        if rng.gen_bool(0.3) {
            let _ = writeln!(vars, "% comment after {section}");
        }
        vars.push('\n');
    }
    let n_rules = rng.gen_range(1..=12);
    let mut rules = String::from("[Rules]\n");
    for _ in 0..n_rules {
        let specified = rng.gen_range(0..n_inputs);
        let antecedent: Vec<String> = (0..n_inputs)
            .map(|i| {
                let idx = if i == specified || rng.gen_bool(0.7) {
                    rng.gen_range(1..=term_counts[i])
                } else {
                    0
                };
                idx.to_string()
            })
            .collect();
        let consequent = rng.gen_range(1..=term_counts[n_inputs]);
        let weight = [1.0, 0.75, 0.5, 0.25][rng.gen_range(0..4)];
        let connective = rng.gen_range(1..=2);
        let _ = writeln!(
            rules,
            "{}, {consequent} ({weight}) : {connective}",
            antecedent.join(" ")
        );
    }
    let _ = writeln!(text, "% generated document\n[System]");
    let _ = writeln!(text, "Name='random'");
    let _ = writeln!(text, "Type='mamdani'");
    let _ = writeln!(text, "NumInputs={n_inputs}");
    let _ = writeln!(text, "NumOutputs=1");
    let _ = writeln!(text, "NumRules={n_rules}");
    if rng.gen_bool(0.5) {
        let _ = writeln!(text, "DefuzzResolution={}", rng.gen_range(101..=3001));
    }
    if rng.gen_bool(0.5) {
        let _ = writeln!(
            text,
            "DefaultOutput={}",
            rng.gen_range(-5_000..5_000) as f64 / 1000.0
        );
    }
    text.push('\n');
    text.push_str(&vars);
    text.push_str(&rules);
    text
}

/// Structural equality of two rule bases with a numeric tolerance.
pub fn fis_close(a: &fuzzy_signal::fis::Fis, b: &fuzzy_signal::fis::Fis, tol: f64) -> bool {
    use fuzzy_signal::fis::LinguisticVariable;
    let close = |x: f64, y: f64| (x - y).abs() <= tol;
    let var_close = |x: &LinguisticVariable, y: &LinguisticVariable| {
        x.name() == y.name()
            && close(x.universe().lo(), y.universe().lo())
            && close(x.universe().hi(), y.universe().hi())
            && x.terms().len() == y.terms().len()
            && x.terms().iter().zip(y.terms()).all(|(s, t)| {
                s.label == t.label
                    && close(s.mf.center(), t.mf.center())
                    && close(s.mf.sigma(), t.mf.sigma())
            })
    };
    a.name() == b.name()
        && a.resolution() == b.resolution()
        && close(a.default_output(), b.default_output())
        && a.inputs().len() == b.inputs().len()
        && a.inputs()
            .iter()
            .zip(b.inputs())
            .all(|(x, y)| var_close(x, y))
        && var_close(a.output(), b.output())
        && a.rules().len() == b.rules().len()
        && a.rules().iter().zip(b.rules()).all(|(r, s)| {
            r.antecedent() == s.antecedent()
                && r.consequent() == s.consequent()
                && close(r.weight(), s.weight())
                && r.connective() == s.connective()
        })
}

/// A config whose Poisson streams effectively never fire, so tests can
/// script arrivals by hand.
pub fn quiet_config() -> fuzzy_signal::config::ScenarioConfig {
    fuzzy_signal::config::ScenarioConfig {
        lambda: [1e-12; 8],
        ..Default::default()
    }
}

/// Replays the signal records of a log: greens and clearances must
/// alternate, every clearance lasts exactly `intergreen`, and departures
/// only happen on movements of the phase that is green at that instant.
pub fn check_signal_safety(
    log: &[fuzzy_signal::sim::EventRecord],
    intergreen: f64,
) -> Result<(), String> {
    use fuzzy_signal::sim::EventKind;
    // None while clearing; Some(approach code) while green
    let mut green: Option<String> = None;
    let mut clearing_since = None;
    for (i, r) in log.iter().enumerate() {
        match r.kind {
            EventKind::GreenStart => {
                if green.is_some() {
                    return Err(format!("record {i}: green starts while {green:?} is green"));
                }
                if let Some(t0) = clearing_since.take() {
                    let len: f64 = r.time - t0;
                    if (len - intergreen).abs() > 1e-9 {
                        return Err(format!("record {i}: clearance lasted {len}"));
                    }
                } else if i != 0 {
                    return Err(format!("record {i}: green start without a clearance"));
                }
                green = Some(r.phase.to_string());
            }
            EventKind::IntergreenStart => {
                if green.as_deref() != Some(&r.phase.to_string()) {
                    return Err(format!(
                        "record {i}: clearance of {} which is not green",
                        r.phase
                    ));
                }
                green = None;
                clearing_since = Some(r.time);
            }
            EventKind::Departure => {
                let m = r.movement.ok_or("departure without movement")?;
                let approach = m.to_string()[..1].to_string();
                let served = match green.as_deref() {
                    Some("P1") => "E",
                    Some("P2") => "W",
                    Some("P3") => "S",
                    Some("P4") => "N",
                    _ => return Err(format!("record {i}: departure during clearance")),
                };
                if approach != served {
                    return Err(format!(
                        "record {i}: {m} departs while only {served} is green"
                    ));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// Within each movement, vehicles leave in arrival order and the departed
/// ones form a prefix of the arrivals.
pub fn check_fifo(vehicles: &[fuzzy_signal::sim::Vehicle]) -> Result<(), String> {
    use std::collections::HashMap;
    let mut lanes: HashMap<String, Vec<&fuzzy_signal::sim::Vehicle>> = HashMap::new();
    for v in vehicles {
        lanes.entry(v.movement.to_string()).or_default().push(v);
    }
    for (lane, mut vs) in lanes {
        vs.sort_by(|a, b| {
            a.arrival_time
                .total_cmp(&b.arrival_time)
                .then(a.id.cmp(&b.id))
        });
        let mut last = f64::NEG_INFINITY;
        let mut gap = false;
        for v in vs {
            match v.departure_time {
                Some(t) => {
                    if gap {
                        return Err(format!(
                            "{lane}: vehicle {} overtook a waiting vehicle",
                            v.id
                        ));
                    }
                    if t < v.arrival_time || t < last {
                        return Err(format!("{lane}: vehicle {} departs out of order", v.id));
                    }
                    last = t;
                }
                None => gap = true,
            }
        }
    }
    Ok(())
}

/// Vehicles queued ahead of `ev` on its movement when it arrived.
pub fn queue_ahead(
    vehicles: &[fuzzy_signal::sim::Vehicle],
    ev: &fuzzy_signal::sim::Vehicle,
) -> usize {
    vehicles
        .iter()
        .filter(|v| {
            v.movement == ev.movement
                && v.id < ev.id
                && v.departure_time.is_none_or(|t| t > ev.arrival_time)
        })
        .count()
}
