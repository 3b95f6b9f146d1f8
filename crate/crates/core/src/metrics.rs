//! Performance indices computed from event logs, and paired comparisons
//! between controllers.

use std::collections::HashMap;
use std::fmt::Write as _;

use statrs::distribution::{Binomial, DiscreteCDF};

use crate::sim::{EventKind, EventRecord, LogParseError, EVENT_LOG_HEADER};

/// Waiting time is departure minus arrival and includes the discharge
/// headway. Vehicles still queued at the end are censored: they count in
/// `undeparted` but not in `mean_wait`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunMetrics {
    pub mean_wait: f64,
    /// Time-weighted average of the total number of queued vehicles.
    pub mean_queue: f64,
    pub max_queue: usize,
    pub throughput: usize,
    pub arrivals: usize,
    pub undeparted: usize,
    /// Waiting times of departed emergency vehicles, in departure order.
    pub ev_delays: Vec<f64>,
}

impl RunMetrics {
    pub fn ev_mean_delay(&self) -> f64 {
        if self.ev_delays.is_empty() {
            0.0
        } else {
            self.ev_delays.iter().sum::<f64>() / self.ev_delays.len() as f64
        }
    }

    /// `index,value` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,value\n");
        for (name, value) in self.rows() {
            let _ = writeln!(out, "{name},{value}");
        }
        out
    }

    pub fn to_table(&self) -> String {
        let rows = self.rows();
        let width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (name, value) in rows {
            let _ = writeln!(out, "{name:<width$}  {value:>14}");
        }
        out
    }

    fn rows(&self) -> Vec<(String, String)> {
        let mut rows = vec![
            ("mean_wait".to_string(), format!("{:.6}", self.mean_wait)),
            ("mean_queue".to_string(), format!("{:.6}", self.mean_queue)),
            ("max_queue".to_string(), self.max_queue.to_string()),
            ("throughput".to_string(), self.throughput.to_string()),
            ("arrivals".to_string(), self.arrivals.to_string()),
            ("undeparted".to_string(), self.undeparted.to_string()),
            ("ev_count".to_string(), self.ev_delays.len().to_string()),
        ];
        for (i, d) in self.ev_delays.iter().enumerate() {
            rows.push((format!("ev_delay.{}", i + 1), format!("{d:.6}")));
        }
        rows
    }
}

#[derive(Default)]
struct Accumulator {
    arrivals: HashMap<u64, (f64, bool)>,
    departed: HashMap<u64, ()>,
    start: Option<f64>,
    last: f64,
    queued: usize,
    queue_area: f64,
    max_queue: usize,
    wait_sum: f64,
    ev_delays: Vec<f64>,
}

impl Accumulator {
    fn push(&mut self, r: &EventRecord) -> Result<(), String> {
        let start = *self.start.get_or_insert(r.time);
        if r.time < self.last.max(start) {
            return Err(format!("time {} goes backwards", r.time));
        }
        self.queue_area += self.queued as f64 * (r.time - self.last.max(start));
        self.last = r.time;
        match r.kind {
            EventKind::Arrival => {
                let id = r.vehicle.ok_or("arrival without vehicle id")?;
                let ev = r.extra == "ev";
                if self.arrivals.insert(id, (r.time, ev)).is_some() {
                    return Err(format!("vehicle {id} arrives twice"));
                }
                self.queued += 1;
                self.max_queue = self.max_queue.max(self.queued);
            }
            EventKind::Departure => {
                let id = r.vehicle.ok_or("departure without vehicle id")?;
                let &(arrived, ev) = self
                    .arrivals
                    .get(&id)
                    .ok_or_else(|| format!("vehicle {id} departs without arriving"))?;
                if self.departed.insert(id, ()).is_some() {
                    return Err(format!("vehicle {id} departs twice"));
                }
                let wait = r.time - arrived;
                self.wait_sum += wait;
                if ev {
                    self.ev_delays.push(wait);
                }
                self.queued -= 1;
            }
            _ => {}
        }
        Ok(())
    }

    fn finish(self) -> RunMetrics {
        let throughput = self.departed.len();
        let span = self.last - self.start.unwrap_or(0.0);
        RunMetrics {
            mean_wait: if throughput > 0 {
                self.wait_sum / throughput as f64
            } else {
                0.0
            },
            mean_queue: if span > 0.0 {
                self.queue_area / span
            } else {
                0.0
            },
            max_queue: self.max_queue,
            throughput,
            arrivals: self.arrivals.len(),
            undeparted: self.arrivals.len() - throughput,
            ev_delays: self.ev_delays,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("record {index}: {message}")]
pub struct MetricsError {
    /// Zero-based position in the record slice.
    pub index: usize,
    pub message: String,
}

pub fn compute_metrics(records: &[EventRecord]) -> Result<RunMetrics, MetricsError> {
    let mut acc = Accumulator::default();
    for (index, r) in records.iter().enumerate() {
        acc.push(r)
            .map_err(|message| MetricsError { index, message })?;
    }
    Ok(acc.finish())
}

/// Same as [`compute_metrics`] on CSV text; errors name the line.
pub fn compute_metrics_from_csv(text: &str) -> Result<RunMetrics, LogParseError> {
    let mut acc = Accumulator::default();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() || (i == 0 && line == EVENT_LOG_HEADER) {
            continue;
        }
        let err = |message| LogParseError {
            line: i + 1,
            message,
        };
        let record: EventRecord = line.parse().map_err(err)?;
        acc.push(&record).map_err(err)?;
    }
    Ok(acc.finish())
}

pub const SIGNIFICANCE: f64 = 0.05;

/// Two-sided sign test p-value for `wins` successes out of `n` non-tied
/// pairs under p = 1/2. Returns 1 when `n` is 0.
pub fn sign_test_p_value(wins: usize, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let k = wins.min(n - wins) as u64;
    let dist = Binomial::new(0.5, n as u64).expect("valid binomial");
    (2.0 * dist.cdf(k)).min(1.0)
}

/// One index compared across seeds, A against B.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexComparison {
    pub name: &'static str,
    pub mean_a: f64,
    pub mean_b: f64,
    /// Mean of the paired differences A - B.
    pub mean_diff: f64,
    pub a_lower: usize,
    pub b_lower: usize,
    pub ties: usize,
    pub p_value: f64,
}

impl IndexComparison {
    pub fn significant(&self) -> bool {
        self.p_value < SIGNIFICANCE
    }

    /// Relative change of A against B, e.g. -0.25 for 25% lower.
    pub fn relative_change(&self) -> f64 {
        if self.mean_b == 0.0 {
            0.0
        } else {
            self.mean_diff / self.mean_b
        }
    }

    pub fn verdict(&self) -> &'static str {
        match (self.significant(), self.a_lower > self.b_lower) {
            (false, _) => "inconclusive",
            (true, true) => "A lower",
            (true, false) => "B lower",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub seeds: usize,
    pub indices: Vec<IndexComparison>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompareError {
    #[error("paired runs must have equal length, got {a} and {b}")]
    LengthMismatch { a: usize, b: usize },
}

type Extractor = fn(&RunMetrics) -> f64;

const INDICES: [(&str, Extractor); 6] = [
    ("mean_wait", |m| m.mean_wait),
    ("mean_queue", |m| m.mean_queue),
    ("max_queue", |m| m.max_queue as f64),
    ("throughput", |m| m.throughput as f64),
    ("undeparted", |m| m.undeparted as f64),
    ("ev_mean_delay", RunMetrics::ev_mean_delay),
];

/// Paired comparison of runs that share seeds position by position.
pub fn compare_runs(a: &[RunMetrics], b: &[RunMetrics]) -> Result<Comparison, CompareError> {
    if a.len() != b.len() {
        return Err(CompareError::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    let n = a.len();
    let indices = INDICES
        .iter()
        .map(|&(name, get)| {
            let (mut sa, mut sb, mut sd) = (0.0, 0.0, 0.0);
            let (mut a_lower, mut b_lower, mut ties) = (0, 0, 0);
            for (x, y) in a.iter().zip(b) {
                let (va, vb) = (get(x), get(y));
                sa += va;
                sb += vb;
                sd += va - vb;
                match va.partial_cmp(&vb) {
                    Some(std::cmp::Ordering::Less) => a_lower += 1,
                    Some(std::cmp::Ordering::Greater) => b_lower += 1,
                    _ => ties += 1,
                }
            }
            let div = |s: f64| if n == 0 { 0.0 } else { s / n as f64 };
            IndexComparison {
                name,
                mean_a: div(sa),
                mean_b: div(sb),
                mean_diff: div(sd),
                a_lower,
                b_lower,
                ties,
                p_value: sign_test_p_value(a_lower, a_lower + b_lower),
            }
        })
        .collect();
    Ok(Comparison { seeds: n, indices })
}

impl Comparison {
    pub fn index(&self, name: &str) -> Option<&IndexComparison> {
        self.indices.iter().find(|c| c.name == name)
    }

    /// `index,value` rows, one per statistic.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,value\n");
        let _ = writeln!(out, "seeds,{}", self.seeds);
        for c in &self.indices {
            let _ = writeln!(out, "{}.mean_a,{:.6}", c.name, c.mean_a);
            let _ = writeln!(out, "{}.mean_b,{:.6}", c.name, c.mean_b);
            let _ = writeln!(out, "{}.mean_diff,{:.6}", c.name, c.mean_diff);
            let _ = writeln!(out, "{}.a_lower,{}", c.name, c.a_lower);
            let _ = writeln!(out, "{}.b_lower,{}", c.name, c.b_lower);
            let _ = writeln!(out, "{}.ties,{}", c.name, c.ties);
            let _ = writeln!(out, "{}.sign_test_p,{:.6}", c.name, c.p_value);
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<14} {:>12} {:>12} {:>12} {:>8} {:>8} {:>6} {:>9}  verdict",
            "index", "mean A", "mean B", "A - B", "A lower", "B lower", "ties", "p"
        );
        for c in &self.indices {
            let _ = writeln!(
                out,
                "{:<14} {:>12.3} {:>12.3} {:>12.3} {:>8} {:>8} {:>6} {:>9.2e}  {}",
                c.name,
                c.mean_a,
                c.mean_b,
                c.mean_diff,
                c.a_lower,
                c.b_lower,
                c.ties,
                c.p_value,
                c.verdict()
            );
        }
        out
    }
}
