//! The green-extension controller's rule base.

use super::{Fis, FisError, LinguisticVariable, Rule, Universe};

pub const INPUT_LABELS: [&str; 5] = ["VS", "S", "L", "VL", "EL"];
pub const OUTPUT_LABELS: [&str; 5] = ["Z", "S", "L", "VL", "EL"];

/// Centers shared by both inputs (seconds and vehicles respectively).
pub const INPUT_CENTERS: [f64; 5] = [0.0, 10.0, 20.0, 30.0, 40.0];
/// Centers of the extension terms, seconds.
pub const OUTPUT_CENTERS: [f64; 5] = [0.0, 2.5, 5.0, 7.5, 10.0];
pub const SIGMA: f64 = 2.0;
pub const INPUT_RANGE: (f64, f64) = (0.0, 50.0);
/// Extends 20 s (10 sigma) past the outer extension centers so that a term
/// firing alone, even at a tiny strength, defuzzifies onto its center.
pub const OUTPUT_RANGE: (f64, f64) = (-20.0, 30.0);

/// Consequent term index for (waiting-time term, queue-length term).
pub const RULE_TABLE: [[usize; 5]; 5] = [
    // Q:  VS S  L  VL EL
    [0, 0, 1, 1, 2], // W = VS
    [0, 1, 1, 2, 2], // W = S
    [1, 1, 2, 2, 2], // W = L
    [1, 1, 2, 3, 4], // W = VL
    [2, 2, 2, 3, 4], // W = EL
];

fn terms(labels: &[&'static str; 5], centers: &[f64; 5]) -> Vec<(&'static str, f64)> {
    labels
        .iter()
        .copied()
        .zip(centers.iter().copied())
        .collect()
}

/// Two inputs (waiting time, queue length) and the green extension output,
/// with the full 5x5 rule base.
pub fn build_traffic_fis() -> Fis {
    let build = || -> Result<Fis, FisError> {
        let input_universe = Universe::new(INPUT_RANGE.0, INPUT_RANGE.1)?;
        let waiting = LinguisticVariable::gaussian(
            "waiting_time",
            input_universe,
            SIGMA,
            &terms(&INPUT_LABELS, &INPUT_CENTERS),
        )?;
        let queue = LinguisticVariable::gaussian(
            "queue_length",
            input_universe,
            SIGMA,
            &terms(&INPUT_LABELS, &INPUT_CENTERS),
        )?;
        let extension = LinguisticVariable::gaussian(
            "extension",
            Universe::new(OUTPUT_RANGE.0, OUTPUT_RANGE.1)?,
            SIGMA,
            &terms(&OUTPUT_LABELS, &OUTPUT_CENTERS),
        )?;
        let inputs = vec![waiting, queue];
        let mut rules = Vec::with_capacity(25);
        for (w, row) in RULE_TABLE.iter().enumerate() {
            for (q, &out) in row.iter().enumerate() {
                rules.push(Rule::from_labels(
                    &inputs,
                    &extension,
                    &[INPUT_LABELS[w], INPUT_LABELS[q]],
                    OUTPUT_LABELS[out],
                )?);
            }
        }
        Fis::new("traffic", inputs, extension, rules)?.with_default_output(0.0)
    };
    build().expect("built-in rule base is valid")
}

/// Rebuilds the consequent matrix of a two-input system whose rules are
/// plain AND rules over fully specified antecedents. Returns `None` unless
/// every cell is covered by exactly one rule.
pub fn rule_matrix(fis: &Fis) -> Option<Vec<Vec<usize>>> {
    let [a, b] = fis.inputs() else { return None };
    let (rows, cols) = (a.terms().len(), b.terms().len());
    let mut cells = vec![vec![None; cols]; rows];
    for rule in fis.rules() {
        let &[Some(i), Some(j)] = rule.antecedent() else {
            return None;
        };
        if cells[i][j].replace(rule.consequent()).is_some() {
            return None;
        }
    }
    cells
        .into_iter()
        .map(|row| row.into_iter().collect::<Option<Vec<_>>>())
        .collect()
}
