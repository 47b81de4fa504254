//! File formats.
//!
//! * Instance files: a JSON object with fields `T`, `n`, `profits`
//!   (`T x n`), `weights` (`T x n`), `bonuses` (`(T-1) x n`), and
//!   `capacities` (length `T`), all non-negative integers.
//! * Schedule files: `T` lines of `n` characters `0`/`1` (whitespace
//!   between characters is allowed). Result documents are also accepted
//!   wherever a schedule is expected.
//! * Result documents: JSON with stable field order, see [`ResultDoc`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, ObjectiveBreakdown, Schedule};

#[derive(Debug, Serialize, Deserialize)]
struct InstanceFile {
    #[serde(rename = "T")]
    t: usize,
    n: usize,
    profits: Vec<Vec<u64>>,
    weights: Vec<Vec<u64>>,
    bonuses: Vec<Vec<u64>>,
    capacities: Vec<u64>,
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("instance: {e}")))?;
    let inst = Instance::new(file.profits, file.weights, file.bonuses, file.capacities)?;
    if inst.num_steps() != file.t || inst.num_objects() != file.n {
        return Err(Error::Parse(format!(
            "instance: declared T = {}, n = {} but data is {} x {}",
            file.t,
            file.n,
            inst.num_steps(),
            inst.num_objects()
        )));
    }
    Ok(inst)
}

pub fn serialize_instance(inst: &Instance) -> String {
    let file = InstanceFile {
        t: inst.num_steps(),
        n: inst.num_objects(),
        profits: inst.profits().to_vec(),
        weights: inst.weights().to_vec(),
        bonuses: inst.bonuses().to_vec(),
        capacities: inst.capacities().to_vec(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("instance serializes");
    s.push('\n');
    s
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<()> {
    Ok(std::fs::write(path, serialize_instance(inst))?)
}

/// Render a schedule as `T` lines of `0`/`1` characters.
pub fn schedule_lines(sched: &Schedule) -> Vec<String> {
    sched
        .rows()
        .iter()
        .map(|row| row.iter().map(|&b| if b { '1' } else { '0' }).collect())
        .collect()
}

/// Parse schedule text: either plain `0`/`1` rows or a result document
/// carrying a `schedule` field.
pub fn parse_schedule(text: &str) -> Result<Schedule> {
    if text.trim_start().starts_with('{') {
        let doc: ResultDoc =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("result: {e}")))?;
        let lines = doc
            .schedule
            .ok_or_else(|| Error::Parse("result document has no schedule".into()))?;
        return parse_schedule_rows(lines.iter().map(String::as_str));
    }
    parse_schedule_rows(text.lines().filter(|l| !l.trim().is_empty()))
}

fn parse_schedule_rows<'a>(rows: impl Iterator<Item = &'a str>) -> Result<Schedule> {
    let mut x = Vec::new();
    for (lineno, row) in rows.enumerate() {
        let mut bits = Vec::new();
        for ch in row.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_whitespace() => {}
                c => {
                    return Err(Error::Parse(format!(
                        "schedule line {}: unexpected character {c:?}",
                        lineno + 1
                    )))
                }
            }
        }
        x.push(bits);
    }
    if x.is_empty() {
        return Err(Error::Parse("schedule file has no rows".into()));
    }
    Ok(Schedule::new(x))
}

pub fn read_schedule(path: &Path) -> Result<Schedule> {
    parse_schedule(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BreakdownDoc {
    pub knapsack_profit: u64,
    pub transition_profit: u64,
    pub total: u64,
    pub per_object_reward: Vec<u64>,
}

impl From<&ObjectiveBreakdown> for BreakdownDoc {
    fn from(b: &ObjectiveBreakdown) -> Self {
        Self {
            knapsack_profit: b.knapsack_profit,
            transition_profit: b.transition_profit,
            total: b.total,
            per_object_reward: b.per_object_reward.clone(),
        }
    }
}

/// Exact rational printed next to a decimal reading of the same value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RationalDoc {
    pub rational: String,
    pub decimal: String,
}

/// Solver effort counters. Wall time is reported only on request so
/// that repeated runs stay byte-identical.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunStats {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp_solves: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignments_examined: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dp_table_entries: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

/// The output of a solve run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultDoc {
    pub instance: String,
    pub algorithm: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp_bound: Option<RationalDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub breakdown: Option<BreakdownDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<String>>,
    pub stats: RunStats,
}

pub fn serialize_result(doc: &ResultDoc) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("result serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Instance {
        Instance::new(
            vec![vec![1, 2], vec![3, 4]],
            vec![vec![1, 1], vec![2, 2]],
            vec![vec![5, 6]],
            vec![2, 3],
        )
        .unwrap()
    }

    #[test]
    fn instance_roundtrip() {
        let inst = sample();
        let text = serialize_instance(&inst);
        assert_eq!(parse_instance(&text).unwrap(), inst);
        // serialize -> parse -> serialize is byte-stable
        assert_eq!(serialize_instance(&parse_instance(&text).unwrap()), text);
    }

    #[test]
    fn instance_rejects_inconsistent_header() {
        let text = r#"{"T": 3, "n": 2,
            "profits": [[1,2],[3,4]], "weights": [[1,1],[2,2]],
            "bonuses": [[5,6]], "capacities": [2,3]}"#;
        assert!(parse_instance(text).is_err());
    }

    #[test]
    fn schedule_roundtrip() {
        let sched = Schedule::new(vec![vec![true, false], vec![false, true]]);
        let text = schedule_lines(&sched).join("\n");
        assert_eq!(parse_schedule(&text).unwrap(), sched);
        assert_eq!(parse_schedule("1 0\n0 1").unwrap(), sched);
        assert!(parse_schedule("10\n0x").is_err());
    }

    #[test]
    fn schedule_from_result_doc() {
        let doc = ResultDoc {
            instance: "foo".into(),
            algorithm: "dp".into(),
            epsilon: None,
            ell: None,
            value: Some(3),
            lp_bound: None,
            breakdown: None,
            schedule: Some(vec!["10".into(), "01".into()]),
            stats: RunStats::default(),
        };
        let sched = parse_schedule(&serialize_result(&doc)).unwrap();
        assert_eq!(
            sched,
            Schedule::new(vec![vec![true, false], vec![false, true]])
        );
    }
}
