//! Protocol file format.
//!
//! ```json
//! {
//!   "name": "...",
//!   "factors": [{"name": "A", "dim": 3, "owner": "Alice"}, ...],
//!   "alice_prep": [M0, M1],
//!   "rounds": [{"actor": "Bob", "matrix": M, "send": true}, ...],
//!   "alice_output": [{"pos": P0, "neg": N0}, {"pos": P1, "neg": N1}]
//! }
//! ```
//!
//! Matrices are row-major nested arrays of `[re, im]` pairs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Actor, ProtocolSpec, Round};
use crate::error::{Error, Result};
use crate::qcore::{CMat, Factor, RegisterLayout, TwoOutcomeMeasurement, C64};

type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProtocolFile {
    name: String,
    factors: Vec<Factor>,
    alice_prep: Vec<MatrixJson>,
    rounds: Vec<RoundFile>,
    alice_output: Vec<MeasurementFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoundFile {
    actor: Actor,
    matrix: MatrixJson,
    send: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasurementFile {
    pos: MatrixJson,
    neg: MatrixJson,
}

fn decode(m: &MatrixJson, what: &str) -> Result<CMat> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(Error::Format(format!("{what}: matrix rows must be nonempty and equal length")));
    }
    let entries = m.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
    CMat::from_row_major(rows, cols, entries)
}

fn encode(m: &CMat) -> MatrixJson {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
        .collect()
}

fn pair<T>(mut v: Vec<T>, what: &str) -> Result<[T; 2]> {
    if v.len() != 2 {
        return Err(Error::Format(format!("{what} needs exactly 2 entries, got {}", v.len())));
    }
    let second = v.pop().unwrap();
    let first = v.pop().unwrap();
    Ok([first, second])
}

/// Parses and validates a protocol. Malformed input yields [`Error::Json`] or
/// [`Error::Format`]; a well-formed but invalid protocol yields
/// [`Error::Spec`].
pub fn parse_protocol(text: &str) -> Result<ProtocolSpec> {
    let file: ProtocolFile = serde_json::from_str(text)?;
    let layout = RegisterLayout::new(file.factors).map_err(|e| Error::Spec(e.to_string()))?;
    let prep = pair(file.alice_prep, "alice_prep")?;
    let prep = [decode(&prep[0], "alice_prep[0]")?, decode(&prep[1], "alice_prep[1]")?];
    let rounds = file
        .rounds
        .iter()
        .enumerate()
        .map(|(k, r)| Ok(Round::new(r.actor, decode(&r.matrix, &format!("rounds[{k}]"))?, r.send)))
        .collect::<Result<Vec<_>>>()?;
    let outputs = pair(file.alice_output, "alice_output")?;
    let mut meas = Vec::with_capacity(2);
    for (a, m) in outputs.iter().enumerate() {
        let pos = decode(&m.pos, &format!("alice_output[{a}].pos"))?;
        let neg = decode(&m.neg, &format!("alice_output[{a}].neg"))?;
        meas.push(TwoOutcomeMeasurement::new(pos, neg).map_err(|e| Error::Spec(e.to_string()))?);
    }
    let meas = pair(meas, "alice_output")?;
    ProtocolSpec::new(file.name, layout, prep, rounds, meas)
}

pub fn load_protocol(path: impl AsRef<Path>) -> Result<ProtocolSpec> {
    parse_protocol(&std::fs::read_to_string(path)?)
}

impl ProtocolSpec {
    /// Serializes to the protocol file format.
    pub fn to_json(&self) -> String {
        let file = ProtocolFile {
            name: self.name.clone(),
            factors: self.layout.factors().to_vec(),
            alice_prep: self.alice_prep.iter().map(encode).collect(),
            rounds: self
                .rounds
                .iter()
                .map(|r| RoundFile { actor: r.actor, matrix: encode(&r.unitary), send: r.send })
                .collect(),
            alice_output: self
                .alice_output
                .iter()
                .map(|m| MeasurementFile { pos: encode(m.pos()), neg: encode(m.neg()) })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("protocol files always serialize")
    }
}
