//! JSON state files.
//!
//! A state file is `{"d_A", "d_B", "classical_A", "classical_B", "matrix"}` where
//! `matrix` is row-major with `[re, im]` entries. A probability table file is
//! `{"table": [[p_ab]]}` and produces the diagonal state with both flags set.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{make_cq_state, BipartiteState, DensityOperator};
use crate::error::{invalid, Result};
use crate::operator::HermitianOperator;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(rename = "d_A")]
    pub d_a: usize,
    #[serde(rename = "d_B")]
    pub d_b: usize,
    #[serde(rename = "classical_A", default)]
    pub classical_a: bool,
    #[serde(rename = "classical_B", default)]
    pub classical_b: bool,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbabilityTableFile {
    pub table: Vec<Vec<f64>>,
}

impl StateFile {
    pub fn from_state(state: &BipartiteState) -> Self {
        Self {
            d_a: state.d_a(),
            d_b: state.d_b(),
            classical_a: state.classical_a(),
            classical_b: state.classical_b(),
            matrix: state.density().hermitian().to_rows(),
        }
    }

    pub fn into_state(self) -> Result<BipartiteState> {
        let n = self.matrix.len();
        if self.d_a * self.d_b != n {
            return Err(invalid(format!(
                "matrix has {n} rows but d_A * d_B = {}",
                self.d_a * self.d_b
            )));
        }
        let rows: Vec<Vec<Complex64>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        let h = HermitianOperator::from_rows(&rows)?;
        let state = DensityOperator::from_hermitian(h)?;
        BipartiteState::with_flags(
            state,
            self.d_a,
            self.d_b,
            self.classical_a,
            self.classical_b,
        )
    }
}

impl BipartiteState {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&StateFile::from_state(self)).expect("state file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<StateFile>(text)?.into_state()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyStateFile {
    State(StateFile),
    Table(ProbabilityTableFile),
}

/// Parses either a state file or a probability-table file.
pub fn parse_state_json(text: &str) -> Result<BipartiteState> {
    // Syntax errors surface with line/column from a plain parse before the untagged match.
    let value: serde_json::Value = serde_json::from_str(text)?;
    match serde_json::from_value::<AnyStateFile>(value) {
        Ok(AnyStateFile::State(s)) => s.into_state(),
        Ok(AnyStateFile::Table(t)) => make_cq_state(&t.table),
        Err(_) => Err(invalid(
            "JSON is neither a state file {d_A, d_B, classical_A, classical_B, matrix} nor a table file {table}",
        )),
    }
}

pub fn read_state_file(path: impl AsRef<Path>) -> Result<BipartiteState> {
    let text = std::fs::read_to_string(path)?;
    parse_state_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::state::{max_entangled, sample_random_state, Ensemble};
    use proptest::prelude::*;

    #[test]
    fn parses_documented_format() {
        let text = r#"{ "d_A": 1, "d_B": 2, "classical_A": false, "classical_B": false,
                        "matrix": [[[0.5, 0.0], [0.0, 0.25]], [[0.0, -0.25], [0.5, 0.0]]] }"#;
        let s = parse_state_json(text).unwrap();
        assert_eq!(s.dims(), (1, 2));
        assert_eq!(s.matrix()[(0, 1)], Complex64::new(0.0, 0.25));
    }

    #[test]
    fn parses_table_format() {
        let s = parse_state_json(r#"{"table": [[0.5, 0.0], [0.0, 0.5]]}"#).unwrap();
        assert!(s.classical_a() && s.classical_b());
        assert_eq!(s.dims(), (2, 2));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_state_json("{\n  \"d_A\": 2,\n  oops }").unwrap_err();
        match err {
            Error::Json { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unnormalized_matrix_is_rejected() {
        let text = r#"{ "d_A": 1, "d_B": 2, "classical_A": false, "classical_B": false,
                        "matrix": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.4, 0.0]]] }"#;
        assert!(matches!(
            parse_state_json(text),
            Err(Error::Normalization(_))
        ));
    }

    #[test]
    fn bell_state_round_trip() {
        let s = max_entangled(2).unwrap();
        assert_eq!(BipartiteState::from_json(&s.to_json()).unwrap(), s);
    }

    proptest! {
        #[test]
        fn serialization_round_trip_is_bit_exact(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
            let s = sample_random_state(da, db, Ensemble::HilbertSchmidt, seed).unwrap();
            let back = BipartiteState::from_json(&s.to_json()).unwrap();
            prop_assert_eq!(back.matrix(), s.matrix());
        }
    }
}
