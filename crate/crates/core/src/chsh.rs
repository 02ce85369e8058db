// Copyright 2026 The chsh-concepts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Coincidence tables, expectation values and the CHSH statistic.
//!
//! A coincidence table holds the four joint outcomes of one pair of
//! settings. Cells are in the order (first, first), (first, second),
//! (second, first), (second, second) over the two sides, e.g. for AB:
//! horse growls, horse whinnies, bear growls, bear whinnies. Expectation
//! values only use the signs carried by the cells; the marginal diagnostic
//! relies on the cell order.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::TABLE_SUM_TOLERANCE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Setting {
    AB,
    ABp,
    ApB,
    ApBp,
}

impl Setting {
    pub const ALL: [Setting; 4] = [Setting::AB, Setting::ABp, Setting::ApB, Setting::ApBp];

    /// Key used in file formats.
    pub fn key(self) -> &'static str {
        match self {
            Setting::AB => "AB",
            Setting::ABp => "ABp",
            Setting::ApB => "ApB",
            Setting::ApBp => "ApBp",
        }
    }

    /// Coefficient of E(setting) in E(A′,B′) + E(A′,B) + E(A,B′) − E(A,B).
    pub fn chsh_coefficient(self) -> f64 {
        match self {
            Setting::AB => -1.0,
            _ => 1.0,
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Setting::AB => "AB",
            Setting::ABp => "AB'",
            Setting::ApB => "A'B",
            Setting::ApBp => "A'B'",
        })
    }
}

impl std::str::FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "AB" => Ok(Setting::AB),
            "ABp" | "AB'" => Ok(Setting::ABp),
            "ApB" | "A'B" => Ok(Setting::ApB),
            "ApBp" | "A'B'" => Ok(Setting::ApBp),
            other => Err(Error::Schema(format!("unknown setting '{other}'"))),
        }
    }
}

/// Outcome value attached to a cell. Serialized as `1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Signs of the four cells in the conventional order: the two
    /// "matching" cells count +1, the two mixed ones −1.
    pub const STANDARD: [Sign; 4] = [Sign::Plus, Sign::Minus, Sign::Minus, Sign::Plus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// Sign of a real outcome value; zero has no sign.
    pub fn of(value: f64) -> Option<Sign> {
        if value > 0.0 {
            Some(Sign::Plus)
        } else if value < 0.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be 1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeCell {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
    pub probability: f64,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceTable {
    pub setting: Setting,
    pub cells: [OutcomeCell; 4],
}

impl CoincidenceTable {
    /// Validates probabilities (each in [0, 1], sum 1 within 1e-9) and signs
    /// (two of each).
    pub fn new(setting: Setting, cells: [OutcomeCell; 4]) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidTable { setting, reason };
        for cell in &cells {
            if !(0.0..=1.0).contains(&cell.probability) {
                return Err(invalid(format!(
                    "probability {} of '{}' outside [0, 1]",
                    cell.probability, cell.label
                )));
            }
        }
        let sum: f64 = cells.iter().map(|c| c.probability).sum();
        if (sum - 1.0).abs() > TABLE_SUM_TOLERANCE {
            return Err(invalid(format!("probabilities sum to {sum}, not 1")));
        }
        let plus = cells.iter().filter(|c| c.sign == Sign::Plus).count();
        if plus != 2 {
            return Err(invalid(format!(
                "expected two +1 and two -1 outcomes, found {plus} positive"
            )));
        }
        Ok(CoincidenceTable { setting, cells })
    }

    pub fn from_counts(
        setting: Setting,
        labels: [&str; 4],
        counts: [u64; 4],
        signs: [Sign; 4],
    ) -> Result<Self> {
        let probs = probabilities_from_counts(counts).map_err(|e| match e {
            Error::EmptyCoincidence { .. } => Error::EmptyCoincidence {
                setting: Some(setting),
            },
            other => other,
        })?;
        let cells = std::array::from_fn(|k| OutcomeCell {
            label: labels[k].to_string(),
            count: Some(counts[k]),
            probability: probs[k],
            sign: signs[k],
        });
        Self::new(setting, cells)
    }

    pub fn from_probabilities(
        setting: Setting,
        labels: [&str; 4],
        probabilities: [f64; 4],
        signs: [Sign; 4],
    ) -> Result<Self> {
        let cells = std::array::from_fn(|k| OutcomeCell {
            label: labels[k].to_string(),
            count: None,
            probability: probabilities[k],
            sign: signs[k],
        });
        Self::new(setting, cells)
    }

    pub fn probabilities(&self) -> [f64; 4] {
        std::array::from_fn(|k| self.cells[k].probability)
    }

    pub fn signs(&self) -> [Sign; 4] {
        std::array::from_fn(|k| self.cells[k].sign)
    }

    pub fn labels(&self) -> [&str; 4] {
        std::array::from_fn(|k| self.cells[k].label.as_str())
    }

    pub fn counts(&self) -> Option<[u64; 4]> {
        let mut out = [0; 4];
        for (o, c) in out.iter_mut().zip(&self.cells) {
            *o = c.count?;
        }
        Some(out)
    }

    /// Marginal probability that the first side takes its first value.
    fn first_side_leading(&self) -> f64 {
        self.cells[0].probability + self.cells[1].probability
    }

    /// Marginal probability that the second side takes its first value.
    fn second_side_leading(&self) -> f64 {
        self.cells[0].probability + self.cells[2].probability
    }
}

/// How the counts of a suite were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CountingMode {
    /// Adjacent two-word strings.
    ExactString,
    /// Windowed co-occurrence of a target word and a collocate.
    Collocates,
    /// Probabilities supplied directly, without counts.
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSuite {
    pub name: String,
    pub mode: CountingMode,
    /// Collocate window used to produce the counts, when applicable.
    pub window: Option<usize>,
    pub tables: BTreeMap<Setting, CoincidenceTable>,
}

impl ExperimentSuite {
    /// Requires exactly one table per setting.
    pub fn new(
        name: impl Into<String>,
        mode: CountingMode,
        tables: impl IntoIterator<Item = CoincidenceTable>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for table in tables {
            let setting = table.setting;
            if map.insert(setting, table).is_some() {
                return Err(Error::InvalidTable {
                    setting,
                    reason: "duplicate table".into(),
                });
            }
        }
        if let Some(missing) = Setting::ALL.into_iter().find(|s| !map.contains_key(s)) {
            return Err(Error::MissingSetting(missing));
        }
        Ok(ExperimentSuite {
            name: name.into(),
            mode,
            window: None,
            tables: map,
        })
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = Some(window);
        self
    }

    pub fn table(&self, setting: Setting) -> Result<&CoincidenceTable> {
        self.tables.get(&setting).ok_or(Error::MissingSetting(setting))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// |S| ≤ 2.
    Satisfied,
    /// 2 < |S| ≤ 2√2.
    ViolatedWithinTsirelson,
    /// |S| > 2√2.
    ExceedsTsirelson,
}

pub const CLASSICAL_BOUND: f64 = 2.0;

/// 2√2.
pub fn tsirelson_bound() -> f64 {
    2.0 * 2f64.sqrt()
}

impl Classification {
    pub fn of(s: f64) -> Self {
        let s = s.abs();
        if s <= CLASSICAL_BOUND {
            Classification::Satisfied
        } else if s <= tsirelson_bound() {
            Classification::ViolatedWithinTsirelson
        } else {
            Classification::ExceedsTsirelson
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Satisfied => "Satisfied",
            Classification::ViolatedWithinTsirelson => "ViolatedWithinTsirelson",
            Classification::ExceedsTsirelson => "ExceedsTsirelson",
        })
    }
}

/// Absolute differences of one side's marginal across the other side's two
/// settings. All zero means the data are non-signaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalDiagnostic {
    /// A's marginal in AB vs AB′.
    #[serde(rename = "A")]
    pub a: f64,
    /// A′'s marginal in A′B vs A′B′.
    #[serde(rename = "Ap")]
    pub a_prime: f64,
    /// B's marginal in AB vs A′B.
    #[serde(rename = "B")]
    pub b: f64,
    /// B′'s marginal in AB′ vs A′B′.
    #[serde(rename = "Bp")]
    pub b_prime: f64,
}

impl MarginalDiagnostic {
    pub fn max(&self) -> f64 {
        [self.a, self.a_prime, self.b, self.b_prime]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshReport {
    pub name: String,
    pub expectations: BTreeMap<Setting, f64>,
    pub s: f64,
    pub classification: Classification,
    pub marginal_diagnostic: MarginalDiagnostic,
}

impl ChshReport {
    pub fn expectation(&self, setting: Setting) -> f64 {
        self.expectations[&setting]
    }
}

/// Relative frequencies cᵢ / Σc.
pub fn probabilities_from_counts(counts: [u64; 4]) -> Result<[f64; 4]> {
    let total: u128 = counts.iter().map(|&c| c as u128).sum();
    if total == 0 {
        return Err(Error::EmptyCoincidence { setting: None });
    }
    let total = total as f64;
    Ok(counts.map(|c| c as f64 / total))
}

/// E = Σ sign · probability.
pub fn expectation(table: &CoincidenceTable) -> f64 {
    table
        .cells
        .iter()
        .map(|c| c.sign.value() * c.probability)
        .sum()
}

pub fn marginal_diagnostic(suite: &ExperimentSuite) -> Result<MarginalDiagnostic> {
    let ab = suite.table(Setting::AB)?;
    let abp = suite.table(Setting::ABp)?;
    let apb = suite.table(Setting::ApB)?;
    let apbp = suite.table(Setting::ApBp)?;
    Ok(MarginalDiagnostic {
        a: (ab.first_side_leading() - abp.first_side_leading()).abs(),
        a_prime: (apb.first_side_leading() - apbp.first_side_leading()).abs(),
        b: (ab.second_side_leading() - apb.second_side_leading()).abs(),
        b_prime: (abp.second_side_leading() - apbp.second_side_leading()).abs(),
    })
}

/// S = E(A′,B′) + E(A′,B) + E(A,B′) − E(A,B), with its classification.
pub fn chsh_statistic(suite: &ExperimentSuite) -> Result<ChshReport> {
    let mut expectations = BTreeMap::new();
    for setting in Setting::ALL {
        expectations.insert(setting, expectation(suite.table(setting)?));
    }
    let s = expectations[&Setting::ApBp] + expectations[&Setting::ApB]
        + expectations[&Setting::ABp]
        - expectations[&Setting::AB];
    Ok(ChshReport {
        name: suite.name.clone(),
        expectations,
        s,
        classification: Classification::of(s),
        marginal_diagnostic: marginal_diagnostic(suite)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const AB_LABELS: [&str; 4] = ["horse growls", "horse whinnies", "bear growls", "bear whinnies"];

    fn table(setting: Setting, probs: [f64; 4]) -> CoincidenceTable {
        CoincidenceTable::from_probabilities(setting, ["w", "x", "y", "z"], probs, Sign::STANDARD)
            .unwrap()
    }

    fn suite(probs: [[f64; 4]; 4]) -> ExperimentSuite {
        ExperimentSuite::new(
            "t",
            CountingMode::Direct,
            Setting::ALL.iter().zip(probs).map(|(&s, p)| table(s, p)),
        )
        .unwrap()
    }

    fn table1() -> ExperimentSuite {
        suite([
            [0.0, 0.6526, 0.3474, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.7029, 0.0, 0.2971, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ])
    }

    #[test]
    fn counts_to_probabilities() {
        let p = probabilities_from_counts([0, 464, 247, 0]).unwrap();
        for (got, want) in p.iter().zip([0.0, 0.6526, 0.3474, 0.0]) {
            assert!((got - want).abs() < 5e-5);
        }
        let p = probabilities_from_counts([97, 0, 41, 0]).unwrap();
        for (got, want) in p.iter().zip([0.7029, 0.0, 0.2971, 0.0]) {
            assert!((got - want).abs() < 5e-5);
        }
        assert_eq!(probabilities_from_counts([5, 5, 5, 5]).unwrap(), [0.25; 4]);
    }

    #[test]
    fn empty_counts_are_rejected() {
        let err = probabilities_from_counts([0; 4]).unwrap_err();
        assert!(err.to_string().contains("empty coincidence operation"));
        let err = CoincidenceTable::from_counts(Setting::ApB, AB_LABELS, [0; 4], Sign::STANDARD)
            .unwrap_err();
        assert_eq!(err.to_string(), "empty coincidence operation in setting A'B");
    }

    #[test]
    fn expectation_examples() {
        let t = table1();
        assert_eq!(expectation(t.table(Setting::AB).unwrap()), -1.0);
        assert!((expectation(t.table(Setting::ApB).unwrap()) - 0.4058).abs() < 1e-4);
        assert_eq!(expectation(&table(Setting::AB, [0.25; 4])), 0.0);
    }

    #[test]
    fn table_validation() {
        let bad_sum = CoincidenceTable::from_probabilities(
            Setting::AB,
            AB_LABELS,
            [0.5, 0.5, 0.5, 0.0],
            Sign::STANDARD,
        );
        assert!(bad_sum.is_err());
        let bad_signs = CoincidenceTable::from_probabilities(
            Setting::AB,
            AB_LABELS,
            [0.25; 4],
            [Sign::Plus, Sign::Plus, Sign::Plus, Sign::Minus],
        );
        assert!(bad_signs.is_err());
    }

    #[test]
    fn chsh_examples() {
        let r = chsh_statistic(&table1()).unwrap();
        assert!((r.s - 3.4058).abs() < 5e-4);
        assert_eq!(format!("{:.2}", r.s), "3.41");
        assert_eq!(r.classification, Classification::ExceedsTsirelson);

        let r = chsh_statistic(&suite([
            [0.0, 0.8, 0.2, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.4, 0.0, 0.6, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]))
        .unwrap();
        assert!((r.s - 2.8).abs() < 1e-12);
        assert_eq!(r.classification, Classification::ViolatedWithinTsirelson);

        let r = chsh_statistic(&suite([[0.25; 4]; 4])).unwrap();
        assert_eq!(r.s, 0.0);
        assert_eq!(r.classification, Classification::Satisfied);
    }

    #[test]
    fn missing_setting_is_an_error() {
        let err = ExperimentSuite::new("t", CountingMode::Direct, [table(Setting::AB, [0.25; 4])])
            .unwrap_err();
        assert!(matches!(err, Error::MissingSetting(Setting::ABp)));

        let mut s = table1();
        s.tables.remove(&Setting::ApBp);
        assert!(matches!(chsh_statistic(&s), Err(Error::MissingSetting(Setting::ApBp))));
    }

    #[test]
    fn classification_boundaries() {
        assert_eq!(Classification::of(2.0), Classification::Satisfied);
        assert_eq!(Classification::of(-2.0), Classification::Satisfied);
        assert_eq!(Classification::of(2.0 + 1e-12), Classification::ViolatedWithinTsirelson);
        assert_eq!(Classification::of(tsirelson_bound()), Classification::ViolatedWithinTsirelson);
        assert_eq!(Classification::of(-tsirelson_bound()), Classification::ViolatedWithinTsirelson);
        assert_eq!(Classification::of(tsirelson_bound() + 1e-12), Classification::ExceedsTsirelson);
        assert_eq!(Classification::of(-3.0), Classification::ExceedsTsirelson);
    }

    #[test]
    fn marginal_examples() {
        let m = marginal_diagnostic(&table1()).unwrap();
        assert!((m.a - 0.3474).abs() < 1e-12);

        let same = suite([
            [0.1, 0.2, 0.3, 0.4],
            [0.1, 0.2, 0.3, 0.4],
            [0.25; 4],
            [0.25; 4],
        ]);
        assert_eq!(marginal_diagnostic(&same).unwrap().a, 0.0);
    }

    fn prob4() -> impl Strategy<Value = [f64; 4]> {
        prop::array::uniform4(0u64..1000)
            .prop_filter("nonempty", |c| c.iter().any(|&x| x > 0))
            .prop_map(|c| probabilities_from_counts(c).unwrap())
    }

    fn signs() -> impl Strategy<Value = [Sign; 4]> {
        Just(Sign::STANDARD).prop_shuffle()
    }

    proptest! {
        #[test]
        fn expectation_is_bounded(p in prob4(), s in signs()) {
            let t = CoincidenceTable::from_probabilities(Setting::AB, AB_LABELS, p, s).unwrap();
            let e = expectation(&t);
            prop_assert!(e.abs() <= 1.0 + 1e-15);
            let plus_mass: f64 = t.cells.iter().filter(|c| c.sign == Sign::Plus).map(|c| c.probability).sum();
            if plus_mass == 0.0 || plus_mass == 1.0 {
                prop_assert!((e.abs() - 1.0).abs() < 1e-15);
            }
        }

        #[test]
        fn expectation_matches_rational_form(c in prop::array::uniform4(0u64..100_000), s in signs()) {
            prop_assume!(c.iter().any(|&x| x > 0));
            let t = CoincidenceTable::from_counts(Setting::AB, AB_LABELS, c, s).unwrap();
            let signed: i64 = c.iter().zip(s).map(|(&n, s)| n as i64 * s.value() as i64).sum();
            let total: u64 = c.iter().sum();
            prop_assert!((expectation(&t) - signed as f64 / total as f64).abs() < 1e-12);
        }

        #[test]
        fn statistic_ignores_cell_order(ps in prop::array::uniform4(prob4()), perm in Just([0usize, 1, 2, 3]).prop_shuffle()) {
            let base = suite(ps);
            let mut shuffled = base.clone();
            for table in shuffled.tables.values_mut() {
                let cells = table.cells.clone();
                table.cells = std::array::from_fn(|k| cells[perm[k]].clone());
            }
            let a = chsh_statistic(&base).unwrap().s;
            let b = chsh_statistic(&shuffled).unwrap().s;
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
