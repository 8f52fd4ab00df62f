use super::{classify, Dataset, DecisionTree, Digit};
use crate::{Error, Result};

/// `counts[true][assigned]`, zero-based class indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionMatrix {
    pub counts: [[u64; 9]; 9],
}

impl ConfusionMatrix {
    pub fn record(&mut self, truth: Digit, assigned: Digit) {
        self.counts[truth.index()][assigned.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..9).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }

    pub fn col_sum(&self, j: usize) -> u64 {
        self.counts.iter().map(|r| r[j]).sum()
    }

    pub fn merge(&mut self, other: &Self) {
        for i in 0..9 {
            for j in 0..9 {
                self.counts[i][j] += other.counts[i][j];
            }
        }
    }

    /// Off-diagonal mass among the digits of one group.
    pub fn within_mass(&self, group: &[u8]) -> u64 {
        let mut m = 0;
        for &i in group {
            for &j in group {
                if i != j {
                    m += self.counts[i as usize - 1][j as usize - 1];
                }
            }
        }
        m
    }

    /// Mass exchanged between two disjoint groups, both directions.
    pub fn between_mass(&self, a: &[u8], b: &[u8]) -> u64 {
        let mut m = 0;
        for &i in a {
            for &j in b {
                m += self.counts[i as usize - 1][j as usize - 1]
                    + self.counts[j as usize - 1][i as usize - 1];
            }
        }
        m
    }
}

/// Error rates and per-class recall/precision. Classes without samples in
/// their row (or column) report `None` for recall (or precision).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsReport {
    pub card_m: u64,
    pub error_global: f64,
    pub accuracy: f64,
    pub recall: [Option<f64>; 9],
    pub precision: [Option<f64>; 9],
    pub error_apriori: [Option<f64>; 9],
    pub error_aposteriori: [Option<f64>; 9],
}

pub fn metrics(m: &ConfusionMatrix) -> Result<MetricsReport> {
    let card = m.total();
    if card == 0 {
        return Err(Error::Empty("confusion matrix"));
    }
    let off: u64 = card - m.trace();
    let mut r = MetricsReport {
        card_m: card,
        error_global: off as f64 / card as f64,
        accuracy: m.trace() as f64 / card as f64,
        recall: [None; 9],
        precision: [None; 9],
        error_apriori: [None; 9],
        error_aposteriori: [None; 9],
    };
    for i in 0..9 {
        let (row, col) = (m.row_sum(i), m.col_sum(i));
        if row > 0 {
            let rec = m.counts[i][i] as f64 / row as f64;
            r.recall[i] = Some(rec);
            r.error_apriori[i] = Some(1.0 - rec);
        }
        if col > 0 {
            let prec = m.counts[i][i] as f64 / col as f64;
            r.precision[i] = Some(prec);
            r.error_aposteriori[i] = Some(1.0 - prec);
        }
    }
    Ok(r)
}

pub fn evaluate(tree: &DecisionTree, test: &Dataset) -> Result<ConfusionMatrix> {
    if test.is_empty() {
        return Err(Error::Empty("test set"));
    }
    let mut m = ConfusionMatrix::default();
    for s in &test.samples {
        m.record(s.label, classify(tree, &s.vector));
    }
    Ok(m)
}
