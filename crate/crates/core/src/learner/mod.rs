//! Decision-tree digit classifiers (ID3, C4.5, C4.5 with degree-beta
//! entropy), stratified splitting and confusion-matrix metrics.

mod entropy;
mod metrics;
mod tree;

use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::features::FeatureVector;
use crate::{Error, Result};

pub use entropy::{beta_entropy, shannon_entropy, Impurity};
pub use metrics::{evaluate, metrics, ConfusionMatrix, MetricsReport};
pub use tree::{
    classify, prune, train, train_c45, train_c45_beta, train_id3, DecisionTree, Discretization,
    LearnerConfig, LearnerKind, Node,
};

/// A signed digit, 1 to 9.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "u8", into = "u8"))]
pub struct Digit(u8);

impl Digit {
    pub const ALL: [Digit; 9] = [
        Digit(1),
        Digit(2),
        Digit(3),
        Digit(4),
        Digit(5),
        Digit(6),
        Digit(7),
        Digit(8),
        Digit(9),
    ];

    pub fn new(d: u8) -> Result<Self> {
        if (1..=9).contains(&d) {
            Ok(Self(d))
        } else {
            Err(Error::Parameter {
                name: "digit",
                reason: "must be 1 to 9",
            })
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Zero-based class index.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(i: usize) -> Self {
        assert!(i < 9, "class index out of range");
        Self(i as u8 + 1)
    }
}

impl TryFrom<u8> for Digit {
    type Error = Error;

    fn try_from(d: u8) -> Result<Self> {
        Self::new(d)
    }
}

impl From<Digit> for u8 {
    fn from(d: Digit) -> u8 {
        d.0
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sample {
    pub vector: FeatureVector,
    pub label: Digit,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Self {
        Self { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn class_counts(&self) -> [usize; 9] {
        let mut c = [0; 9];
        for s in &self.samples {
            c[s.label.index()] += 1;
        }
        c
    }
}

/// Stratified random split. Each class, in digit order, is shuffled with one
/// ChaCha8 stream seeded from `seed` and its first `round(fraction * count)`
/// members go to training. Both halves keep the input order.
pub fn split_dataset(d: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Parameter {
            name: "train_fraction",
            reason: "must lie in (0, 1)",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut to_train = alloc::vec![false; d.len()];
    for digit in Digit::ALL {
        let mut idx: Vec<usize> = (0..d.len())
            .filter(|&i| d.samples[i].label == digit)
            .collect();
        if idx.is_empty() {
            continue;
        }
        if idx.len() < 2 {
            return Err(Error::Stratification {
                digit: digit.get(),
                count: idx.len(),
            });
        }
        idx.shuffle(&mut rng);
        let n_train = libm::round(train_fraction * idx.len() as f64) as usize;
        for &i in &idx[..n_train] {
            to_train[i] = true;
        }
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (s, t) in d.samples.iter().zip(to_train) {
        if t {
            train.push(*s);
        } else {
            test.push(*s);
        }
    }
    Ok((Dataset::new(train), Dataset::new(test)))
}
