use alloc::boxed::Box;
use alloc::vec::Vec;

use super::entropy::Impurity;
use super::{Dataset, Digit};
use crate::features::{FeatureVector, FEATURE_COUNT, MAX_PEAKS};
use crate::{Error, Result};

/// Categories of the peak-count slot under ID3.
const N_CATEGORIES: usize = MAX_PEAKS + 1;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "algorithm", rename_all = "kebab-case"))]
pub enum LearnerKind {
    /// Multiway splits on equal-width bins of each continuous slot.
    Id3 { bins: usize },
    /// Binary threshold splits scored by gain ratio.
    C45,
    /// C4.5 with Daróczy entropy of degree `beta`.
    C45Beta { beta: f64 },
}

impl Default for LearnerKind {
    fn default() -> Self {
        Self::Id3 { bins: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct LearnerConfig {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub kind: LearnerKind,
    /// Pessimistic error pruning after growth.
    pub prune: bool,
}

/// Equal-width bins fitted on the training range of each slot. Slot 0 (the
/// peak count) is categorical and ignores `lo`/`hi`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Discretization {
    pub bins: usize,
    pub lo: [f64; FEATURE_COUNT],
    pub hi: [f64; FEATURE_COUNT],
}

impl Discretization {
    pub fn arity(&self, feature: usize) -> usize {
        if feature == 0 {
            N_CATEGORIES
        } else {
            self.bins
        }
    }

    /// Bin of `x`; values outside the training range land in the extreme bins.
    pub fn bin(&self, feature: usize, x: f64) -> usize {
        if feature == 0 {
            let r = libm::round(x);
            return if r >= N_CATEGORIES as f64 {
                N_CATEGORIES - 1
            } else if r > 0.0 {
                r as usize
            } else {
                0
            };
        }
        let width = (self.hi[feature] - self.lo[feature]) / self.bins as f64;
        if !(width > 0.0) {
            return 0;
        }
        let b = libm::floor((x - self.lo[feature]) / width);
        if b >= (self.bins - 1) as f64 {
            self.bins - 1
        } else if b > 0.0 {
            b as usize
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase"))]
pub enum Node {
    Leaf {
        label: Digit,
        /// Training samples per class that reached this leaf.
        counts: [u32; 9],
    },
    /// ID3 split: child `k` takes bin `k`.
    Bins {
        feature: usize,
        counts: [u32; 9],
        children: Vec<Node>,
    },
    /// C4.5 split: `x <= threshold` goes to `below`.
    Threshold {
        feature: usize,
        threshold: f64,
        counts: [u32; 9],
        below: Box<Node>,
        above: Box<Node>,
    },
}

impl Node {
    pub fn counts(&self) -> &[u32; 9] {
        match self {
            Node::Leaf { counts, .. }
            | Node::Bins { counts, .. }
            | Node::Threshold { counts, .. } => counts,
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Bins { children, .. } => children.iter().map(Node::leaf_count).sum(),
            Node::Threshold { below, above, .. } => below.leaf_count() + above.leaf_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Bins { children, .. } => 1 + children.iter().map(Node::depth).max().unwrap_or(0),
            Node::Threshold { below, above, .. } => 1 + below.depth().max(above.depth()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecisionTree {
    pub learner: LearnerKind,
    pub discretization: Option<Discretization>,
    pub root: Node,
}

impl DecisionTree {
    pub fn classify(&self, v: &FeatureVector) -> Digit {
        classify(self, v)
    }
}

/// Root-to-leaf descent.
pub fn classify(tree: &DecisionTree, v: &FeatureVector) -> Digit {
    let x = v.to_array();
    let mut node = &tree.root;
    loop {
        match node {
            Node::Leaf { label, .. } => return *label,
            Node::Bins {
                feature, children, ..
            } => {
                let b = match &tree.discretization {
                    Some(d) => d.bin(*feature, x[*feature]),
                    None => 0,
                };
                node = &children[b.min(children.len() - 1)];
            }
            Node::Threshold {
                feature,
                threshold,
                below,
                above,
                ..
            } => {
                node = if x[*feature] <= *threshold {
                    below
                } else {
                    above
                };
            }
        }
    }
}

/// Most frequent class; ties go to the smaller digit.
fn majority(counts: &[u32; 9]) -> Digit {
    let mut best = 0;
    for i in 1..9 {
        if counts[i] > counts[best] {
            best = i;
        }
    }
    Digit::from_index(best)
}

fn tally<'a>(labels: impl Iterator<Item = &'a Digit>) -> [u32; 9] {
    let mut c = [0u32; 9];
    for l in labels {
        c[l.index()] += 1;
    }
    c
}

fn as_f64(c: &[u32; 9]) -> [f64; 9] {
    c.map(|v| v as f64)
}

fn is_pure(c: &[u32; 9]) -> bool {
    c.iter().filter(|&&v| v > 0).count() <= 1
}

fn check_nonempty(train: &Dataset) -> Result<()> {
    if train.is_empty() {
        Err(Error::Empty("training set"))
    } else {
        Ok(())
    }
}

/// ID3 over equal-width bins (the peak count stays categorical). A node
/// splits on the attribute with the highest information gain among those
/// not yet used on its path that still vary; empty bins become leaves of
/// the parent's majority class.
pub fn train_id3(train: &Dataset, bins_per_feature: usize) -> Result<DecisionTree> {
    if bins_per_feature < 2 {
        return Err(Error::Parameter {
            name: "bins_per_feature",
            reason: "must be at least 2",
        });
    }
    check_nonempty(train)?;
    let rows: Vec<[f64; FEATURE_COUNT]> =
        train.samples.iter().map(|s| s.vector.to_array()).collect();
    let mut lo = [f64::INFINITY; FEATURE_COUNT];
    let mut hi = [f64::NEG_INFINITY; FEATURE_COUNT];
    for r in &rows {
        for f in 0..FEATURE_COUNT {
            lo[f] = lo[f].min(r[f]);
            hi[f] = hi[f].max(r[f]);
        }
    }
    let disc = Discretization {
        bins: bins_per_feature,
        lo,
        hi,
    };
    let binned: Vec<[u8; FEATURE_COUNT]> = rows
        .iter()
        .map(|r| core::array::from_fn(|f| disc.bin(f, r[f]) as u8))
        .collect();
    let labels: Vec<Digit> = train.samples.iter().map(|s| s.label).collect();
    let idx: Vec<usize> = (0..rows.len()).collect();
    let all_attrs = (1u32 << FEATURE_COUNT) - 1;
    let root = id3_node(&binned, &labels, &disc, &idx, all_attrs);
    Ok(DecisionTree {
        learner: LearnerKind::Id3 {
            bins: bins_per_feature,
        },
        discretization: Some(disc),
        root,
    })
}

fn id3_node(
    binned: &[[u8; FEATURE_COUNT]],
    labels: &[Digit],
    disc: &Discretization,
    idx: &[usize],
    attrs: u32,
) -> Node {
    let counts = tally(idx.iter().map(|&i| &labels[i]));
    let leaf = Node::Leaf {
        label: majority(&counts),
        counts,
    };
    if is_pure(&counts) || attrs == 0 {
        return leaf;
    }
    let parent_h = Impurity::Shannon.of(&as_f64(&counts));
    let mut best: Option<(usize, f64)> = None;
    for f in 0..FEATURE_COUNT {
        if attrs & (1 << f) == 0 {
            continue;
        }
        let arity = disc.arity(f);
        let mut per = alloc::vec![[0u32; 9]; arity];
        for &i in idx {
            per[binned[i][f] as usize][labels[i].index()] += 1;
        }
        let used = per.iter().filter(|c| c.iter().any(|&v| v > 0)).count();
        if used < 2 {
            continue;
        }
        let n = idx.len() as f64;
        let rem: f64 = per
            .iter()
            .map(|c| {
                let m: u32 = c.iter().sum();
                m as f64 / n * Impurity::Shannon.of(&as_f64(c))
            })
            .sum();
        let gain = parent_h - rem;
        if best.is_none_or(|(_, g)| gain > g) {
            best = Some((f, gain));
        }
    }
    let Some((feature, _)) = best else {
        return leaf;
    };
    let label = majority(&counts);
    let children = (0..disc.arity(feature))
        .map(|b| {
            let sub: Vec<usize> = idx
                .iter()
                .copied()
                .filter(|&i| binned[i][feature] as usize == b)
                .collect();
            if sub.is_empty() {
                Node::Leaf {
                    label,
                    counts: [0; 9],
                }
            } else {
                id3_node(binned, labels, disc, &sub, attrs & !(1 << feature))
            }
        })
        .collect();
    Node::Bins {
        feature,
        counts,
        children,
    }
}

/// C4.5 with Shannon entropy.
pub fn train_c45(train: &Dataset) -> Result<DecisionTree> {
    check_nonempty(train)?;
    Ok(DecisionTree {
        learner: LearnerKind::C45,
        discretization: None,
        root: grow_c45(train, Impurity::Shannon),
    })
}

/// C4.5 with the Daróczy entropy of degree `beta` in both the gain and the
/// split information.
pub fn train_c45_beta(train: &Dataset, beta: f64) -> Result<DecisionTree> {
    let imp = Impurity::beta(beta)?;
    check_nonempty(train)?;
    Ok(DecisionTree {
        learner: LearnerKind::C45Beta { beta },
        discretization: None,
        root: grow_c45(train, imp),
    })
}

fn grow_c45(train: &Dataset, imp: Impurity) -> Node {
    let rows: Vec<[f64; FEATURE_COUNT]> =
        train.samples.iter().map(|s| s.vector.to_array()).collect();
    let labels: Vec<Digit> = train.samples.iter().map(|s| s.label).collect();
    let idx: Vec<usize> = (0..rows.len()).collect();
    c45_node(&rows, &labels, &idx, imp)
}

struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
    split_info: f64,
}

/// Best threshold of one slot by gain (ties to the smaller threshold), or
/// `None` when the slot is constant on `idx`.
fn best_threshold(
    rows: &[[f64; FEATURE_COUNT]],
    labels: &[Digit],
    idx: &[usize],
    feature: usize,
    parent: &[u32; 9],
    imp: Impurity,
) -> Option<Candidate> {
    let mut order: Vec<usize> = idx.to_vec();
    order.sort_by(|&a, &b| rows[a][feature].total_cmp(&rows[b][feature]));
    let n = order.len() as f64;
    let parent_h = imp.of(&as_f64(parent));
    let mut left = [0u32; 9];
    let mut best: Option<Candidate> = None;
    for k in 0..order.len() - 1 {
        left[labels[order[k]].index()] += 1;
        let (v, next) = (rows[order[k]][feature], rows[order[k + 1]][feature]);
        if v == next {
            continue;
        }
        let mut right = *parent;
        for c in 0..9 {
            right[c] -= left[c];
        }
        let nl = (k + 1) as f64;
        let gain =
            parent_h - (nl / n) * imp.of(&as_f64(&left)) - ((n - nl) / n) * imp.of(&as_f64(&right));
        if best.as_ref().is_none_or(|b| gain > b.gain) {
            let mut threshold = v + (next - v) / 2.0;
            if threshold >= next {
                threshold = v;
            }
            best = Some(Candidate {
                feature,
                threshold,
                gain,
                split_info: imp.of(&[nl, n - nl]),
            });
        }
    }
    best
}

fn c45_node(rows: &[[f64; FEATURE_COUNT]], labels: &[Digit], idx: &[usize], imp: Impurity) -> Node {
    let counts = tally(idx.iter().map(|&i| &labels[i]));
    if is_pure(&counts) {
        return Node::Leaf {
            label: majority(&counts),
            counts,
        };
    }
    let cands: Vec<Candidate> = (0..FEATURE_COUNT)
        .filter_map(|f| best_threshold(rows, labels, idx, f, &counts, imp))
        .collect();
    if cands.is_empty() {
        return Node::Leaf {
            label: majority(&counts),
            counts,
        };
    }
    // gain ratio among candidates with at least average gain
    let avg = cands.iter().map(|c| c.gain).sum::<f64>() / cands.len() as f64;
    let mut chosen: Option<(&Candidate, f64)> = None;
    for c in cands.iter().filter(|c| c.gain >= avg - 1e-12) {
        let ratio = if c.split_info > 0.0 {
            c.gain / c.split_info
        } else {
            0.0
        };
        if chosen.is_none_or(|(_, r)| ratio > r) {
            chosen = Some((c, ratio));
        }
    }
    let (c, _) = chosen.expect("the best gain is never below the average");
    let (feature, threshold) = (c.feature, c.threshold);
    let (lo, hi): (Vec<usize>, Vec<usize>) =
        idx.iter().partition(|&&i| rows[i][feature] <= threshold);
    Node::Threshold {
        feature,
        threshold,
        counts,
        below: Box::new(c45_node(rows, labels, &lo, imp)),
        above: Box::new(c45_node(rows, labels, &hi, imp)),
    }
}

/// Quinlan's pessimistic error pruning, bottom-up: a subtree becomes a leaf
/// when the leaf's corrected error is within one standard error of the
/// subtree's.
pub fn prune(node: Node) -> Node {
    prune_inner(node).0
}

fn leaf_error(counts: &[u32; 9]) -> f64 {
    let n: u32 = counts.iter().sum();
    (n - counts[majority(counts).index()]) as f64 + 0.5
}

fn prune_inner(node: Node) -> (Node, f64) {
    let (node, sub_err) = match node {
        Node::Leaf { counts, .. } => {
            let e = leaf_error(&counts);
            return (node, e);
        }
        Node::Bins {
            feature,
            counts,
            children,
        } => {
            let mut err = 0.0;
            let children = children
                .into_iter()
                .map(|c| {
                    let (c, e) = prune_inner(c);
                    err += e;
                    c
                })
                .collect();
            (
                Node::Bins {
                    feature,
                    counts,
                    children,
                },
                err,
            )
        }
        Node::Threshold {
            feature,
            threshold,
            counts,
            below,
            above,
        } => {
            let (below, e1) = prune_inner(*below);
            let (above, e2) = prune_inner(*above);
            (
                Node::Threshold {
                    feature,
                    threshold,
                    counts,
                    below: Box::new(below),
                    above: Box::new(above),
                },
                e1 + e2,
            )
        }
    };
    let counts = *node.counts();
    let n: f64 = counts.iter().map(|&v| v as f64).sum();
    let as_leaf = leaf_error(&counts);
    let se = if n > 0.0 && sub_err < n {
        libm::sqrt(sub_err * (n - sub_err) / n)
    } else {
        0.0
    };
    if as_leaf <= sub_err + se {
        (
            Node::Leaf {
                label: majority(&counts),
                counts,
            },
            as_leaf,
        )
    } else {
        (node, sub_err)
    }
}

/// Trains the configured learner.
pub fn train(train: &Dataset, cfg: &LearnerConfig) -> Result<DecisionTree> {
    let mut tree = match cfg.kind {
        LearnerKind::Id3 { bins } => train_id3(train, bins)?,
        LearnerKind::C45 => train_c45(train)?,
        LearnerKind::C45Beta { beta } => train_c45_beta(train, beta)?,
    };
    if cfg.prune {
        tree.root = prune(tree.root);
    }
    Ok(tree)
}
