use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AnalyticsError, Dataset};
use crate::Technique;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
    /// Keep class proportions in both parts.
    pub stratified: bool,
    /// Keep all rows of a participant group on one side.
    pub by_group: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { test_fraction: 0.2, seed: 0, stratified: true, by_group: false }
    }
}

/// Train and test row indices, each ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn test_size(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction).round() as usize).clamp(1, n - 1)
}

fn take(mut members: Vec<usize>, n_test: usize, rng: &mut ChaCha8Rng, split: &mut Split) {
    members.shuffle(rng);
    split.test.extend_from_slice(&members[..n_test]);
    split.train.extend_from_slice(&members[n_test..]);
}

/// Seeded train/test split. Stratified splits draw `round(n * fraction)`
/// test rows from each class, kept within `[1, n - 1]`.
pub fn stratified_split(ds: &Dataset, spec: &SplitSpec) -> Result<Split, AnalyticsError> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(AnalyticsError::InvalidConfig(format!("test fraction {} not in (0, 1)", spec.test_fraction)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut split = Split { train: Vec::new(), test: Vec::new() };

    if spec.by_group {
        let groups = ds
            .groups
            .as_ref()
            .ok_or_else(|| AnalyticsError::MissingColumn(super::dataset::GROUP_COLUMN.into()))?;
        let mut members: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, g) in groups.iter().enumerate() {
            members.entry(g.as_str()).or_default().push(i);
        }
        if members.len() < 2 {
            return Err(AnalyticsError::TooFewRows { what: "groups".into(), needed: 2, got: members.len() });
        }
        let mut names: Vec<&str> = members.keys().copied().collect();
        names.shuffle(&mut rng);
        let n_test = test_size(names.len(), spec.test_fraction);
        for (k, name) in names.iter().enumerate() {
            let side = if k < n_test { &mut split.test } else { &mut split.train };
            side.extend_from_slice(&members[name]);
        }
    } else if spec.stratified {
        let mut by_class: BTreeMap<Technique, Vec<usize>> = BTreeMap::new();
        for (i, l) in ds.labels.iter().enumerate() {
            by_class.entry(*l).or_default().push(i);
        }
        for (label, members) in by_class {
            if members.len() < 2 {
                return Err(AnalyticsError::TooFewRows { what: format!("class {label}"), needed: 2, got: members.len() });
            }
            let n_test = test_size(members.len(), spec.test_fraction);
            take(members, n_test, &mut rng, &mut split);
        }
    } else {
        if ds.len() < 2 {
            return Err(AnalyticsError::TooFewRows { what: "rows".into(), needed: 2, got: ds.len() });
        }
        let n_test = test_size(ds.len(), spec.test_fraction);
        take((0..ds.len()).collect(), n_test, &mut rng, &mut split);
    }
    split.train.sort_unstable();
    split.test.sort_unstable();
    Ok(split)
}

/// Stratified fold ids: each class is shuffled and dealt round-robin.
pub fn stratified_folds(labels: &[Technique], folds: usize, seed: u64) -> Result<Vec<usize>, AnalyticsError> {
    if folds < 2 {
        return Err(AnalyticsError::InvalidConfig(format!("{folds} folds, need at least 2")));
    }
    let mut by_class: BTreeMap<Technique, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        by_class.entry(*l).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold = vec![0; labels.len()];
    for (label, mut members) in by_class {
        if members.len() < folds {
            return Err(AnalyticsError::TooFewRows { what: format!("class {label}"), needed: folds, got: members.len() });
        }
        members.shuffle(&mut rng);
        for (k, i) in members.into_iter().enumerate() {
            fold[i] = k % folds;
        }
    }
    Ok(fold)
}
