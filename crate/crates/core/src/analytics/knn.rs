use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{accuracy, count_labels, stratified_folds, AnalyticsError, Dataset};
use crate::Technique;

/// Most frequent label, ties to the smallest.
pub fn majority_label(labels: &[Technique]) -> Option<Technique> {
    let counts = count_labels(labels);
    let best = *counts.values().max()?;
    counts.into_iter().find(|(_, c)| *c == best).map(|(l, _)| l)
}

/// Accuracy of always predicting the training majority on the test labels.
pub fn majority_baseline(train: &[Technique], test: &[Technique]) -> Result<f64, AnalyticsError> {
    let label = majority_label(train).ok_or_else(|| AnalyticsError::TooFewRows { what: "training rows".into(), needed: 1, got: 0 })?;
    if test.is_empty() {
        return Err(AnalyticsError::TooFewRows { what: "test rows".into(), needed: 1, got: 0 });
    }
    Ok(test.iter().filter(|l| **l == label).count() as f64 / test.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    pub k: usize,
    pub candidate_ks: Vec<usize>,
    pub folds: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self { k: 5, candidate_ks: vec![3, 5, 7, 9], folds: 5 }
    }
}

/// Z-scoring fitted on training rows. Zero-variance features are dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub kept: Vec<usize>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub dropped: Vec<usize>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let width = rows.first().map_or(0, Vec::len);
        let n = rows.len() as f64;
        let mut s = Standardizer { kept: Vec::new(), mean: Vec::new(), std: Vec::new(), dropped: Vec::new() };
        for j in 0..width {
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            if std > 1e-12 * mean.abs().max(1.0) {
                s.kept.push(j);
                s.mean.push(mean);
                s.std.push(std);
            } else {
                s.dropped.push(j);
            }
        }
        s
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        self.kept.iter().zip(self.mean.iter().zip(&self.std)).map(|(&j, (m, s))| (row[j] - m) / s).collect()
    }
}

/// Euclidean k-nearest-neighbour classifier over standardized features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub scaler: Standardizer,
    train: Vec<Vec<f64>>,
    labels: Vec<Technique>,
}

impl KnnModel {
    pub fn fit(rows: &[Vec<f64>], labels: &[Technique], k: usize) -> Result<Self, AnalyticsError> {
        if k == 0 {
            return Err(AnalyticsError::InvalidConfig("k must be positive".into()));
        }
        if rows.is_empty() {
            return Err(AnalyticsError::TooFewRows { what: "training rows".into(), needed: 1, got: 0 });
        }
        let scaler = Standardizer::fit(rows);
        let train = rows.iter().map(|r| scaler.transform(r)).collect();
        Ok(Self { k, scaler, train, labels: labels.to_vec() })
    }

    pub fn fit_dataset(ds: &Dataset, k: usize) -> Result<Self, AnalyticsError> {
        let model = Self::fit(&ds.rows, &ds.labels, k)?;
        for &j in &model.scaler.dropped {
            log::warn!("feature `{}` has zero training variance and is ignored", ds.feature_names[j]);
        }
        Ok(model)
    }

    fn distances(&self, row: &[f64]) -> Vec<(usize, f64)> {
        let q = self.scaler.transform(row);
        self.train
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.iter().zip(&q).map(|(a, b)| (a - b).powi(2)).sum::<f64>()))
            .collect()
    }

    /// Training indices ordered by squared distance to `row`, ties by index.
    pub fn neighbours(&self, row: &[f64]) -> Vec<(usize, f64)> {
        let mut d = self.distances(row);
        d.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        d
    }

    /// The first `k` entries of [`neighbours`](Self::neighbours).
    pub fn nearest(&self, row: &[f64], k: usize) -> Vec<(usize, f64)> {
        let mut d = self.distances(row);
        let order = |a: &(usize, f64), b: &(usize, f64)| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0));
        if k < d.len() {
            d.select_nth_unstable_by(k, order);
            d.truncate(k);
        }
        d.sort_by(order);
        d
    }

    /// Majority vote among the k nearest; a tied vote goes to the nearest
    /// neighbour whose label is among the tied ones.
    pub fn predict_one(&self, row: &[f64]) -> Technique {
        let top = self.nearest(row, self.k);
        let mut votes: BTreeMap<Technique, usize> = BTreeMap::new();
        for (i, _) in &top {
            *votes.entry(self.labels[*i]).or_insert(0) += 1;
        }
        let best = *votes.values().max().unwrap();
        top.iter()
            .map(|(i, _)| self.labels[*i])
            .find(|l| votes[l] == best)
            .unwrap()
    }

    pub fn predict(&self, rows: &[Vec<f64>]) -> Vec<Technique> {
        rows.iter().map(|r| self.predict_one(r)).collect()
    }

    pub fn score(&self, rows: &[Vec<f64>], labels: &[Technique]) -> f64 {
        accuracy(&self.predict(rows), labels)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnResult {
    pub predictions: Vec<Technique>,
    pub accuracy: f64,
    pub dropped_features: Vec<String>,
}

pub fn knn_fit_predict(train: &Dataset, test: &Dataset, k: usize) -> Result<KnnResult, AnalyticsError> {
    let model = KnnModel::fit_dataset(train, k)?;
    let predictions = model.predict(&test.rows);
    Ok(KnnResult {
        accuracy: accuracy(&predictions, &test.labels),
        predictions,
        dropped_features: model.scaler.dropped.iter().map(|&j| train.feature_names[j].clone()).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KScore {
    pub k: usize,
    pub fold_accuracies: Vec<f64>,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub best_k: usize,
    pub scores: Vec<KScore>,
}

/// Stratified k-fold selection of the neighbour count; ties go to the
/// smaller k.
pub fn cross_validate(train: &Dataset, cfg: &ClassifierConfig, seed: u64) -> Result<CvResult, AnalyticsError> {
    if cfg.candidate_ks.is_empty() {
        return Err(AnalyticsError::InvalidConfig("no candidate k values".into()));
    }
    let fold = stratified_folds(&train.labels, cfg.folds, seed)?;
    let mut ks = cfg.candidate_ks.clone();
    ks.sort_unstable();
    ks.dedup();
    let mut scores = Vec::with_capacity(ks.len());
    for &k in &ks {
        let mut fold_accuracies = Vec::with_capacity(cfg.folds);
        for f in 0..cfg.folds {
            let (fit_ix, val_ix): (Vec<usize>, Vec<usize>) = (0..train.len()).partition(|&i| fold[i] != f);
            let model = KnnModel::fit(&train.subset(&fit_ix).rows, &train.subset(&fit_ix).labels, k)?;
            let val = train.subset(&val_ix);
            fold_accuracies.push(model.score(&val.rows, &val.labels));
        }
        let mean = fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64;
        scores.push(KScore { k, fold_accuracies, mean });
    }
    let best_k = scores
        .iter()
        .fold(None::<&KScore>, |best, s| match best {
            Some(b) if b.mean >= s.mean => Some(b),
            _ => Some(s),
        })
        .unwrap()
        .k;
    Ok(CvResult { best_k, scores })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Importance {
    pub feature: String,
    pub drop: f64,
}

/// Mean accuracy drop when one feature column of the test set is shuffled.
/// Each feature draws from its own seeded stream, so results do not depend
/// on evaluation order. Sorted by descending drop, ties in column order.
pub fn permutation_importance(
    model: &KnnModel,
    test: &Dataset,
    repeats: usize,
    seed: u64,
) -> Result<Vec<Importance>, AnalyticsError> {
    if test.is_empty() {
        return Err(AnalyticsError::TooFewRows { what: "test rows".into(), needed: 1, got: 0 });
    }
    let base = model.score(&test.rows, &test.labels);
    let mut out = Vec::with_capacity(test.width());
    for j in 0..test.width() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(j as u64);
        let column = test.column(j);
        let mut rows = test.rows.clone();
        let mut total = 0.0;
        for _ in 0..repeats {
            let mut perm = column.clone();
            perm.shuffle(&mut rng);
            for (r, v) in rows.iter_mut().zip(&perm) {
                r[j] = *v;
            }
            total += base - model.score(&rows, &test.labels);
        }
        let drop = if repeats == 0 { 0.0 } else { total / repeats as f64 };
        out.push(Importance { feature: test.feature_names[j].clone(), drop });
    }
    out.sort_by(|a, b| b.drop.total_cmp(&a.drop));
    Ok(out)
}
