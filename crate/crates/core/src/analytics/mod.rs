//! Classification harness, permutation importance, one-way statistics and
//! questionnaire scoring.

mod dataset;
mod knn;
mod questionnaire;
mod report;
mod split;
mod stats;
mod synthetic;

use thiserror::Error;

pub use dataset::{accuracy, count_labels, Dataset, GROUP_COLUMN, LABEL_COLUMN};
pub use knn::{
    cross_validate, knn_fit_predict, majority_baseline, majority_label, permutation_importance, ClassifierConfig,
    CvResult, Importance, KScore, KnnModel, KnnResult, Standardizer,
};
pub use questionnaire::{
    parse_responses, score, score_csq_vr, score_ipq, score_sus, score_tlx, CsqVrScores, IpqConfig, Questionnaire,
    Response, Score,
};
pub use report::{classify_report, stats_report, ClassificationReport, ClassifyOptions, FeatureStats, StatsReport};
pub use split::{stratified_folds, stratified_split, Split, SplitSpec};
pub use stats::{anova_oneway, average_ranks, kruskal_wallis, AnovaResult, KruskalResult};
pub use synthetic::{gaussian_clusters, label_code};

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("malformed feature matrix: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: invalid {column} value `{value}`")]
    InvalidValue { row: usize, column: String, value: String },
    #[error("row {row}: unknown label `{value}`")]
    UnknownLabel { row: usize, value: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("too few {what}: need {needed}, got {got}")]
    TooFewRows { what: String, needed: usize, got: usize },
    #[error("degenerate groups: {0}")]
    DegenerateGroups(String),
    #[error("{questionnaire} expects {expected} items, got {got}")]
    ItemCount { questionnaire: &'static str, expected: usize, got: usize },
    #[error("{questionnaire} item {item} = {value} outside [{min}, {max}]")]
    Range { questionnaire: &'static str, item: usize, value: f64, min: f64, max: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
