use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    anova_oneway, count_labels, cross_validate, knn_fit_predict, kruskal_wallis, majority_baseline, majority_label,
    permutation_importance, stratified_split, AnalyticsError, AnovaResult, ClassifierConfig, CvResult, Dataset,
    Importance, KnnModel, KruskalResult, SplitSpec,
};
use crate::Technique;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyOptions {
    pub split: SplitSpec,
    pub classifier: ClassifierConfig,
    /// Shuffles per feature for permutation importance.
    pub repeats: usize,
    /// Skip cross-validation (e.g. when a class is smaller than the fold count).
    pub cross_validate: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { split: SplitSpec::default(), classifier: ClassifierConfig::default(), repeats: 30, cross_validate: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub n_train: usize,
    pub n_test: usize,
    pub train_counts: BTreeMap<Technique, usize>,
    pub test_counts: BTreeMap<Technique, usize>,
    pub majority_label: Technique,
    pub baseline_accuracy: f64,
    pub k: usize,
    pub knn_accuracy: f64,
    pub cv: Option<CvResult>,
    /// Test accuracy with the cross-validated k.
    pub cv_knn_accuracy: Option<f64>,
    pub dropped_features: Vec<String>,
    pub importance: Vec<Importance>,
}

/// Split, majority baseline, k-NN at the configured k, cross-validated k
/// selection and permutation importance.
pub fn classify_report(ds: &Dataset, opts: &ClassifyOptions) -> Result<ClassificationReport, AnalyticsError> {
    let split = stratified_split(ds, &opts.split)?;
    let train = ds.subset(&split.train);
    let test = ds.subset(&split.test);
    let baseline_accuracy = majority_baseline(&train.labels, &test.labels)?;
    let knn = knn_fit_predict(&train, &test, opts.classifier.k)?;
    let (cv, cv_knn_accuracy) = if opts.cross_validate {
        let cv = cross_validate(&train, &opts.classifier, opts.split.seed)?;
        let acc = knn_fit_predict(&train, &test, cv.best_k)?.accuracy;
        (Some(cv), Some(acc))
    } else {
        (None, None)
    };
    let model = KnnModel::fit(&train.rows, &train.labels, opts.classifier.k)?;
    let importance = permutation_importance(&model, &test, opts.repeats, opts.split.seed)?;
    Ok(ClassificationReport {
        n_train: train.len(),
        n_test: test.len(),
        train_counts: count_labels(&train.labels),
        test_counts: count_labels(&test.labels),
        majority_label: majority_label(&train.labels).expect("training split is non-empty"),
        baseline_accuracy,
        k: opts.classifier.k,
        knn_accuracy: knn.accuracy,
        cv,
        cv_knn_accuracy,
        dropped_features: knn.dropped_features,
        importance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub feature: String,
    pub anova: Option<AnovaResult>,
    pub kruskal: Option<KruskalResult>,
    /// Why a test could not be computed for this feature.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub group_by: String,
    pub groups: Vec<(String, usize)>,
    pub features: Vec<FeatureStats>,
}

/// One-way ANOVA and Kruskal-Wallis per feature across `label` or
/// `group` values.
pub fn stats_report(ds: &Dataset, group_by: &str) -> Result<StatsReport, AnalyticsError> {
    let keys: Vec<String> = match group_by {
        "label" => ds.labels.iter().map(|l| l.as_str().to_string()).collect(),
        "group" => ds.groups.clone().ok_or_else(|| AnalyticsError::MissingColumn("group".into()))?,
        other => return Err(AnalyticsError::InvalidConfig(format!("cannot group by `{other}`; use label or group"))),
    };
    let mut members: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, k) in keys.iter().enumerate() {
        members.entry(k.as_str()).or_default().push(i);
    }
    let groups: Vec<(String, usize)> = members.iter().map(|(k, v)| (k.to_string(), v.len())).collect();
    let features = (0..ds.width())
        .map(|j| {
            let values: Vec<Vec<f64>> = members.values().map(|ix| ix.iter().map(|&i| ds.rows[i][j]).collect()).collect();
            let mut notes = Vec::new();
            let anova = anova_oneway(&values).map_err(|e| notes.push(format!("anova: {e}"))).ok();
            let kruskal = kruskal_wallis(&values).map_err(|e| notes.push(format!("kruskal-wallis: {e}"))).ok();
            FeatureStats {
                feature: ds.feature_names[j].clone(),
                anova,
                kruskal,
                note: (!notes.is_empty()).then(|| notes.join("; ")),
            }
        })
        .collect();
    Ok(StatsReport { group_by: group_by.to_string(), groups, features })
}
