use serde::{Deserialize, Serialize};

use super::AnalyticsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub f: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub ss_between: f64,
    pub ss_within: f64,
    pub eta_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruskalResult {
    pub h: f64,
    pub df: usize,
    /// Tie correction factor the raw statistic was divided by.
    pub tie_correction: f64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// One-way analysis of variance. Groups without any spread at all give
/// F = 0; spread only between groups is degenerate.
pub fn anova_oneway(groups: &[Vec<f64>]) -> Result<AnovaResult, AnalyticsError> {
    if groups.len() < 2 {
        return Err(AnalyticsError::TooFewRows { what: "groups".into(), needed: 2, got: groups.len() });
    }
    if let Some(g) = groups.iter().find(|g| g.len() < 2) {
        return Err(AnalyticsError::TooFewRows { what: "values per group".into(), needed: 2, got: g.len() });
    }
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    if all.iter().any(|v| !v.is_finite()) {
        return Err(AnalyticsError::InvalidConfig("non-finite value in groups".into()));
    }
    let grand = mean(&all);
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for g in groups {
        let m = mean(g);
        ssb += g.len() as f64 * (m - grand).powi(2);
        ssw += g.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    }
    let df_between = groups.len() - 1;
    let df_within = all.len() - groups.len();
    let scale = all.iter().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
    let negligible = |ss: f64| ss <= 1e-24 * scale;
    let (f, eta_squared) = match (negligible(ssb), negligible(ssw)) {
        (true, true) => (0.0, 0.0),
        (false, true) => {
            return Err(AnalyticsError::DegenerateGroups("groups differ but have no within-group variance".into()))
        }
        _ => ((ssb / df_between as f64) / (ssw / df_within as f64), ssb / (ssb + ssw)),
    };
    Ok(AnovaResult { f, df_between, df_within, ss_between: ssb, ss_within: ssw, eta_squared })
}

/// Average ranks (1-based) of the pooled values, plus the tie-group sizes.
pub fn average_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

/// Kruskal-Wallis H with average ranks and tie correction. When every value
/// is tied the correction vanishes and H is reported as 0.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<KruskalResult, AnalyticsError> {
    if groups.len() < 2 {
        return Err(AnalyticsError::TooFewRows { what: "groups".into(), needed: 2, got: groups.len() });
    }
    if groups.iter().any(Vec::is_empty) {
        return Err(AnalyticsError::TooFewRows { what: "values per group".into(), needed: 1, got: 0 });
    }
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    if pooled.iter().any(|v| !v.is_finite()) {
        return Err(AnalyticsError::InvalidConfig("non-finite value in groups".into()));
    }
    let n = pooled.len();
    if n < 3 {
        return Err(AnalyticsError::TooFewRows { what: "values".into(), needed: 3, got: n });
    }
    let (ranks, ties) = average_ranks(&pooled);
    let nf = n as f64;
    let mut offset = 0;
    let mut sum = 0.0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        sum += r * r / g.len() as f64;
        offset += g.len();
    }
    let raw = 12.0 / (nf * (nf + 1.0)) * sum - 3.0 * (nf + 1.0);
    let tie_sum: f64 = ties.iter().map(|&t| (t as f64).powi(3) - t as f64).sum();
    let c = 1.0 - tie_sum / (nf.powi(3) - nf);
    let h = if c <= 0.0 { 0.0 } else { (raw / c).max(0.0) };
    Ok(KruskalResult { h, df: groups.len() - 1, tie_correction: c })
}
