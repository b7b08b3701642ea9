//! Seeded labeled datasets for demos and tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Dataset;
use crate::Technique;

/// Three spherical unit-variance Gaussian clusters, one per technique, with
/// centers `separation` apart along the diagonal of feature space.
/// `counts` are per technique in [`Technique::ALL`] order; rows are grouped
/// by class.
pub fn gaussian_clusters(seed: u64, counts: [usize; 3], feature_names: &[&str], separation: f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = feature_names.len().max(1);
    let step = separation / (d as f64).sqrt();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (c, (label, n)) in Technique::ALL.iter().zip(counts).enumerate() {
        for _ in 0..n {
            let row: Vec<f64> = (0..feature_names.len())
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    c as f64 * step + z
                })
                .collect();
            rows.push(row);
            labels.push(*label);
        }
    }
    Dataset {
        feature_names: feature_names.iter().map(|s| s.to_string()).collect(),
        rows,
        labels,
        groups: None,
    }
}

/// Position of a label in [`Technique::ALL`], as a feature value.
pub fn label_code(label: Technique) -> f64 {
    Technique::ALL.iter().position(|t| *t == label).unwrap() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sized_and_seeded() {
        let a = gaussian_clusters(1, [3, 4, 5], &["a", "b"], 5.0);
        assert_eq!(a.len(), 12);
        assert_eq!(a.class_counts()[&Technique::LlmDriven], 5);
        assert_eq!(a, gaussian_clusters(1, [3, 4, 5], &["a", "b"], 5.0));
        a.validate().unwrap();
    }

    #[test]
    fn centers_are_separated() {
        let ds = gaussian_clusters(2, [2000, 2000, 0], &["a", "b", "c", "d"], 5.0);
        let centroid = |label: Technique| -> Vec<f64> {
            let rows: Vec<_> = ds.rows.iter().zip(&ds.labels).filter(|(_, l)| **l == label).map(|(r, _)| r).collect();
            (0..4).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / rows.len() as f64).collect()
        };
        let (a, b) = (centroid(Technique::Teleport), centroid(Technique::Steering));
        let d = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        assert!((d - 5.0).abs() < 0.15, "{d}");
    }
}
