use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::AnalyticsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Questionnaire {
    Sus,
    Ipq,
    CsqVr,
    Tlx,
}

impl Questionnaire {
    pub const ALL: [Questionnaire; 4] = [Questionnaire::Sus, Questionnaire::Ipq, Questionnaire::CsqVr, Questionnaire::Tlx];

    pub fn as_str(self) -> &'static str {
        match self {
            Questionnaire::Sus => "sus",
            Questionnaire::Ipq => "ipq",
            Questionnaire::CsqVr => "csqvr",
            Questionnaire::Tlx => "tlx",
        }
    }

    pub fn item_count(self) -> usize {
        match self {
            Questionnaire::Sus => 10,
            Questionnaire::Ipq => 14,
            Questionnaire::CsqVr => 6,
            Questionnaire::Tlx => 6,
        }
    }

    /// Inclusive item range.
    pub fn item_range(self) -> (f64, f64) {
        match self {
            Questionnaire::Sus => (1.0, 5.0),
            Questionnaire::Ipq | Questionnaire::CsqVr => (0.0, 6.0),
            Questionnaire::Tlx => (0.0, 100.0),
        }
    }
}

impl fmt::Display for Questionnaire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Questionnaire {
    type Err = AnalyticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "sus" => Ok(Questionnaire::Sus),
            "ipq" => Ok(Questionnaire::Ipq),
            "csqvr" | "csq" => Ok(Questionnaire::CsqVr),
            "tlx" | "nasatlx" => Ok(Questionnaire::Tlx),
            other => Err(AnalyticsError::InvalidConfig(format!("unknown questionnaire `{other}`"))),
        }
    }
}

fn check(q: Questionnaire, items: &[f64]) -> Result<(), AnalyticsError> {
    if items.len() != q.item_count() {
        return Err(AnalyticsError::ItemCount { questionnaire: q.as_str(), expected: q.item_count(), got: items.len() });
    }
    let (lo, hi) = q.item_range();
    for (i, &v) in items.iter().enumerate() {
        if !(v >= lo && v <= hi) {
            return Err(AnalyticsError::Range { questionnaire: q.as_str(), item: i + 1, value: v, min: lo, max: hi });
        }
    }
    Ok(())
}

/// System Usability Scale, 0-100.
pub fn score_sus(items: &[f64]) -> Result<f64, AnalyticsError> {
    check(Questionnaire::Sus, items)?;
    let s: f64 = items
        .iter()
        .enumerate()
        .map(|(i, &x)| if i % 2 == 0 { x - 1.0 } else { 5.0 - x })
        .sum();
    Ok(2.5 * s)
}

/// Item-to-dimension mapping for the presence questionnaire, 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpqConfig {
    pub subscales: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    pub reversed: Vec<usize>,
}

impl IpqConfig {
    pub fn validate(&self) -> Result<(), AnalyticsError> {
        let n = Questionnaire::Ipq.item_count();
        let bad = |i: &usize| *i == 0 || *i > n;
        if self.subscales.is_empty() || self.subscales.values().any(Vec::is_empty) {
            return Err(AnalyticsError::InvalidConfig("every IPQ subscale needs at least one item".into()));
        }
        if let Some(i) = self.subscales.values().flatten().chain(&self.reversed).find(|i| bad(i)) {
            return Err(AnalyticsError::InvalidConfig(format!("IPQ item {i} outside 1..={n}")));
        }
        Ok(())
    }
}

/// Per-dimension means after reversing the configured items (6 - x).
pub fn score_ipq(items: &[f64], cfg: &IpqConfig) -> Result<BTreeMap<String, f64>, AnalyticsError> {
    check(Questionnaire::Ipq, items)?;
    cfg.validate()?;
    let value = |i: usize| if cfg.reversed.contains(&i) { 6.0 - items[i - 1] } else { items[i - 1] };
    Ok(cfg
        .subscales
        .iter()
        .map(|(name, ix)| (name.clone(), ix.iter().map(|&i| value(i)).sum::<f64>() / ix.len() as f64))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsqVrScores {
    pub nausea: f64,
    pub vestibular: f64,
    pub oculomotor: f64,
    pub total: f64,
}

/// Cybersickness pairs: items 1-2 nausea, 3-4 vestibular, 5-6 oculomotor.
pub fn score_csq_vr(items: &[f64]) -> Result<CsqVrScores, AnalyticsError> {
    check(Questionnaire::CsqVr, items)?;
    let (nausea, vestibular, oculomotor) = (items[0] + items[1], items[2] + items[3], items[4] + items[5]);
    Ok(CsqVrScores { nausea, vestibular, oculomotor, total: nausea + vestibular + oculomotor })
}

/// Raw (unweighted) NASA-TLX.
pub fn score_tlx(items: &[f64]) -> Result<f64, AnalyticsError> {
    check(Questionnaire::Tlx, items)?;
    Ok(items.iter().sum::<f64>() / items.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Score {
    Single(f64),
    Subscales(BTreeMap<String, f64>),
    CsqVr(CsqVrScores),
}

pub fn score(q: Questionnaire, items: &[f64], ipq: Option<&IpqConfig>) -> Result<Score, AnalyticsError> {
    Ok(match q {
        Questionnaire::Sus => Score::Single(score_sus(items)?),
        Questionnaire::Tlx => Score::Single(score_tlx(items)?),
        Questionnaire::CsqVr => Score::CsqVr(score_csq_vr(items)?),
        Questionnaire::Ipq => {
            let cfg = ipq.ok_or_else(|| AnalyticsError::InvalidConfig("IPQ scoring needs a subscale mapping".into()))?;
            Score::Subscales(score_ipq(items, cfg)?)
        }
    })
}

/// One respondent: a bare item list or `{"id": ..., "items": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Response {
    Items(Vec<f64>),
    Record {
        #[serde(default)]
        id: Option<String>,
        items: Vec<f64>,
    },
}

impl Response {
    pub fn items(&self) -> &[f64] {
        match self {
            Response::Items(v) | Response::Record { items: v, .. } => v,
        }
    }

    pub fn id(&self) -> Option<&str> {
        match self {
            Response::Record { id, .. } => id.as_deref(),
            Response::Items(_) => None,
        }
    }
}

/// Parses a single response or a list of responses.
pub fn parse_responses(text: &str) -> Result<Vec<Response>, AnalyticsError> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Input {
        Many(Vec<Response>),
        One(Response),
    }
    let v: serde_json::Value = serde_json::from_str(text)?;
    // a bare numeric array is one respondent, not many
    if let Some(arr) = v.as_array() {
        if !arr.is_empty() && arr.iter().all(serde_json::Value::is_number) {
            return Ok(vec![Response::Items(serde_json::from_value(v)?)]);
        }
    }
    Ok(match serde_json::from_value(v)? {
        Input::Many(v) => v,
        Input::One(r) => vec![r],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alternating(odd: f64, even: f64) -> Vec<f64> {
        (0..10).map(|i| if i % 2 == 0 { odd } else { even }).collect()
    }

    #[test]
    fn sus_reference_points() {
        assert_eq!(score_sus(&[5.0; 10]).unwrap(), 50.0);
        assert_eq!(score_sus(&alternating(5.0, 1.0)).unwrap(), 100.0);
        assert_eq!(score_sus(&alternating(1.0, 5.0)).unwrap(), 0.0);
        assert!(matches!(score_sus(&[6.0; 10]), Err(AnalyticsError::Range { item: 1, .. })));
        assert!(matches!(score_sus(&[3.0; 9]), Err(AnalyticsError::ItemCount { .. })));
    }

    #[test]
    fn csq_vr_maxima() {
        let s = score_csq_vr(&[6.0; 6]).unwrap();
        assert_eq!((s.nausea, s.vestibular, s.oculomotor, s.total), (12.0, 12.0, 12.0, 36.0));
    }

    #[test]
    fn tlx_is_plain_mean() {
        assert_eq!(score_tlx(&[10.0, 20.0, 30.0, 40.0, 50.0, 60.0]).unwrap(), 35.0);
        assert!(score_tlx(&[101.0, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn ipq_reverses_and_averages() {
        let cfg = IpqConfig {
            subscales: BTreeMap::from([("general".to_string(), vec![1]), ("spatial".to_string(), vec![2, 3])]),
            reversed: vec![3],
        };
        let mut items = vec![0.0; 14];
        items[0] = 4.0;
        items[1] = 6.0;
        items[2] = 2.0;
        let s = score_ipq(&items, &cfg).unwrap();
        assert_eq!(s["general"], 4.0);
        assert_eq!(s["spatial"], 5.0);
        let bad = IpqConfig { subscales: BTreeMap::from([("x".to_string(), vec![15])]), reversed: vec![] };
        assert!(score_ipq(&items, &bad).is_err());
    }

    #[test]
    fn response_shapes() {
        assert_eq!(parse_responses("[1,2,3]").unwrap(), vec![Response::Items(vec![1.0, 2.0, 3.0])]);
        let r = parse_responses(r#"[{"id": "p1", "items": [1]}, [2]]"#).unwrap();
        assert_eq!(r[0].id(), Some("p1"));
        assert_eq!(r[1].items(), &[2.0]);
        assert_eq!(parse_responses(r#"{"items": [4]}"#).unwrap()[0].items(), &[4.0]);
        assert!(parse_responses("{}").is_err());
    }

    #[test]
    fn names_parse() {
        assert_eq!("CSQ-VR".parse::<Questionnaire>().unwrap(), Questionnaire::CsqVr);
        assert_eq!("nasa-tlx".parse::<Questionnaire>().unwrap(), Questionnaire::Tlx);
        assert!("abc".parse::<Questionnaire>().is_err());
    }
}
