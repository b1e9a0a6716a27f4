use std::fmt;
use std::str::FromStr;

use super::coref::{bcubed_labels, ceaf_labels, CeafMode};
use super::info::info_metrics_labels;
use super::pairwise::pairwise_metrics_labels;
use super::{align, Partition, Prf};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    BCubed,
    CeafE,
    CeafM,
    Muc,
    Blanc,
    VMeasure,
    Ari,
    Ami,
    Fmi,
    Rand,
}

impl MetricKind {
    pub const ALL: [MetricKind; 10] = [
        MetricKind::BCubed,
        MetricKind::CeafE,
        MetricKind::CeafM,
        MetricKind::Muc,
        MetricKind::Blanc,
        MetricKind::VMeasure,
        MetricKind::Ari,
        MetricKind::Ami,
        MetricKind::Fmi,
        MetricKind::Rand,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::BCubed => "bcubed",
            MetricKind::CeafE => "ceaf-e",
            MetricKind::CeafM => "ceaf-m",
            MetricKind::Muc => "muc",
            MetricKind::Blanc => "blanc",
            MetricKind::VMeasure => "v-measure",
            MetricKind::Ari => "ari",
            MetricKind::Ami => "ami",
            MetricKind::Fmi => "fmi",
            MetricKind::Rand => "rand",
        }
    }

    fn is_pairwise(self) -> bool {
        matches!(self, MetricKind::Blanc | MetricKind::Ari | MetricKind::Fmi | MetricKind::Rand)
    }

    /// Parses a comma-separated list; `all` selects every metric.
    pub fn parse_list(s: &str) -> Result<Vec<MetricKind>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "all" {
                out.extend(MetricKind::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
        let mut seen = std::collections::HashSet::new();
        out.retain(|k| seen.insert(*k));
        Ok(out)
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown metric `{s}`")))
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReportValue {
    Prf(Prf),
    Scalar(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub name: String,
    pub value: ReportValue,
}

/// One metric per line: `name<TAB>p<TAB>r<TAB>f1` or `name<TAB>value`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsReport {
    pub entries: Vec<ReportEntry>,
}

impl MetricsReport {
    pub fn push_prf(&mut self, name: &str, prf: Prf) {
        self.entries.push(ReportEntry {
            name: name.to_owned(),
            value: ReportValue::Prf(prf),
        });
    }

    pub fn push_scalar(&mut self, name: &str, value: f64) {
        self.entries.push(ReportEntry {
            name: name.to_owned(),
            value: ReportValue::Scalar(value),
        });
    }

    pub fn get(&self, name: &str) -> Option<ReportValue> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.value)
    }

    /// The headline number of an entry: F1 or the scalar.
    pub fn score(&self, name: &str) -> Option<f64> {
        self.get(name).map(|v| match v {
            ReportValue::Prf(p) => p.f1,
            ReportValue::Scalar(s) => s,
        })
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            match e.value {
                ReportValue::Prf(p) => writeln!(f, "{}\t{:.6}\t{:.6}\t{:.6}", e.name, p.precision, p.recall, p.f1)?,
                ReportValue::Scalar(v) => writeln!(f, "{}\t{:.6}", e.name, v)?,
            }
        }
        Ok(())
    }
}

impl FromStr for MetricsReport {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut report = MetricsReport::default();
        for (n, line) in s.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let num = |f: &str| -> Result<f64> {
                f.trim().parse().map_err(|_| Error::Parse {
                    line: n + 1,
                    message: format!("bad number `{f}`"),
                })
            };
            match fields.len() {
                2 => report.push_scalar(fields[0], num(fields[1])?),
                4 => report.entries.push(ReportEntry {
                    name: fields[0].to_owned(),
                    value: ReportValue::Prf(Prf {
                        precision: num(fields[1])?,
                        recall: num(fields[2])?,
                        f1: num(fields[3])?,
                    }),
                }),
                k => {
                    return Err(Error::Parse {
                        line: n + 1,
                        message: format!("expected 2 or 4 fields, found {k}"),
                    })
                }
            }
        }
        Ok(report)
    }
}

/// Computes the requested metrics plus predicted and gold cluster counts.
pub fn evaluate(pred: &Partition, gold: &Partition, kinds: &[MetricKind]) -> Result<MetricsReport> {
    let (p, g) = align(pred, gold)?;
    let pairwise = if kinds.iter().any(|k| k.is_pairwise()) {
        Some(pairwise_metrics_labels(&p, &g)?)
    } else {
        None
    };
    let info = if kinds
        .iter()
        .any(|k| matches!(k, MetricKind::Muc | MetricKind::VMeasure | MetricKind::Ami))
    {
        Some(info_metrics_labels(&p, &g)?)
    } else {
        None
    };
    let mut report = MetricsReport::default();
    for &k in kinds {
        let name = k.name();
        match k {
            MetricKind::BCubed => report.push_prf(name, bcubed_labels(&p, &g)?),
            MetricKind::CeafE => report.push_prf(name, ceaf_labels(&p, &g, CeafMode::Entity)?),
            MetricKind::CeafM => report.push_prf(name, ceaf_labels(&p, &g, CeafMode::Mention)?),
            MetricKind::Muc => report.push_prf(name, info.as_ref().map(|s| s.muc).unwrap_or_else(Prf::perfect)),
            MetricKind::Blanc => report.push_prf(name, pairwise.map(|s| s.blanc).unwrap_or_else(Prf::perfect)),
            MetricKind::VMeasure => report.push_scalar(name, info.map_or(1.0, |s| s.v_measure)),
            MetricKind::Ami => report.push_scalar(name, info.map_or(1.0, |s| s.adjusted_mutual_information)),
            MetricKind::Ari => report.push_scalar(name, pairwise.map_or(1.0, |s| s.adjusted_rand)),
            MetricKind::Fmi => report.push_scalar(name, pairwise.map_or(1.0, |s| s.fowlkes_mallows)),
            MetricKind::Rand => report.push_scalar(name, pairwise.map_or(1.0, |s| s.rand_index)),
        }
    }
    report.push_scalar("pred_clusters", pred.cluster_count() as f64);
    report.push_scalar("gold_clusters", gold.cluster_count() as f64);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FragmentationReport {
    pub pred_count: usize,
    pub gold_count: usize,
}

impl FragmentationReport {
    pub fn from_counts(pred_count: usize, gold_count: usize) -> Self {
        FragmentationReport { pred_count, gold_count }
    }

    /// Clusters created beyond the gold count; negative when under-split.
    pub fn excess(&self) -> i64 {
        self.pred_count as i64 - self.gold_count as i64
    }

    /// `1 - excess / baseline_excess`, or `None` when the baseline has no
    /// excess to reduce.
    pub fn excess_reduction_vs(&self, baseline_count: usize) -> Option<f64> {
        let baseline_excess = baseline_count as i64 - self.gold_count as i64;
        if baseline_excess == 0 {
            return None;
        }
        Some(1.0 - self.excess() as f64 / baseline_excess as f64)
    }
}

pub fn fragmentation_report(pred: &Partition, gold: &Partition) -> FragmentationReport {
    FragmentationReport::from_counts(pred.cluster_count(), gold.cluster_count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fragmentation_examples() {
        let r = FragmentationReport::from_counts(276, 222);
        assert_eq!(r.excess(), 54);
        let red = r.excess_reduction_vs(484).unwrap();
        assert_eq!(red, 1.0 - 54.0 / 262.0);
        assert_eq!(format!("{:.1}", red * 100.0), "79.4");
        assert_eq!(FragmentationReport::from_counts(10, 10).excess(), 0);
        assert_eq!(FragmentationReport::from_counts(222, 222).excess_reduction_vs(222), None);
    }

    #[test]
    fn report_round_trip() {
        let pred = Partition::from_pairs([("a", "1"), ("b", "1"), ("c", "2")]).unwrap();
        let gold = Partition::from_pairs([("a", "x"), ("b", "y"), ("c", "y")]).unwrap();
        let r = evaluate(&pred, &gold, &MetricKind::ALL).unwrap();
        let text = r.to_string();
        assert_eq!(text.lines().count(), MetricKind::ALL.len() + 2);
        let back: MetricsReport = text.parse().unwrap();
        assert_eq!(back.entries.len(), r.entries.len());
        for (a, b) in r.entries.iter().zip(&back.entries) {
            assert_eq!(a.name, b.name);
            let close = |x: f64, y: f64| (x - y).abs() <= 5e-7;
            match (a.value, b.value) {
                (ReportValue::Prf(x), ReportValue::Prf(y)) => {
                    assert!(close(x.precision, y.precision) && close(x.recall, y.recall) && close(x.f1, y.f1))
                }
                (ReportValue::Scalar(x), ReportValue::Scalar(y)) => assert!(close(x, y)),
                _ => panic!("kind changed"),
            }
        }
    }

    #[test]
    fn identical_report_is_perfect() {
        let p = Partition::from_pairs([("a", "1"), ("b", "1"), ("c", "2")]).unwrap();
        let r = evaluate(&p, &p, &MetricKind::ALL).unwrap();
        for k in MetricKind::ALL {
            assert_eq!(r.score(k.name()), Some(1.0), "{k}");
        }
    }

    #[test]
    fn metric_list_parsing() {
        assert_eq!(MetricKind::parse_list("bcubed, ceaf-e").unwrap(), vec![MetricKind::BCubed, MetricKind::CeafE]);
        assert_eq!(MetricKind::parse_list("all,bcubed").unwrap().len(), 10);
        assert!(MetricKind::parse_list("nope").is_err());
    }
}
