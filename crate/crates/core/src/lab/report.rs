//! Experiment reports and their CSV/JSON forms.

use std::fmt::Write as _;

use serde::Serialize;

use super::backward::BackwardRecord;
use super::holder::HolderRecord;

pub const BACKWARD_CSV_HEADER: &str = "matrix_id,seed,epsilon,norm_diff,u_dist,t_dist,ratio";
pub const HOLDER_CSV_HEADER: &str = "matrix_id,seed,epsilon,norm_diff,matched_dist,ratio_1n,ratio_1";

/// 17 significant digits, so a float survives a text round trip.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecadeSummary {
    pub epsilon: f64,
    /// `None` when every trial failed or none ran
    pub max_ratio: Option<f64>,
    pub trials: usize,
    pub failures: usize,
}

impl DecadeSummary {
    pub fn new(epsilon: f64) -> Self {
        DecadeSummary { epsilon, max_ratio: None, trials: 0, failures: 0 }
    }

    pub fn record(&mut self, ratio: f64) {
        self.max_ratio = Some(self.max_ratio.map_or(ratio, |m| m.max(ratio)));
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialFailure {
    pub epsilon: f64,
    pub seed: u64,
    pub step: usize,
    pub projection_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub matrix_id: String,
    pub seed: u64,
    pub dim: usize,
    pub rank_tol: f64,
    pub cluster_tol: f64,
    pub safety_threshold: Option<f64>,
    pub decades: Vec<f64>,
    pub records: Vec<BackwardRecord>,
    pub decade_maxima: Vec<DecadeSummary>,
    pub failures: Vec<TrialFailure>,
    pub invariant_violations: usize,
}

impl ExperimentReport {
    pub fn new(matrix_id: &str, seed: u64, dim: usize, rank_tol: f64, cluster_tol: f64) -> Self {
        ExperimentReport {
            matrix_id: matrix_id.to_string(),
            seed,
            dim,
            rank_tol,
            cluster_tol,
            safety_threshold: None,
            decades: Vec::new(),
            records: Vec::new(),
            decade_maxima: Vec::new(),
            failures: Vec::new(),
            invariant_violations: 0,
        }
    }

    pub fn pairing_failures(&self) -> usize {
        self.failures.len()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(BACKWARD_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.matrix_id,
                r.trial.seed,
                fmt_float(r.trial.epsilon),
                fmt_float(r.trial.actual_norm_diff),
                fmt_float(r.u_dist),
                fmt_float(r.t_dist),
                fmt_float(r.holder_ratio)
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// One eigenvalue Hölder measurement with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderRow {
    pub matrix_id: String,
    pub seed: u64,
    pub epsilon: f64,
    #[serde(flatten)]
    pub record: HolderRecord,
}

pub fn holder_csv(rows: &[HolderRow]) -> String {
    let mut out = String::from(HOLDER_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.matrix_id,
            r.seed,
            fmt_float(r.epsilon),
            fmt_float(r.record.norm_diff),
            fmt_float(r.record.matched_dist),
            fmt_float(r.record.ratio_1n),
            r.record.ratio_1.map(fmt_float).unwrap_or_default()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 2f64.sqrt()] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn decade_summary_tracks_max() {
        let mut d = DecadeSummary::new(1e-3);
        assert_eq!(d.max_ratio, None);
        d.record(2.0);
        d.record(1.0);
        assert_eq!(d.max_ratio, Some(2.0));
    }

    #[test]
    fn empty_csv_is_header_only() {
        let r = ExperimentReport::new("a", 1, 2, 1e-8, 1e-6);
        assert_eq!(r.to_csv(), format!("{BACKWARD_CSV_HEADER}\n"));
    }
}
