//! Pass/fail bookkeeping for experiment runs.

use std::time::Duration;

use super::config::ExperimentId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// A sub-step could not produce a value (empty bins, budget exhausted);
    /// the criterion row is still listed.
    Infeasible,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Infeasible => "INFEASIBLE",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// One verdict line: a criterion, what was measured, what was required.
#[derive(Debug, Clone)]
pub struct CriterionRow {
    pub id: String,
    pub measured: String,
    pub threshold: String,
    pub status: Status,
}

impl CriterionRow {
    pub fn new(
        id: impl Into<String>,
        measured: impl Into<String>,
        threshold: impl Into<String>,
        status: Status,
    ) -> Self {
        Self {
            id: id.into(),
            measured: measured.into(),
            threshold: threshold.into(),
            status,
        }
    }
}

/// The outcome of one experiment: a row per criterion plus the runtime row.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub experiment: ExperimentId,
    pub rows: Vec<CriterionRow>,
    pub runtime: Duration,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.status == Status::Pass)
    }

    /// Plain-text table, one line per criterion.
    pub fn render(&self) -> String {
        let mut width_id = "criterion".len();
        let mut width_measured = "measured".len();
        let mut width_threshold = "threshold".len();
        for r in &self.rows {
            width_id = width_id.max(r.id.len());
            width_measured = width_measured.max(r.measured.len());
            width_threshold = width_threshold.max(r.threshold.len());
        }
        let mut out = format!(
            "{} — {} (runtime {:.2} s)\n",
            self.experiment,
            self.experiment.title(),
            self.runtime.as_secs_f64()
        );
        out.push_str(&format!(
            "  {:width_id$}  {:width_measured$}  {:width_threshold$}  status\n",
            "criterion", "measured", "threshold"
        ));
        for r in &self.rows {
            out.push_str(&format!(
                "  {:width_id$}  {:width_measured$}  {:width_threshold$}  {}\n",
                r.id,
                r.measured,
                r.threshold,
                r.status.as_str()
            ));
        }
        out.push_str(&format!(
            "  overall: {}\n",
            if self.passed() { "PASS" } else { "FAIL" }
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_passes_only_when_all_rows_pass() {
        let mut v = Verdict {
            experiment: ExperimentId::E1,
            rows: vec![CriterionRow::new("a", "1", "<2", Status::Pass)],
            runtime: Duration::from_millis(10),
        };
        assert!(v.passed());
        v.rows.push(CriterionRow::new("b", "-", "-", Status::Infeasible));
        assert!(!v.passed());
        let table = v.render();
        assert!(table.contains("INFEASIBLE"));
        assert!(table.contains("overall: FAIL"));
    }
}
