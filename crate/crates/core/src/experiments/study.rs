//! End-to-end study: concavity, SGCC, admissible and invisible sweeps, and
//! one report tying the verdicts together.

use serde::Serialize;

use super::lab::{content_hash, Lab};
use super::sweeps::{
    admissible_sweep, glancing_sweep, invisibility_sweep, AdmissibleTable, DecayTable, ADMISSIBLE_RATIO_THRESHOLD,
    DECAY_THRESHOLD,
};
use super::{ExperimentError, Scenario};
use crate::geometry::{check_concavity, ConcavityReport, ConcavityVerdict};
use crate::sgcc::{SampleOrigin, SampleOutcome, SgccStatus, SgccVerdict};

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub origin: SampleOrigin,
    pub outcome: SampleOutcome,
    pub touched_source_first: bool,
    pub path_samples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SgccSummary {
    pub status: SgccStatus,
    pub t0_observed: Option<f64>,
    pub time_cap: f64,
    pub samples: usize,
    pub violations: usize,
    pub flagged: usize,
    pub inconclusive: usize,
    pub sampling: String,
    pub certificate: Option<Certificate>,
    pub warnings: Vec<String>,
}

impl From<&SgccVerdict> for SgccSummary {
    fn from(v: &SgccVerdict) -> Self {
        SgccSummary {
            status: v.status,
            t0_observed: v.t0_observed,
            time_cap: v.time_cap,
            samples: v.samples,
            violations: v.violations.len(),
            flagged: v.flagged,
            inconclusive: v.inconclusive,
            sampling: v.sampling.clone(),
            certificate: v.violations.first().map(|s| Certificate {
                origin: s.origin,
                outcome: s.outcome.clone(),
                touched_source_first: s.touched_source_first,
                path_samples: s.path.as_ref().map_or(0, |p| p.samples.len()),
            }),
            warnings: v.warnings.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Thresholds {
    pub admissible_min_over_median: f64,
    pub decay_last_over_first: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyReport {
    pub scenario: Scenario,
    pub scenario_hash: String,
    pub concavity: Option<ConcavityReport>,
    pub sgcc: Option<SgccSummary>,
    pub admissible: Option<AdmissibleTable>,
    pub invisible: Option<DecayTable>,
    pub glancing: Option<DecayTable>,
    pub thresholds: Thresholds,
    /// Statements supported by this run.
    pub claims: Vec<String>,
    /// Steps that failed or were skipped, with the reason.
    pub partial: Vec<String>,
    /// All geometric and quantitative conditions hold.
    pub positive: bool,
    /// Hex SHA-256 of this report with an empty hash field.
    pub report_hash: String,
}

impl StudyReport {
    fn seal(mut self) -> Self {
        self.report_hash.clear();
        self.report_hash = content_hash(&self);
        self
    }

    pub fn summary(&self) -> String {
        let mut out = format!("scenario {} ({})\n", self.scenario.name, &self.scenario_hash[..12]);
        if let Some(c) = &self.concavity {
            out += &format!(
                "concavity of the source arc: {:?} (min margin {:.4})\n",
                c.verdict, c.min_margin
            );
        }
        if let Some(s) = &self.sgcc {
            out += &format!("SGCC: {:?}", s.status);
            if let Some(t) = s.t0_observed {
                out += &format!(", T0 observed {t:.6}");
            }
            out += &format!(", {} samples, {} violations\n", s.samples, s.violations);
        }
        if let Some(a) = &self.admissible {
            let s = &a.summary;
            out += &format!(
                "admissible sweep: {} sources, min Q {}, min/median {}\n",
                s.count,
                fmt_opt(s.min_quotient),
                fmt_opt(s.min_over_median)
            );
        }
        for (name, t) in [("invisible", &self.invisible), ("glancing", &self.glancing)] {
            if let Some(t) = t {
                out += &format!("{name} sweep: ");
                for r in &t.rows {
                    out += &format!("k={} trace={:.3e}  ", r.k, r.trace);
                }
                out += &format!("last/first {}\n", fmt_opt(t.last_over_first));
            }
        }
        for c in &self.claims {
            out += &format!("claim: {c}\n");
        }
        for p in &self.partial {
            out += &format!("partial: {p}\n");
        }
        out += &format!("positive: {}\nreport hash {}\n", self.positive, self.report_hash);
        out
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.4e}"))
}

pub fn full_study(scenario: &Scenario) -> Result<StudyReport, ExperimentError> {
    let lab = Lab::new(scenario)?;
    let tol = &scenario.tolerances;
    let mut report = StudyReport {
        scenario: scenario.clone(),
        scenario_hash: lab.hash.clone(),
        concavity: None,
        sgcc: None,
        admissible: None,
        invisible: None,
        glancing: None,
        thresholds: Thresholds {
            admissible_min_over_median: ADMISSIBLE_RATIO_THRESHOLD,
            decay_last_over_first: DECAY_THRESHOLD,
        },
        claims: Vec::new(),
        partial: Vec::new(),
        positive: false,
        report_hash: String::new(),
    };

    match check_concavity(
        &lab.domain,
        &scenario.metric,
        &lab.source,
        tol.concavity_samples,
        tol.concavity_threshold,
    ) {
        Ok(c) => report.concavity = Some(c),
        Err(e) => report.partial.push(format!("concavity: {e}")),
    }
    let concave = report
        .concavity
        .as_ref()
        .is_some_and(|c| c.verdict == ConcavityVerdict::StrictConcave);
    if concave {
        report.claims.push("source arc is strictly concave".into());
    }

    let verdict = match lab.sgcc() {
        Ok(v) => v,
        Err(e) => {
            report.partial.push(format!("sgcc: {e}"));
            return Ok(report.seal());
        }
    };
    report.sgcc = Some(SgccSummary::from(&verdict));
    if !verdict.is_verified() {
        report
            .partial
            .push(format!("sgcc {:?}: no observability claim is made", verdict.status));
        return Ok(report.seal());
    }
    report.claims.push(format!(
        "SGCC verified on samples with T0 observed {:.6} < T = {}",
        verdict.t0_observed.unwrap_or(0.0),
        scenario.times.observation
    ));

    match admissible_sweep(&lab, &verdict, &scenario.source.admissible.profiles) {
        Ok(t) => {
            if t.summary.non_degenerate {
                report
                    .claims
                    .push("admissible quotients are bounded away from zero".into());
            }
            report.admissible = Some(t);
        }
        Err(e) => report.partial.push(format!("admissible sweep: {e}")),
    }
    let inv = invisibility_sweep(&lab, &scenario.source.invisible.ks);
    if inv.decay_confirmed {
        report.claims.push("elliptic-cone sources have vanishing traces".into());
    }
    report
        .partial
        .extend(inv.failures.iter().map(|f| format!("invisible sweep: {f}")));
    report.invisible = Some(inv);
    if let Some(g) = &scenario.source.glancing {
        let t = glancing_sweep(&lab, &g.members);
        if t.strictly_decreasing == Some(true) && t.failures.is_empty() {
            report.claims.push("glancing sequences have decreasing traces".into());
        }
        report
            .partial
            .extend(t.failures.iter().map(|f| format!("glancing sweep: {f}")));
        report.glancing = Some(t);
    }
    report.positive = concave
        && report.admissible.as_ref().is_some_and(|a| a.summary.non_degenerate)
        && report.invisible.as_ref().is_some_and(|t| t.decay_confirmed)
        && report.partial.is_empty();
    Ok(report.seal())
}
