//! Families of sources run through the solver.

use rayon::prelude::*;
use serde::Serialize;

use super::lab::Lab;
use super::quotient::{observability_quotient, QuotientRecord, SourcePlan};
use super::ExperimentError;
use crate::sgcc::SgccVerdict;
use crate::sources::TimeProfile;

/// Calibrated non-degeneration threshold on `min Q / median Q`.
pub const ADMISSIBLE_RATIO_THRESHOLD: f64 = 0.1;
/// Largest relative change of a quotient under one refinement.
pub const REFINEMENT_TOLERANCE: f64 = 0.1;
/// Largest `last / first` trace ratio accepted as decay.
pub const DECAY_THRESHOLD: f64 = 0.25;

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibleRow {
    pub profile: TimeProfile,
    pub record: QuotientRecord,
    pub refined_quotient: Option<f64>,
    /// `|Q_refined / Q - 1|`.
    pub refinement_change: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AdmissibleSummary {
    pub count: usize,
    pub empty: bool,
    pub min_quotient: Option<f64>,
    pub median_quotient: Option<f64>,
    pub min_over_median: Option<f64>,
    pub max_refinement_change: Option<f64>,
    pub non_degenerate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibleTable {
    pub rows: Vec<AdmissibleRow>,
    pub summary: AdmissibleSummary,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn admissible_row(lab: &Lab, profile: &TimeProfile, refine: bool) -> Result<AdmissibleRow, ExperimentError> {
    let plan = SourcePlan::Admissible(profile.clone());
    let solver = plan.solver(lab, false)?;
    let g = plan.build(lab, &solver)?;
    let record = observability_quotient(lab, &solver, &g)?;
    let mut row = AdmissibleRow {
        profile: profile.clone(),
        record,
        refined_quotient: None,
        refinement_change: None,
    };
    if refine {
        let fine = plan.solver(lab, true)?;
        let g = plan.build(lab, &fine)?;
        let q = observability_quotient(lab, &fine, &g)?.quotient;
        row.refined_quotient = q;
        if let (Some(a), Some(b)) = (row.record.quotient, q) {
            row.refinement_change = Some((b / a - 1.0).abs());
        }
    }
    Ok(row)
}

/// Quotients of a family of time-only admissible sources. Requires a
/// verified SGCC verdict for the same scenario.
pub fn admissible_sweep(
    lab: &Lab,
    verdict: &SgccVerdict,
    profiles: &[TimeProfile],
) -> Result<AdmissibleTable, ExperimentError> {
    if !verdict.is_verified() {
        return Err(ExperimentError::Precondition(format!(
            "admissible sweep needs a verified SGCC verdict, got {:?}",
            verdict.status
        )));
    }
    let refine = lab.scenario.source.admissible.refine;
    let mut rows = profiles
        .par_iter()
        .map(|p| admissible_row(lab, p, refine))
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| {
        let key = |r: &AdmissibleRow| (r.profile.dominant_tau(), r.profile.support().0);
        key(a).partial_cmp(&key(b)).unwrap()
    });
    let mut qs: Vec<f64> = rows.iter().filter_map(|r| r.record.quotient).collect();
    qs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut summary = AdmissibleSummary {
        count: rows.len(),
        empty: qs.is_empty(),
        ..Default::default()
    };
    if !qs.is_empty() {
        let (min, med) = (qs[0], median(&qs));
        summary.min_quotient = Some(min);
        summary.median_quotient = Some(med);
        summary.min_over_median = Some(min / med);
        summary.non_degenerate = min > 0.0 && min / med >= ADMISSIBLE_RATIO_THRESHOLD;
    }
    summary.max_refinement_change = rows.iter().filter_map(|r| r.refinement_change).reduce(f64::max);
    Ok(AdmissibleTable { rows, summary })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub k: f64,
    /// Member index of glancing sequences.
    pub j: Option<u32>,
    /// Norm used for the normalization (1 by construction).
    pub norm: f64,
    pub trace: f64,
    pub quotient: f64,
    pub cells: [usize; 2],
    pub in_cone_fraction: f64,
    pub glancing_distance: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
    /// `None` with fewer than two rows.
    pub strictly_decreasing: Option<bool>,
    pub last_over_first: Option<f64>,
    pub decay_confirmed: bool,
    /// Rows that could not be computed, with the reason.
    pub failures: Vec<String>,
}

fn decay_row(lab: &Lab, plan: &SourcePlan) -> Result<DecayRow, ExperimentError> {
    let solver = plan.solver(lab, false)?;
    let g = plan.build(lab, &solver)?;
    lab.resolution_gate(&solver, &g.meta)?;
    let exponent = g
        .meta
        .diagnostics
        .get("exponent")
        .copied()
        .unwrap_or(lab.scenario.source.invisible.exponent);
    let norm = lab.norm(&g, exponent)?;
    let rec = lab.run(&solver, &g, Vec::new())?;
    let trace = rec.trace_l2_window(0.0, lab.horizon());
    let (k, j) = match *plan {
        SourcePlan::Invisible { k } => (k, None),
        SourcePlan::Glancing { j, k } => (k, Some(j)),
        SourcePlan::Admissible(_) => unreachable!("decay rows use oscillatory families"),
    };
    Ok(DecayRow {
        k,
        j,
        norm,
        trace,
        quotient: trace / norm,
        cells: solver.cells(),
        in_cone_fraction: g.meta.diagnostics.get("in_cone_fraction").copied().unwrap_or(f64::NAN),
        glancing_distance: g.meta.diagnostics.get("glancing_distance").copied(),
    })
}

fn decay_table(lab: &Lab, plans: Vec<SourcePlan>) -> DecayTable {
    let results: Vec<_> = plans.par_iter().map(|p| (p, decay_row(lab, p))).collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (plan, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(format!("{plan:?}: {e}")),
        }
    }
    let strictly_decreasing = (rows.len() >= 2).then(|| rows.windows(2).all(|w| w[1].trace < w[0].trace));
    let last_over_first = (rows.len() >= 2).then(|| rows[rows.len() - 1].trace / rows[0].trace);
    let decay_confirmed = failures.is_empty()
        && strictly_decreasing == Some(true)
        && last_over_first.is_some_and(|r| r <= DECAY_THRESHOLD);
    DecayTable {
        rows,
        strictly_decreasing,
        last_over_first,
        decay_confirmed,
        failures,
    }
}

/// Elliptic-cone sources at increasing frequency `k`, each on a grid that
/// passes the resolution gate.
pub fn invisibility_sweep(lab: &Lab, ks: &[f64]) -> DecayTable {
    decay_table(lab, ks.iter().map(|&k| SourcePlan::Invisible { k }).collect())
}

/// Sources approaching the glancing set, `(j, k)` per member.
pub fn glancing_sweep(lab: &Lab, members: &[(u32, f64)]) -> DecayTable {
    decay_table(
        lab,
        members.iter().map(|&(j, k)| SourcePlan::Glancing { j, k }).collect(),
    )
}
