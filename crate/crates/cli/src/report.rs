//! Analysis reports for one pair of settings, from a state or from counts.

use anyhow::Result;
use bellpovm::{
    aggregate_b, b_value, bell_expectation, joint_distribution, joint_visibilities, pbflip_outcome, pbflip_uniform,
    probabilities_from_counts, CountTable, Outcome, Side, TwoQubitState, VisibilityEstimate, VisibilityPair,
    CIRELSON_BOUND,
};
use serde::{Deserialize, Serialize};

/// A value and, when it was estimated from counts, its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_err: Option<f64>,
}

impl Estimate {
    fn exact(value: f64) -> Self {
        Estimate { value, std_err: None }
    }

    fn measured(value: f64, std_err: f64) -> Self {
        Estimate { value, std_err: Some(std_err) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRow {
    pub outcome: Outcome,
    pub b: i32,
    pub probability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_err: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<u64>,
    pub p_bflip: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub p_plus: Estimate,
    pub p_minus: Estimate,
    pub mean_b: Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideVisibilities {
    pub a: VisibilityEstimate,
    pub b: VisibilityEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// `state:<spec>` or `counts:<path>`.
    pub source: String,
    pub theta_a: f64,
    pub theta_b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_counts: Option<u64>,
    pub outcomes: Vec<OutcomeRow>,
    pub aggregates: Aggregates,
    /// Visibilities implied by the trade-off angles.
    pub visibilities: SideVisibilities,
    /// Visibilities measured by remote state preparation on the simulated state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remote_visibilities: Option<SideVisibilities>,
    /// ⟨B̂⟩ used for the outcome-independent flip probability.
    pub bell_expectation: f64,
    /// Undefined when ⟨B̂⟩ = 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_bflip_uniform: Option<Estimate>,
}

fn nominal(theta_a: f64, theta_b: f64) -> (VisibilityPair, VisibilityPair, SideVisibilities) {
    let (va, vb) = (VisibilityPair::from_theta(theta_a), VisibilityPair::from_theta(theta_b));
    let vis = SideVisibilities { a: VisibilityEstimate::new(va.vx, va.vy), b: VisibilityEstimate::new(vb.vx, vb.vy) };
    (va, vb, vis)
}

/// Exact report for a state measured at (θ_A, θ_B).
pub fn state_report(source: String, state: &TwoQubitState, theta_a: f64, theta_b: f64) -> Result<Report> {
    let dist = joint_distribution(state, theta_a, theta_b);
    let (va, vb, vis) = nominal(theta_a, theta_b);
    let outcomes = Outcome::all()
        .map(|o| {
            Ok(OutcomeRow {
                outcome: o,
                b: b_value(o),
                probability: dist.p(o),
                std_err: None,
                counts: None,
                p_bflip: pbflip_outcome(o, va, vb)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let agg = aggregate_b(&dist);
    let remote = match (joint_visibilities(state, theta_a, Side::A), joint_visibilities(state, theta_b, Side::B)) {
        (Ok(a), Ok(b)) => Some(SideVisibilities { a, b }),
        _ => None,
    };
    let bell = bell_expectation(state);
    let pbf = pbflip_uniform(agg.mean_b, bell).ok().map(Estimate::exact);
    Ok(Report {
        source,
        theta_a,
        theta_b,
        total_counts: None,
        outcomes,
        aggregates: Aggregates {
            p_plus: Estimate::exact(agg.p_plus),
            p_minus: Estimate::exact(agg.p_minus),
            mean_b: Estimate::exact(agg.mean_b),
        },
        visibilities: vis,
        remote_visibilities: remote,
        bell_expectation: bell,
        p_bflip_uniform: pbf,
    })
}

/// Report from measured counts. Outcome errors are Poisson (√N/ΣN); the
/// b-split errors treat the total as fixed, σ(P) = √(P(1−P)/ΣN).
pub fn counts_report(source: String, table: &CountTable, theta_a: f64, theta_b: f64, bell: f64) -> Result<Report> {
    let est = probabilities_from_counts(table)?;
    let (va, vb, vis) = nominal(theta_a, theta_b);
    let outcomes = Outcome::all()
        .map(|o| {
            Ok(OutcomeRow {
                outcome: o,
                b: b_value(o),
                probability: est.dist.p(o),
                std_err: Some(est.std_err[o.index()]),
                counts: Some(table.get(o)),
                p_bflip: pbflip_outcome(o, va, vb)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let agg = aggregate_b(&est.dist);
    let t = est.total as f64;
    let se_p = (agg.p_plus * agg.p_minus / t).sqrt();
    let se_b = 4.0 * se_p;
    let pbf = pbflip_uniform(agg.mean_b, bell)?;
    Ok(Report {
        source,
        theta_a,
        theta_b,
        total_counts: Some(est.total),
        outcomes,
        aggregates: Aggregates {
            p_plus: Estimate::measured(agg.p_plus, se_p),
            p_minus: Estimate::measured(agg.p_minus, se_p),
            mean_b: Estimate::measured(agg.mean_b, se_b),
        },
        visibilities: vis,
        remote_visibilities: None,
        bell_expectation: bell,
        p_bflip_uniform: Some(Estimate::measured(pbf, se_b / (2.0 * bell.abs()))),
    })
}

/// ⟨B̂⟩ assumed when analyzing counts without a state: the Cirel'son bound.
pub const DEFAULT_BELL: f64 = -CIRELSON_BOUND;

pub fn report_csv(report: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["outcome", "b", "probability", "std_err", "counts", "p_bflip"])?;
    for r in &report.outcomes {
        w.write_record([
            r.outcome.to_string(),
            r.b.to_string(),
            r.probability.to_string(),
            r.std_err.map(|v| v.to_string()).unwrap_or_default(),
            r.counts.map(|v| v.to_string()).unwrap_or_default(),
            r.p_bflip.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
