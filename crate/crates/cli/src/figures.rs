//! Plot-ready data for the bar charts at fixed θ and the flip-probability
//! scatter, as CSV tables or standalone SVG.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use bellpovm::sweep::{default_thetas, minimal_fit_points, sweep, Sampling};
use bellpovm::{
    fit_bell_magnitude, minimal_outcomes, predicted_probability, FitResult, Outcome, TwoQubitState, CIRELSON_BOUND,
};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    /// Bars at θ = 45°.
    Six,
    /// Bars at θ = 0°, 20°, 40°.
    Seven,
    /// Bars at θ = 50°, 70°, 90°.
    Eight,
    /// p_obs against p_bflip with the fitted line.
    Nine,
}

impl FigureId {
    pub fn parse(n: u8) -> Result<Self> {
        Ok(match n {
            6 => FigureId::Six,
            7 => FigureId::Seven,
            8 => FigureId::Eight,
            9 => FigureId::Nine,
            _ => bail!("unknown figure {n}; expected 6, 7, 8 or 9"),
        })
    }

    pub fn number(self) -> u8 {
        match self {
            FigureId::Six => 6,
            FigureId::Seven => 7,
            FigureId::Eight => 8,
            FigureId::Nine => 9,
        }
    }

    fn bar_thetas(self) -> &'static [f64] {
        match self {
            FigureId::Six => &[45.0],
            FigureId::Seven => &[0.0, 20.0, 40.0],
            FigureId::Eight => &[50.0, 70.0, 90.0],
            FigureId::Nine => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bar {
    pub theta: f64,
    pub outcome: Outcome,
    pub b: i32,
    pub probability: f64,
    pub expected_counts: f64,
    pub counts: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScatterPoint {
    pub theta: f64,
    pub outcome: Outcome,
    pub p_bflip: f64,
    /// Exact probability for the state.
    pub probability: f64,
    /// Sampled relative frequency.
    pub p_obs: f64,
    pub std_err: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Figure {
    Bars { id: FigureId, bars: Vec<Bar> },
    Scatter { points: Vec<ScatterPoint>, fit: FitResult },
}

/// Figure data for `state`, sampling counts with `mean_total` and `seed`.
pub fn build_figure(id: FigureId, state: &TwoQubitState, mean_total: f64, seed: u64) -> Result<Figure> {
    let sampling = Some(Sampling { mean_total, seed });
    if id == FigureId::Nine {
        let rows = sweep(state, &default_thetas(), sampling)?;
        let fit = fit_bell_magnitude(&minimal_fit_points(&rows))?;
        let low = minimal_outcomes();
        let points = rows
            .iter()
            .filter(|r| low.contains(&r.outcome))
            .map(|r| ScatterPoint {
                theta: r.theta,
                outcome: r.outcome,
                p_bflip: r.p_bflip,
                probability: r.probability,
                p_obs: r.p_obs.expect("sampled"),
                std_err: r.std_err.expect("sampled"),
            })
            .collect();
        return Ok(Figure::Scatter { points, fit });
    }
    let rows = sweep(state, id.bar_thetas(), sampling)?;
    let bars = rows
        .into_iter()
        .map(|r| Bar {
            theta: r.theta,
            outcome: r.outcome,
            b: r.b,
            probability: r.probability,
            expected_counts: r.probability * mean_total,
            counts: r.counts.expect("sampled"),
        })
        .collect();
    Ok(Figure::Bars { id, bars })
}

pub fn figure_csv(fig: &Figure) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match fig {
        Figure::Bars { bars, .. } => {
            for b in bars {
                w.serialize(b)?;
            }
        }
        Figure::Scatter { points, fit } => {
            w.write_record(["theta", "outcome", "p_bflip", "probability", "p_obs", "std_err", "fit", "cirelson_line"])?;
            for p in points {
                w.write_record([
                    p.theta.to_string(),
                    p.outcome.to_string(),
                    p.p_bflip.to_string(),
                    p.probability.to_string(),
                    p.p_obs.to_string(),
                    p.std_err.to_string(),
                    (fit.intercept + fit.slope * p.p_bflip).to_string(),
                    predicted_probability(CIRELSON_BOUND, p.p_bflip).to_string(),
                ])?;
            }
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

const W: f64 = 640.0;
const PANEL_H: f64 = 260.0;
const MARGIN: f64 = 50.0;

fn svg_open(out: &mut String, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{height}" viewBox="0 0 {W} {height}" font-family="sans-serif" font-size="10">
<title>{}</title>
<rect width="100%" height="100%" fill="white"/>"#,
        esc(title)
    );
}

fn bars_svg(id: FigureId, bars: &[Bar]) -> String {
    let thetas = id.bar_thetas();
    let height = PANEL_H * thetas.len() as f64 + 20.0;
    let mut out = String::new();
    svg_open(&mut out, height, &format!("Figure {}: coincidence counts by outcome", id.number()));
    let peak = bars.iter().map(|b| b.counts.max(1) as f64).fold(1.0, f64::max);
    let slot = (W - 2.0 * MARGIN) / 16.0;
    for (k, &theta) in thetas.iter().enumerate() {
        let top = 20.0 + PANEL_H * k as f64;
        let base = top + PANEL_H - MARGIN;
        let plot_h = PANEL_H - MARGIN - 20.0;
        let _ = writeln!(out, r#"<g class="panel" data-theta="{theta}">"#);
        let _ = writeln!(out, r#"<text x="{MARGIN}" y="{}" font-size="12">θ = {theta}°</text>"#, top + 10.0);
        let _ = writeln!(out, r#"<line x1="{MARGIN}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#, W - MARGIN);
        for (i, b) in bars.iter().filter(|b| b.theta == theta).enumerate() {
            let h = plot_h * b.counts as f64 / peak;
            let x = MARGIN + slot * i as f64 + 2.0;
            let fill = if b.b > 0 { "#4477aa" } else { "#cc6677" };
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{:.2}" width="{:.2}" height="{h:.2}" fill="{fill}"><title>{} {}</title></rect>"#,
                base - h,
                slot - 4.0,
                esc(&b.outcome.to_string()),
                b.counts
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" transform="rotate(60 {:.2} {:.2})">{}</text>"#,
                x + 2.0,
                base + 8.0,
                x + 2.0,
                base + 8.0,
                esc(&b.outcome.to_string())
            );
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}

fn scatter_svg(points: &[ScatterPoint], fit: &FitResult) -> String {
    let height = 480.0;
    let mut out = String::new();
    svg_open(&mut out, height, "Figure 9: low-outcome probability against flip probability");
    let xmax = points.iter().map(|p| p.p_bflip).fold(0.0, f64::max).max(0.3) * 1.05;
    let ymax = points.iter().map(|p| p.p_obs + p.std_err).fold(0.0, f64::max).max(1e-3) * 1.1;
    let ymin = fit.intercept.min(0.0) * 1.1;
    let sx = |x: f64| MARGIN + (W - 2.0 * MARGIN) * x / xmax;
    let sy = |y: f64| height - MARGIN - (height - 2.0 * MARGIN) * (y - ymin) / (ymax - ymin);
    let _ = writeln!(
        out,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        sx(0.0),
        sy(0.0),
        sx(xmax),
        sy(0.0)
    );
    let _ = writeln!(
        out,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        sx(0.0),
        sy(ymin),
        sx(0.0),
        sy(ymax)
    );
    let line = |out: &mut String, slope: f64, intercept: f64, style: &str| {
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" {style}/>"#,
            sx(0.0),
            sy(intercept),
            sx(xmax),
            sy(intercept + slope * xmax)
        );
    };
    line(&mut out, fit.slope, fit.intercept, r##"stroke="#4477aa" stroke-width="1.5""##);
    let (bs, bi) = (CIRELSON_BOUND / 16.0, predicted_probability(CIRELSON_BOUND, 0.0));
    line(&mut out, bs, bi, r##"stroke="#999999" stroke-dasharray="4 3""##);
    for p in points {
        let (x, y) = (sx(p.p_bflip), sy(p.p_obs));
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><circle cx="{x:.2}" cy="{y:.2}" r="2.5"><title>θ={} {}</title></circle>"#,
            sy(p.p_obs - p.std_err),
            sy(p.p_obs + p.std_err),
            p.theta,
            esc(&p.outcome.to_string())
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}">|⟨B⟩| = {:.4} ± {:.4}, p_int(low) = {:.5} ± {:.5}</text>"#,
        MARGIN + 10.0,
        MARGIN - 20.0,
        fit.bell_magnitude,
        fit.bell_magnitude_std_err,
        fit.p_int_low,
        fit.p_int_low_std_err
    );
    out.push_str("</svg>\n");
    out
}

pub fn figure_svg(fig: &Figure) -> String {
    match fig {
        Figure::Bars { id, bars } => bars_svg(*id, bars),
        Figure::Scatter { points, fit } => scatter_svg(points, fit),
    }
}
