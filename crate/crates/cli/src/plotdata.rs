//! Plot-description artifacts: plain JSON naming the axes and series of a
//! figure, consumable by any plotting tool. Nothing here renders — the CSV
//! stays the data of record, these files just say how to look at it.

use serde::Serialize;
use wbslope_core::alignment::SweepPoint;
use wbslope_core::two_user::Fig2Row;

#[derive(Debug, Serialize)]
pub struct PlotData {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

#[derive(Debug, Serialize)]
pub struct Series {
    pub name: String,
    pub kind: SeriesKind,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    Line,
    Scatter,
}

impl PlotData {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("plot data serializes");
        text.push('\n');
        text
    }
}

/// Inner/outer bound curves over the cross-gain grid, with the points where
/// the bounds provably meet marked separately.
pub fn two_user_bounds(rows: &[Fig2Row]) -> PlotData {
    let a: Vec<f64> = rows.iter().map(|r| r.a).collect();
    let mut series = vec![
        Series {
            name: "best scheme".into(),
            kind: SeriesKind::Line,
            x: a.clone(),
            y: rows.iter().map(|r| r.inner_s0).collect(),
        },
        Series {
            name: "outer bound".into(),
            kind: SeriesKind::Line,
            x: a,
            y: rows.iter().map(|r| r.outer_s0).collect(),
        },
    ];
    let exact: Vec<&Fig2Row> = rows.iter().filter(|r| r.exact).collect();
    series.push(Series {
        name: "bounds meet".into(),
        kind: SeriesKind::Scatter,
        x: exact.iter().map(|r| r.a).collect(),
        y: exact.iter().map(|r| r.inner_s0).collect(),
    });
    PlotData {
        title: "Two-user sum slope vs cross gain".into(),
        x_label: "cross power gain a".into(),
        y_label: "sum slope S0".into(),
        series,
    }
}

/// Spectral efficiency against energy per bit over a bandwidth sweep.
pub fn bandwidth_sweep(points: &[SweepPoint]) -> PlotData {
    PlotData {
        title: "Spectral efficiency over a bandwidth sweep".into(),
        x_label: "Eb/N0 (dB)".into(),
        y_label: "sum spectral efficiency (bits/s/Hz)".into(),
        series: vec![Series {
            name: "bandwidth grid".into(),
            kind: SeriesKind::Scatter,
            x: points.iter().map(|p| p.ebno_db).collect(),
            y: points.iter().map(|p| p.spectral_efficiency).collect(),
        }],
    }
}

/// Aligned-bandwidth operating points plus the first-order line implied by
/// the measured slope: efficiency ≈ s0·(Eb/N0 − floor)/(3 dB per doubling).
pub fn peak_points(
    points: &[(f64, f64)],
    ebno_min_db: f64,
    measured_slope: Option<f64>,
) -> PlotData {
    let mut series = vec![Series {
        name: "aligned bandwidths".into(),
        kind: SeriesKind::Scatter,
        x: points.iter().map(|p| p.0).collect(),
        y: points.iter().map(|p| p.1).collect(),
    }];
    if let Some(s0) = measured_slope {
        let three_db = 10.0 * 2.0f64.log10();
        let x_end = points
            .iter()
            .map(|p| p.0)
            .fold(ebno_min_db, f64::max);
        series.push(Series {
            name: "first-order slope".into(),
            kind: SeriesKind::Line,
            x: vec![ebno_min_db, x_end],
            y: vec![0.0, s0 * (x_end - ebno_min_db) / three_db],
        });
    }
    PlotData {
        title: "Aligned operating points and first-order growth".into(),
        x_label: "Eb/N0 (dB)".into(),
        y_label: "sum spectral efficiency (bits/s/Hz)".into(),
        series,
    }
}
