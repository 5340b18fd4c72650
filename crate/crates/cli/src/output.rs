//! Output records and CSV renderers for the report tables.

use std::fmt::Write as _;

use oss_core::sim::{AnalyticKind, CompareRow, FblRow, GainRow, GainSource};
use oss_core::{CodeSpec, DecodeResult, LayerPlacement, MessageBits};
use serde::Serialize;

#[derive(Serialize)]
pub struct EncodeOutput<'a> {
    pub bits: &'a MessageBits,
    pub hex: String,
    pub placements: Vec<LayerPlacement>,
    pub samples: Vec<f64>,
}

#[derive(Serialize)]
pub struct DecodeOutput<'a> {
    pub hex: String,
    #[serde(flatten)]
    pub result: &'a DecodeResult,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut out =
        String::from("ebn0_db,trials,errors,mc_bler,ci_low,ci_high,analytic_value,kind,covered\n");
    for r in rows {
        let kind = match r.kind {
            AnalyticKind::Exact => "exact",
            AnalyticKind::UpperBound => "upper_bound",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.ebn0_db,
            r.trials,
            r.errors,
            r.mc_bler,
            r.ci_low,
            r.ci_high,
            r.analytic_value,
            kind,
            r.covered
        );
    }
    out
}

pub fn gains_csv(rows: &[GainRow]) -> String {
    let mut out = String::from(
        "code,source,nominal_gain_db,effective_gain_db,d_min_sq,nearest_neighbors_per_bit\n",
    );
    for r in rows {
        let source = match r.source {
            GainSource::Computed => "computed",
            GainSource::Cited => "cited",
        };
        let _ = writeln!(
            out,
            "\"{}\",{},{},{},{},{}",
            r.code,
            source,
            r.nominal_gain_db,
            r.effective_gain_db,
            opt(r.d_min_sq),
            opt(r.nearest_neighbors_per_bit)
        );
    }
    out
}

/// Compact code description, e.g. `K=1 A=[1] | K=1 A=[-1]`.
fn describe(spec: &CodeSpec) -> String {
    spec.layers
        .iter()
        .map(|l| {
            let a: Vec<String> = l.alphabet.iter().map(|v| v.to_string()).collect();
            format!("K={} A=[{}]", l.k, a.join(" "))
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

pub fn fbl_csv(rows: &[FblRow]) -> String {
    let mut out = String::from("n,capacity,normal_approx_rate,oss_rate,oss_bler,oss_code\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},\"{}\"",
            r.n,
            r.capacity,
            r.normal_approx_rate,
            opt(r.oss_rate),
            opt(r.oss_bler),
            r.oss_code.as_ref().map(describe).unwrap_or_default()
        );
    }
    out
}
