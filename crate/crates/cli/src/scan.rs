//! Per-marker test reports and the scan TSV.

use crate::counts::MarkerCounts;
use crate::error::CliResult;
use allele_assoc::{AlleleCounts, ContinuityDirection, TestReport};
use rayon::prelude::*;
use std::io::Write;

pub const COLUMNS: [&str; 16] = [
    "marker_id",
    "q_hat_ctrl",
    "q_hat_case",
    "T",
    "p_T",
    "W",
    "p_W",
    "W_cor",
    "U",
    "p_U",
    "Q_hat",
    "effect_ratio",
    "ci_lo",
    "ci_hi",
    "flags",
    "abs_W_rank",
];

pub const LOCALITY_NOTE: &str =
    "note: p-values rank markers only locally; compare markers within a \
region of linkage disequilibrium with the causal variant, not across the genome";

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub marker_id: String,
    pub counts: AlleleCounts,
    pub report: TestReport,
    /// Rank of `|W|` among markers where `W` is defined, 1 for the largest.
    pub abs_w_rank: Option<usize>,
}

impl ScanRow {
    pub fn flags(&self) -> String {
        let mut flags = Vec::new();
        if self.report.monomorphic {
            flags.push("monomorphic");
        }
        if self.report.degenerate {
            flags.push("degenerate");
        }
        if self.report.q_hat.is_some_and(|q| q > 1.0) {
            flags.push("u_uses_t");
        }
        if flags.is_empty() {
            ".".into()
        } else {
            flags.join(",")
        }
    }
}

/// Reports for every marker, in input order.
pub fn scan(
    markers: &[MarkerCounts],
    pi_hat: f64,
    ci_level: f64,
    direction: ContinuityDirection,
) -> CliResult<Vec<ScanRow>> {
    let mut rows = markers
        .par_iter()
        .map(|m| {
            Ok(ScanRow {
                marker_id: m.marker_id.clone(),
                counts: m.counts,
                report: TestReport::new(&m.counts, pi_hat, ci_level, direction)?,
                abs_w_rank: None,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut order: Vec<(usize, f64)> = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.report.w_stat.map(|w| (i, w.abs())))
        .collect();
    // stable sort keeps input order among ties
    order.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (rank, (i, _)) in order.into_iter().enumerate() {
        rows[i].abs_w_rank = Some(rank + 1);
    }
    Ok(rows)
}

/// Lossless decimal rendering: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn write_tsv<W: Write + ?Sized>(out: &mut W, rows: &[ScanRow]) -> CliResult<()> {
    writeln!(out, "{}", COLUMNS.join("\t"))?;
    for row in rows {
        let r = &row.report;
        // monomorphic rows carry no statistics at all, degenerate ones keep p = 1
        let p = |v: f64| if r.monomorphic { String::new() } else { num(v) };
        let effect = r.effect.as_ref();
        let fields = [
            row.marker_id.clone(),
            num(r.q_hat_ctrl),
            num(r.q_hat_case),
            opt(r.t_stat),
            p(r.p_t),
            opt(r.w_stat),
            p(r.p_w),
            opt(r.w_cor_stat),
            opt(r.u_stat),
            p(r.p_u),
            opt(r.q_hat),
            opt(effect.map(|e| e.ratio)),
            opt(effect.map(|e| e.lo)),
            opt(effect.map(|e| e.hi)),
            row.flags(),
            row.abs_w_rank.map(|k| k.to_string()).unwrap_or_default(),
        ];
        writeln!(out, "{}", fields.join("\t"))?;
    }
    Ok(())
}
