//! Rank reports as flat key-value text and as CSV rows; training history
//! and spectra CSVs; composition ledgers.

use std::fmt::Write as _;

use rankscope_core::linalg::SingularSpectrum;
use rankscope_core::network::SerialLedger;
use rankscope_core::rank::RankReport;
use rankscope_core::training::TrainHistory;

pub fn report_to_text(r: &RankReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "rankscope-report v1");
    let _ = writeln!(s, "jacobian_rank {}", r.jacobian_rank);
    let _ = writeln!(s, "rank_tolerance {}", r.rank_tolerance);
    let _ = writeln!(s, "schatten_value {}", r.schatten_value);
    let _ = writeln!(s, "norm_over_depth {}", r.norm_over_depth);
    let _ = writeln!(s, "bound_slack {}", r.bound_slack);
    let _ = writeln!(s, "bottleneck_layer {}", r.bottleneck_layer);
    let _ = writeln!(s, "bottleneck_ratio {}", r.bottleneck_ratio);
    let _ = writeln!(s, "probe_count {}", r.probe_count);
    let residuals: Vec<String> =
        r.balancedness_residuals.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(s, "balancedness_residuals {}", residuals.join(" "));
    s
}

pub const REPORT_CSV_HEADER: &str = "jacobian_rank,rank_tolerance,schatten_value,norm_over_depth,bound_slack,bottleneck_layer,bottleneck_ratio,max_balancedness_residual,probe_count";

pub fn report_to_csv_row(r: &RankReport) -> String {
    let max_residual = r.balancedness_residuals.iter().copied().fold(0.0_f64, f64::max);
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.jacobian_rank,
        r.rank_tolerance,
        r.schatten_value,
        r.norm_over_depth,
        r.bound_slack,
        r.bottleneck_layer,
        r.bottleneck_ratio,
        max_residual,
        r.probe_count
    )
}

pub fn report_to_csv(r: &RankReport) -> String {
    format!("{REPORT_CSV_HEADER}\n{}\n", report_to_csv_row(r))
}

/// `step,total,data,norm_over_L`, one row per optimizer step.
pub fn history_to_csv(h: &TrainHistory) -> String {
    let mut s = String::from("step,total,data,norm_over_L\n");
    for i in 0..h.len() {
        let _ = writeln!(s, "{},{},{},{}", i, h.total[i], h.data[i], h.norm_over_depth[i]);
    }
    s
}

/// `layer,index,value` rows for a list of per-layer spectra (layers are
/// 1-based, indices 1-based).
pub fn spectra_to_csv(spectra: &[(usize, &SingularSpectrum)]) -> String {
    let mut s = String::from("layer,index,value\n");
    for (layer, spectrum) in spectra {
        for (i, v) in spectrum.values().iter().enumerate() {
            let _ = writeln!(s, "{layer},{},{v}", i + 1);
        }
    }
    s
}

/// `layer,impact` rows of the nonlinearity-impact ratio per hidden layer.
pub fn impacts_to_csv(impacts: &[f64]) -> String {
    let mut s = String::from("layer,impact\n");
    for (i, v) in impacts.iter().enumerate() {
        let _ = writeln!(s, "{},{v}", i + 1);
    }
    s
}

/// Serial-composition norm ledger; the summands add to the total exactly.
pub fn ledger_to_text(l: &SerialLedger) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "rankscope-ledger v1");
    let _ = writeln!(s, "g_norm {}", l.g_norm);
    let _ = writeln!(s, "identity_cost {}", l.identity_cost);
    let _ = writeln!(s, "h_norm {}", l.h_norm);
    let _ = writeln!(s, "shift_cost {}", l.shift_cost);
    let _ = writeln!(s, "total {}", l.total);
    s
}
