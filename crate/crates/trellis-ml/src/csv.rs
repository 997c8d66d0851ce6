//! CSV rendering of sweep results.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::experiments::{Cell, SweepResult};

pub const HEADER: &str = "decoder,snr,N,trials,mean_visited_per_t,std_visited_per_t,ml_match_rate,sub_symbol_err,opt_m_rate,sll_accept_rate,seed";

/// Fixed-point decimal with nine significant digits.
pub fn format_sig9(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0.00000000".into();
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = (8 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding may have carried into a new leading digit
    let digits = s.chars().filter(|c| c.is_ascii_digit()).skip_while(|&c| c == '0').count();
    if digits > 9 && decimals > 0 {
        let decimals = decimals - 1;
        format!("{v:.decimals$}")
    } else {
        s
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_sig9).unwrap_or_default()
}

fn row(cell: &Cell, seed: u64) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        cell.decoder,
        format_sig9(cell.snr),
        cell.len,
        cell.trials,
        opt(cell.mean_visited()),
        opt(cell.std_visited()),
        opt(cell.ml_match_rate()),
        opt(cell.sub_symbol_err()),
        opt(cell.opt_m_rate()),
        opt(cell.sll_accept_rate()),
        seed
    )
}

/// Header plus one row per cell, sorted by `(decoder, snr, N)`.
pub fn render(result: &SweepResult) -> String {
    let mut cells: Vec<&Cell> = result.cells.iter().collect();
    cells.sort_by(|a, b| {
        a.decoder
            .cmp(&b.decoder)
            .then(a.snr.total_cmp(&b.snr))
            .then(a.len.cmp(&b.len))
    });
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for cell in cells {
        let _ = writeln!(out, "{}", row(cell, result.seed));
    }
    out
}

pub fn write_csv(result: &SweepResult, path: &Path) -> io::Result<()> {
    std::fs::write(path, render(result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::SweepKind;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sig9(0.5), "0.500000000");
        assert_eq!(format_sig9(8.0), "8.00000000");
        assert_eq!(format_sig9(1234.5), "1234.50000");
        assert_eq!(format_sig9(256.0), "256.000000");
        assert_eq!(format_sig9(9.9999999999), "10.0000000");
        assert_eq!(format_sig9(1e-3), "0.00100000000");
        assert_eq!(format_sig9(-2.0), "-2.00000000");
        assert_eq!(format_sig9(1e12), "1000000000000");
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let res = SweepResult { kind: SweepKind::Complexity, seed: 1, cells: vec![] };
        assert_eq!(render(&res), format!("{HEADER}\n"));
    }

    #[test]
    fn rows_are_sorted_and_absent_fields_empty() {
        let mk = |d: &str, snr: f64, len: usize| Cell {
            decoder: d.into(),
            snr,
            len,
            trials: 2,
            visited: vec![1.0, 3.0],
            ml_matches: None,
            sub_symbol_errors: None,
            opt_m: Some((1, 2)),
            sll_accept: None,
            ratio_to_viterbi: vec![],
        };
        let res = SweepResult {
            kind: SweepKind::OptProbability,
            seed: 9,
            cells: vec![mk("viterbi", 4.0, 8), mk("three-step", 16.0, 8), mk("three-step", 4.0, 16), mk("three-step", 4.0, 8)],
        };
        let text = render(&res);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1], "three-step,4.00000000,8,2,2.00000000,1.41421356,,,0.500000000,,9");
        assert!(lines[2].starts_with("three-step,4.00000000,16,"));
        assert!(lines[3].starts_with("three-step,16.0000000,8,"));
        assert!(lines[4].starts_with("viterbi,"));
    }
}
