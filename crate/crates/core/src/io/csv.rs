//! CSV tables for rate-distortion points and analysis results.

use std::fmt::Write;

use super::IoError;
use crate::analysis::{GridReport, IsiStats, StateTrace};
use crate::eval::RdPoint;

pub const RD_CSV_HEADER: &str = "quality,bpp,psnr_scene,psnr_isi,psnr_fr";

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:.6}"))
}

/// One row per point; absent PSNRs are empty fields.
pub fn rd_csv(points: &[RdPoint]) -> String {
    let mut out = format!("{RD_CSV_HEADER}\n");
    for p in points {
        writeln!(
            out,
            "{},{:.6},{},{},{}",
            p.quality,
            p.bpp,
            opt(p.psnr_scene),
            opt(p.psnr_isi),
            opt(p.psnr_fr)
        )
        .expect("write to String");
    }
    out
}

pub fn parse_rd_csv(text: &str) -> Result<Vec<RdPoint>, IoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == RD_CSV_HEADER => {}
        Some((i, _)) => {
            return Err(IoError::Csv {
                line: i + 1,
                message: format!("expected header `{RD_CSV_HEADER}`"),
            })
        }
        None => {
            return Err(IoError::Csv {
                line: 1,
                message: "empty file".into(),
            })
        }
    }
    lines
        .map(|(i, line)| {
            let err = |message: String| IoError::Csv {
                line: i + 1,
                message,
            };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(err(format!("{} fields, expected 5", fields.len())));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| err(format!("`{s}` is not a number")))
            };
            let opt_num = |s: &str| {
                if s.is_empty() {
                    Ok(None)
                } else {
                    num(s).map(Some)
                }
            };
            Ok(RdPoint {
                quality: fields[0]
                    .parse()
                    .map_err(|_| err(format!("`{}` is not a quality", fields[0])))?,
                bpp: num(fields[1])?,
                psnr_scene: opt_num(fields[2])?,
                psnr_isi: opt_num(fields[3])?,
                psnr_fr: opt_num(fields[4])?,
            })
        })
        .collect()
}

pub fn grid_report_csv(reports: &[GridReport]) -> String {
    let mut out = String::from(
        "representation,normalization,radius,value_bins,cond_bins,variance,conditional_entropy,entropy,entropy_comparable\n",
    );
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{:.6},{:.6},{:.6},{}",
            r.kind.as_str(),
            r.normalization,
            r.radius,
            r.value_bins,
            r.cond_bins,
            r.variance,
            r.conditional_entropy,
            r.entropy,
            r.entropy_comparable()
        )
        .expect("write to String");
    }
    out
}

pub fn isi_stats_csv(stats: &IsiStats) -> String {
    let mut out = String::from("isi,count\n");
    for (v, c) in &stats.histogram {
        writeln!(out, "{v},{c}").expect("write to String");
    }
    out
}

/// Long format: one row per (initial state, frame).
pub fn initial_state_csv(traces: &[StateTrace]) -> String {
    let mut out = String::from("tau0,frame,hidden,fired,isi\n");
    for t in traces {
        for (n, ((h, f), isi)) in t.hidden.iter().zip(&t.fired).zip(&t.isi).enumerate() {
            writeln!(out, "{:.6},{n},{h:.6},{},{isi}", t.tau0, *f as u8).expect("write to String");
        }
    }
    out
}
