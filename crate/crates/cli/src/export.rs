//! CSV, JSON and SVG output. Every file is written to a temporary sibling and
//! renamed into place.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::experiments::RunReport;
use crate::plot;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_owned(), source }
}

/// Writes `contents` to `dir/name` atomically and returns the final path.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, &path).map_err(io_err(&path))?;
    Ok(path)
}

/// Seventeen significant digits in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// File name for `stem`, suffixed with the label when several labels share it.
fn labelled(stem: &str, label: &str, labels: usize) -> String {
    if labels > 1 {
        format!("{stem}_{label}.csv")
    } else {
        format!("{stem}.csv")
    }
}

/// Writes every CSV table the report has data for.
pub fn export_csv(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();

    let labels: BTreeSet<&str> = report.measurements.iter().map(|m| m.label.as_str()).collect();
    for label in &labels {
        let mut s = String::from("k,trace_re,trace_im,h_re,h_im\n");
        for m in report.measurements.iter().filter(|m| m.label == *label) {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                num(m.k),
                num(m.trace_re),
                num(m.trace_im),
                num(m.h_re),
                num(m.h_im)
            );
        }
        written.push(write_atomic(dir, &labelled("measurements", label, labels.len()), s.as_bytes())?);
    }

    for p in &report.profiles {
        let mut s = String::from("r,f_true,f_rec_re,f_rec_im\n");
        for ((r, t), z) in p.r.iter().zip(&p.f_true).zip(&p.f_rec) {
            let _ = writeln!(s, "{},{},{},{}", num(*r), num(*t), num(z.re), num(z.im));
        }
        let name = labelled("reconstruction", &p.label, report.profiles.len());
        written.push(write_atomic(dir, &name, s.as_bytes())?);
    }

    if report.experiment == "table1" {
        let mut s = String::from("J,eps_f1,eps_f2\n");
        for (j, e1) in report.error_series("f1") {
            let e2 = report.error("f2", j).unwrap_or(f64::NAN);
            let _ = writeln!(s, "{j},{},{}", num(e1), num(e2));
        }
        written.push(write_atomic(dir, "table1.csv", s.as_bytes())?);
    }

    if !report.eigen.is_empty() {
        let mut s = String::from("j,lambda,k_j,alpha_re,alpha_im\n");
        for e in &report.eigen {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                e.j,
                num(e.lambda),
                num(e.k_j),
                num(e.alpha_re),
                num(e.alpha_im)
            );
        }
        written.push(write_atomic(dir, "eigen.csv", s.as_bytes())?);
    }

    if !report.fields.is_empty() {
        let mut s = String::from("k,r,psi_re,psi_im\n");
        for f in &report.fields {
            for (r, z) in f.r.iter().zip(&f.values) {
                let _ = writeln!(s, "{},{},{},{}", num(f.k), num(*r), num(z.re), num(z.im));
            }
        }
        written.push(write_atomic(dir, "adjoint.csv", s.as_bytes())?);
    }
    Ok(written)
}

#[derive(Serialize)]
struct Timing<'a> {
    stage: &'a str,
    seconds: f64,
}

/// `summary.json` (deterministic) and `timings.json` (wall-clock).
pub fn export_json(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let summary = serde_json::to_string_pretty(report).expect("report serializes");
    let timings: Vec<Timing> =
        report.timings.iter().map(|(stage, seconds)| Timing { stage, seconds: *seconds }).collect();
    let timings = serde_json::to_string_pretty(&timings).expect("timings serialize");
    Ok(vec![
        write_atomic(dir, "summary.json", (summary + "\n").as_bytes())?,
        write_atomic(dir, "timings.json", (timings + "\n").as_bytes())?,
    ])
}

/// Profile comparisons and error-versus-count curves as SVG.
pub fn export_plot(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for p in &report.profiles {
        let svg = plot::profile_svg(p);
        let name = if report.profiles.len() > 1 {
            format!("profile_{}.svg", p.label)
        } else {
            "profile.svg".to_owned()
        };
        written.push(write_atomic(dir, &name, svg.as_bytes())?);
    }
    let labels: BTreeSet<&str> = report.errors.iter().map(|e| e.label.as_str()).collect();
    let series: Vec<(String, Vec<(usize, f64)>)> = labels
        .iter()
        .map(|l| (l.to_string(), report.error_series(l)))
        .filter(|(_, s)| s.len() > 1)
        .collect();
    if !series.is_empty() {
        written.push(write_atomic(dir, "errors.svg", plot::error_svg(&series).as_bytes())?);
    }
    Ok(written)
}

/// All three exports.
pub fn export_all(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut v = export_csv(report, dir)?;
    v.extend(export_json(report, dir)?);
    v.extend(export_plot(report, dir)?);
    Ok(v)
}
