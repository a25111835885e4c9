//! CSV and JSON output.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::solver::SweepRecord;

pub const CSV_HEADER: &str = "t,area,lateral_area,mf,residual,grad_norm,kappa,components,min_radius,iters";

/// One row per record, LF line endings; a missing `kappa` is an empty field.
pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let kappa = r.kappa.map(|k| format!("{k:e}")).unwrap_or_default();
        writeln!(
            out,
            "{},{:.12e},{:.12e},{:.12e},{:e},{:e},{},{},{:.12e},{}",
            r.t, r.area, r.lateral_area, r.mf, r.residual, r.grad_norm, kappa, r.components, r.min_radius, r.iters
        )
        .expect("writing to a String");
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    write_text(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_empty_kappa() {
        let r = SweepRecord {
            t: 0.5,
            area: 1.0,
            lateral_area: 2.0,
            mf: 0.9,
            residual: 1e-9,
            grad_norm: 1e-8,
            kappa: None,
            components: 1,
            min_radius: 0.3,
            iters: 7,
            energy: 0.0,
            lateral_increasing: true,
            disks: true,
            inner_radius_ok: true,
            branch_suspect: false,
            isoperimetric_min: 1.0,
        };
        let csv = sweep_csv(&[r]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        let fields: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(fields.len(), 10);
        assert_eq!(fields[6], "");
        assert!(!csv.contains('\r'));
    }
}
