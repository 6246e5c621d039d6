//! Atomic file emission: every artifact is written to a temporary file in
//! the destination directory and renamed into place, so a crash never
//! leaves a partial CSV behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use deposim::deposition::{Checkpoint, DepositRecord, StellarCheckpoint};

use crate::manifest::Manifest;

pub fn ensure_dir(dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn fmt_f64(x: f64) -> String {
    // shortest round-trip formatting keeps reruns byte-identical
    let mut buf = ryu_fmt(x);
    if buf == "-0.0" {
        buf = "0.0".into();
    }
    buf
}

fn ryu_fmt(x: f64) -> String {
    let mut s = format!("{x}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

/// `replica,N,h0,hmin,hmax,argmin_cell,probe_id,f_value`; one row per
/// probe, a single row with empty probe columns when there are none.
pub fn checkpoint_csv(rows: &[(u64, &Checkpoint)]) -> String {
    let mut out = String::from("replica,N,h0,hmin,hmax,argmin_cell,probe_id,f_value\n");
    for (replica, cp) in rows {
        let base = format!(
            "{replica},{},{},{},{},{}",
            cp.n,
            fmt_f64(cp.h_at_origin),
            fmt_f64(cp.h_min),
            fmt_f64(cp.h_max),
            cp.argmin_cell
        );
        if cp.f_at_probes.is_empty() {
            out.push_str(&base);
            out.push_str(",,\n");
        } else {
            for (probe_id, (_, f)) in cp.f_at_probes.iter().enumerate() {
                out.push_str(&base);
                out.push_str(&format!(",{probe_id},{}\n", fmt_f64(*f)));
            }
        }
    }
    out
}

/// Stellar counterpart with the three field components per probe.
pub fn stellar_checkpoint_csv(rows: &[(u64, &StellarCheckpoint)]) -> String {
    let mut out =
        String::from("replica,N,h0_x,h0_y,h0_z,probe_id,f_x,f_y,f_z\n");
    for (replica, cp) in rows {
        let base = format!(
            "{replica},{},{},{},{}",
            cp.n,
            fmt_f64(cp.h_at_origin[0]),
            fmt_f64(cp.h_at_origin[1]),
            fmt_f64(cp.h_at_origin[2]),
        );
        if cp.f_at_probes.is_empty() {
            out.push_str(&base);
            out.push_str(",,,,\n");
        } else {
            for (probe_id, (_, f)) in cp.f_at_probes.iter().enumerate() {
                out.push_str(&base);
                out.push_str(&format!(
                    ",{probe_id},{},{},{}\n",
                    fmt_f64(f[0]),
                    fmt_f64(f[1]),
                    fmt_f64(f[2])
                ));
            }
        }
    }
    out
}

/// `step,center_coords...,z,theta_x,theta_y,theta_z` with empty theta
/// columns for scalar models.
pub fn deposition_log_csv(dim: usize, log: &[DepositRecord]) -> String {
    let mut out = String::new();
    if dim == 1 {
        out.push_str("step,center_x,z,theta_x,theta_y,theta_z\n");
    } else {
        out.push_str("step,center_x,center_y,z,theta_x,theta_y,theta_z\n");
    }
    for rec in log {
        out.push_str(&rec.step.to_string());
        for axis in 0..dim {
            out.push(',');
            out.push_str(&fmt_f64(rec.center.coord(axis)));
        }
        out.push(',');
        out.push_str(&fmt_f64(rec.z));
        match rec.theta {
            Some(t) => out.push_str(&format!(
                ",{},{},{}\n",
                fmt_f64(t[0]),
                fmt_f64(t[1]),
                fmt_f64(t[2])
            )),
            None => out.push_str(",,,\n"),
        }
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> std::io::Result<()> {
    write_atomic(path, text.as_bytes())
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> std::io::Result<PathBuf> {
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

/// Machine-readable error blob for nonzero exits.
pub fn error_json(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": { "kind": kind, "message": message } }).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for &x in &[0.0, 1.0, -2.5, 1e-9, 123456.789, 1e20] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        write_text(&path, "a\n").unwrap();
        write_text(&path, "b\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "b\n");
    }
}
