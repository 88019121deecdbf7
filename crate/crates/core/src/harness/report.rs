use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::{CompareRow, StepRecord, SweepRow};
use crate::error::Result;

fn write_csv<W: Write, T: Serialize>(mut out: W, tag: &str, rows: &[T]) -> Result<()> {
    writeln!(out, "# ddobs {tag} v1")?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-step CSV, one row per `(seed, k)`.
pub fn write_steps<W: Write>(out: W, rows: &[StepRecord]) -> Result<()> {
    write_csv(out, "per-step", rows)
}

pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    write_csv(out, "sweep", rows)
}

pub fn write_compare<W: Write>(out: W, rows: &[CompareRow]) -> Result<()> {
    write_csv(out, "compare", rows)
}

/// Plain-text comparison table.
pub fn compare_table(rows: &[CompareRow]) -> String {
    let label_w = rows.iter().map(|r| r.variant.len()).max().unwrap_or(0).max(7);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<label_w$}  {:>10}  {:>10}  {:>6}  {:>6}  {:>10}  {:>5}",
        "variant", "v_tilde", "w_tilde", "v_hat", "w_hat", "ms/step", "sound"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<label_w$}  {:>10.4e}  {:>10.4e}  {:>6.2}  {:>6.2}  {:>10.3}  {:>5}",
            r.variant, r.v_tilde, r.w_tilde, r.v_hat, r.w_hat, r.mean_step_ms, r.sound
        );
    }
    s
}
