//! CSV writers. Floats use 17 significant digits in scientific notation so
//! identical runs give byte-identical files.

use std::io::Write;

use crate::error::Result;
use crate::evolve::Trajectory;
use crate::sweep::{upper_triangle, SweepRow};

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn element_label(i: usize, j: usize) -> String {
    if i < 10 && j < 10 {
        format!("r{i}{j}")
    } else {
        format!("r{i}_{j}")
    }
}

pub fn time_series_header(elements: &[(usize, usize)]) -> String {
    let mut cols = vec!["t".to_string()];
    for &(i, j) in elements {
        let l = element_label(i, j);
        cols.push(format!("re_{l}"));
        cols.push(format!("im_{l}"));
    }
    cols.join(",")
}

/// `t,re_r00,im_r00,...` with one row per recorded snapshot.
pub fn write_time_series<W: Write>(
    mut w: W,
    traj: &Trajectory,
    elements: &[(usize, usize)],
) -> Result<()> {
    writeln!(w, "{}", time_series_header(elements))?;
    for (t, rho) in traj.iter() {
        let mut line = fmt_float(t);
        for &(i, j) in elements {
            let v = rho.get(i, j);
            line.push(',');
            line.push_str(&fmt_float(v.re));
            line.push(',');
            line.push_str(&fmt_float(v.im));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn sweep_header() -> String {
    let mut cols: Vec<String> = ["grid", "tau", "max_amp", "max_phase"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend(upper_triangle().map(|(i, j)| format!("amp_{i}_{j}")));
    cols.extend(upper_triangle().map(|(i, j)| format!("phase_{i}_{j}")));
    cols.join(",")
}

pub fn sweep_line(row: &SweepRow) -> String {
    let mut fields = vec![
        fmt_float(row.grid),
        fmt_float(row.tau),
        fmt_float(row.max_amp),
        fmt_float(row.max_phase),
    ];
    fields.extend(row.amp.iter().map(|&a| fmt_float(a)));
    fields.extend(
        row.phase
            .iter()
            .map(|p| p.map(fmt_float).unwrap_or_default()),
    );
    fields.join(",")
}

/// Header plus one line per row; masked phases are empty fields.
pub fn write_sweep<W: Write>(mut w: W, rows: &[SweepRow]) -> Result<()> {
    writeln!(w, "{}", sweep_header())?;
    for row in rows {
        writeln!(w, "{}", sweep_line(row))?;
    }
    Ok(())
}
