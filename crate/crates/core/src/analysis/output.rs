use std::io::Write;

use super::experiment::ExperimentReport;
use super::presets::Method;
use crate::mesh_fem::{Mesh1D, NodalField, TimeGrid};
use crate::Result;

/// Writes `x,t,step,method,value` rows for every node and step.
pub fn write_solution_csv(
    w: &mut impl Write,
    mesh: &Mesh1D,
    time: &TimeGrid,
    method: &str,
    history: &[NodalField],
    header: bool,
) -> Result<()> {
    if header {
        writeln!(w, "x,t,step,method,value")?;
    }
    for (n, u) in history.iter().enumerate() {
        for (x, v) in mesh.nodes().iter().zip(u.iter()) {
            writeln!(w, "{x:.16e},{:.16e},{n},{method},{v:.16e}", time.t(n))?;
        }
    }
    Ok(())
}

/// Writes `method,linf_l2,l2_h1` rows.
pub fn write_report_csv(w: &mut impl Write, rows: &[(Method, f64, f64)]) -> Result<()> {
    writeln!(w, "method,linf_l2,l2_h1")?;
    for (m, a, b) in rows {
        writeln!(w, "{m},{a:.16e},{b:.16e}")?;
    }
    Ok(())
}

pub fn report_rows(report: &ExperimentReport) -> Vec<(Method, f64, f64)> {
    report
        .runs
        .iter()
        .map(|r| (r.method, r.errors.linf_l2, r.errors.l2_h1))
        .collect()
}

pub fn write_report_json(w: &mut impl Write, report: &ExperimentReport) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, report).map_err(std::io::Error::from)?;
    writeln!(w)?;
    Ok(())
}
