//! CSV artifact writers and readers plus the flat-text run manifest.
//!
//! Every CSV starts with a `# seed=N` comment line so outputs are
//! self-describing; bodies are deterministic functions of the data, which
//! is what the determinism checks byte-compare. Timestamps only ever
//! appear in manifests.

use crate::dynamics::TrajectoryRecord;
use crate::energy::EnergyLedger;
use crate::grid::{Grid, GridFunction};
use crate::odebound::CampaignRow;
use crate::spectral::DecayReport;
use crate::stationary::{RegularityReport, StationarySolution};
use crate::{Error, Result};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

fn header(seed: u64, columns: &str) -> String {
    format!("# seed={seed}\n{columns}\n")
}

/// One column of nodal values as (x, u) rows.
pub fn write_grid_function_csv(path: &Path, u: &GridFunction, seed: u64) -> Result<()> {
    let mut out = header(seed, "x,u");
    let g = u.grid();
    for (i, v) in u.values().iter().enumerate() {
        writeln!(out, "{},{}", g.node(i), v).unwrap();
    }
    write_file(path, &out)
}

/// Reads a (x, u) column written by [`write_grid_function_csv`]; the row
/// count must match the grid exactly.
pub fn read_grid_function_csv(path: &Path, grid: Grid) -> Result<GridFunction> {
    let text = fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "x,u" {
            continue;
        }
        let mut parts = line.split(',');
        let (x, u) = match (parts.next(), parts.next()) {
            (Some(x), Some(u)) => (x, u),
            _ => {
                return Err(Error::InvalidData(format!(
                    "{}:{}: expected 'x,u' row",
                    path.display(),
                    lineno + 1
                )))
            }
        };
        let x: f64 = x.trim().parse().map_err(|_| {
            Error::InvalidData(format!("{}:{}: bad x value", path.display(), lineno + 1))
        })?;
        let u: f64 = u.trim().parse().map_err(|_| {
            Error::InvalidData(format!("{}:{}: bad u value", path.display(), lineno + 1))
        })?;
        let idx = values.len();
        if idx < grid.n() && (x - grid.node(idx)).abs() > 1e-9 {
            return Err(Error::InvalidData(format!(
                "{}:{}: node {} expected x = {}, file has {}",
                path.display(),
                lineno + 1,
                idx,
                grid.node(idx),
                x
            )));
        }
        values.push(u);
    }
    if values.len() != grid.n() {
        return Err(Error::InvalidData(format!(
            "{}: {} samples but the grid has {} interior nodes",
            path.display(),
            values.len(),
            grid.n()
        )));
    }
    GridFunction::new(grid, values)
}

/// Long-format snapshots: one (t, x, u, v) row per node per kept state.
pub fn write_trajectory_csv(path: &Path, rec: &TrajectoryRecord, seed: u64) -> Result<()> {
    let mut out = header(seed, "t,x,u,v");
    for s in &rec.states {
        let g = s.u.grid();
        for i in 0..g.n() {
            writeln!(
                out,
                "{},{},{},{}",
                s.t,
                g.node(i),
                s.u.values()[i],
                s.v.values()[i]
            )
            .unwrap();
        }
    }
    write_file(path, &out)
}

pub fn write_ledger_csv(path: &Path, ledger: &EnergyLedger, seed: u64) -> Result<()> {
    let mut out = header(seed, "t,E,D_cumulative,residual");
    for k in 0..ledger.len() {
        writeln!(
            out,
            "{},{},{},{}",
            ledger.times()[k],
            ledger.e_values()[k],
            ledger.dissipation_cumulative()[k],
            ledger.inequality_residuals()[k]
        )
        .unwrap();
    }
    write_file(path, &out)
}

/// Stationary set: per-solution summary plus full profiles in long format.
pub fn write_stationary_csv(
    summary_path: &Path,
    profiles_path: &Path,
    solutions: &[StationarySolution],
    seed: u64,
) -> Result<()> {
    let mut summary = header(seed, "solution,residual_l2,basin_hits,h1,w1inf");
    let mut profiles = header(seed, "solution,x,u");
    for (id, s) in solutions.iter().enumerate() {
        writeln!(
            summary,
            "{},{},{},{},{}",
            id,
            s.residual_l2,
            s.basin_hits,
            crate::grid::h1(&s.u),
            crate::grid::w1inf(&s.u)
        )
        .unwrap();
        let g = s.u.grid();
        for i in 0..g.n() {
            writeln!(profiles, "{},{},{}", id, g.node(i), s.u.values()[i]).unwrap();
        }
    }
    write_file(summary_path, &summary)?;
    write_file(profiles_path, &profiles)
}

pub fn write_decay_csv(path: &Path, report: &DecayReport, seed: u64) -> Result<()> {
    let mut out = header(seed, "t,exact_norm,bound,ratio");
    writeln!(
        out,
        "# s={} sigma={} omega={} fitted_M={}",
        report.s, report.sigma, report.omega, report.fitted_m
    )
    .unwrap();
    for r in &report.rows {
        writeln!(out, "{},{},{},{}", r.t, r.exact, r.bound, r.ratio).unwrap();
    }
    write_file(path, &out)
}

pub fn write_campaign_csv(path: &Path, rows: &[CampaignRow], seed: u64) -> Result<()> {
    let mut out = header(seed, "p,f_bound,u0,seed,max_u,A6,max_du,A7,pass");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.p, r.f_bound, r.u0, r.seed, r.max_u, r.a6, r.max_du, r.a7, r.pass
        )
        .unwrap();
    }
    write_file(path, &out)
}

pub fn write_regularity_csv(path: &Path, report: &RegularityReport, seed: u64) -> Result<()> {
    let mut out = header(seed, "grid_n,sup_w1inf_u,sup_w1inf_v");
    if let Some(note) = &report.annotation {
        writeln!(out, "# note: {note}").unwrap();
    }
    for r in &report.rows {
        writeln!(out, "{},{},{}", r.grid_n, r.sup_w1inf_u, r.sup_w1inf_v).unwrap();
    }
    writeln!(out, "# max_drift_u={} flagged={}", report.max_drift_u, report.flagged).unwrap();
    write_file(path, &out)
}

/// Flat `key = value` sidecar; this is the one artifact allowed to carry
/// wall-clock information.
pub fn write_manifest(path: &Path, entries: &[(String, String)]) -> Result<()> {
    let mut out = String::new();
    for (k, v) in entries {
        writeln!(out, "{k} = {v}").unwrap();
    }
    write_file(path, &out)
}
