//! Plot data as CSV files, one per figure; rendering happens elsewhere.

use std::path::Path;

use duopoly_core::gsa::{GsaIterationReport, GsaSummary, StabilityResult, TolerancePoint};
use duopoly_core::runner::ReplicationOutput;
use duopoly_core::{Error, Result};

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(csv_err)
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

/// Share of profiles that are ε-equilibria against ε, per iteration.
pub fn write_tolerance_curves(path: &Path, curves: &[(usize, &[TolerancePoint])]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["iteration", "epsilon", "equilibria", "percent", "symmetric_percent"])
        .map_err(csv_err)?;
    for (it, curve) in curves {
        for p in *curve {
            w.write_record([
                it.to_string(),
                p.epsilon.to_string(),
                p.equilibria.len().to_string(),
                (100.0 * p.fraction).to_string(),
                (100.0 * p.symmetric_fraction).to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_stability(path: &Path, results: &[(usize, &StabilityResult)]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "iteration",
        "solution_row",
        "solution_column",
        "epsilon",
        "asymptotic_percent",
        "marginal_percent",
        "instable_percent",
    ])
    .map_err(csv_err)?;
    for (it, r) in results {
        w.write_record([
            it.to_string(),
            r.solution.0.to_string(),
            r.solution.1.to_string(),
            r.epsilon.to_string(),
            (100.0 * r.ratios.asymptotic).to_string(),
            (100.0 * r.ratios.marginal).to_string(),
            (100.0 * r.ratios.instable).to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Both companies' daily price, share, inventory and backlog side by side.
pub fn write_timeseries(path: &Path, rep: &ReplicationOutput) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "day", "price_1", "price_2", "MS_1", "MS_2", "inv_1", "inv_2", "backlog_1", "backlog_2",
    ])
    .map_err(csv_err)?;
    let [a, b] = &rep.series;
    for d in 0..rep.days {
        w.write_record([
            (d + 1).to_string(),
            a.price[d].to_string(),
            b.price[d].to_string(),
            a.ms[d].to_string(),
            b.ms[d].to_string(),
            a.inv[d].to_string(),
            b.inv[d].to_string(),
            a.backlog[d].to_string(),
            b.backlog[d].to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes every plot-data file derivable from the reports alone.
pub fn emit(dir: &Path, reports: &[GsaIterationReport], summary: &GsaSummary) -> Result<()> {
    let curves: Vec<(usize, &[TolerancePoint])> =
        reports.iter().map(|r| (r.iteration, r.tolerance_curve.as_slice())).collect();
    write_tolerance_curves(&dir.join("plot_tolerance_curves.csv"), &curves)?;

    let stab: Vec<(usize, &StabilityResult)> = reports
        .iter()
        .filter_map(|r| r.stability.as_ref().map(|s| (r.iteration, s)))
        .collect();
    write_stability(&dir.join("plot_stability.csv"), &stab)?;

    let mut w = writer(&dir.join("plot_neighbor_pvalues.csv"))?;
    w.write_record(["iteration", "row", "column", "mean", "p_value"]).map_err(csv_err)?;
    for r in reports {
        for t in &r.neighbor_tests {
            w.write_record([
                r.iteration.to_string(),
                t.profile.0.to_string(),
                t.profile.1.to_string(),
                t.mean.to_string(),
                t.p_value.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;

    let mut w = writer(&dir.join("plot_cross_iteration.csv"))?;
    w.write_record(["earlier", "later", "p_value"]).map_err(csv_err)?;
    for t in &summary.cross_iteration {
        w.write_record([t.earlier.to_string(), t.later.to_string(), t.p_value.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;

    let mut w = writer(&dir.join("plot_payoff_ci.csv"))?;
    w.write_record([
        "iteration",
        "row",
        "column",
        "player",
        "kind",
        "mean_initial",
        "half_width_initial",
        "n_initial",
        "mean_extended",
        "half_width_extended",
        "n_extended",
    ])
    .map_err(csv_err)?;
    for r in reports {
        let mut rows: Vec<(&str, (usize, usize), _)> = Vec::new();
        if let Some(s) = &r.solution {
            rows.push(("solution", s.profile, s.payoff));
        }
        for e in &r.equilibria {
            rows.push(("equilibrium", e.profile, e.payoff));
        }
        for (kind, p, ci) in rows {
            for (k, c) in ci.iter().enumerate() {
                w.write_record([
                    r.iteration.to_string(),
                    p.0.to_string(),
                    p.1.to_string(),
                    (k + 1).to_string(),
                    kind.to_string(),
                    c.initial.mean.to_string(),
                    c.initial.half_width.to_string(),
                    c.initial.n.to_string(),
                    c.extended.mean.to_string(),
                    c.extended.half_width.to_string(),
                    c.extended.n.to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
