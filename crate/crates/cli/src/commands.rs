use std::fs;
use std::path::PathBuf;

use exdyn_core::ar1::{variance_of_y, Ar1Params, Horizon};
use exdyn_core::harness::{
    boundary_variance_curve, cloud_snapshot, property_macqueen_cvt, property_non_collapse,
    property_non_convergence, property_non_extinction, run_trajectory, PropertyReport,
};

use crate::config::RunSpec;
use crate::csv::{num, Table};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subcommand {
    Trajectory,
    VarianceCurve,
    Snapshot,
    Properties,
    Ar1Table,
}

impl Subcommand {
    pub const ALL: [Subcommand; 5] = [
        Subcommand::Trajectory,
        Subcommand::VarianceCurve,
        Subcommand::Snapshot,
        Subcommand::Properties,
        Subcommand::Ar1Table,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Trajectory => "trajectory",
            Subcommand::VarianceCurve => "variance-curve",
            Subcommand::Snapshot => "snapshot",
            Subcommand::Properties => "properties",
            Subcommand::Ar1Table => "ar1-table",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.name())
    }
}

/// Result of a subcommand before it touches the filesystem.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    /// Set when a property check failed; the one-line reason.
    pub failure: Option<String>,
}

fn trajectory(spec: &RunSpec) -> Result<Table, CliError> {
    let config = spec.model_config()?;
    let record = run_trajectory(&config, spec.experiment.n_steps, spec.experiment.stride)?;
    let (k, dim) = (config.k, config.domain.dim());
    let mut columns = vec!["n".to_string()];
    for i in 1..=k {
        if dim == 1 {
            columns.push(format!("x{i}"));
        } else {
            columns.extend((1..=dim).map(|d| format!("x{i}_{d}")));
        }
    }
    columns.push("b".into());
    let mut table = Table::with_columns(columns);
    for p in &record.points {
        let mut row = vec![p.step.to_string()];
        row.extend(p.means.iter().flatten().map(|x| num(*x)));
        row.push(p.boundary.map_or_else(String::new, num));
        table.push(row);
    }
    Ok(table)
}

fn variance_curve(spec: &RunSpec) -> Result<Table, CliError> {
    let e = &spec.experiment;
    let estimates = boundary_variance_curve(&e.lambda_grid, &e.n_list, e.replicas, spec.seed)?;
    let mut table = Table::new(&["lambda", "n", "var_b", "stderr", "var_Y_pred"]);
    for est in estimates {
        let pred = variance_of_y(est.lambda, est.horizon)?;
        table.push(vec![
            num(est.lambda),
            est.n.to_string(),
            num(est.variance),
            num(est.variance_stderr),
            num(pred),
        ]);
    }
    Ok(table)
}

fn snapshot(spec: &RunSpec) -> Result<Table, CliError> {
    let (config, exemplars) = spec.model_config_with_exemplars()?;
    let e = &spec.experiment;
    let snap = cloud_snapshot(&config, &exemplars, e.n_steps, e.prune_threshold, e.grid)?;
    let mut table = Table::new(&["kind", "category", "x", "y", "x_end", "y_end", "weight"]);
    for ex in &snap.exemplars {
        table.push(vec![
            "exemplar".into(),
            ex.category.to_string(),
            num(ex.location[0]),
            num(ex.location[1]),
            String::new(),
            String::new(),
            num(ex.weight),
        ]);
    }
    for (i, (m, w)) in snap.means.iter().zip(&snap.weights).enumerate() {
        table.push(vec![
            "mean".into(),
            i.to_string(),
            num(m[0]),
            num(m[1]),
            String::new(),
            String::new(),
            num(*w),
        ]);
    }
    for s in &snap.boundary {
        table.push(vec![
            "boundary".into(),
            String::new(),
            num(s.from[0]),
            num(s.from[1]),
            num(s.to[0]),
            num(s.to[1]),
            String::new(),
        ]);
    }
    Ok(table)
}

/// Non-extinction and non-collapse always; non-convergence when λ > 0 and
/// the MacQueen check when λ = 0.
fn property_reports(spec: &RunSpec) -> Result<Vec<PropertyReport>, CliError> {
    let config = spec.model_config()?;
    let e = &spec.experiment;
    let n = e.n_steps;
    let mut reports = vec![
        property_non_extinction(&config, n, e.non_extinction())?,
        property_non_collapse(&config, n, e.non_collapse())?,
    ];
    if config.lambda > 0.0 {
        reports.push(property_non_convergence(&config, n, e.non_convergence())?);
    } else {
        reports.push(property_macqueen_cvt(&config, n, e.macqueen())?);
    }
    Ok(reports)
}

fn failure_reason(report: &PropertyReport) -> String {
    let stats: Vec<String> = report
        .statistics
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    let limits: Vec<String> = report
        .thresholds
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    format!(
        "property {} failed ({}; thresholds {})",
        report.property,
        stats.join(", "),
        limits.join(", ")
    )
}

fn properties(spec: &RunSpec) -> Result<Outcome, CliError> {
    let reports = property_reports(spec)?;
    let mut table = Table::new(&["property", "passed", "kind", "name", "value"]);
    for r in &reports {
        let passed = r.passed.to_string();
        for (kind, entries) in [("statistic", &r.statistics), ("threshold", &r.thresholds)] {
            for (name, value) in entries {
                table.push(vec![
                    r.property.to_string(),
                    passed.clone(),
                    kind.into(),
                    name.clone(),
                    num(*value),
                ]);
            }
        }
    }
    let failure = reports.iter().find(|r| !r.passed).map(failure_reason);
    Ok(Outcome { table, failure })
}

fn ar1_table(spec: &RunSpec) -> Result<Table, CliError> {
    let mut table = Table::new(&["lambda", "K", "sigma", "stationary_variance"]);
    for &lambda in &spec.experiment.lambda_grid {
        let p = Ar1Params::new(lambda)?;
        debug_assert_eq!(
            p.stationary_variance(),
            variance_of_y(lambda, Horizon::Infinite)?
        );
        table.push(vec![
            num(lambda),
            num(p.coefficient),
            num(p.sigma),
            num(p.stationary_variance()),
        ]);
    }
    Ok(table)
}

/// Run a subcommand in memory.
pub fn execute(sub: Subcommand, spec: &RunSpec) -> Result<Outcome, CliError> {
    let table = match sub {
        Subcommand::Trajectory => trajectory(spec)?,
        Subcommand::VarianceCurve => variance_curve(spec)?,
        Subcommand::Snapshot => snapshot(spec)?,
        Subcommand::Properties => return properties(spec),
        Subcommand::Ar1Table => ar1_table(spec)?,
    };
    Ok(Outcome {
        table,
        failure: None,
    })
}

/// Run a subcommand and write `<output>/<subcommand>.csv`. The file is
/// written even when a property fails; the failure is then returned.
pub fn run(sub: Subcommand, spec: &RunSpec) -> Result<PathBuf, CliError> {
    let outcome = execute(sub, spec)?;
    let dir = &spec.output;
    fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.clone(),
        source,
    })?;
    let path = dir.join(sub.file_name());
    fs::write(&path, outcome.table.render(&spec.to_config_text())).map_err(|source| {
        CliError::Write {
            path: path.clone(),
            source,
        }
    })?;
    match outcome.failure {
        Some(reason) => Err(CliError::PropertyFailure(reason)),
        None => Ok(path),
    }
}
