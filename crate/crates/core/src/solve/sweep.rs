//! One solve per value of a varying context.

use std::io::Write;

use crate::compile::ConstraintProblem;
use crate::domain::Domain;

use super::{solve_with, ContextSnapshot, SolveError, SolveOptions, Solution};

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub context_value: f64,
    pub solution: Solution,
}

pub fn sweep(
    cp: &ConstraintProblem,
    varying: &str,
    grid: &Domain,
    fixed: &ContextSnapshot,
    options: SolveOptions,
) -> Result<Vec<SweepRow>, SolveError> {
    if cp.parameter(varying).is_none() {
        return Err(SolveError::UnknownContext(varying.to_string()));
    }
    grid.values()
        .iter()
        .map(|&x| {
            let ctx = fixed.clone().with(varying, x);
            Ok(SweepRow { context_value: x, solution: solve_with(cp, &ctx, options)? })
        })
        .collect()
}

/// `context_value,<varpoints...>,objective,status`; enum values are written
/// as literal names and infeasible rows leave the value columns empty.
pub fn write_sweep_csv(cp: &ConstraintProblem, rows: &[SweepRow], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["context_value".to_string()];
    header.extend(cp.variables.iter().map(|v| v.name.clone()));
    header.extend(["objective".to_string(), "status".to_string()]);
    w.write_record(&header)?;
    for row in rows {
        let s = &row.solution;
        let mut record = vec![row.context_value.to_string()];
        for v in &cp.variables {
            record.push(s.binding(&v.name).map(|x| v.ty.format_value(x)).unwrap_or_default());
        }
        record.push(s.objective.map(|o| o.to_string()).unwrap_or_default());
        record.push(s.status.as_str().to_string());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
