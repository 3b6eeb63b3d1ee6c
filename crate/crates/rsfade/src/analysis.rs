//! Error norms, convergence-rate estimation, and refinement studies.

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::problems::ProblemSpec;
use crate::solver::{snap_time_step, solve, SolutionField};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

/// Max-abs and cell-weighted discrete L² error of a field against an exact
/// solution evaluated at the field's time.
///
/// l2 = sqrt(Δx Δy Σ (U - u)²); the cell weighting keeps the norm stable
/// under refinement. Table-style comparisons use the max norm.
pub fn error_norms(
    field: &SolutionField,
    exact: impl Fn(f64, f64, f64) -> f64,
    grid: &GridSpec,
) -> Result<(f64, f64)> {
    let (nx, ny) = (grid.nx(), grid.ny());
    if field.values().shape() != (nx, ny) {
        return Err(Error::ShapeMismatch(format!(
            "field {:?} vs grid interior {}x{}",
            field.values().shape(),
            nx,
            ny
        )));
    }
    let mut max_err: f64 = 0.0;
    let mut sum_sq = 0.0;
    for j in 0..ny {
        let y = grid.interior_y(j);
        for i in 0..nx {
            let d = field.values()[(i, j)] - exact(grid.interior_x(i), y, field.t());
            max_err = max_err.max(d.abs());
            sum_sq += d * d;
        }
    }
    Ok((max_err, (grid.dx() * grid.dy() * sum_sq).sqrt()))
}

/// Convergence exponents between consecutive refinement levels:
/// `rate[m] = log(e_m / e_{m+1}) / log(h_m / h_{m+1})`.
pub fn convergence_rates(errors: &[f64], steps: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != steps.len() {
        return Err(Error::InvalidArgument(
            "errors and steps must have equal length".into(),
        ));
    }
    if errors.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two levels to estimate a rate".into(),
        ));
    }
    if let Some(bad) = errors.iter().find(|&&e| !e.is_finite() || e <= 0.0) {
        return Err(Error::DegenerateRate(format!(
            "non-positive error value {bad}"
        )));
    }
    if let Some(bad) = steps.iter().find(|&&s| !s.is_finite() || s <= 0.0) {
        return Err(Error::DegenerateRate(format!("non-positive step {bad}")));
    }
    Ok(errors
        .windows(2)
        .zip(steps.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect())
}

/// Refinement axis for a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StudyAxis {
    Space,
    Time,
}

impl StudyAxis {
    pub fn label(self) -> &'static str {
        match self {
            StudyAxis::Space => "space",
            StudyAxis::Time => "time",
        }
    }
}

/// One refinement level of a study.
#[derive(Debug, Clone, Serialize)]
pub struct LevelRecord {
    /// Step size as requested by the caller.
    pub step_requested: f64,
    /// Step size actually used (time steps get snapped so they divide t_end;
    /// spatial steps are recomputed from the rounded cell count).
    pub step: f64,
    pub m1: usize,
    pub m2: usize,
    pub time_steps: usize,
    pub max_error: f64,
    pub l2_error: f64,
}

/// Outcome of a refinement study, mirroring the shape of a convergence table.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub problem: String,
    pub axis: StudyAxis,
    pub t_end: f64,
    /// What was held fixed: "dt" for space studies, "h" for time studies.
    pub fixed_kind: &'static str,
    pub fixed_step_requested: f64,
    pub fixed_step: f64,
    pub levels: Vec<LevelRecord>,
    /// `rates[m]` between levels m and m+1, from the steps actually used.
    pub rates: Vec<f64>,
}

/// Run `solve` once per refinement level and assemble errors and rates.
///
/// For `axis == Space` the levels are grid spacings h (dx = dy = h) at fixed
/// requested dt; for `axis == Time` they are time steps at fixed spacing
/// `fixed_step`. The problem must carry an exact solution.
pub fn refinement_study(
    problem: &ProblemSpec,
    axis: StudyAxis,
    levels: &[f64],
    fixed_step: f64,
) -> Result<ConvergenceReport> {
    if levels.is_empty() {
        return Err(Error::InvalidArgument("no refinement levels given".into()));
    }
    if levels.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(
            "refinement levels must be strictly decreasing".into(),
        ));
    }
    let exact = problem.exact_fn().ok_or_else(|| {
        Error::ProblemSpec("refinement studies need a problem with an exact solution".into())
    })?;
    let t_end = problem.t_end;
    let annotate = |level: f64, e: Error| {
        Error::Configuration(format!("level {level}: {e}"))
    };

    let mut records = Vec::with_capacity(levels.len());
    let mut fixed_step_used = fixed_step;
    for &level in levels {
        let (grid, dt_requested) = match axis {
            StudyAxis::Space => (
                problem.grid_with_h(level).map_err(|e| annotate(level, e))?,
                fixed_step,
            ),
            StudyAxis::Time => (
                problem
                    .grid_with_h(fixed_step)
                    .map_err(|e| annotate(level, e))?,
                level,
            ),
        };
        let (time_steps, dt) =
            snap_time_step(t_end, dt_requested).map_err(|e| annotate(level, e))?;
        let field = solve(problem, &grid, dt, t_end).map_err(|e| annotate(level, e))?;
        let (max_error, l2_error) = error_norms(&field, |x, y, t| exact(x, y, t), &grid)?;
        let (step_requested, step) = match axis {
            StudyAxis::Space => {
                fixed_step_used = dt;
                (level, grid.dx())
            }
            StudyAxis::Time => {
                fixed_step_used = grid.dx();
                (level, dt)
            }
        };
        records.push(LevelRecord {
            step_requested,
            step,
            m1: grid.m1,
            m2: grid.m2,
            time_steps,
            max_error,
            l2_error,
        });
    }

    let rates = if records.len() >= 2 {
        let errors: Vec<f64> = records.iter().map(|r| r.max_error).collect();
        let steps: Vec<f64> = records.iter().map(|r| r.step).collect();
        convergence_rates(&errors, &steps)?
    } else {
        Vec::new()
    };

    Ok(ConvergenceReport {
        problem: problem.name().to_string(),
        axis,
        t_end,
        fixed_kind: match axis {
            StudyAxis::Space => "dt",
            StudyAxis::Time => "h",
        },
        fixed_step_requested: fixed_step,
        fixed_step: fixed_step_used,
        levels: records,
        rates,
    })
}

impl ConvergenceReport {
    /// CSV rows `step,max_error,l2_error,rate`; the first level has no rate.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,max_error,l2_error,rate\n");
        for (i, level) in self.levels.iter().enumerate() {
            let _ = write!(
                out,
                "{},{},{}",
                level.step, level.max_error, level.l2_error
            );
            if i > 0 {
                let _ = write!(out, ",{}", self.rates[i - 1]);
            } else {
                out.push(',');
            }
            out.push('\n');
        }
        out
    }

    /// Two-column `log10(step) log10(max_error)` rows for plotting.
    pub fn to_plot_data(&self) -> String {
        let mut out = String::from("# log10(step) log10(max_error)\n");
        for level in &self.levels {
            let _ = writeln!(
                out,
                "{} {}",
                level.step.log10(),
                level.max_error.log10()
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Write a file atomically (temp file in the same directory, then rename).
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
