//! Crank-Nicolson Peaceman-Rachford ADI time stepping.
//!
//! The semi-discrete system du/dt = -(Lx ⊕ Ly) u + s is advanced by the
//! factored Crank-Nicolson scheme split into two half-sweeps with an
//! intermediate field u*:
//!
//!   (I + Mx) u*      = (I - My) uⁿ   + (Δt/2) s^{n+1/2}   (solve along x)
//!   (I + My) u^{n+1} = (I - Mx) u*   + (Δt/2) s^{n+1/2}   (solve along y)
//!
//! with Mx = (Δt/2)(d_α M_α + c_β M_β), My = (Δt/2)(d_μ M_μ + c_ν M_ν).
//! Because Mx and My act on different axes they commute, and the two sweeps
//! recombine exactly to the factored form
//! (I+Mx)(I+My) u^{n+1} = (I-Mx)(I-My) uⁿ + Δt s^{n+1/2}; the half-weight on
//! the source is what makes that identity hold. Both (I+M) factors are
//! assembled and factorized once and reused for every step and slice.

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::operators::assemble_riesz_matrix;
use crate::problems::ProblemSpec;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn, LU};
use std::io::Write;
use std::path::PathBuf;

const DEFAULT_ORACLE_CAP: usize = 4096;
const EIG_CAP: usize = 1024;

/// One-shot factorization of an (I + M) sweep matrix.
///
/// Cholesky is preferred (M is SPD so I + M always admits it); LU is the
/// fallback for operator matrices supplied from outside the assembly path.
enum Factor {
    Cholesky(Cholesky<f64, Dyn>),
    Lu(Box<LU<f64, Dyn, Dyn>>),
}

impl Factor {
    fn new(m: DMatrix<f64>) -> Result<Self> {
        if let Some(chol) = Cholesky::new(m.clone()) {
            return Ok(Factor::Cholesky(chol));
        }
        let lu = m.lu();
        if lu.is_invertible() {
            Ok(Factor::Lu(Box::new(lu)))
        } else {
            Err(Error::Singular("sweep matrix I + M is not invertible".into()))
        }
    }

    fn solve(&self, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        match self {
            Factor::Cholesky(c) => Ok(c.solve(rhs)),
            Factor::Lu(lu) => lu
                .solve(rhs)
                .ok_or_else(|| Error::Singular("LU solve failed".into())),
        }
    }
}

/// The per-direction sweep matrices and their reusable factorizations.
pub struct SweepOperators {
    mx: DMatrix<f64>,
    my: DMatrix<f64>,
    im_x: DMatrix<f64>,
    im_y: DMatrix<f64>,
    factor_x: Factor,
    factor_y: Factor,
    dt: f64,
}

impl SweepOperators {
    /// Assemble from raw sweep matrices (already scaled by Δt/2). Used by the
    /// oracles and tests; `build_sweep_operators` is the production path.
    pub fn from_matrices(mx: DMatrix<f64>, my: DMatrix<f64>, dt: f64) -> Result<Self> {
        for (m, tag) in [(&mx, "Mx"), (&my, "My")] {
            if m.nrows() != m.ncols() {
                return Err(Error::ShapeMismatch(format!("{tag} must be square")));
            }
            let asym = (m - m.transpose()).amax();
            if asym > 1e-12 * m.amax().max(f64::MIN_POSITIVE) {
                return Err(Error::InvalidArgument(format!("{tag} is not symmetric")));
            }
        }
        let nx = mx.nrows();
        let ny = my.nrows();
        let im_x = DMatrix::identity(nx, nx) - &mx;
        let im_y = DMatrix::identity(ny, ny) - &my;
        let factor_x = Factor::new(DMatrix::identity(nx, nx) + &mx)?;
        let factor_y = Factor::new(DMatrix::identity(ny, ny) + &my)?;
        Ok(Self {
            mx,
            my,
            im_x,
            im_y,
            factor_x,
            factor_y,
            dt,
        })
    }

    pub fn mx(&self) -> &DMatrix<f64> {
        &self.mx
    }

    pub fn my(&self) -> &DMatrix<f64> {
        &self.my
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn nx(&self) -> usize {
        self.mx.nrows()
    }

    pub fn ny(&self) -> usize {
        self.my.nrows()
    }
}

/// Interior solution values `u[i][j]` at (x_{i+1}, y_{j+1}), with the current
/// time and step index.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    values: DMatrix<f64>,
    t: f64,
    step: usize,
}

impl SolutionField {
    pub fn new(values: DMatrix<f64>, t: f64, step: usize) -> Self {
        Self { values, t, step }
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn max_abs(&self) -> f64 {
        self.values.amax()
    }

    fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Divergence {
                step: self.step,
                t: self.t,
            })
        }
    }
}

/// Directional operator sums Lx = d_α M_α + c_β M_β and Ly = d_μ M_μ + c_ν M_ν.
fn directional_operators(
    problem: &ProblemSpec,
    grid: &GridSpec,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let dx = grid.dx();
    let dy = grid.dy();
    let m_alpha = assemble_riesz_matrix(problem.alpha, grid.nx(), dx)?;
    let m_beta = assemble_riesz_matrix(problem.beta, grid.nx(), dx)?;
    let m_mu = assemble_riesz_matrix(problem.mu, grid.ny(), dy)?;
    let m_nu = assemble_riesz_matrix(problem.nu, grid.ny(), dy)?;
    let lx = m_alpha.matrix() * problem.d_alpha + m_beta.matrix() * problem.c_beta;
    let ly = m_mu.matrix() * problem.d_mu + m_nu.matrix() * problem.c_nu;
    Ok((lx, ly))
}

/// Assemble Mx, My and factorize (I + Mx), (I + My) once for reuse in every
/// step (and every slice within a step).
pub fn build_sweep_operators(
    problem: &ProblemSpec,
    grid: &GridSpec,
    dt: f64,
) -> Result<SweepOperators> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    problem.check_grid(grid)?;
    let (lx, ly) = directional_operators(problem, grid)?;
    SweepOperators::from_matrices(lx * (dt / 2.0), ly * (dt / 2.0), dt)
}

/// One Peaceman-Rachford step: the x-sweep producing the intermediate field,
/// then the y-sweep. `source_half` is the interior sampling of
/// (s^{n+1} + s^n)/2.
pub fn pr_step(
    state: &SolutionField,
    ops: &SweepOperators,
    source_half: &DMatrix<f64>,
) -> Result<SolutionField> {
    let u = &state.values;
    if u.nrows() != ops.nx() || u.ncols() != ops.ny() {
        return Err(Error::ShapeMismatch(format!(
            "state {}x{} vs operators {}x{}",
            u.nrows(),
            u.ncols(),
            ops.nx(),
            ops.ny()
        )));
    }
    if source_half.shape() != u.shape() {
        return Err(Error::ShapeMismatch("source field shape".into()));
    }
    let half_source = source_half * (ops.dt / 2.0);

    // Step (1): for each fixed j solve (I+Mx) u*_{.,j}; (I-My) acts along y.
    let rhs = u * &ops.im_y + &half_source;
    let u_star = ops.factor_x.solve(&rhs)?;

    // Step (2): for each fixed i solve (I+My) u^{n+1}_{i,.}; (I-Mx) acts along x.
    let rhs = &ops.im_x * u_star + &half_source;
    let u_next = ops.factor_y.solve(&rhs.transpose())?.transpose();

    let next = SolutionField {
        values: u_next,
        t: state.t + ops.dt,
        step: state.step + 1,
    };
    next.check_finite()?;
    Ok(next)
}

/// Unsplit Crank-Nicolson step solved exactly on the dense Kronecker-assembled
/// 2D operator. Test oracle only; refuses more than `cap` unknowns
/// (4096 by default via [`cn_unsplit_step`]).
pub fn cn_unsplit_step_capped(
    state: &SolutionField,
    problem: &ProblemSpec,
    grid: &GridSpec,
    dt: f64,
    source_half: &DMatrix<f64>,
    cap: usize,
) -> Result<SolutionField> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let unknowns = nx * ny;
    if unknowns > cap {
        return Err(Error::OracleCapacity { unknowns, cap });
    }
    if state.values.shape() != (nx, ny) || source_half.shape() != (nx, ny) {
        return Err(Error::ShapeMismatch("field/grid shape".into()));
    }
    let (lx, ly) = directional_operators(problem, grid)?;
    // vec(U) stacks columns (x fastest), so Lx acts blockwise and Ly across blocks.
    let g2d = DMatrix::identity(ny, ny).kronecker(&lx) + ly.kronecker(&DMatrix::identity(nx, nx));
    let ident = DMatrix::identity(unknowns, unknowns);
    let lhs = &ident + &g2d * (dt / 2.0);
    let rhs_op = &ident - &g2d * (dt / 2.0);
    let u_vec = DVector::from_column_slice(state.values.as_slice());
    let s_vec = DVector::from_column_slice(source_half.as_slice());
    let b = rhs_op * u_vec + s_vec * dt;
    let sol = lhs
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Singular("unsplit CN system".into()))?;
    let next = SolutionField {
        values: DMatrix::from_column_slice(nx, ny, sol.as_slice()),
        t: state.t + dt,
        step: state.step + 1,
    };
    next.check_finite()?;
    Ok(next)
}

/// [`cn_unsplit_step_capped`] with the default 4096-unknown cap.
pub fn cn_unsplit_step(
    state: &SolutionField,
    problem: &ProblemSpec,
    grid: &GridSpec,
    dt: f64,
    source_half: &DMatrix<f64>,
) -> Result<SolutionField> {
    cn_unsplit_step_capped(state, problem, grid, dt, source_half, DEFAULT_ORACLE_CAP)
}

/// One explicit (Meerschaert-Tadjeran type) Euler step:
/// u^{n+1} = uⁿ - Δt (Lx uⁿ + uⁿ Ly) + Δt sⁿ. Reference stepper; the caller
/// owns the stability restriction on Δt.
pub fn explicit_euler_step(
    state: &SolutionField,
    problem: &ProblemSpec,
    grid: &GridSpec,
    dt: f64,
    source_now: &DMatrix<f64>,
) -> Result<SolutionField> {
    let (nx, ny) = (grid.nx(), grid.ny());
    if state.values.shape() != (nx, ny) || source_now.shape() != (nx, ny) {
        return Err(Error::ShapeMismatch("field/grid shape".into()));
    }
    let (lx, ly) = directional_operators(problem, grid)?;
    let u = &state.values;
    let next = SolutionField {
        values: u - (&lx * u + u * &ly) * dt + source_now * dt,
        t: state.t + dt,
        step: state.step + 1,
    };
    next.check_finite()?;
    Ok(next)
}

/// Spectral radius of the homogeneous PR iteration
/// (I+My)^{-1}(I-Mx)(I+Mx)^{-1}(I-My) on the 2D Kronecker form. Mx and My act
/// on different axes and commute, so the radius is the product of the 1D radii
/// max_λ |1-λ|/(1+λ) over the eigenvalues of each sweep matrix; it stays
/// below 1 for every Δt > 0 because both matrices are SPD.
pub fn pr_iteration_spectral_radius(ops: &SweepOperators) -> Result<f64> {
    let radius_1d = |m: &DMatrix<f64>| -> Result<f64> {
        if m.nrows() > EIG_CAP {
            return Err(Error::OracleCapacity {
                unknowns: m.nrows(),
                cap: EIG_CAP,
            });
        }
        Ok(m.clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|&l| ((1.0 - l) / (1.0 + l)).abs())
            .fold(0.0, f64::max))
    };
    Ok(radius_1d(&ops.mx)? * radius_1d(&ops.my)?)
}

/// Strict step count: t_end/dt must land on an integer to within a few ulp.
pub fn steps_for(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite() && t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Configuration(format!(
            "need positive finite t_end and dt, got t_end={t_end}, dt={dt}"
        )));
    }
    let ratio = t_end / dt;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > 8.0 * f64::EPSILON * n.max(1.0) {
        return Err(Error::Configuration(format!(
            "t_end/dt = {ratio} is not an integer step count; pick dt dividing t_end \
             (or snap it with snap_time_step)"
        )));
    }
    Ok(n as usize)
}

/// Adjust a requested step to the nearest one dividing t_end exactly.
/// Returns (step count, adjusted dt).
pub fn snap_time_step(t_end: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0 && dt.is_finite() && t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Configuration(format!(
            "need positive finite t_end and dt, got t_end={t_end}, dt={dt}"
        )));
    }
    let n = (t_end / dt).round().max(1.0);
    if (n * dt - t_end).abs() > 0.5 * dt {
        return Err(Error::Configuration(format!(
            "time step {dt} is too coarse for horizon {t_end}"
        )));
    }
    Ok((n as usize, t_end / n))
}

/// Knobs for [`solve_with_options`].
#[derive(Debug, Default)]
pub struct SolveOptions {
    /// Write one `step,t,max_abs` CSV line per step to this path.
    pub checkpoint: Option<PathBuf>,
}

/// Initialize u⁰ from the problem's initial data and advance to t_end with the
/// Peaceman-Rachford scheme. t_end/dt must be an integer step count.
pub fn solve(
    problem: &ProblemSpec,
    grid: &GridSpec,
    dt: f64,
    t_end: f64,
) -> Result<SolutionField> {
    solve_with_options(problem, grid, dt, t_end, &SolveOptions::default())
}

pub fn solve_with_options(
    problem: &ProblemSpec,
    grid: &GridSpec,
    dt: f64,
    t_end: f64,
    options: &SolveOptions,
) -> Result<SolutionField> {
    let steps = steps_for(t_end, dt)?;
    let ops = build_sweep_operators(problem, grid, dt)?;
    let mut checkpoint = match &options.checkpoint {
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            writeln!(file, "step,t,max_abs")?;
            Some(file)
        }
        None => None,
    };

    // With a separable source the spatial profiles are sampled once and each
    // step only re-weights rank-1 terms; otherwise fall back to pointwise
    // sampling, reusing the step's right endpoint as the next left endpoint.
    type SampledTerm<'a> = (DVector<f64>, DVector<f64>, &'a crate::problems::SeparableTerm);
    let separable: Option<Vec<SampledTerm<'_>>> =
        problem.separable_source().map(|terms| {
            terms
                .iter()
                .map(|term| {
                    (
                        DVector::from_fn(grid.nx(), |i, _| (term.fx)(grid.interior_x(i))),
                        DVector::from_fn(grid.ny(), |j, _| (term.fy)(grid.interior_y(j))),
                        term,
                    )
                })
                .collect()
        });
    let mut source_now = match separable {
        None => Some(problem.sample_source(grid, 0.0)),
        Some(_) => None,
    };

    let mut field = SolutionField {
        values: problem.sample_initial(grid),
        t: 0.0,
        step: 0,
    };
    field.check_finite()?;
    let mut source_half = DMatrix::zeros(grid.nx(), grid.ny());
    for n in 0..steps {
        let t_now = n as f64 * dt;
        let t_next = (n + 1) as f64 * dt;
        match &separable {
            Some(terms) => {
                source_half.fill(0.0);
                for (fx, fy, term) in terms {
                    let weight = 0.5 * ((term.ft)(t_now) + (term.ft)(t_next));
                    source_half.ger(weight, fx, fy, 1.0);
                }
            }
            None => {
                let next = problem.sample_source(grid, t_next);
                source_half = (source_now.take().expect("pointwise path") + &next) * 0.5;
                source_now = Some(next);
            }
        }
        field = pr_step(&field, &ops, &source_half)?;
        if let Some(file) = checkpoint.as_mut() {
            writeln!(file, "{},{},{}", field.step, field.t, field.max_abs())?;
        }
    }
    // Land on the horizon exactly rather than on the rounded sum of steps.
    field.t = t_end;
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{example1, example1_with, example2, ProblemSpec};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn zero_problem() -> ProblemSpec {
        ProblemSpec::custom(
            "zero",
            [1.8, 0.9, 1.6, 0.7],
            [0.25, 0.05, 0.25, 0.05],
            [0.0, 1.0, 0.0, 1.0],
            1.0,
            |_, _| 0.0,
            |_, _, _| 0.0,
            Some(Box::new(|_, _, _| 0.0)),
        )
        .unwrap()
    }

    fn decay_problem() -> ProblemSpec {
        // No source; initial bump decays under the dissipative operator.
        ProblemSpec::custom(
            "decay",
            [1.8, 0.9, 1.6, 0.7],
            [0.25, 0.05, 0.25, 0.05],
            [0.0, 1.0, 0.0, 1.0],
            1.0,
            |x, y| (PI * x).sin() * (2.0 * PI * y).sin() + 0.3 * (3.0 * PI * x).sin(),
            |_, _, _| 0.0,
            None,
        )
        .unwrap()
    }

    #[test]
    fn sweep_operator_assembly() {
        let p = example1();
        let grid = p.grid_with_h(0.1).unwrap();
        let ops = build_sweep_operators(&p, &grid, 0.001).unwrap();
        // Example-1 sweep matrices certify SPD.
        let cx = crate::operators::certify_spd(ops.mx()).unwrap();
        let cy = crate::operators::certify_spd(ops.my()).unwrap();
        assert!(cx.is_spd && cy.is_spd);

        // dt -> 0: sweep matrices vanish.
        let tiny = build_sweep_operators(&p, &grid, 1e-14).unwrap();
        assert!(tiny.mx().amax() < 1e-10);

        // c_beta = c_nu = 0: Mx depends only on (alpha, d_alpha).
        let p0 = example1_with(1.8, 0.9, 1.6, 0.7, 0.25, 0.0, 0.25, 0.0, PI).unwrap();
        let ops0 = build_sweep_operators(&p0, &grid, 0.01).unwrap();
        let m_alpha = assemble_riesz_matrix(p0.alpha, grid.nx(), grid.dx()).unwrap();
        let expect = m_alpha.matrix() * (0.25 * 0.01 / 2.0);
        assert!((ops0.mx() - expect).amax() < 1e-14);

        assert!(build_sweep_operators(&p, &grid, 0.0).is_err());
        assert!(build_sweep_operators(&p, &grid, f64::NAN).is_err());
    }

    #[test]
    fn zero_state_is_fixed_point() {
        let p = zero_problem();
        let grid = p.grid_with_h(0.125).unwrap();
        let u = solve(&p, &grid, 0.25, 1.0).unwrap();
        assert_eq!(u.max_abs(), 0.0);
        assert_eq!(u.step(), 4);
        assert_eq!(u.t(), 1.0);
    }

    #[test]
    fn pr_step_equals_factored_scheme() {
        // With commuting sweeps the two half-steps recombine to the factored
        // form exactly; only rounding separates the two code paths.
        let p = example1();
        let grid = p.grid_with_h(0.2).unwrap();
        let dt = 0.05;
        let ops = build_sweep_operators(&p, &grid, dt).unwrap();
        let state = SolutionField::new(p.sample_initial(&grid), 0.0, 0);
        let sh = (p.sample_source(&grid, 0.0) + p.sample_source(&grid, dt)) * 0.5;
        let pr = pr_step(&state, &ops, &sh).unwrap();

        let rhs = &ops.im_x * (state.values() * &ops.im_y) + &sh * dt;
        let tmp = ops.factor_x.solve(&rhs).unwrap();
        let factored = ops.factor_y.solve(&tmp.transpose()).unwrap().transpose();
        let scale = factored.amax().max(1e-300);
        assert!((pr.values() - factored).amax() <= 1e-14 * scale);
    }

    #[test]
    fn pr_step_matches_unsplit_oracle() {
        let p = example1();
        let grid = p.grid_with_h(0.125).unwrap(); // m = 8, 7x7 interior
        let state = SolutionField::new(p.sample_initial(&grid), 0.0, 0);
        let mut prev = f64::INFINITY;
        for dt in [0.1, 0.05, 0.025] {
            let ops = build_sweep_operators(&p, &grid, dt).unwrap();
            let sh = (p.sample_source(&grid, 0.0) + p.sample_source(&grid, dt)) * 0.5;
            let pr = pr_step(&state, &ops, &sh).unwrap();
            let cn = cn_unsplit_step(&state, &p, &grid, dt, &sh).unwrap();
            let diff = (pr.values() - cn.values()).amax();
            assert!(diff < prev / 3.0, "splitting gap not shrinking: {diff} vs {prev}");
            prev = diff;
        }
    }

    #[test]
    fn cn_unsplit_basics() {
        let p = zero_problem();
        let grid = p.grid_with_h(0.25).unwrap();
        let state = SolutionField::new(p.sample_initial(&grid), 0.0, 0);
        let s = DMatrix::zeros(grid.nx(), grid.ny());
        let out = cn_unsplit_step(&state, &p, &grid, 0.1, &s).unwrap();
        assert_eq!(out.max_abs(), 0.0);

        // dt -> 0 leaves the state unchanged.
        let pd = decay_problem();
        let grid = pd.grid_with_h(0.125).unwrap();
        let state = SolutionField::new(pd.sample_initial(&grid), 0.0, 0);
        let s = DMatrix::zeros(grid.nx(), grid.ny());
        let out = cn_unsplit_step(&state, &pd, &grid, 1e-12, &s).unwrap();
        assert!((out.values() - state.values()).amax() < 1e-9);

        // Capacity guard.
        let grid = pd.grid_with_h(1.0 / 70.0).unwrap();
        let state = SolutionField::new(pd.sample_initial(&grid), 0.0, 0);
        let s = DMatrix::zeros(grid.nx(), grid.ny());
        assert!(matches!(
            cn_unsplit_step(&state, &pd, &grid, 0.1, &s),
            Err(Error::OracleCapacity { .. })
        ));
    }

    #[test]
    fn explicit_step_is_first_order_taylor() {
        let p = example1();
        let grid = p.grid_with_h(0.2).unwrap();
        let state = SolutionField::new(p.sample_initial(&grid), 0.0, 0);
        let dt = 1e-3;
        let s = p.sample_source(&grid, 0.0);
        let out = explicit_euler_step(&state, &p, &grid, dt, &s).unwrap();
        let (lx, ly) = directional_operators(&p, &grid).unwrap();
        let expect =
            state.values() - (&lx * state.values() + state.values() * &ly) * dt + &s * dt;
        assert!((out.values() - expect).amax() <= 1e-15);

        // Zero everything stays zero.
        let pz = zero_problem();
        let gz = pz.grid_with_h(0.25).unwrap();
        let sz = DMatrix::zeros(gz.nx(), gz.ny());
        let z = SolutionField::new(pz.sample_initial(&gz), 0.0, 0);
        assert_eq!(
            explicit_euler_step(&z, &pz, &gz, 0.01, &sz).unwrap().max_abs(),
            0.0
        );
    }

    #[test]
    fn explicit_and_pr_agree_to_first_order() {
        let p = example1();
        let grid = p.grid_with_h(0.1).unwrap();
        let t_end = 0.01;
        let mut prev = f64::INFINITY;
        for steps in [10usize, 20, 40] {
            let dt = t_end / steps as f64;
            let ops = build_sweep_operators(&p, &grid, dt).unwrap();
            let mut pr = SolutionField::new(p.sample_initial(&grid), 0.0, 0);
            let mut eu = pr.clone();
            for n in 0..steps {
                let t0 = n as f64 * dt;
                let sh = (p.sample_source(&grid, t0) + p.sample_source(&grid, t0 + dt)) * 0.5;
                pr = pr_step(&pr, &ops, &sh).unwrap();
                let s0 = p.sample_source(&grid, t0);
                eu = explicit_euler_step(&eu, &p, &grid, dt, &s0).unwrap();
            }
            let gap = (pr.values() - eu.values()).amax();
            assert!(gap < prev, "explicit/PR gap not O(dt): {gap} vs {prev}");
            prev = gap;
        }
    }

    #[test]
    fn transpose_symmetry_for_symmetric_problems() {
        // alpha = mu, beta = nu, equal coefficients, square grid: the scheme
        // commutes with the (x <-> y) transpose.
        let p = example1_with(1.7, 0.8, 1.7, 0.8, 0.25, 0.05, 0.25, 0.05, PI).unwrap();
        let grid = p.grid_with_h(0.1).unwrap();
        let dt = 0.05;
        let ops = build_sweep_operators(&p, &grid, dt).unwrap();
        let mut field = SolutionField::new(p.sample_initial(&grid), 0.0, 0);
        for n in 0..5 {
            let t0 = n as f64 * dt;
            let sh = (p.sample_source(&grid, t0) + p.sample_source(&grid, t0 + dt)) * 0.5;
            field = pr_step(&field, &ops, &sh).unwrap();
        }
        let asym = (field.values() - field.values().transpose()).amax();
        assert!(asym <= 1e-12 * field.max_abs().max(1e-300), "asymmetry {asym}");
    }

    #[test]
    fn homogeneous_problem_is_l2_contractive() {
        let p = decay_problem();
        let grid = p.grid_with_h(0.1).unwrap();
        let ops = build_sweep_operators(&p, &grid, 0.5).unwrap();
        let zeros = DMatrix::zeros(grid.nx(), grid.ny());
        let mut field = SolutionField::new(p.sample_initial(&grid), 0.0, 0);
        let mut prev = field.values().norm();
        for _ in 0..6 {
            field = pr_step(&field, &ops, &zeros).unwrap();
            let now = field.values().norm();
            assert!(now <= prev, "l2 norm grew: {now} > {prev}");
            prev = now;
        }
    }

    #[test]
    fn solve_is_bitwise_deterministic() {
        let p = example1();
        let grid = p.grid_with_h(0.1).unwrap();
        let (_, dt) = snap_time_step(PI, 0.05).unwrap();
        let a = solve(&p, &grid, dt, PI).unwrap();
        let b = solve(&p, &grid, dt, PI).unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(a.t(), b.t());
    }

    #[test]
    fn solve_step_count_contract() {
        let p = example1();
        let grid = p.grid_with_h(0.25).unwrap();
        // pi / 0.001 is not an integer: strict solve refuses.
        assert!(matches!(
            solve(&p, &grid, 0.001, PI),
            Err(Error::Configuration(_))
        ));
        // Snapping fixes it.
        let (n, dt) = snap_time_step(PI, 0.001).unwrap();
        assert_eq!(n, 3142);
        assert_relative_eq!(dt * n as f64, PI, epsilon = 1e-12);
        // 2 / 0.001 is exact in f64.
        assert_eq!(steps_for(2.0, 0.001).unwrap(), 2000);
        assert!(snap_time_step(1.0, 10.0).is_err());
    }

    #[test]
    fn spectral_radius_properties() {
        let p = example1();
        let grid = p.grid_with_h(1.0 / 25.0).unwrap();
        // Tiny dt: radius approaches 1 from below.
        let ops = build_sweep_operators(&p, &grid, 1e-6).unwrap();
        let r = pr_iteration_spectral_radius(&ops).unwrap();
        assert!(r < 1.0 && r > 0.999, "radius {r}");
        // Huge dt: still below 1 (unconditional stability).
        let ops = build_sweep_operators(&p, &grid, 10.0).unwrap();
        let r = pr_iteration_spectral_radius(&ops).unwrap();
        assert!(r < 1.0, "radius {r}");
    }

    #[test]
    fn spectral_radius_pure_1d_case() {
        // gamma = 2 diffusion along x only (My = 0): the radius reduces to
        // max |1-λ|/(1+λ) over the eigenvalues of Mx.
        let n = 4;
        let m = assemble_riesz_matrix(crate::coeffs::FractionalOrder::new(2.0).unwrap(), n, 0.2)
            .unwrap();
        let dt = 0.3;
        let mx = m.matrix() * (dt / 2.0);
        let expected = mx
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|&l| ((1.0 - l) / (1.0 + l)).abs())
            .fold(0.0, f64::max);
        let ops = SweepOperators::from_matrices(mx, DMatrix::zeros(n, n), dt).unwrap();
        let r = pr_iteration_spectral_radius(&ops).unwrap();
        assert_relative_eq!(r, expected, max_relative = 1e-13);
    }

    #[test]
    fn shared_types_are_send_sync() {
        // Assembly results and problem definitions may be shared across
        // worker threads; the steppers themselves stay single-threaded.
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<ProblemSpec>();
        assert_send_sync::<crate::operators::RieszMatrix>();
        assert_send_sync::<SweepOperators>();
        assert_send_sync::<SolutionField>();
    }

    #[test]
    fn checkpoint_dump() {
        let p = example2();
        let grid = p.grid_with_h(0.2 * PI).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let opts = SolveOptions {
            checkpoint: Some(path.clone()),
        };
        solve_with_options(&p, &grid, 0.5, 2.0, &opts).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "step,t,max_abs");
        assert_eq!(lines.len(), 5); // header + 4 steps
        assert!(lines[1].starts_with("1,"));
    }
}
