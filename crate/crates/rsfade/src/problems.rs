//! Manufactured problem catalog.
//!
//! Both catalog problems pair a closed-form exact solution with the source
//! term that makes it solve the advection-dispersion equation, built from the
//! Riemann-Liouville power rule. The Φ and Ψ forms are the left+right RL
//! derivative sums of x²(1-x)² and x(π-x); dividing by -2cos(πγ/2) (the Riesz
//! scale) turns them into Riesz derivatives.

use crate::coeffs::FractionalOrder;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use nalgebra::DMatrix;
use serde::Deserialize;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

/// Riesz scale κ_γ = 1/(2 cos(πγ/2)); κ_2 = -1/2. Defined for γ ≠ 1.
pub fn kappa(gamma: FractionalOrder) -> f64 {
    1.0 / (2.0 * (PI * gamma.value() / 2.0).cos())
}

/// Φ(γ,z) on the unit interval: the RL power-rule sum for x²(1-x)², halved.
///
/// Φ(γ,z) = (z^{2-γ} + (1-z)^{2-γ})/Γ(3-γ) - 6(z^{3-γ} + (1-z)^{3-γ})/Γ(4-γ)
///          + 12(z^{4-γ} + (1-z)^{4-γ})/Γ(5-γ)
pub fn phi(gamma: FractionalOrder, z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::DomainError(format!("phi requires z in [0,1], got {z}")));
    }
    Ok(phi_raw(gamma.value(), z))
}

fn phi_raw(g: f64, z: f64) -> f64 {
    phi_profile(g)(z)
}

// Phi with the gamma-function denominators folded in once; the sources
// evaluate these profiles at every node so the Γ calls must not repeat.
fn phi_profile(g: f64) -> impl Fn(f64) -> f64 + Clone {
    let d1 = gamma(3.0 - g);
    let d2 = gamma(4.0 - g);
    let d3 = gamma(5.0 - g);
    move |z: f64| {
        let w = 1.0 - z;
        (z.powf(2.0 - g) + w.powf(2.0 - g)) / d1
            - 6.0 * (z.powf(3.0 - g) + w.powf(3.0 - g)) / d2
            + 12.0 * (z.powf(4.0 - g) + w.powf(4.0 - g)) / d3
    }
}

/// Ψ(γ,z) on the interval (0,π): the RL power-rule sum for x(π-x).
///
/// Ψ(γ,z) = π(z^{1-γ} + (π-z)^{1-γ})/Γ(2-γ) - 2(z^{2-γ} + (π-z)^{2-γ})/Γ(3-γ)
///
/// For γ > 1 the first term is singular at the endpoints, so z = 0 and z = π
/// are rejected there; at γ = 2 exactly the 1/Γ(0) factor annihilates it.
pub fn psi(gamma: FractionalOrder, z: f64) -> Result<f64> {
    let g = gamma.value();
    if !(0.0..=PI).contains(&z) {
        return Err(Error::DomainError(format!("psi requires z in [0,pi], got {z}")));
    }
    if g > 1.0 && g < 2.0 && (z == 0.0 || z == PI) {
        return Err(Error::DomainError(format!(
            "psi endpoint z = {z} is singular for order {g} > 1"
        )));
    }
    Ok(psi_raw(g, z))
}

fn psi_raw(g: f64, z: f64) -> f64 {
    let w = PI - z;
    let head = if g == 2.0 {
        0.0 // 1/Gamma(0) = 0
    } else {
        PI * (z.powf(1.0 - g) + w.powf(1.0 - g)) / gamma(2.0 - g)
    };
    head - 2.0 * (z.powf(2.0 - g) + w.powf(2.0 - g)) / gamma(3.0 - g)
}

// Psi for interior evaluation (z strictly inside (0,π) when g > 1).
fn psi_profile(g: f64) -> impl Fn(f64) -> f64 + Clone {
    let head_scale = if g == 2.0 { 0.0 } else { PI / gamma(2.0 - g) };
    let d2 = gamma(3.0 - g);
    move |z: f64| {
        let w = PI - z;
        let head = if head_scale == 0.0 {
            0.0
        } else {
            head_scale * (z.powf(1.0 - g) + w.powf(1.0 - g))
        };
        head - 2.0 * (z.powf(2.0 - g) + w.powf(2.0 - g)) / d2
    }
}

/// Closed-form Riesz derivative of x²(1-x)² on the unit interval: -Φ(γ,x)/cos(πγ/2).
///
/// At γ = 2 this reduces to the classical (x²(1-x)²)'' = 2 - 12x + 12x².
/// γ = 1 is unrepresentable in `FractionalOrder`, which is exactly the scale
/// pole this form would hit.
pub fn riesz_derivative_poly1(gamma: FractionalOrder, x: f64) -> Result<f64> {
    Ok(-phi(gamma, x)? / (PI * gamma.value() / 2.0).cos())
}

/// Closed-form Riesz derivative of x(π-x) on (0,π): -Ψ(γ,x)/(2cos(πγ/2)).
///
/// At γ = 2 this is the constant -2.
pub fn riesz_derivative_poly2(gamma: FractionalOrder, x: f64) -> Result<f64> {
    Ok(-psi(gamma, x)? * kappa(gamma))
}

type SpaceFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type SpaceTimeFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
type Profile1D = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Boxed exact-solution closure accepted by [`ProblemSpec::custom`].
pub type BoxedSpaceTimeFn = Box<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// One separable source contribution fx(x) · fy(y) · ft(t).
///
/// The catalog sources are short sums of such terms; the time stepper samples
/// the spatial profiles once per run instead of re-evaluating the full source
/// at every node and step.
#[derive(Clone)]
pub struct SeparableTerm {
    pub fx: Profile1D,
    pub fy: Profile1D,
    pub ft: Profile1D,
}

impl SeparableTerm {
    fn new(
        fx: impl Fn(f64) -> f64 + Send + Sync + 'static,
        fy: impl Fn(f64) -> f64 + Send + Sync + 'static,
        ft: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SeparableTerm {
            fx: Arc::new(fx),
            fy: Arc::new(fy),
            ft: Arc::new(ft),
        }
    }
}

/// A complete problem instance: orders, coefficients, domain, horizon and the
/// initial/source/exact functions.
#[derive(Clone)]
pub struct ProblemSpec {
    name: String,
    pub alpha: FractionalOrder,
    pub beta: FractionalOrder,
    pub mu: FractionalOrder,
    pub nu: FractionalOrder,
    pub d_alpha: f64,
    pub c_beta: f64,
    pub d_mu: f64,
    pub c_nu: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub t_end: f64,
    initial: SpaceFn,
    source: SpaceTimeFn,
    /// Same source as a sum of separable terms, when the problem has one.
    separable_source: Option<Vec<SeparableTerm>>,
    exact: Option<SpaceTimeFn>,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("alpha", &self.alpha.value())
            .field("beta", &self.beta.value())
            .field("mu", &self.mu.value())
            .field("nu", &self.nu.value())
            .field("d_alpha", &self.d_alpha)
            .field("c_beta", &self.c_beta)
            .field("d_mu", &self.d_mu)
            .field("c_nu", &self.c_nu)
            .field("domain", &(self.x_lo, self.x_hi, self.y_lo, self.y_hi))
            .field("t_end", &self.t_end)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

#[allow(clippy::too_many_arguments)]
fn validate_parameters(
    alpha: FractionalOrder,
    beta: FractionalOrder,
    mu: FractionalOrder,
    nu: FractionalOrder,
    d_alpha: f64,
    c_beta: f64,
    d_mu: f64,
    c_nu: f64,
    t_end: f64,
) -> Result<()> {
    if !alpha.is_dispersion_order() || !mu.is_dispersion_order() {
        return Err(Error::ProblemSpec(format!(
            "dispersion orders must lie in (1,2], got alpha={}, mu={}",
            alpha.value(),
            mu.value()
        )));
    }
    if !beta.is_advection_order() || !nu.is_advection_order() {
        return Err(Error::ProblemSpec(format!(
            "advection orders must lie in (0,1), got beta={}, nu={}",
            beta.value(),
            nu.value()
        )));
    }
    if !(d_alpha > 0.0 && d_mu > 0.0) {
        return Err(Error::ProblemSpec(
            "dispersion coefficients d_alpha, d_mu must be positive".into(),
        ));
    }
    if c_beta < 0.0 || c_nu < 0.0 {
        return Err(Error::ProblemSpec(
            "advection coefficients c_beta, c_nu must be nonnegative".into(),
        ));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::ProblemSpec("t_end must be positive".into()));
    }
    Ok(())
}

impl ProblemSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn initial(&self, x: f64, y: f64) -> f64 {
        (self.initial)(x, y)
    }

    pub fn source(&self, x: f64, y: f64, t: f64) -> f64 {
        (self.source)(x, y, t)
    }

    pub fn exact(&self, x: f64, y: f64, t: f64) -> Option<f64> {
        self.exact.as_ref().map(|f| f(x, y, t))
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Separable form of the source, when the problem carries one. Must agree
    /// with [`ProblemSpec::source`] pointwise; the solver prefers it because
    /// the spatial profiles then get sampled once per run instead of per step.
    pub fn separable_source(&self) -> Option<&[SeparableTerm]> {
        self.separable_source.as_deref()
    }

    pub fn exact_fn(&self) -> Option<SpaceTimeFn> {
        self.exact.clone()
    }

    pub fn length_x(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn length_y(&self) -> f64 {
        self.y_hi - self.y_lo
    }

    /// Grid over this problem's rectangle with requested spacing h in both
    /// directions; h must divide the edge lengths to ~1e-8 relative.
    pub fn grid_with_h(&self, h: f64) -> Result<GridSpec> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("spacing must be positive, got {h}")));
        }
        let m1 = cells_for(self.length_x(), h)?;
        let m2 = cells_for(self.length_y(), h)?;
        GridSpec::new(self.x_lo, self.x_hi, self.y_lo, self.y_hi, m1, m2)
    }

    /// Grid over this problem's rectangle with explicit cell counts.
    pub fn grid_with_cells(&self, m1: usize, m2: usize) -> Result<GridSpec> {
        GridSpec::new(self.x_lo, self.x_hi, self.y_lo, self.y_hi, m1, m2)
    }

    /// Check that a grid covers exactly this problem's rectangle.
    pub fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0f64).max(a.abs().max(b.abs()));
        if same(grid.x_lo, self.x_lo)
            && same(grid.x_hi, self.x_hi)
            && same(grid.y_lo, self.y_lo)
            && same(grid.y_hi, self.y_hi)
        {
            Ok(())
        } else {
            Err(Error::ProblemSpec(format!(
                "grid rectangle [{}, {}]x[{}, {}] does not match the problem domain",
                grid.x_lo, grid.x_hi, grid.y_lo, grid.y_hi
            )))
        }
    }

    /// Initial data sampled pointwise at interior nodes.
    pub fn sample_initial(&self, grid: &GridSpec) -> DMatrix<f64> {
        DMatrix::from_fn(grid.nx(), grid.ny(), |i, j| {
            (self.initial)(grid.interior_x(i), grid.interior_y(j))
        })
    }

    pub fn sample_source(&self, grid: &GridSpec, t: f64) -> DMatrix<f64> {
        DMatrix::from_fn(grid.nx(), grid.ny(), |i, j| {
            (self.source)(grid.interior_x(i), grid.interior_y(j), t)
        })
    }

    pub fn sample_exact(&self, grid: &GridSpec, t: f64) -> Option<DMatrix<f64>> {
        self.exact.as_ref().map(|f| {
            DMatrix::from_fn(grid.nx(), grid.ny(), |i, j| {
                f(grid.interior_x(i), grid.interior_y(j), t)
            })
        })
    }
}

impl ProblemSpec {
    /// Assemble a problem from explicit parts. The source must be manufactured
    /// consistently with `exact` by the caller; nothing is checked beyond the
    /// parameter ranges and domain ordering.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        name: impl Into<String>,
        orders: [f64; 4],
        coefficients: [f64; 4],
        domain: [f64; 4],
        t_end: f64,
        initial: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        source: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        exact: Option<BoxedSpaceTimeFn>,
    ) -> Result<Self> {
        let [alpha, beta, mu, nu] = orders;
        let [d_alpha, c_beta, d_mu, c_nu] = coefficients;
        let alpha = FractionalOrder::new(alpha)?;
        let beta = FractionalOrder::new(beta)?;
        let mu = FractionalOrder::new(mu)?;
        let nu = FractionalOrder::new(nu)?;
        validate_parameters(alpha, beta, mu, nu, d_alpha, c_beta, d_mu, c_nu, t_end)?;
        let [x_lo, x_hi, y_lo, y_hi] = domain;
        if !(x_lo < x_hi && y_lo < y_hi) {
            return Err(Error::ProblemSpec("domain edges must be ordered".into()));
        }
        Ok(ProblemSpec {
            name: name.into(),
            alpha,
            beta,
            mu,
            nu,
            d_alpha,
            c_beta,
            d_mu,
            c_nu,
            x_lo,
            x_hi,
            y_lo,
            y_hi,
            t_end,
            initial: Arc::new(initial),
            source: Arc::new(source),
            separable_source: None,
            exact: exact.map(|f| Arc::from(f) as SpaceTimeFn),
        })
    }
}

fn cells_for(length: f64, h: f64) -> Result<usize> {
    let m = (length / h).round();
    if m < 2.0 {
        return Err(Error::InvalidArgument(format!(
            "spacing {h} leaves fewer than 2 cells over length {length}"
        )));
    }
    if (m * h - length).abs() > 1e-8 * length {
        return Err(Error::InvalidArgument(format!(
            "spacing {h} does not divide the domain length {length}"
        )));
    }
    Ok(m as usize)
}

/// Example problem on (0,1)²: exact solution x²y²(1-x)²(1-y)² sin(πt), zero
/// initial data, t_end = π. Orders and coefficients are the catalog defaults
/// but any valid set keeps the solution/source pair consistent.
#[allow(clippy::too_many_arguments)]
pub fn example1_with(
    alpha: f64,
    beta: f64,
    mu: f64,
    nu: f64,
    d_alpha: f64,
    c_beta: f64,
    d_mu: f64,
    c_nu: f64,
    t_end: f64,
) -> Result<ProblemSpec> {
    let alpha = FractionalOrder::new(alpha)?;
    let beta = FractionalOrder::new(beta)?;
    let mu = FractionalOrder::new(mu)?;
    let nu = FractionalOrder::new(nu)?;
    validate_parameters(alpha, beta, mu, nu, d_alpha, c_beta, d_mu, c_nu, t_end)?;
    let (a, b, m, n) = (alpha.value(), beta.value(), mu.value(), nu.value());
    let (ca, cb, cm, cn) = (
        (PI * a / 2.0).cos(),
        (PI * b / 2.0).cos(),
        (PI * m / 2.0).cos(),
        (PI * n / 2.0).cos(),
    );
    let (pa, pb, pm, pn) = (phi_profile(a), phi_profile(b), phi_profile(m), phi_profile(n));
    let gx = |x: f64| x * x * (1.0 - x) * (1.0 - x);
    let sin_t = |t: f64| (PI * t).sin();
    let separable = vec![
        SeparableTerm::new(
            {
                let pa = pa.clone();
                move |x| d_alpha / ca * pa(x)
            },
            gx,
            sin_t,
        ),
        SeparableTerm::new(
            {
                let pb = pb.clone();
                move |x| c_beta / cb * pb(x)
            },
            gx,
            sin_t,
        ),
        SeparableTerm::new(
            gx,
            {
                let pm = pm.clone();
                move |y| d_mu / cm * pm(y)
            },
            sin_t,
        ),
        SeparableTerm::new(
            gx,
            {
                let pn = pn.clone();
                move |y| c_nu / cn * pn(y)
            },
            sin_t,
        ),
        SeparableTerm::new(move |x| PI * gx(x), gx, |t: f64| (PI * t).cos()),
    ];
    let source = move |x: f64, y: f64, t: f64| {
        let st = (PI * t).sin();
        d_alpha * gx(y) * st / ca * pa(x)
            + c_beta * gx(y) * st / cb * pb(x)
            + d_mu * gx(x) * st / cm * pm(y)
            + c_nu * gx(x) * st / cn * pn(y)
            + PI * gx(x) * gx(y) * (PI * t).cos()
    };
    let exact = move |x: f64, y: f64, t: f64| gx(x) * gx(y) * (PI * t).sin();
    Ok(ProblemSpec {
        name: "example1".into(),
        alpha,
        beta,
        mu,
        nu,
        d_alpha,
        c_beta,
        d_mu,
        c_nu,
        x_lo: 0.0,
        x_hi: 1.0,
        y_lo: 0.0,
        y_hi: 1.0,
        t_end,
        initial: Arc::new(|_, _| 0.0),
        source: Arc::new(source),
        separable_source: Some(separable),
        exact: Some(Arc::new(exact)),
    })
}

/// Example 1 with the catalog parameters: α=1.8, β=0.9, μ=1.6, ν=0.7,
/// d=0.25, c=0.05, t_end=π.
pub fn example1() -> ProblemSpec {
    example1_with(1.8, 0.9, 1.6, 0.7, 0.25, 0.05, 0.25, 0.05, PI)
        .expect("catalog parameters are valid")
}

/// Example problem on (0,π)²: exact solution xy(π-x)(π-y)e^{-t}, t_end = 2.
#[allow(clippy::too_many_arguments)]
pub fn example2_with(
    alpha: f64,
    beta: f64,
    mu: f64,
    nu: f64,
    d_alpha: f64,
    c_beta: f64,
    d_mu: f64,
    c_nu: f64,
    t_end: f64,
) -> Result<ProblemSpec> {
    let alpha = FractionalOrder::new(alpha)?;
    let beta = FractionalOrder::new(beta)?;
    let mu = FractionalOrder::new(mu)?;
    let nu = FractionalOrder::new(nu)?;
    validate_parameters(alpha, beta, mu, nu, d_alpha, c_beta, d_mu, c_nu, t_end)?;
    let (a, b, m, n) = (alpha.value(), beta.value(), mu.value(), nu.value());
    let (ca, cb, cm, cn) = (
        (PI * a / 2.0).cos(),
        (PI * b / 2.0).cos(),
        (PI * m / 2.0).cos(),
        (PI * n / 2.0).cos(),
    );
    let (pa, pb, pm, pn) = (psi_profile(a), psi_profile(b), psi_profile(m), psi_profile(n));
    let q = |z: f64| z * (PI - z);
    let decay = |t: f64| (-t).exp();
    let separable = vec![
        SeparableTerm::new(
            {
                let pa = pa.clone();
                move |x| d_alpha / (2.0 * ca) * pa(x)
            },
            q,
            decay,
        ),
        SeparableTerm::new(
            {
                let pb = pb.clone();
                move |x| c_beta / (2.0 * cb) * pb(x)
            },
            q,
            decay,
        ),
        SeparableTerm::new(
            q,
            {
                let pm = pm.clone();
                move |y| d_mu / (2.0 * cm) * pm(y)
            },
            decay,
        ),
        SeparableTerm::new(
            q,
            {
                let pn = pn.clone();
                move |y| c_nu / (2.0 * cn) * pn(y)
            },
            decay,
        ),
        SeparableTerm::new(move |x| -q(x), q, decay),
    ];
    let source = move |x: f64, y: f64, t: f64| {
        let et = (-t).exp();
        d_alpha * q(y) * et / (2.0 * ca) * pa(x)
            + c_beta * q(y) * et / (2.0 * cb) * pb(x)
            + d_mu * q(x) * et / (2.0 * cm) * pm(y)
            + c_nu * q(x) * et / (2.0 * cn) * pn(y)
            - q(x) * q(y) * et
    };
    let exact = move |x: f64, y: f64, t: f64| q(x) * q(y) * (-t).exp();
    Ok(ProblemSpec {
        name: "example2".into(),
        alpha,
        beta,
        mu,
        nu,
        d_alpha,
        c_beta,
        d_mu,
        c_nu,
        x_lo: 0.0,
        x_hi: PI,
        y_lo: 0.0,
        y_hi: PI,
        t_end,
        initial: Arc::new(move |x, y| q(x) * q(y)),
        source: Arc::new(source),
        separable_source: Some(separable),
        exact: Some(Arc::new(exact)),
    })
}

/// Example 2 with the catalog parameters: α=1.8, β=0.7, μ=1.6, ν=0.5,
/// d=0.25, c=0.05, t_end=2.
pub fn example2() -> ProblemSpec {
    example2_with(1.8, 0.7, 1.6, 0.5, 0.25, 0.05, 0.25, 0.05, 2.0)
        .expect("catalog parameters are valid")
}

/// Look up a catalog problem by name.
pub fn by_name(name: &str) -> Result<ProblemSpec> {
    match name {
        "example1" => Ok(example1()),
        "example2" => Ok(example2()),
        other => Err(Error::UnknownProblem(other.to_string())),
    }
}

/// On-disk problem description. `functions` selects the manufactured family
/// ("example1", "example2") or "zero"; orders, coefficients and t_end may be
/// overridden. Arbitrary source/exact expressions are out of scope, so the
/// domain is fixed by the family (and must be given explicitly for "zero").
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub functions: String,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
    pub d_alpha: Option<f64>,
    pub c_beta: Option<f64>,
    pub d_mu: Option<f64>,
    pub c_nu: Option<f64>,
    /// [x_lo, x_hi, y_lo, y_hi]; only for (and required by) "zero".
    pub domain: Option<[f64; 4]>,
    pub t_end: Option<f64>,
}

pub fn from_config(cfg: &ProblemConfig) -> Result<ProblemSpec> {
    match cfg.functions.as_str() {
        "example1" | "example2" => {
            if cfg.domain.is_some() {
                return Err(Error::ProblemSpec(
                    "the catalog families fix their own domain; remove the domain key".into(),
                ));
            }
            let base = by_name(&cfg.functions)?;
            let build = if cfg.functions == "example1" {
                example1_with
            } else {
                example2_with
            };
            build(
                cfg.alpha.unwrap_or(base.alpha.value()),
                cfg.beta.unwrap_or(base.beta.value()),
                cfg.mu.unwrap_or(base.mu.value()),
                cfg.nu.unwrap_or(base.nu.value()),
                cfg.d_alpha.unwrap_or(base.d_alpha),
                cfg.c_beta.unwrap_or(base.c_beta),
                cfg.d_mu.unwrap_or(base.d_mu),
                cfg.c_nu.unwrap_or(base.c_nu),
                cfg.t_end.unwrap_or(base.t_end),
            )
        }
        "zero" => {
            let domain = cfg.domain.ok_or_else(|| {
                Error::ProblemSpec("the zero family needs an explicit domain".into())
            })?;
            let missing = || Error::ProblemSpec("the zero family needs all orders and coefficients".into());
            let alpha = FractionalOrder::new(cfg.alpha.ok_or_else(missing)?)?;
            let beta = FractionalOrder::new(cfg.beta.ok_or_else(missing)?)?;
            let mu = FractionalOrder::new(cfg.mu.ok_or_else(missing)?)?;
            let nu = FractionalOrder::new(cfg.nu.ok_or_else(missing)?)?;
            let d_alpha = cfg.d_alpha.ok_or_else(missing)?;
            let c_beta = cfg.c_beta.ok_or_else(missing)?;
            let d_mu = cfg.d_mu.ok_or_else(missing)?;
            let c_nu = cfg.c_nu.ok_or_else(missing)?;
            let t_end = cfg.t_end.unwrap_or(1.0);
            validate_parameters(alpha, beta, mu, nu, d_alpha, c_beta, d_mu, c_nu, t_end)?;
            Ok(ProblemSpec {
                name: "zero".into(),
                alpha,
                beta,
                mu,
                nu,
                d_alpha,
                c_beta,
                d_mu,
                c_nu,
                x_lo: domain[0],
                x_hi: domain[1],
                y_lo: domain[2],
                y_hi: domain[3],
                t_end,
                initial: Arc::new(|_, _| 0.0),
                source: Arc::new(|_, _, _| 0.0),
                separable_source: Some(Vec::new()),
                exact: Some(Arc::new(|_, _, _| 0.0)),
            })
        }
        other => Err(Error::UnknownProblem(other.to_string())),
    }
}

/// Load a problem description from a JSON file.
pub fn from_config_file(path: &Path) -> Result<ProblemSpec> {
    let text = std::fs::read_to_string(path)?;
    let cfg: ProblemConfig = serde_json::from_str(&text)?;
    from_config(&cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn order(g: f64) -> FractionalOrder {
        FractionalOrder::new(g).unwrap()
    }

    #[test]
    fn kappa_values() {
        assert_relative_eq!(kappa(order(2.0)), -0.5, epsilon = 1e-15);
        assert!(kappa(order(0.5)) > 0.0);
        assert!(kappa(order(1.5)) < 0.0);
    }

    #[test]
    fn phi_classical_and_frozen_values() {
        for z in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let expect = 2.0 - 6.0 + 6.0 * (z * z + (1.0 - z) * (1.0 - z));
            assert_relative_eq!(phi(order(2.0), z).unwrap(), expect, epsilon = 1e-13);
        }
        // Independent high-precision evaluation.
        assert_relative_eq!(
            phi(order(1.8), 0.5).unwrap(),
            -0.689_554_820_546_836_2,
            max_relative = 1e-13
        );
        assert!(matches!(phi(order(1.8), 1.2), Err(Error::DomainError(_))));
        assert!(matches!(phi(order(1.8), -0.1), Err(Error::DomainError(_))));
    }

    #[test]
    fn psi_frozen_values_and_domain() {
        assert_relative_eq!(
            psi(order(1.6), 0.1 * PI).unwrap(),
            -1.238_463_116_637_996,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            psi(order(0.5), PI / 2.0).unwrap(),
            2.961_921_958_772_244,
            max_relative = 1e-13
        );
        // gamma = 2: the 1/Gamma(0) term vanishes, leaving the constant -4.
        assert_relative_eq!(psi(order(2.0), 1.0).unwrap(), -4.0, epsilon = 1e-13);
        // singular endpoints for gamma > 1 only
        assert!(psi(order(1.8), 0.0).is_err());
        assert!(psi(order(1.8), PI).is_err());
        assert!(psi(order(0.7), 0.0).is_ok());
        assert!(psi(order(0.7), 3.0).is_ok());
        assert!(psi(order(0.7), 5.0).is_err());
        assert!(psi(order(0.7), -0.1).is_err());
    }

    #[test]
    fn poly1_closed_form() {
        // gamma = 2 limit: the Riesz derivative of x²(1-x)² is its second
        // derivative 2 - 12x + 12x², which equals Phi(2,x) since cos(pi) = -1.
        for x in [0.1, 0.3, 0.5, 0.8] {
            let v = riesz_derivative_poly1(order(2.0), x).unwrap();
            assert_relative_eq!(v, 2.0 - 12.0 * x + 12.0 * x * x, epsilon = 1e-12);
            assert_relative_eq!(v, phi(order(2.0), x).unwrap(), epsilon = 1e-13);
        }
        // x <-> 1-x symmetry.
        for x in [0.05, 0.25, 0.45] {
            assert_relative_eq!(
                riesz_derivative_poly1(order(1.8), x).unwrap(),
                riesz_derivative_poly1(order(1.8), 1.0 - x).unwrap(),
                max_relative = 1e-13
            );
        }
        // Frozen value from the RL power-rule oracle.
        assert_relative_eq!(
            riesz_derivative_poly1(order(1.8), 0.3).unwrap(),
            -0.372_644_854_848_140_3,
            max_relative = 1e-13
        );
    }

    #[test]
    fn poly2_closed_form() {
        // gamma = 2: Riesz derivative of x(pi-x) is its second derivative -2.
        for x in [0.5, 1.5, 3.0] {
            assert_relative_eq!(
                riesz_derivative_poly2(order(2.0), x).unwrap(),
                -2.0,
                epsilon = 1e-12
            );
        }
        for x in [0.3, 1.0] {
            assert_relative_eq!(
                riesz_derivative_poly2(order(1.6), x).unwrap(),
                riesz_derivative_poly2(order(1.6), PI - x).unwrap(),
                max_relative = 1e-12
            );
        }
        // Frozen value from the RL power-rule oracle.
        assert_relative_eq!(
            riesz_derivative_poly2(order(1.6), PI / 4.0).unwrap(),
            -1.692_342_145_282_264,
            max_relative = 1e-13
        );
    }

    #[test]
    fn example1_structure() {
        let p = example1();
        assert_eq!(p.name(), "example1");
        assert_eq!(p.t_end, PI);
        // Initial condition is the exact solution at t = 0 (identically zero).
        for (x, y) in [(0.3, 0.7), (0.5, 0.5), (0.9, 0.1)] {
            assert_eq!(p.initial(x, y), 0.0);
            assert_eq!(p.exact(x, y, 0.0).unwrap(), 0.0);
        }
        // Exact solution vanishes on the boundary at all times.
        for t in [0.3, 1.0, 3.0] {
            assert_eq!(p.exact(0.0, 0.5, t).unwrap(), 0.0);
            assert_eq!(p.exact(1.0, 0.5, t).unwrap(), 0.0);
            assert_eq!(p.exact(0.5, 0.0, t).unwrap(), 0.0);
            assert_eq!(p.exact(0.5, 1.0, t).unwrap(), 0.0);
        }
        assert!(p.source(0.5, 0.5, 0.5).is_finite());
    }

    #[test]
    fn example2_structure() {
        let p = example2();
        assert_eq!(p.t_end, 2.0);
        for (x, y) in [(0.5, 2.0), (1.0, 1.0)] {
            assert_relative_eq!(
                p.initial(x, y),
                p.exact(x, y, 0.0).unwrap(),
                epsilon = 1e-15
            );
            assert_relative_eq!(
                p.initial(x, y),
                x * (PI - x) * y * (PI - y),
                epsilon = 1e-13
            );
        }
        for t in [0.1, 1.0] {
            assert_eq!(p.exact(0.0, 1.0, t).unwrap(), 0.0);
            assert_eq!(p.exact(PI, 1.0, t).unwrap(), 0.0);
        }
    }

    // Residual oracle: on a fine grid the discrete residual
    // u_t - (-(d_a M_a + c_b M_b) along x - (d_m M_m + c_n M_n) along y) u - s
    // evaluated on the exact solution must be small at interior points.
    fn centre_residual(p: &ProblemSpec, t: f64) -> f64 {
        use crate::operators::{apply_along_x, apply_along_y, assemble_riesz_matrix};
        let m = 256;
        let grid = p.grid_with_cells(m, m).unwrap();
        let (nx, dx, dy) = (grid.nx(), grid.dx(), grid.dy());
        let u = p.sample_exact(&grid, t).unwrap();
        let s = p.sample_source(&grid, t);
        let ma = assemble_riesz_matrix(p.alpha, nx, dx).unwrap();
        let mb = assemble_riesz_matrix(p.beta, nx, dx).unwrap();
        let mm = assemble_riesz_matrix(p.mu, grid.ny(), dy).unwrap();
        let mn = assemble_riesz_matrix(p.nu, grid.ny(), dy).unwrap();
        let rhs = -(apply_along_x(&ma, &u).unwrap() * p.d_alpha
            + apply_along_x(&mb, &u).unwrap() * p.c_beta
            + apply_along_y(&mm, &u).unwrap() * p.d_mu
            + apply_along_y(&mn, &u).unwrap() * p.c_nu);
        // analytic time derivative of the exact solutions
        let c = nx / 2;
        let (x, y) = (grid.interior_x(c), grid.interior_y(c));
        let ut = if p.name() == "example1" {
            let gx = |z: f64| z * z * (1.0 - z) * (1.0 - z);
            PI * gx(x) * gx(y) * (PI * t).cos()
        } else {
            let q = |z: f64| z * (PI - z);
            -q(x) * q(y) * (-t).exp()
        };
        (ut - rhs[(c, c)] - s[(c, c)]).abs()
    }

    #[test]
    fn example1_source_residual() {
        // x²(1-x)² has a C¹ zero extension; the centre residual is at the
        // operator's interior accuracy floor.
        let r = centre_residual(&example1(), 0.5);
        assert!(r < 1e-8, "residual {r}");
    }

    #[test]
    fn example2_source_residual() {
        // x(pi-x) has only a C⁰ zero extension; the discrete operator agrees
        // with the singular closed form at second order only (~6.5e-6 at
        // h = pi/256 per direction), which bounds the residual here.
        let r = centre_residual(&example2(), 1.0);
        assert!(r < 1e-4, "residual {r}");
    }

    #[test]
    fn separable_source_matches_pointwise_source() {
        for p in [example1(), example2()] {
            let terms = p.separable_source().expect("catalog sources are separable");
            for (x, y) in [(0.21, 0.47), (0.5, 0.5), (0.93, 0.11)] {
                let x = x * p.length_x();
                let y = y * p.length_y();
                for t in [0.0, 0.37, 1.9] {
                    let from_terms: f64 =
                        terms.iter().map(|s| (s.fx)(x) * (s.fy)(y) * (s.ft)(t)).sum();
                    let direct = p.source(x, y, t);
                    assert!(
                        (from_terms - direct).abs() <= 1e-13 * direct.abs().max(1.0),
                        "{}: separable {from_terms} vs pointwise {direct}",
                        p.name()
                    );
                }
            }
        }
    }

    #[test]
    fn catalog_and_config() {
        assert!(by_name("example1").is_ok());
        assert!(by_name("example2").is_ok());
        assert!(matches!(by_name("nope"), Err(Error::UnknownProblem(_))));

        let cfg: ProblemConfig = serde_json::from_str(
            r#"{"functions": "example1", "alpha": 1.5, "t_end": 1.0}"#,
        )
        .unwrap();
        let p = from_config(&cfg).unwrap();
        assert_eq!(p.alpha.value(), 1.5);
        assert_eq!(p.beta.value(), 0.9);
        assert_eq!(p.t_end, 1.0);

        let zero: ProblemConfig = serde_json::from_str(
            r#"{"functions": "zero", "alpha": 1.8, "beta": 0.9, "mu": 1.6, "nu": 0.7,
                "d_alpha": 0.25, "c_beta": 0.0, "d_mu": 0.25, "c_nu": 0.0,
                "domain": [0.0, 1.0, 0.0, 1.0], "t_end": 0.5}"#,
        )
        .unwrap();
        let p = from_config(&zero).unwrap();
        assert_eq!(p.source(0.3, 0.3, 0.1), 0.0);
        assert_eq!(p.exact(0.3, 0.3, 0.1), Some(0.0));

        assert!(serde_json::from_str::<ProblemConfig>(r#"{"functions": "zero", "bogus": 1}"#)
            .is_err());

        let bad_orders: ProblemConfig =
            serde_json::from_str(r#"{"functions": "example1", "alpha": 0.5}"#).unwrap();
        assert!(from_config(&bad_orders).is_err());
    }

    #[test]
    fn grid_helpers() {
        let p = example1();
        let g = p.grid_with_h(0.1).unwrap();
        assert_eq!(g.m1, 10);
        assert_eq!(g.m2, 10);
        assert!(p.grid_with_h(0.3).is_err()); // does not divide 1.0

        let p2 = example2();
        let g2 = p2.grid_with_h(0.1 * PI).unwrap();
        assert_eq!(g2.m1, 10);
        assert!(p.check_grid(&g).is_ok());
        assert!(p.check_grid(&g2).is_err());
    }
}
