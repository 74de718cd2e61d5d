//! Truncation residuals of the BPF scheme on an exact solution, the
//! source-norm residual bounds, and the error-equation consistency check.

use num_complex::Complex64;

use super::quadrature::l2_norm;
use crate::error::{Error, Result};
use crate::grid::{sample, GridFunction, UniformGrid};
use crate::numerics::{nyquist_guard, stability_constant_a0, theta, DEFAULT_GUARD_TOL};
use crate::reference::ExactSolution;
use crate::schemes::{assemble_bpf, solve_scheme, HelmholtzProblem, SchemeKind};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Panels used for `‖f''‖` and `‖f'''‖`.
pub const SOURCE_NORM_PANELS: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct InteriorResidual {
    /// `τ_i` for `i = 1..n-1`.
    pub values: Vec<Complex64>,
    /// `‖τ‖_{0,h}`.
    pub norm: f64,
}

/// `τ_i = Θ(kh)·(Δ_h u)(x_i) - u''(x_i)` at interior nodes.
pub fn interior_residual(
    exact: &ExactSolution,
    k: f64,
    grid: &UniformGrid,
) -> Result<InteriorResidual> {
    let h = grid.h();
    nyquist_guard(k, h, DEFAULT_GUARD_TOL)?;
    let theta = theta(k * h)?;
    let u = sample(|x| (exact.u)(x), grid)?;
    let values: Vec<Complex64> = u
        .discrete_laplacian()
        .into_iter()
        .enumerate()
        .map(|(j, lap)| theta * lap - (exact.d2u)(grid.node(j + 1)))
        .collect();
    let norm = (h * values.iter().map(|t| t.norm_sqr()).sum::<f64>()).sqrt();
    Ok(InteriorResidual { values, norm })
}

/// `(β₀, β_L)` from the explicit boundary-row formulas.
pub fn boundary_residuals(
    exact: &ExactSolution,
    k: f64,
    h: f64,
    length: f64,
) -> Result<(Complex64, Complex64)> {
    nyquist_guard(k, h, DEFAULT_GUARD_TOL)?;
    let s = k * h;
    let kappa = k / s.sin();
    let phase = Complex64::from_polar(1.0, s);
    let u = &exact.u;
    let du = &exact.du;
    let beta0 = kappa * (u(h) - phase * u(0.0)) - (du(0.0) - I * k * u(0.0));
    let beta_l = kappa * (phase * u(length) - u(length - h)) - (du(length) + I * k * u(length));
    Ok((beta0, beta_l))
}

/// `(‖f''‖_{L²}, ‖f'''‖_{L²})` from the problem's analytic derivatives.
pub fn source_sobolev_norms(p: &HelmholtzProblem) -> Result<(f64, f64)> {
    let d = p.source_derivatives.as_ref().ok_or_else(|| {
        Error::InvalidInput(format!("problem '{}' has no source derivatives", p.id.name))
    })?;
    let f2 = l2_norm(|x| (d.second)(x), 0.0, p.length, SOURCE_NORM_PANELS);
    let f3 = l2_norm(|x| (d.third)(x), 0.0, p.length, SOURCE_NORM_PANELS);
    Ok((f2, f3))
}

/// Computed residuals next to their `h²` bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub tau_norm: f64,
    pub beta0: Complex64,
    pub beta_l: Complex64,
    /// `L·Θ·h²/12·‖f'''‖`.
    pub tau_bound: f64,
    /// `2√(LΘ)·|sec(kh/2)|·h²/6·‖f''‖`.
    pub beta_bound: f64,
}

impl ResidualReport {
    pub fn tau_holds(&self) -> bool {
        self.tau_norm <= self.tau_bound
    }

    pub fn beta_holds(&self) -> bool {
        self.beta0.norm() + self.beta_l.norm() <= self.beta_bound
    }
}

pub fn residual_report(
    p: &HelmholtzProblem,
    exact: &ExactSolution,
    n: usize,
) -> Result<ResidualReport> {
    let grid = p.grid(n)?;
    let (k, h, l) = (p.k, grid.h(), p.length);
    let tau = interior_residual(exact, k, &grid)?;
    let (beta0, beta_l) = boundary_residuals(exact, k, h, l)?;
    let (f2, f3) = source_sobolev_norms(p)?;
    let theta = theta(k * h)?;
    let sec = 1.0 / (0.5 * k * h).cos();
    Ok(ResidualReport {
        tau_norm: tau.norm,
        beta0,
        beta_l,
        tau_bound: l * theta * h * h / 12.0 * f3,
        beta_bound: 2.0 * (l * theta).sqrt() * sec.abs() * h * h / 6.0 * f2,
    })
}

/// Right-hand side of the `k‖e‖_{0,h}` convergence bound:
/// `Θ·A₀·(L h²/12·‖f'''‖ + h²/3·‖f''‖)`.
pub fn convergence_bound(p: &HelmholtzProblem, n: usize) -> Result<f64> {
    let grid = p.grid(n)?;
    let (k, h, l) = (p.k, grid.h(), p.length);
    nyquist_guard(k, h, p.nyquist_tol)?;
    let (f2, f3) = source_sobolev_norms(p)?;
    let theta = theta(k * h)?;
    let a0 = stability_constant_a0(k * h, k * l, l)?;
    Ok(theta * a0 * (l * h * h / 12.0 * f3 + h * h / 3.0 * f2))
}

/// How well the grid error `e = u_h - u(x_i)` satisfies the BPF system
/// driven by its own residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorEquationCheck {
    pub error: GridFunction,
    /// `max_i |(A e)_i + r_i|` with `r = (β₀, τ_1, .., τ_{n-1}, β_L)`.
    pub defect: f64,
    /// `max_i |r_i|`.
    pub residual_scale: f64,
    /// `ε·‖A‖∞·max(‖u_h‖∞, ‖u‖∞)`, the size of rounding in `A e`.
    pub roundoff_floor: f64,
}

impl ErrorEquationCheck {
    pub fn relative_defect(&self) -> f64 {
        self.defect / self.residual_scale.max(f64::MIN_POSITIVE)
    }

    /// `defect ≤ rel_tol·max|r| + 100·roundoff_floor`.
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.defect <= rel_tol * self.residual_scale + 100.0 * self.roundoff_floor
    }
}

/// In the orientation `u'' + k²u = f` the grid error solves the scheme with
/// the negated residuals as data: interior `-τ_i`, boundary `-β₀`, `-β_L`.
pub fn error_equation_check(
    p: &HelmholtzProblem,
    exact: &ExactSolution,
    n: usize,
) -> Result<ErrorEquationCheck> {
    let grid = p.grid(n)?;
    let uh = solve_scheme(p, n, SchemeKind::Bpf)?.solution;
    let u = sample(|x| (exact.u)(x), &grid)?;
    let e = uh.sub(&u)?;
    let tau = interior_residual(exact, p.k, &grid)?;
    let (beta0, beta_l) = boundary_residuals(exact, p.k, grid.h(), p.length)?;

    let mut r = Vec::with_capacity(n + 1);
    r.push(beta0);
    r.extend_from_slice(&tau.values);
    r.push(beta_l);

    let sys = assemble_bpf(p, n)?;
    let ae = sys.apply(e.values())?;
    let a_norm = (0..=n)
        .map(|i| {
            let mut row = sys.diag[i].norm();
            if i > 0 {
                row += sys.lower[i - 1].norm();
            }
            if i < n {
                row += sys.upper[i].norm();
            }
            row
        })
        .fold(0.0, f64::max);
    let roundoff_floor = f64::EPSILON * a_norm * uh.norm_linf().max(u.norm_linf());
    let defect = ae
        .iter()
        .zip(&r)
        .map(|(a, b)| (a + b).norm())
        .fold(0.0, f64::max);
    let residual_scale = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(ErrorEquationCheck {
        error: e,
        defect,
        residual_scale,
        roundoff_floor,
    })
}
