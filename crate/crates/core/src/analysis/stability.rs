//! Discrete stability inequalities of the BPF scheme evaluated on computed
//! solutions, together with the flux-energy and energy identities.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::numerics::{stability_constant_a0, theta};
use crate::schemes::{apply_one_way_minus, apply_one_way_plus, HelmholtzProblem};

/// Relative slack allowed when comparing the two sides of an inequality.
pub const INEQUALITY_SLACK: f64 = 1e-12;

fn holds(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + INEQUALITY_SLACK) + f64::MIN_POSITIVE
}

/// Both sides of `k‖u_h‖_{0,h} ≤ R` and `√Θ|u_h|_{1,h} ≤ R` with
/// `R = A₀(kh, kL)‖f‖_{0,h} + (√L/2)(|g0| + |gL|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub l2_lhs: f64,
    pub h1_lhs: f64,
    pub rhs: f64,
    /// The source part `A₀‖f‖_{0,h}` of `rhs`.
    pub source_term: f64,
    /// The boundary part `(√L/2)(|g0| + |gL|)` of `rhs`.
    pub data_term: f64,
}

impl StabilityReport {
    pub fn l2_holds(&self) -> bool {
        holds(self.l2_lhs, self.rhs)
    }

    pub fn h1_holds(&self) -> bool {
        holds(self.h1_lhs, self.rhs)
    }

    pub fn holds(&self) -> bool {
        self.l2_holds() && self.h1_holds()
    }
}

fn check_grid(p: &HelmholtzProblem, u_h: &GridFunction) -> Result<()> {
    if (u_h.grid().length() - p.length).abs() > 1e-14 * p.length {
        return Err(Error::DimensionMismatch(format!(
            "grid length {} does not match problem length {}",
            u_h.grid().length(),
            p.length
        )));
    }
    Ok(())
}

pub fn stability_bound_check(p: &HelmholtzProblem, u_h: &GridFunction) -> Result<StabilityReport> {
    check_grid(p, u_h)?;
    let grid = u_h.grid();
    let (k, h, l) = (p.k, grid.h(), p.length);
    let th = theta(k * h)?;
    let a0 = stability_constant_a0(k * h, k * l, l)?;
    let f = p.sample_source(grid)?;
    let source_term = a0 * f.norm_l2h();
    let data_term = 0.5 * l.sqrt() * (p.g0.norm() + p.gl.norm());
    Ok(StabilityReport {
        l2_lhs: k * u_h.norm_l2h(),
        h1_lhs: th.sqrt() * u_h.seminorm_h1h(),
        rhs: source_term + data_term,
        source_term,
        data_term,
    })
}

/// `‖D⁺u‖² + ‖D⁻u‖² ≤ (L²/Θ)‖f‖²` and the auxiliary bound
/// `Θ cos(kh)|u|²_{1,h} + k²‖u‖² + (k²h/2)(|u₀|² + |u_n|²) ≤ (L²/2Θ)‖f‖²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxReport {
    pub flux_lhs: f64,
    pub flux_rhs: f64,
    pub auxiliary_lhs: f64,
    pub auxiliary_rhs: f64,
    /// `kh < π/2`, where the auxiliary bound controls `|u|_{1,h}`.
    pub coercive: bool,
}

impl FluxReport {
    pub fn flux_holds(&self) -> bool {
        holds(self.flux_lhs, self.flux_rhs)
    }

    pub fn auxiliary_holds(&self) -> bool {
        holds(self.auxiliary_lhs, self.auxiliary_rhs)
    }
}

/// `‖D⁺u‖²_{0,h} + ‖D⁻u‖²_{0,h}` over the staggered index sets.
pub fn flux_energy(u: &GridFunction, k: f64) -> Result<f64> {
    let h = u.grid().h();
    let plus = apply_one_way_plus(u, k)?;
    let minus = apply_one_way_minus(u, k)?;
    Ok(h * plus.iter().chain(&minus).map(|z| z.norm_sqr()).sum::<f64>())
}

/// `2Θ cos(kh)|u|²_{1,h} + 2k²‖u‖²_{0,h} + k²h(|u₀|² + |u_n|²)`.
pub fn flux_energy_rhs(u: &GridFunction, k: f64) -> Result<f64> {
    let h = u.grid().h();
    let th = theta(k * h)?;
    let v = u.values();
    let ends = v[0].norm_sqr() + v[v.len() - 1].norm_sqr();
    Ok(2.0 * th * (k * h).cos() * u.seminorm_h1h().powi(2)
        + 2.0 * k * k * u.norm_l2h().powi(2)
        + k * k * h * ends)
}

/// Requires homogeneous radiation data `g0 = gL = 0`.
pub fn flux_estimate_check(p: &HelmholtzProblem, u_h: &GridFunction) -> Result<FluxReport> {
    check_grid(p, u_h)?;
    if p.g0 != Complex64::new(0.0, 0.0) || p.gl != Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidInput(
            "flux estimate needs homogeneous radiation data".into(),
        ));
    }
    let grid = u_h.grid();
    let (k, h, l) = (p.k, grid.h(), p.length);
    let th = theta(k * h)?;
    let f2 = p.sample_source(grid)?.norm_l2h().powi(2);
    let flux_lhs = flux_energy(u_h, k)?;
    Ok(FluxReport {
        flux_lhs,
        flux_rhs: l * l / th * f2,
        auxiliary_lhs: 0.5 * flux_energy_rhs(u_h, k)?,
        auxiliary_rhs: l * l / (2.0 * th) * f2,
        coercive: k * h < 0.5 * std::f64::consts::PI,
    })
}

/// Both sides of the real-part energy identity for a homogeneous-radiation
/// BPF solution. With interior rows `Θ·Δ_h u + k²u = f` it reads
/// `Θ|u|²_{1,h} - (k²h/2)(|u₀|² + |u_n|²) - k²‖u‖²_{0,h} = -Re(f, u)_h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyIdentity {
    pub lhs: f64,
    pub rhs: f64,
}

impl EnergyIdentity {
    /// `|lhs - rhs|` relative to the largest term.
    pub fn relative_defect(&self, scale: f64) -> f64 {
        (self.lhs - self.rhs).abs() / scale.max(f64::MIN_POSITIVE)
    }
}

pub fn energy_identity(p: &HelmholtzProblem, u_h: &GridFunction) -> Result<(EnergyIdentity, f64)> {
    check_grid(p, u_h)?;
    let grid = u_h.grid();
    let (k, h) = (p.k, grid.h());
    let th = theta(k * h)?;
    let v = u_h.values();
    let ends = v[0].norm_sqr() + v[v.len() - 1].norm_sqr();
    let f = p.sample_source(grid)?;
    let fu = f.inner_h(u_h)?;
    let t1 = th * u_h.seminorm_h1h().powi(2);
    let t2 = 0.5 * k * k * h * ends;
    let t3 = k * k * u_h.norm_l2h().powi(2);
    let scale = t1.max(t2).max(t3).max(fu.norm());
    Ok((
        EnergyIdentity {
            lhs: t1 - t2 - t3,
            rhs: -fu.re,
        },
        scale,
    ))
}
